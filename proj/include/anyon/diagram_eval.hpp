// Copyright 2026 The anyonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "anyon/diagram.hpp"
#include "anyon/fusion_space.hpp"

namespace anyon {

/// A diagram reduced to the fusion-tree basis: for every total charge c, a
/// matrix from left-canonical trees of `bottom` to those of `top`.
///
/// Normalization: a closed a-loop is d_a, the zig-zag is the identity,
/// fuse(a,b->c) after split(c->a,b) is sqrt(d_a d_b / d_c) id_c, and an
/// x-loop around lines of total charge b is S_xb / S_0b.
struct Morphism {
  std::vector<Label> bottom;
  std::vector<Label> top;
  std::map<Label, CMatrix> blocks;
};

/// Order in which side-by-side composition is reduced. All strategies give
/// the same value; they differ in which F-move paths realize it.
enum class EvalStrategy {
  Direct,         // tensor products evaluated as written
  RightFold,      // a | b | c as a | (b | c)
  SliceBottomUp,  // a | b as (a | id) ; (id | b)
  SliceTopDown,   // a | b as (id | b) ; (a | id)
};

class DiagramEvaluator {
 public:
  explicit DiagramEvaluator(const CategorySpec& spec) : spec_(&spec), spaces_(spec) {}

  const CategorySpec& spec() const { return *spec_; }
  FusionSpaceCache& spaces() { return spaces_; }

  Morphism evaluate(const Diagram& d, EvalStrategy strategy = EvalStrategy::Direct);

  Morphism identity(const std::vector<Label>& strands);
  Morphism compose(const Morphism& lower, const Morphism& upper);
  Morphism tensor(const Morphism& left, const Morphism& right);

  /// Weight (d_a d_b / d_c)^{1/4} carried by a trivalent vertex.
  double vertex_weight(Label a, Label b, Label c) const;

 private:
  Morphism generator(const Diagram& d);
  Morphism loop_layer(const std::vector<Label>& layer, int first, int last,
                      const std::vector<Complex>& value_by_charge);
  Morphism tensor_as(const Diagram& l, const Diagram& r, EvalStrategy s);

  const CategorySpec* spec_;
  FusionSpaceCache spaces_;
};

/// Index of a standard basis diagram: split tree `top` over the top boundary
/// and fuse tree `bottom` over the bottom boundary, joined through `total`.
struct BasisKey {
  Label total = kVacuum;
  TreeEdges top;
  TreeEdges bottom;
  auto operator<=>(const BasisKey&) const = default;
};

/// Linear combination of standard basis diagrams with fixed boundaries.
class DiagramValue {
 public:
  DiagramValue() = default;
  DiagramValue(std::vector<Label> bottom, std::vector<Label> top)
      : bottom_(std::move(bottom)), top_(std::move(top)) {}

  const std::vector<Label>& bottom() const { return bottom_; }
  const std::vector<Label>& top() const { return top_; }
  bool closed() const { return bottom_.empty() && top_.empty(); }
  const std::map<BasisKey, Complex>& terms() const { return terms_; }

  /// Coefficient of a basis element (zero if absent).
  Complex coefficient(const BasisKey& key) const;
  /// Value of a closed diagram.
  Complex scalar() const;

  void add(const BasisKey& key, Complex c);
  DiagramValue& operator+=(const DiagramValue& other);
  DiagramValue& operator*=(Complex s);
  friend DiagramValue operator+(DiagramValue a, const DiagramValue& b) { return a += b; }
  friend DiagramValue operator*(Complex s, DiagramValue a) { return a *= s; }

  /// Largest coefficient difference, over the union of terms.
  double distance(const DiagramValue& other) const;

 private:
  std::vector<Label> bottom_;
  std::vector<Label> top_;
  std::map<BasisKey, Complex> terms_;
};

/// Entries below this magnitude are dropped from a DiagramValue.
inline constexpr double kCoefficientCutoff = 1e-14;

DiagramValue to_value(const Morphism& m, FusionSpaceCache& spaces);

/// Value of a diagram with empty boundaries. Throws ValidationError otherwise.
Complex evaluate_closed(const Diagram& d, const CategorySpec& spec,
                        EvalStrategy strategy = EvalStrategy::Direct);

/// Coefficients of a diagram in the standard basis of its boundary.
DiagramValue reduce_open(const Diagram& d, const CategorySpec& spec,
                         EvalStrategy strategy = EvalStrategy::Direct);

/// Diagram whose reduction is exactly `key` with coefficient 1.
Diagram basis_diagram(const CategorySpec& spec, const std::vector<Label>& bottom,
                      const std::vector<Label>& top, const BasisKey& key);

/// Human-readable listing, one term per line.
std::string format_value(const DiagramValue& v, const CategorySpec& spec);

}  // namespace anyon
