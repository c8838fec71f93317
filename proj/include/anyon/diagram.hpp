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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "anyon/category.hpp"

namespace anyon {

/// Error in the diagram text or in the typing of a composed diagram.
class DiagramError : public FormatError {
 public:
  DiagramError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A planar labeled tangle as a composition term.
///
/// Boundaries are charge lists read left to right. Vertical composition
/// stacks `upper` on top of `lower`; the time/reading direction is bottom to
/// top, so cup(a) has an empty bottom and top [dual(a), a].
class Diagram {
 public:
  enum class Kind {
    Empty,     // no strands; value 1
    Identity,  // one strand
    Cup,       // vacuum -> [abar, a]
    Cap,       // [abar, a] -> vacuum
    Split,     // [c] -> [a, b]
    Fuse,      // [a, b] -> [c]
    Omega,     // omega_a loop around strands first..last of a layer
    Loop,      // plain x-loop around strands first..last of a layer
    Scalar,
    Tensor,    // side by side
    Compose,   // children[0] below children[1]
    Sum,       // formal linear combination of equally typed diagrams
  };

  static Diagram empty();
  static Diagram identity(const CategorySpec& spec, Label a);
  static Diagram identity(const CategorySpec& spec, const std::vector<Label>& strands);
  static Diagram cup(const CategorySpec& spec, Label a);
  static Diagram cap(const CategorySpec& spec, Label a);
  static Diagram split(const CategorySpec& spec, Label parent, Label left, Label right);
  static Diagram fuse(const CategorySpec& spec, Label left, Label right, Label parent);
  static Diagram omega(const CategorySpec& spec, Label target, std::vector<Label> layer, int first,
                       int last);
  static Diagram loop(const CategorySpec& spec, Label charge, std::vector<Label> layer, int first,
                      int last);
  static Diagram scalar(Complex value);

  static Diagram tensor(const Diagram& left, const Diagram& right);
  static Diagram compose(const Diagram& lower, const Diagram& upper);
  static Diagram sum(const Diagram& a, const Diagram& b);

  Kind kind() const { return node_->kind; }
  const std::vector<Label>& bottom() const { return node_->bottom; }
  const std::vector<Label>& top() const { return node_->top; }
  bool closed() const { return bottom().empty() && top().empty(); }

  /// Charges of a generator: Identity/Cup/Cap {a}; Split {parent, left, right};
  /// Fuse {left, right, parent}; Omega/Loop {charge}.
  const std::vector<Label>& labels() const { return node_->labels; }
  int first() const { return node_->first; }
  int last() const { return node_->last; }
  Complex value() const { return node_->value; }
  const std::vector<Diagram>& children() const { return node_->children; }

  /// Generators other than identities, empties and composition nodes.
  int generator_count() const;

  /// Canonical text form accepted by parse_diagram.
  std::string to_string(const CategorySpec& spec) const;

 private:
  struct Node {
    Kind kind = Kind::Empty;
    std::vector<Label> labels;
    int first = 0;
    int last = -1;
    Complex value{1.0, 0.0};
    std::vector<Diagram> children;
    std::vector<Label> bottom;
    std::vector<Label> top;
  };
  explicit Diagram(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Diagram make(Node n) { return Diagram(std::make_shared<const Node>(std::move(n))); }

  std::shared_ptr<const Node> node_;
};

inline Diagram operator|(const Diagram& l, const Diagram& r) { return Diagram::tensor(l, r); }

/// Values for `$name` placeholders in diagram text.
using DiagramBindings = std::map<std::string, Label>;

/// Parses the diagram DSL (grammar in docs/diagram_dsl.md). Errors carry
/// 1-based line/column positions. `line_offset` shifts reported lines when
/// the text is a fragment of a larger file.
Diagram parse_diagram(std::string_view text, const CategorySpec& spec,
                      const DiagramBindings& bindings = {}, int line_offset = 0);

}  // namespace anyon
