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
#include <vector>

#include "anyon/category.hpp"
#include "anyon/diagram.hpp"

namespace anyon {

enum class MoveDirection {
  LeftToRight,  // ((A B)_e C)_d -> (A (B C)_f)_d
  RightToLeft,  // (A (B C)_f)_d -> ((A B)_e C)_d
};

inline MoveDirection inverse(MoveDirection d) {
  return d == MoveDirection::LeftToRight ? MoveDirection::RightToLeft
                                         : MoveDirection::LeftToRight;
}

/// Binary fusion tree over atomic anyons 0..A-1.
///
/// Node ids 0..A-1 are the atoms; A..2A-2 are internal vertices. Some
/// internal nodes may be marked as leaves: these are composites produced by
/// fuse_leaves, whose own subtree is kept but no longer addressed by moves.
/// The exposed leaves, left to right, are what measurements index.
class TreeShape {
 public:
  /// ((x0 x1) x2) ... with internal node A+j-2 carrying the first j atoms.
  static TreeShape left_canonical(int atoms);

  int atoms() const { return atoms_; }
  int node_count() const { return static_cast<int>(left_.size()); }
  int root() const { return root_; }
  int left(int node) const { return left_[node]; }
  int right(int node) const { return right_[node]; }
  int parent(int node) const { return parent_[node]; }
  bool is_atom(int node) const { return node < atoms_; }

  const std::vector<int>& leaves() const { return leaves_; }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }
  bool is_leaf(int node) const { return leaf_flag_[node] != 0; }
  /// Internal node of the exposed tree (above every leaf).
  bool is_exposed_vertex(int node) const;

  /// Exposed tree is ((L0 L1) L2) ...
  bool is_left_canonical() const;
  /// Node carrying the total of exposed leaves 0..m-1 in a left-canonical
  /// shape; m = leaf_count() gives the root.
  int prefix_node(int m) const;

  /// Shape after an F-move at `node`; the moved inner vertex keeps its id.
  /// Throws ValidationError if the move is not available there.
  TreeShape rotated(int node, MoveDirection dir) const;
  /// Marks the parent of leaves i and i+1 as a leaf; they must be siblings.
  TreeShape fused(int i) const;
  /// Same tree with internal nodes renumbered in post-order.
  TreeShape renumbered(std::vector<int>* old_to_new) const;
  /// Shape of the subtree under `node`, atoms renumbered from 0.
  TreeShape subtree(int node, std::vector<int>* old_to_new) const;

  /// Nested text: atoms by index, composite leaves in braces.
  std::string to_string() const;

  bool operator==(const TreeShape& o) const = default;

 private:
  void rebuild();

  int atoms_ = 0;
  int root_ = 0;
  std::vector<int> left_;
  std::vector<int> right_;
  std::vector<int> parent_;
  std::vector<char> leaf_flag_;
  std::vector<int> leaves_;
};

/// Orthonormal basis of admissible labelings of a tree over fixed atoms.
///
/// An element assigns a charge to every node; elements are sorted
/// lexicographically by that vector. Bases are interned: equal arguments
/// return the same object, so pointer equality means equal bases.
class FusionBasis {
 public:
  static std::shared_ptr<const FusionBasis> get(const CategorySpec& spec,
                                                const std::vector<Label>& atoms,
                                                const TreeShape& shape,
                                                const std::vector<Label>& totals);
  /// All totals reachable from the atoms.
  static std::shared_ptr<const FusionBasis> get_all_totals(const CategorySpec& spec,
                                                           const std::vector<Label>& atoms,
                                                           const TreeShape& shape);

  const CategorySpec& spec() const { return *spec_; }
  const std::vector<Label>& atoms() const { return atoms_; }
  const TreeShape& shape() const { return shape_; }
  const std::vector<Label>& totals() const { return totals_; }
  int dim() const { return static_cast<int>(elements_.size()); }
  const std::vector<Label>& element(int i) const { return elements_[i]; }
  const std::vector<std::vector<Label>>& elements() const { return elements_; }
  /// Index of a labeling, or -1.
  int index_of(const std::vector<Label>& labels) const;
  Label total(int i) const { return elements_[i][shape_.root()]; }

  FusionBasis(const CategorySpec& spec, std::vector<Label> atoms, TreeShape shape,
              std::vector<Label> totals);

 private:
  const CategorySpec* spec_;
  std::vector<Label> atoms_;
  TreeShape shape_;
  std::vector<Label> totals_;
  std::vector<std::vector<Label>> elements_;
  std::map<std::vector<Label>, int> index_;
};

using BasisPtr = std::shared_ptr<const FusionBasis>;

class AnyonKet {
 public:
  AnyonKet(BasisPtr basis, CVector amplitudes);

  const FusionBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const CVector& amplitudes() const { return amps_; }
  const CategorySpec& spec() const { return basis_->spec(); }
  int leaf_count() const { return basis_->shape().leaf_count(); }

  double norm() const { return amps_.norm(); }
  AnyonKet normalized() const;

 private:
  BasisPtr basis_;
  CVector amps_;
};

class AnyonDensityMatrix {
 public:
  AnyonDensityMatrix(BasisPtr basis, CMatrix matrix);

  const FusionBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const CMatrix& matrix() const { return rho_; }
  const CategorySpec& spec() const { return basis_->spec(); }
  int leaf_count() const { return basis_->shape().leaf_count(); }

  double trace() const { return rho_.trace().real(); }
  AnyonDensityMatrix normalized() const;

 private:
  BasisPtr basis_;
  CMatrix rho_;
};

/// Ket of leaves (dual(a_1), a_1, dual(a_2), a_2, ...), total charge 0, read
/// off the reduced diagram cup(a_1) | cup(a_2) | ... and normalized.
AnyonKet create_from_vacuum(const CategorySpec& spec, const std::vector<Label>& pairs);
/// Ket of the normalized reduction of a diagram with empty bottom boundary.
AnyonKet create_from_diagram(const CategorySpec& spec, const Diagram& d);

AnyonDensityMatrix density_from_ket(const AnyonKet& k);

/// Unitary of an F-move on `basis`, mapping old coordinates to new ones.
/// Results are cached and shared across threads.
struct BasisChange {
  BasisPtr target;
  CMatrix unitary;
};
const BasisChange& move_change(const BasisPtr& basis, int node, MoveDirection dir);

AnyonKet f_move(const AnyonKet& k, int node, MoveDirection dir);
AnyonDensityMatrix f_move(const AnyonDensityMatrix& rho, int node, MoveDirection dir);

/// Rewrites to the left-canonical exposed tree with post-order node ids.
AnyonKet to_left_canonical(const AnyonKet& k);
AnyonDensityMatrix to_left_canonical(const AnyonDensityMatrix& rho);

/// Rotates a state at the root until the exposed tree splits as
/// (left-canonical prefix of m leaves, rest). from_prefix_split undoes it.
AnyonDensityMatrix to_prefix_split(const AnyonDensityMatrix& rho, int m);
AnyonDensityMatrix from_prefix_split(const AnyonDensityMatrix& rho, int m);

/// Re-expresses a state over a basis with the same atoms and shape but a
/// different total set. Amplitude on dropped totals must be zero.
AnyonKet with_totals(const AnyonKet& k, const std::vector<Label>& totals);
AnyonDensityMatrix with_totals(const AnyonDensityMatrix& rho, const std::vector<Label>& totals);
AnyonDensityMatrix with_all_totals(const AnyonDensityMatrix& rho);

/// Replaces exposed leaves i and i+1 by their composite. Coherence between
/// composite charges is kept.
AnyonDensityMatrix fuse_leaves(const AnyonDensityMatrix& rho, int i);
AnyonKet fuse_leaves(const AnyonKet& k, int i);

/// Probability of each charge (indexed by label) for the total of exposed
/// leaves 0..m-1, 1 <= m <= n.
std::vector<double> charge_distribution(const AnyonDensityMatrix& rho, int m);
std::vector<double> charge_distribution(const AnyonKet& k, int m);
/// Probability of each charge of one exposed leaf.
std::vector<double> leaf_charge_distribution(const AnyonDensityMatrix& rho, int leaf);

/// Anyonic partial trace over exposed leaves 0..m-1, 1 <= m < n. The result
/// lives on the remaining leaves with every reachable total.
AnyonDensityMatrix trace_out_prefix(const AnyonDensityMatrix& rho, int m);

/// Trace distance after bringing both states to the same left-canonical
/// basis. Throws if atoms or shapes differ.
double state_distance(const AnyonDensityMatrix& a, const AnyonDensityMatrix& b);

/// Structured text: header, one line per basis element, nonzero entries.
std::string to_snapshot(const AnyonKet& k);
std::string to_snapshot(const AnyonDensityMatrix& rho);

}  // namespace anyon
