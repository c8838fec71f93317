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

#include "anyon/anyon_state.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <tuple>
#include <type_traits>

#include "anyon/diagram_eval.hpp"
#include "anyon/fusion_space.hpp"

namespace anyon {

// ---------------------------------------------------------------------------
// TreeShape

TreeShape TreeShape::left_canonical(int atoms) {
  if (atoms < 1) throw ValidationError("a fusion tree needs at least one anyon");
  TreeShape s;
  s.atoms_ = atoms;
  const int nodes = 2 * atoms - 1;
  s.left_.assign(nodes, -1);
  s.right_.assign(nodes, -1);
  s.leaf_flag_.assign(nodes, 0);
  for (int a = 0; a < atoms; ++a) s.leaf_flag_[a] = 1;
  for (int j = 2; j <= atoms; ++j) {
    const int id = atoms + j - 2;
    s.left_[id] = j == 2 ? 0 : id - 1;
    s.right_[id] = j - 1;
  }
  s.root_ = nodes - 1;
  s.rebuild();
  return s;
}

void TreeShape::rebuild() {
  parent_.assign(left_.size(), -1);
  for (int v = 0; v < node_count(); ++v) {
    if (left_[v] >= 0) parent_[left_[v]] = v;
    if (right_[v] >= 0) parent_[right_[v]] = v;
  }
  leaves_.clear();
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (leaf_flag_[v]) {
      leaves_.push_back(v);
    } else {
      stack.push_back(right_[v]);
      stack.push_back(left_[v]);
    }
  }
}

bool TreeShape::is_exposed_vertex(int node) const {
  if (node < 0 || node >= node_count() || is_atom(node)) return false;
  for (int v = node; v >= 0; v = parent_[v]) {
    if (leaf_flag_[v]) return false;
  }
  return true;
}

bool TreeShape::is_left_canonical() const {
  int node = root_;
  for (int k = leaf_count() - 1; k >= 1; --k) {
    if (leaf_flag_[node] || right_[node] != leaves_[k]) return false;
    node = left_[node];
  }
  return node == leaves_[0];
}

int TreeShape::prefix_node(int m) const {
  if (!is_left_canonical()) throw ValidationError("prefix_node: shape is not left-canonical");
  if (m < 1 || m > leaf_count()) {
    throw ValidationError("prefix length " + std::to_string(m) + " outside 1.." +
                          std::to_string(leaf_count()));
  }
  int node = root_;
  for (int k = leaf_count(); k > m; --k) node = left_[node];
  return node;
}

TreeShape TreeShape::rotated(int x, MoveDirection dir) const {
  if (!is_exposed_vertex(x)) {
    throw ValidationError("F-move slot " + std::to_string(x) + " is not an exposed tree vertex");
  }
  TreeShape s = *this;
  if (dir == MoveDirection::LeftToRight) {
    const int y = left_[x];
    if (!is_exposed_vertex(y)) {
      throw ValidationError("F-move at " + std::to_string(x) + ": left child is a leaf");
    }
    const int a = left_[y], b = right_[y], c = right_[x];
    s.left_[x] = a;
    s.right_[x] = y;
    s.left_[y] = b;
    s.right_[y] = c;
  } else {
    const int y = right_[x];
    if (!is_exposed_vertex(y)) {
      throw ValidationError("F-move at " + std::to_string(x) + ": right child is a leaf");
    }
    const int a = left_[x], b = left_[y], c = right_[y];
    s.left_[x] = y;
    s.right_[x] = c;
    s.left_[y] = a;
    s.right_[y] = b;
  }
  s.rebuild();
  return s;
}

TreeShape TreeShape::fused(int i) const {
  if (i < 0 || i + 1 >= leaf_count()) {
    throw ValidationError("fuse: leaf index " + std::to_string(i) + " has no right neighbour");
  }
  const int l = leaves_[i], r = leaves_[i + 1];
  const int p = parent_[l];
  if (p < 0 || left_[p] != l || right_[p] != r) {
    throw ValidationError("fuse: leaves " + std::to_string(i) + " and " + std::to_string(i + 1) +
                          " are not siblings");
  }
  TreeShape s = *this;
  s.leaf_flag_[l] = 0;
  s.leaf_flag_[r] = 0;
  s.leaf_flag_[p] = 1;
  s.rebuild();
  return s;
}

TreeShape TreeShape::renumbered(std::vector<int>* old_to_new) const {
  std::vector<int> map(left_.size(), -1);
  for (int a = 0; a < atoms_; ++a) map[a] = a;
  int next = atoms_;
  // Iterative post-order over internal nodes.
  std::vector<std::pair<int, bool>> stack{{root_, false}};
  while (!stack.empty()) {
    auto [v, done] = stack.back();
    stack.pop_back();
    if (is_atom(v)) continue;
    if (done) {
      map[v] = next++;
    } else {
      stack.push_back({v, true});
      stack.push_back({right_[v], false});
      stack.push_back({left_[v], false});
    }
  }
  TreeShape s;
  s.atoms_ = atoms_;
  s.left_.assign(left_.size(), -1);
  s.right_.assign(left_.size(), -1);
  s.leaf_flag_.assign(left_.size(), 0);
  for (int v = 0; v < node_count(); ++v) {
    const int w = map[v];
    if (left_[v] >= 0) s.left_[w] = map[left_[v]];
    if (right_[v] >= 0) s.right_[w] = map[right_[v]];
    s.leaf_flag_[w] = leaf_flag_[v];
  }
  s.root_ = map[root_];
  s.rebuild();
  if (old_to_new) *old_to_new = std::move(map);
  return s;
}

TreeShape TreeShape::subtree(int node, std::vector<int>* old_to_new) const {
  std::vector<int> atoms_in_order;
  std::vector<int> internal_post;
  std::vector<std::pair<int, bool>> stack{{node, false}};
  while (!stack.empty()) {
    auto [v, done] = stack.back();
    stack.pop_back();
    if (is_atom(v)) {
      atoms_in_order.push_back(v);
    } else if (done) {
      internal_post.push_back(v);
    } else {
      stack.push_back({v, true});
      stack.push_back({right_[v], false});
      stack.push_back({left_[v], false});
    }
  }
  std::vector<int> map(left_.size(), -1);
  const int k = static_cast<int>(atoms_in_order.size());
  for (int i = 0; i < k; ++i) map[atoms_in_order[i]] = i;
  for (std::size_t i = 0; i < internal_post.size(); ++i) map[internal_post[i]] = k + static_cast<int>(i);

  TreeShape s;
  s.atoms_ = k;
  s.left_.assign(2 * k - 1, -1);
  s.right_.assign(2 * k - 1, -1);
  s.leaf_flag_.assign(2 * k - 1, 0);
  for (int v = 0; v < node_count(); ++v) {
    const int w = map[v];
    if (w < 0) continue;
    if (left_[v] >= 0) s.left_[w] = map[left_[v]];
    if (right_[v] >= 0) s.right_[w] = map[right_[v]];
    s.leaf_flag_[w] = leaf_flag_[v];
  }
  // Inside a composite, the subtree root becomes a free-standing leaf.
  s.root_ = map[node];
  if (!is_exposed_vertex(node) && !leaf_flag_[node]) s.leaf_flag_[s.root_] = 1;
  s.rebuild();
  if (old_to_new) *old_to_new = std::move(map);
  return s;
}

std::string TreeShape::to_string() const {
  std::string out;
  auto rec = [&](auto&& self, int v) -> void {
    if (is_atom(v)) {
      out += std::to_string(v);
      return;
    }
    const bool composite = leaf_flag_[v] != 0;
    out += composite ? "{" : "(";
    self(self, left_[v]);
    out += " ";
    self(self, right_[v]);
    out += composite ? "}" : ")";
  };
  rec(rec, root_);
  return out;
}

// ---------------------------------------------------------------------------
// FusionBasis

namespace {

std::vector<int> shape_key(const TreeShape& s) {
  std::vector<int> key{s.atoms(), s.root()};
  for (int v = 0; v < s.node_count(); ++v) {
    key.push_back(s.left(v));
    key.push_back(s.right(v));
    key.push_back(s.is_leaf(v) ? 1 : 0);
  }
  return key;
}

struct BasisRegistry {
  std::mutex mu;
  std::map<std::uint64_t, std::shared_ptr<const CategorySpec>> specs;
  std::map<std::tuple<std::uint64_t, std::vector<Label>, std::vector<int>, std::vector<Label>>,
           BasisPtr>
      bases;
  std::map<std::tuple<const FusionBasis*, int, int>, std::unique_ptr<BasisChange>> changes;
};

BasisRegistry& registry() {
  static BasisRegistry r;
  return r;
}

void enumerate(const CategorySpec& spec, const TreeShape& shape, const std::vector<Label>& atoms,
               int node, std::vector<std::vector<Label>>& out) {
  if (shape.is_atom(node)) {
    std::vector<Label> v(shape.node_count(), -1);
    v[node] = atoms[node];
    out.push_back(std::move(v));
    return;
  }
  std::vector<std::vector<Label>> ls, rs;
  enumerate(spec, shape, atoms, shape.left(node), ls);
  enumerate(spec, shape, atoms, shape.right(node), rs);
  for (const auto& l : ls) {
    for (const auto& r : rs) {
      for (Label c : spec.channels(l[shape.left(node)], r[shape.right(node)])) {
        std::vector<Label> v = l;
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (r[i] >= 0) v[i] = r[i];
        }
        v[node] = c;
        out.push_back(std::move(v));
      }
    }
  }
}

}  // namespace

FusionBasis::FusionBasis(const CategorySpec& spec, std::vector<Label> atoms, TreeShape shape,
                         std::vector<Label> totals)
    : spec_(&spec), atoms_(std::move(atoms)), shape_(std::move(shape)), totals_(std::move(totals)) {
  if (static_cast<int>(atoms_.size()) != shape_.atoms()) {
    throw ValidationError("basis: atom count does not match the tree");
  }
  for (Label a : atoms_) {
    if (a < 0 || a >= spec.rank()) throw ValidationError("basis: charge out of range");
  }
  std::sort(totals_.begin(), totals_.end());
  totals_.erase(std::unique(totals_.begin(), totals_.end()), totals_.end());
  enumerate(spec, shape_, atoms_, shape_.root(), elements_);
  std::erase_if(elements_, [&](const std::vector<Label>& v) {
    return !std::binary_search(totals_.begin(), totals_.end(), v[shape_.root()]);
  });
  std::sort(elements_.begin(), elements_.end());
  for (int i = 0; i < dim(); ++i) index_[elements_[i]] = i;
}

BasisPtr FusionBasis::get(const CategorySpec& spec, const std::vector<Label>& atoms,
                          const TreeShape& shape, const std::vector<Label>& totals) {
  std::vector<Label> sorted = totals;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto& reg = registry();
  std::lock_guard lock(reg.mu);
  auto key = std::make_tuple(spec.serial(), atoms, shape_key(shape), sorted);
  auto it = reg.bases.find(key);
  if (it != reg.bases.end()) return it->second;
  auto& owned = reg.specs[spec.serial()];
  if (!owned) owned = std::make_shared<const CategorySpec>(spec);
  auto basis = std::make_shared<const FusionBasis>(*owned, atoms, shape, sorted);
  reg.bases.emplace(std::move(key), basis);
  return basis;
}

BasisPtr FusionBasis::get_all_totals(const CategorySpec& spec, const std::vector<Label>& atoms,
                                     const TreeShape& shape) {
  return get(spec, atoms, shape, reachable_totals(spec, atoms));
}

int FusionBasis::index_of(const std::vector<Label>& labels) const {
  auto it = index_.find(labels);
  return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// States

AnyonKet::AnyonKet(BasisPtr basis, CVector amplitudes)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
  if (amps_.size() != basis_->dim()) throw ValidationError("ket: amplitude count != basis size");
}

AnyonKet AnyonKet::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ValidationError("cannot normalize the zero ket");
  return AnyonKet(basis_, amps_ / n);
}

AnyonDensityMatrix::AnyonDensityMatrix(BasisPtr basis, CMatrix matrix)
    : basis_(std::move(basis)), rho_(std::move(matrix)) {
  if (rho_.rows() != basis_->dim() || rho_.cols() != basis_->dim()) {
    throw ValidationError("density matrix: shape does not match basis size");
  }
}

AnyonDensityMatrix AnyonDensityMatrix::normalized() const {
  const double t = trace();
  if (!(t > 0.0)) throw ValidationError("cannot normalize a density matrix with zero trace");
  return AnyonDensityMatrix(basis_, rho_ / t);
}

namespace {

std::vector<Label> labels_from_edges(const std::vector<Label>& atoms, const TreeEdges& edges) {
  const int n = static_cast<int>(atoms.size());
  std::vector<Label> v(2 * n - 1);
  for (int a = 0; a < n; ++a) v[a] = atoms[a];
  for (int j = 2; j <= n; ++j) v[n + j - 2] = edges[j - 1];
  return v;
}

AnyonKet ket_from_value(const CategorySpec& spec, const DiagramValue& value) {
  const auto& atoms = value.top();
  auto basis = FusionBasis::get(spec, atoms, TreeShape::left_canonical(static_cast<int>(atoms.size())),
                                {kVacuum});
  CVector amps = CVector::Zero(basis->dim());
  for (const auto& [key, coeff] : value.terms()) {
    const int i = basis->index_of(labels_from_edges(atoms, key.top));
    if (i < 0) throw ValidationError("internal: reduced tree missing from basis");
    amps(i) += coeff;
  }
  AnyonKet k(basis, amps);
  if (k.norm() < 1e-12) throw ValidationError("diagram reduces to the zero state");
  return k.normalized();
}

}  // namespace

AnyonKet create_from_vacuum(const CategorySpec& spec, const std::vector<Label>& pairs) {
  if (pairs.empty()) throw ValidationError("create_from_vacuum: no pairs given");
  Diagram d = Diagram::empty();
  for (Label a : pairs) d = Diagram::tensor(d, Diagram::cup(spec, a));
  return ket_from_value(spec, reduce_open(d, spec));
}

AnyonKet create_from_diagram(const CategorySpec& spec, const Diagram& d) {
  if (!d.bottom().empty()) throw ValidationError("state diagram must have an empty bottom");
  if (d.top().empty()) throw ValidationError("state diagram has no anyons");
  return ket_from_value(spec, reduce_open(d, spec));
}

AnyonDensityMatrix density_from_ket(const AnyonKet& k) {
  return AnyonDensityMatrix(k.basis_ptr(), k.amplitudes() * k.amplitudes().adjoint());
}

// ---------------------------------------------------------------------------
// Basis changes

namespace {

constexpr int kRenumberOp = -1;

std::unique_ptr<BasisChange> build_move(const BasisPtr& basis, int x, MoveDirection dir) {
  const auto& spec = basis->spec();
  const TreeShape& s = basis->shape();
  TreeShape t = s.rotated(x, dir);
  auto change = std::make_unique<BasisChange>();
  change->target = FusionBasis::get(spec, basis->atoms(), t, basis->totals());
  const auto& target = *change->target;
  change->unitary = CMatrix::Zero(target.dim(), basis->dim());
  const bool l2r = dir == MoveDirection::LeftToRight;
  const int y = l2r ? s.left(x) : s.right(x);
  const int na = l2r ? s.left(y) : s.left(x);
  const int nb = l2r ? s.right(y) : s.left(y);
  const int nc = l2r ? s.right(x) : s.right(y);
  for (int j = 0; j < basis->dim(); ++j) {
    const auto& v = basis->element(j);
    const Label a = v[na], b = v[nb], c = v[nc], d = v[x], inner = v[y];
    const auto& candidates = l2r ? spec.channels(b, c) : spec.channels(a, b);
    for (Label g : candidates) {
      Complex coeff;
      if (l2r) {
        if (!spec.fuses(a, g, d)) continue;
        coeff = spec.F(a, b, c, d, inner, g);
      } else {
        if (!spec.fuses(g, c, d)) continue;
        coeff = std::conj(spec.F(a, b, c, d, g, inner));
      }
      if (coeff == Complex(0.0, 0.0)) continue;
      std::vector<Label> w = v;
      w[y] = g;
      const int i = target.index_of(w);
      if (i < 0) throw ValidationError("internal: F-move left the basis");
      change->unitary(i, j) += coeff;
    }
  }
  return change;
}

std::unique_ptr<BasisChange> build_renumber(const BasisPtr& basis) {
  std::vector<int> map;
  TreeShape t = basis->shape().renumbered(&map);
  auto change = std::make_unique<BasisChange>();
  change->target = FusionBasis::get(basis->spec(), basis->atoms(), t, basis->totals());
  change->unitary = CMatrix::Zero(basis->dim(), basis->dim());
  for (int j = 0; j < basis->dim(); ++j) {
    const auto& v = basis->element(j);
    std::vector<Label> w(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) w[map[k]] = v[k];
    change->unitary(change->target->index_of(w), j) = 1.0;
  }
  return change;
}

const BasisChange& cached_change(const BasisPtr& basis, int op, int param) {
  auto& reg = registry();
  const auto key = std::make_tuple(basis.get(), op, param);
  {
    std::lock_guard lock(reg.mu);
    auto it = reg.changes.find(key);
    if (it != reg.changes.end()) return *it->second;
  }
  // Built outside the lock: construction itself interns bases.
  auto built = op == kRenumberOp ? build_renumber(basis)
                                 : build_move(basis, param, static_cast<MoveDirection>(op));
  std::lock_guard lock(reg.mu);
  auto [it, inserted] = reg.changes.emplace(key, std::move(built));
  return *it->second;
}

AnyonKet apply(const AnyonKet& k, const BasisChange& c) {
  return AnyonKet(c.target, c.unitary * k.amplitudes());
}

AnyonDensityMatrix apply(const AnyonDensityMatrix& r, const BasisChange& c) {
  return AnyonDensityMatrix(c.target, c.unitary * r.matrix() * c.unitary.adjoint());
}

/// Moves that bring `s` to a left-canonical exposed tree.
std::vector<int> canonicalizing_moves(TreeShape s) {
  std::vector<int> nodes;
  int node = s.root();
  for (int k = s.leaf_count() - 1; k >= 1; --k) {
    while (s.right(node) != s.leaves()[k]) {
      nodes.push_back(node);
      s = s.rotated(node, MoveDirection::RightToLeft);
    }
    node = s.left(node);
  }
  return nodes;
}

template <typename State>
State canonicalize(State st) {
  for (int node : canonicalizing_moves(st.basis().shape())) {
    st = apply(st, move_change(st.basis_ptr(), node, MoveDirection::RightToLeft));
  }
  std::vector<int> map;
  if (st.basis().shape().renumbered(&map) == st.basis().shape()) return st;
  return apply(st, cached_change(st.basis_ptr(), kRenumberOp, 0));
}

}  // namespace

const BasisChange& move_change(const BasisPtr& basis, int node, MoveDirection dir) {
  return cached_change(basis, static_cast<int>(dir), node);
}

AnyonKet f_move(const AnyonKet& k, int node, MoveDirection dir) {
  return apply(k, move_change(k.basis_ptr(), node, dir));
}

AnyonDensityMatrix f_move(const AnyonDensityMatrix& rho, int node, MoveDirection dir) {
  return apply(rho, move_change(rho.basis_ptr(), node, dir));
}

AnyonKet to_left_canonical(const AnyonKet& k) { return canonicalize(k); }
AnyonDensityMatrix to_left_canonical(const AnyonDensityMatrix& rho) { return canonicalize(rho); }

AnyonDensityMatrix to_prefix_split(const AnyonDensityMatrix& rho, int m) {
  AnyonDensityMatrix r = to_left_canonical(rho);
  const int n = r.leaf_count();
  if (m < 1 || m >= n) {
    throw ValidationError("prefix split needs 1 <= m < " + std::to_string(n) + ", got " +
                          std::to_string(m));
  }
  const int root = r.basis().shape().root();
  for (int k = n; k > m + 1; --k) r = f_move(r, root, MoveDirection::LeftToRight);
  return r;
}

AnyonDensityMatrix from_prefix_split(const AnyonDensityMatrix& rho, int m) {
  AnyonDensityMatrix r = rho;
  const int n = r.leaf_count();
  const int root = r.basis().shape().root();
  for (int k = n; k > m + 1; --k) r = f_move(r, root, MoveDirection::RightToLeft);
  return r;
}

namespace {

/// Embedding matrix (new x old) between bases differing only in totals.
CMatrix totals_embedding(const FusionBasis& from, const FusionBasis& to, const CVector& weight) {
  CMatrix e = CMatrix::Zero(to.dim(), from.dim());
  for (int j = 0; j < from.dim(); ++j) {
    const int i = to.index_of(from.element(j));
    if (i >= 0) {
      e(i, j) = 1.0;
    } else if (std::abs(weight(j)) > 1e-12) {
      throw ValidationError("state has weight on total charge " +
                            from.spec().label_name(from.total(j)) + " outside the target basis");
    }
  }
  return e;
}

}  // namespace

AnyonKet with_totals(const AnyonKet& k, const std::vector<Label>& totals) {
  const auto& b = k.basis();
  auto target = FusionBasis::get(b.spec(), b.atoms(), b.shape(), totals);
  if (target == k.basis_ptr()) return k;
  return AnyonKet(target, totals_embedding(b, *target, k.amplitudes()) * k.amplitudes());
}

AnyonDensityMatrix with_totals(const AnyonDensityMatrix& rho, const std::vector<Label>& totals) {
  const auto& b = rho.basis();
  auto target = FusionBasis::get(b.spec(), b.atoms(), b.shape(), totals);
  if (target == rho.basis_ptr()) return rho;
  const CMatrix e = totals_embedding(b, *target, rho.matrix().diagonal());
  return AnyonDensityMatrix(target, e * rho.matrix() * e.transpose());
}

AnyonDensityMatrix with_all_totals(const AnyonDensityMatrix& rho) {
  return with_totals(rho, reachable_totals(rho.spec(), rho.basis().atoms()));
}

namespace {

template <typename State>
State fuse_impl(const State& st, int i) {
  State s = to_left_canonical(st);
  const int n = s.leaf_count();
  if (i < 0 || i + 1 >= n) {
    throw ValidationError("fuse_leaves: index " + std::to_string(i) + " invalid for " +
                          std::to_string(n) + " leaves");
  }
  if (i > 0) s = f_move(s, s.basis().shape().prefix_node(i + 2), MoveDirection::LeftToRight);
  const auto& b = s.basis();
  // Same labelings on the fused shape, so coordinates carry over unchanged.
  auto target = FusionBasis::get(b.spec(), b.atoms(), b.shape().fused(i), b.totals());
  if constexpr (std::is_same_v<State, AnyonKet>) {
    return to_left_canonical(AnyonKet(target, s.amplitudes()));
  } else {
    return to_left_canonical(AnyonDensityMatrix(target, s.matrix()));
  }
}

}  // namespace

AnyonDensityMatrix fuse_leaves(const AnyonDensityMatrix& rho, int i) { return fuse_impl(rho, i); }
AnyonKet fuse_leaves(const AnyonKet& k, int i) { return fuse_impl(k, i); }

namespace {

std::vector<double> node_distribution(const FusionBasis& b, int node, const CVector& weights) {
  std::vector<double> p(b.spec().rank(), 0.0);
  double total = 0.0;
  for (int j = 0; j < b.dim(); ++j) {
    p[b.element(j)[node]] += weights(j).real();
    total += weights(j).real();
  }
  if (!(total > 0.0)) throw ValidationError("charge distribution of a zero state");
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

std::vector<double> charge_distribution(const AnyonDensityMatrix& rho, int m) {
  const AnyonDensityMatrix r = to_left_canonical(rho);
  const int node = r.basis().shape().prefix_node(m);
  return node_distribution(r.basis(), node, r.matrix().diagonal());
}

std::vector<double> charge_distribution(const AnyonKet& k, int m) {
  const AnyonKet c = to_left_canonical(k);
  const int node = c.basis().shape().prefix_node(m);
  return node_distribution(c.basis(), node, c.amplitudes().cwiseAbs2().cast<Complex>());
}

std::vector<double> leaf_charge_distribution(const AnyonDensityMatrix& rho, int leaf) {
  const auto& s = rho.basis().shape();
  if (leaf < 0 || leaf >= s.leaf_count()) {
    throw ValidationError("leaf index " + std::to_string(leaf) + " out of range");
  }
  return node_distribution(rho.basis(), s.leaves()[leaf], rho.matrix().diagonal());
}

AnyonDensityMatrix trace_out_prefix(const AnyonDensityMatrix& rho, int m) {
  const AnyonDensityMatrix r = to_prefix_split(rho, m);
  const auto& b = r.basis();
  const auto& s = b.shape();
  const int outside = s.right(s.root());

  std::vector<int> map;
  TreeShape out_shape = s.subtree(outside, &map);
  std::vector<Label> out_atoms(out_shape.atoms());
  std::vector<int> inside_nodes;
  for (int v = 0; v < s.node_count(); ++v) {
    if (map[v] >= 0 && s.is_atom(v)) out_atoms[map[v]] = b.atoms()[v];
    if (map[v] < 0 && v != s.root()) inside_nodes.push_back(v);
  }
  auto target = FusionBasis::get_all_totals(b.spec(), out_atoms, out_shape);

  std::vector<int> out_index(b.dim());
  for (int j = 0; j < b.dim(); ++j) {
    std::vector<Label> w(out_shape.node_count());
    for (int v = 0; v < s.node_count(); ++v) {
      if (map[v] >= 0) w[map[v]] = b.element(j)[v];
    }
    out_index[j] = target->index_of(w);
  }
  CMatrix out = CMatrix::Zero(target->dim(), target->dim());
  for (int i = 0; i < b.dim(); ++i) {
    for (int j = 0; j < b.dim(); ++j) {
      const auto& vi = b.element(i);
      const auto& vj = b.element(j);
      if (vi[s.root()] != vj[s.root()]) continue;
      bool same = true;
      for (int v : inside_nodes) same = same && vi[v] == vj[v];
      if (same) out(out_index[i], out_index[j]) += r.matrix()(i, j);
    }
  }
  return to_left_canonical(AnyonDensityMatrix(target, out));
}

double state_distance(const AnyonDensityMatrix& a, const AnyonDensityMatrix& b) {
  AnyonDensityMatrix x = to_left_canonical(a);
  AnyonDensityMatrix y = to_left_canonical(b);
  if (x.basis().atoms() != y.basis().atoms() || !(x.basis().shape() == y.basis().shape())) {
    throw ValidationError("state_distance: states live on different anyons or trees");
  }
  std::vector<Label> totals = x.basis().totals();
  totals.insert(totals.end(), y.basis().totals().begin(), y.basis().totals().end());
  x = with_totals(x, totals);
  y = with_totals(y, totals);
  return trace_distance(x.matrix(), y.matrix());
}

namespace {

std::string format_complex(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", z.real(), z.imag());
  return buf;
}

std::string snapshot_header(const FusionBasis& b, const char* kind) {
  const auto& spec = b.spec();
  std::ostringstream out;
  out << "# anyonsim-state v1 kind=" << kind << " category=" << spec.name() << " dim=" << b.dim()
      << "\n";
  out << "atoms";
  for (Label a : b.atoms()) out << " " << spec.label_name(a);
  out << "\nshape " << b.shape().to_string() << "\ntotals";
  for (Label t : b.totals()) out << " " << spec.label_name(t);
  out << "\n";
  for (int i = 0; i < b.dim(); ++i) {
    out << "basis " << i;
    for (Label l : b.element(i)) out << " " << spec.label_name(l);
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string to_snapshot(const AnyonKet& k) {
  std::string out = snapshot_header(k.basis(), "ket");
  for (int i = 0; i < k.basis().dim(); ++i) {
    const Complex z = k.amplitudes()(i);
    if (z != Complex(0.0, 0.0)) out += "amp " + std::to_string(i) + " " + format_complex(z) + "\n";
  }
  return out;
}

std::string to_snapshot(const AnyonDensityMatrix& rho) {
  std::string out = snapshot_header(rho.basis(), "density");
  for (int i = 0; i < rho.basis().dim(); ++i) {
    for (int j = 0; j < rho.basis().dim(); ++j) {
      const Complex z = rho.matrix()(i, j);
      if (z != Complex(0.0, 0.0)) {
        out += "entry " + std::to_string(i) + " " + std::to_string(j) + " " + format_complex(z) +
               "\n";
      }
    }
  }
  return out;
}

}  // namespace anyon
