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

#include "anyon/fusion_space.hpp"

#include <algorithm>

namespace anyon {

namespace {

void extend_trees(const CategorySpec& spec, std::span<const Label> leaves, TreeEdges& prefix,
                  std::vector<TreeEdges>& out) {
  const std::size_t k = prefix.size();
  if (k == leaves.size()) {
    out.push_back(prefix);
    return;
  }
  if (k == 0) {
    prefix.push_back(leaves[0]);
    extend_trees(spec, leaves, prefix, out);
    prefix.pop_back();
    return;
  }
  for (Label e : spec.channels(prefix.back(), leaves[k])) {
    prefix.push_back(e);
    extend_trees(spec, leaves, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<TreeEdges> left_canonical_trees(const CategorySpec& spec, std::span<const Label> leaves,
                                            Label total) {
  std::vector<TreeEdges> all;
  if (leaves.empty()) {
    if (total == kVacuum) all.emplace_back();
    return all;
  }
  TreeEdges prefix;
  extend_trees(spec, leaves, prefix, all);
  std::erase_if(all, [&](const TreeEdges& t) { return t.back() != total; });
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<Label> reachable_totals(const CategorySpec& spec, std::span<const Label> leaves) {
  std::vector<Label> cur{kVacuum};
  for (Label x : leaves) {
    std::vector<Label> next;
    for (Label e : cur) {
      for (Label c : spec.channels(e, x)) next.push_back(c);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur = std::move(next);
  }
  return cur;
}

std::map<TreeEdges, Complex> concatenate_trees(const CategorySpec& spec, const TreeEdges& t1,
                                               std::span<const Label> leaves2,
                                               const TreeEdges& t2, Label total) {
  std::map<TreeEdges, Complex> out;
  const Label c1 = tree_total(t1);
  const std::size_t k = leaves2.size();
  if (k == 0) {
    if (total == c1) out[t1] = 1.0;
    return out;
  }
  if (k == 1) {
    if (!spec.fuses(c1, leaves2[0], total)) return out;
    TreeEdges t = t1;
    t.push_back(total);
    out[t] = 1.0;
    return out;
  }
  // |c1, (y x_k)_{c2}; total> = sum_g conj(F^{c1 y x_k}_{total; g, c2}) |(c1 y)_g x_k; total>
  const Label c2 = t2.back();
  const Label y = t2[k - 2];
  const Label xk = leaves2[k - 1];
  const TreeEdges t2_inner(t2.begin(), t2.end() - 1);
  for (Label g : spec.channels(c1, y)) {
    if (!spec.fuses(g, xk, total)) continue;
    const Complex coeff = std::conj(spec.F(c1, y, xk, total, g, c2));
    if (coeff == Complex(0.0, 0.0)) continue;
    for (auto& [tree, amp] : concatenate_trees(spec, t1, leaves2.first(k - 1), t2_inner, g)) {
      TreeEdges full = tree;
      full.push_back(total);
      out[full] += coeff * amp;
    }
  }
  return out;
}

const std::vector<TreeEdges>& FusionSpaceCache::trees(const std::vector<Label>& leaves,
                                                      Label total) {
  auto key = std::make_pair(leaves, total);
  auto it = trees_.find(key);
  if (it != trees_.end()) return it->second;
  auto list = left_canonical_trees(*spec_, leaves, total);
  auto& idx = index_[key];
  for (std::size_t i = 0; i < list.size(); ++i) idx[list[i]] = static_cast<int>(i);
  return trees_.emplace(std::move(key), std::move(list)).first->second;
}

const std::vector<Label>& FusionSpaceCache::totals(const std::vector<Label>& leaves) {
  auto it = totals_.find(leaves);
  if (it != totals_.end()) return it->second;
  return totals_.emplace(leaves, reachable_totals(*spec_, leaves)).first->second;
}

int FusionSpaceCache::index_of(const std::vector<Label>& leaves, Label total,
                               const TreeEdges& tree) {
  trees(leaves, total);
  const auto& idx = index_.at(std::make_pair(leaves, total));
  auto it = idx.find(tree);
  return it == idx.end() ? -1 : it->second;
}

const FusionSpaceCache::Recoupling& FusionSpaceCache::recoupling(const std::vector<Label>& left,
                                                                 const std::vector<Label>& right,
                                                                 Label total) {
  auto key = std::make_tuple(left, right, total);
  auto it = recouplings_.find(key);
  if (it != recouplings_.end()) return it->second;

  std::vector<Label> joined = left;
  joined.insert(joined.end(), right.begin(), right.end());
  const auto& rows = trees(joined, total);

  Recoupling r;
  for (Label c1 : totals(left)) {
    for (Label c2 : totals(right)) {
      if (!spec_->fuses(c1, c2, total)) continue;
      const int n1 = static_cast<int>(trees(left, c1).size());
      const int n2 = static_cast<int>(trees(right, c2).size());
      for (int i1 = 0; i1 < n1; ++i1) {
        for (int i2 = 0; i2 < n2; ++i2) r.columns.push_back({c1, c2, i1, i2});
      }
    }
  }
  r.matrix = CMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(r.columns.size()));
  for (std::size_t j = 0; j < r.columns.size(); ++j) {
    const auto& col = r.columns[j];
    const TreeEdges t1 = trees(left, col.c1)[col.i1];
    const TreeEdges t2 = trees(right, col.c2)[col.i2];
    for (const auto& [tree, amp] : concatenate_trees(*spec_, t1, right, t2, total)) {
      const int i = index_of(joined, total, tree);
      r.matrix(i, static_cast<Eigen::Index>(j)) += amp;
    }
  }
  return recouplings_.emplace(std::move(key), std::move(r)).first->second;
}

}  // namespace anyon
