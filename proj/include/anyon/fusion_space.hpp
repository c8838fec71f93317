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
#include <span>
#include <vector>

#include "anyon/category.hpp"

namespace anyon {

/// Edge labels of a left-canonical tree over definite leaves x_1..x_n:
/// edges[k] is the total charge of x_1..x_{k+1}, so edges[0] = x_1 and
/// edges.back() is the total. The empty tree (n = 0) has total vacuum.
using TreeEdges = std::vector<Label>;

/// All admissible left-canonical trees with the given total, sorted.
std::vector<TreeEdges> left_canonical_trees(const CategorySpec& spec, std::span<const Label> leaves,
                                            Label total);

/// Totals reachable by fusing the leaves, ascending.
std::vector<Label> reachable_totals(const CategorySpec& spec, std::span<const Label> leaves);

inline Label tree_total(const TreeEdges& t) { return t.empty() ? kVacuum : t.back(); }

/// Expansion of |t1 (leaves1; c1)> (x) |t2 (leaves2; c2)> fused to `total`
/// in the left-canonical basis of leaves1 ++ leaves2.
std::map<TreeEdges, Complex> concatenate_trees(const CategorySpec& spec, const TreeEdges& t1,
                                               std::span<const Label> leaves2,
                                               const TreeEdges& t2, Label total);

/// Memoized fusion spaces for one category. Not thread-safe; use one per thread.
class FusionSpaceCache {
 public:
  explicit FusionSpaceCache(const CategorySpec& spec) : spec_(&spec) {}

  const CategorySpec& spec() const { return *spec_; }

  const std::vector<TreeEdges>& trees(const std::vector<Label>& leaves, Label total);
  const std::vector<Label>& totals(const std::vector<Label>& leaves);
  int index_of(const std::vector<Label>& leaves, Label total, const TreeEdges& tree);

  /// Pair-basis column order for concatenation into `total`: entries
  /// (c1, i1, c2, i2) with N^{total}_{c1 c2} = 1.
  struct PairIndex {
    Label c1, c2;
    int i1, i2;
  };
  struct Recoupling {
    std::vector<PairIndex> columns;
    CMatrix matrix;  // rows: left-canonical trees of the concatenation
  };
  const Recoupling& recoupling(const std::vector<Label>& left, const std::vector<Label>& right,
                               Label total);

 private:
  const CategorySpec* spec_;
  std::map<std::pair<std::vector<Label>, Label>, std::vector<TreeEdges>> trees_;
  std::map<std::vector<Label>, std::vector<Label>> totals_;
  std::map<std::pair<std::vector<Label>, Label>, std::map<TreeEdges, int>> index_;
  std::map<std::tuple<std::vector<Label>, std::vector<Label>, Label>, Recoupling> recouplings_;
};

}  // namespace anyon
