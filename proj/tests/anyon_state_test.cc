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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "anyon/diagram_eval.hpp"
#include "test_support.hpp"

namespace anyon {
namespace {

using testing::builtin;
using testing::kPhi;

BasisPtr pair_basis_all_totals(const CategorySpec& s, Label a) {
  return FusionBasis::get_all_totals(s, {s.dual(a), a}, TreeShape::left_canonical(2));
}

AnyonDensityMatrix decohered_tau_pair() {
  const CategorySpec& fib = builtin("fibonacci");
  const BasisPtr b = pair_basis_all_totals(fib, 1);
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 1.0 / (kPhi * kPhi);
  m(1, 1) = 1.0 / kPhi;
  return AnyonDensityMatrix(b, m);
}

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  return es.eigenvalues().minCoeff();
}

TEST(TreeShape, LeftCanonicalNumbering) {
  const TreeShape t = TreeShape::left_canonical(4);
  EXPECT_EQ(t.root(), 6);
  EXPECT_EQ(t.prefix_node(1), 0);
  EXPECT_EQ(t.prefix_node(2), 4);
  EXPECT_EQ(t.prefix_node(3), 5);
  EXPECT_EQ(t.prefix_node(4), 6);
  EXPECT_TRUE(t.is_left_canonical());
  EXPECT_EQ(t.to_string(), "(((0 1) 2) 3)");
}

TEST(TreeShape, RotationRoundTrip) {
  const TreeShape t = TreeShape::left_canonical(3);
  const TreeShape r = t.rotated(t.root(), MoveDirection::LeftToRight);
  EXPECT_EQ(r.to_string(), "(0 (1 2))");
  EXPECT_EQ(r.rotated(r.root(), MoveDirection::RightToLeft), t);
  EXPECT_THROW(TreeShape::left_canonical(2).rotated(2, MoveDirection::LeftToRight), ValidationError);
}

TEST(CreateFromVacuum, OneTauPair) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonKet k = create_from_vacuum(fib, {1});
  EXPECT_EQ(k.leaf_count(), 2);
  ASSERT_EQ(k.basis().dim(), 1);
  EXPECT_EQ(k.basis().total(0), 0);
  EXPECT_NEAR(std::abs(k.amplitudes()(0) - 1.0), 0.0, 1e-12);
}

TEST(CreateFromVacuum, OneSigmaPair) {
  const CategorySpec& is = builtin("ising");
  const AnyonKet k = create_from_vacuum(is, {1});
  ASSERT_EQ(k.basis().dim(), 1);
  EXPECT_EQ(k.basis().element(0)[2], 0);
  EXPECT_NEAR(std::abs(k.amplitudes()(0) - 1.0), 0.0, 1e-12);
}

TEST(CreateFromVacuum, AgreesWithDiagramReduction) {
  for (const std::string name : {"fibonacci", "ising", "z3", "su2_4"}) {
    const CategorySpec& s = builtin(name);
    const std::vector<Label> pairs = {1, s.rank() - 1};
    const AnyonKet k = create_from_vacuum(s, pairs);
    const DiagramValue v = reduce_open(Diagram::cup(s, pairs[0]) | Diagram::cup(s, pairs[1]), s);
    double norm = 0.0;
    for (const auto& [key, z] : v.terms()) norm += std::norm(z);
    norm = std::sqrt(norm);
    int nonzero = 0;
    for (int i = 0; i < k.basis().dim(); ++i) nonzero += std::abs(k.amplitudes()(i)) > 1e-12 ? 1 : 0;
    ASSERT_EQ(static_cast<std::size_t>(nonzero), v.terms().size()) << name;
    for (const auto& [key, z] : v.terms()) {
      std::vector<Label> labels = k.basis().atoms();
      labels.insert(labels.end(), key.top.begin() + 1, key.top.end());
      const int i = k.basis().index_of(labels);
      ASSERT_GE(i, 0);
      EXPECT_NEAR(std::abs(k.amplitudes()(i) - z / norm), 0.0, 1e-10) << name;
    }
  }
}

TEST(CreateFromVacuum, PairPrefixesAreVacuum) {
  for (const std::string name : {"fibonacci", "ising", "su2_4"}) {
    const CategorySpec& s = builtin(name);
    const AnyonKet k = create_from_vacuum(s, {1, 1, s.rank() - 1});
    const AnyonDensityMatrix rho = density_from_ket(k);
    for (int m : {2, 4, 6}) {
      const auto p = charge_distribution(rho, m);
      EXPECT_NEAR(p[0], 1.0, 1e-12) << name << " m=" << m;
    }
  }
}

TEST(DensityFromKet, PureVacuumPair) {
  const AnyonDensityMatrix rho = density_from_ket(create_from_vacuum(builtin("fibonacci"), {1}));
  ASSERT_EQ(rho.basis().dim(), 1);
  EXPECT_NEAR(std::abs(rho.matrix()(0, 0) - 1.0), 0.0, 1e-12);
}

TEST(DensityFromKet, EqualSuperpositionHasEntriesOneHalf) {
  const BasisPtr b = pair_basis_all_totals(builtin("fibonacci"), 1);
  CVector amps(2);
  amps << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const AnyonDensityMatrix rho = density_from_ket(AnyonKet(b, amps));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(rho.matrix()(i, j) - 0.5), 0.0, 1e-12);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 1.0, 1e-12);
}

TEST(FMove, TwoLeavesHaveNoSlot) {
  const AnyonKet k = create_from_vacuum(builtin("fibonacci"), {1});
  EXPECT_THROW(f_move(k, k.basis().shape().root(), MoveDirection::LeftToRight), ValidationError);
}

TEST(FMove, FibonacciThreeTauMatrix) {
  const CategorySpec& fib = builtin("fibonacci");
  const BasisPtr b = FusionBasis::get(fib, {1, 1, 1}, TreeShape::left_canonical(3), {1});
  const BasisChange& ch = move_change(b, b->shape().root(), MoveDirection::LeftToRight);
  CMatrix expect(2, 2);
  expect << 1.0 / kPhi, 1.0 / std::sqrt(kPhi), 1.0 / std::sqrt(kPhi), -1.0 / kPhi;
  EXPECT_LT(testing::max_abs_diff(ch.unitary, expect), 1e-12);
  EXPECT_EQ(ch.target->shape().to_string(), "(0 (1 2))");
}

TEST(FMove, PairRecouplingCoefficients) {
  for (const std::string name : {"fibonacci", "ising", "su2_4"}) {
    const CategorySpec& s = builtin(name);
    for (Label a = 1; a < s.rank(); ++a) {
      const Label ab = s.dual(a);
      const BasisPtr b = FusionBasis::get(s, {ab, a, ab}, TreeShape::left_canonical(3), {ab});
      const BasisChange& ch = move_change(b, b->shape().root(), MoveDirection::LeftToRight);
      const int e0 = b->index_of({ab, a, ab, 0, ab});
      ASSERT_GE(e0, 0);
      for (int f = 0; f < ch.target->dim(); ++f) {
        const Label k = ch.target->element(f)[3];
        EXPECT_NEAR(std::abs(ch.unitary(f, e0) - s.F(ab, a, ab, ab, 0, k)), 0.0, 1e-12) << name;
      }
    }
  }
}

TEST(FMove, InverseRestoresInput) {
  const CategorySpec& is = builtin("ising");
  const AnyonDensityMatrix rho = density_from_ket(create_from_vacuum(is, {1, 1}));
  const int node = rho.basis().shape().prefix_node(3);
  const AnyonDensityMatrix moved = f_move(rho, node, MoveDirection::LeftToRight);
  EXPECT_NEAR(moved.trace(), 1.0, 1e-12);
  const AnyonDensityMatrix back = f_move(moved, node, MoveDirection::RightToLeft);
  EXPECT_EQ(back.basis_ptr(), rho.basis_ptr());
  EXPECT_LT(testing::max_abs_diff(back.matrix(), rho.matrix()), 1e-12);
}

TEST(FuseLeaves, VacuumPairBecomesVacuumLeaf) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonDensityMatrix f = fuse_leaves(density_from_ket(create_from_vacuum(fib, {1})), 0);
  EXPECT_EQ(f.leaf_count(), 1);
  const auto p = leaf_charge_distribution(f, 0);
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_NEAR(p[1], 0.0, 1e-12);
}

TEST(FuseLeaves, DecoheredPairKeepsWeights) {
  const AnyonDensityMatrix f = fuse_leaves(decohered_tau_pair(), 0);
  const auto p = leaf_charge_distribution(f, 0);
  EXPECT_NEAR(p[0], 1.0 / (kPhi * kPhi), 1e-12);
  EXPECT_NEAR(p[1], 1.0 / kPhi, 1e-12);
  EXPECT_NEAR(f.trace(), 1.0, 1e-12);
}

TEST(FuseLeaves, MiddleOfTwoSigmaPairs) {
  const CategorySpec& is = builtin("ising");
  const AnyonDensityMatrix f = fuse_leaves(density_from_ket(create_from_vacuum(is, {1, 1})), 1);
  EXPECT_EQ(f.leaf_count(), 3);
  EXPECT_EQ(f.basis().shape().to_string(), "((0 {1 2}) 3)");
  EXPECT_NEAR(f.trace(), 1.0, 1e-12);
  EXPECT_GT(min_eigenvalue(f.matrix()), -1e-12);
  // Middle pair channel c has weight d_c / d_sigma^2.
  const auto p = leaf_charge_distribution(f, 1);
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 0.0, 1e-12);
  EXPECT_NEAR(p[2], 0.5, 1e-12);
}

TEST(FuseLeaves, InvalidIndex) {
  const AnyonDensityMatrix rho = density_from_ket(create_from_vacuum(builtin("ising"), {1}));
  EXPECT_THROW(fuse_leaves(rho, 1), ValidationError);
  EXPECT_THROW(fuse_leaves(rho, -1), ValidationError);
}

TEST(ChargeDistribution, SingleLeafIsDefinite) {
  const auto p = charge_distribution(density_from_ket(create_from_vacuum(builtin("fibonacci"), {1})), 1);
  EXPECT_NEAR(p[1], 1.0, 1e-12);
  EXPECT_NEAR(p[0], 0.0, 1e-12);
}

TEST(ChargeDistribution, DecoheredPairTotal) {
  const auto p = charge_distribution(decohered_tau_pair(), 2);
  EXPECT_NEAR(p[0], 1.0 / (kPhi * kPhi), 1e-12);
  EXPECT_NEAR(p[1], 1.0 / kPhi, 1e-12);
}

TEST(ChargeDistribution, AcrossTwoSigmaPairs) {
  const CategorySpec& is = builtin("ising");
  const AnyonDensityMatrix rho = density_from_ket(create_from_vacuum(is, {1, 1}));
  EXPECT_NEAR(charge_distribution(rho, 2)[0], 1.0, 1e-12);
  const auto p3 = charge_distribution(rho, 3);
  EXPECT_NEAR(p3[1], 1.0, 1e-12);
}

TEST(ChargeDistribution, InvalidPrefix) {
  const AnyonDensityMatrix rho = density_from_ket(create_from_vacuum(builtin("ising"), {1}));
  EXPECT_THROW(charge_distribution(rho, 0), ValidationError);
  EXPECT_THROW(charge_distribution(rho, 3), ValidationError);
}

TEST(TraceOutPrefix, SecondPairStaysVacuum) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonDensityMatrix rho = density_from_ket(create_from_vacuum(fib, {1, 1}));
  const AnyonDensityMatrix rest = trace_out_prefix(rho, 2);
  EXPECT_EQ(rest.leaf_count(), 2);
  EXPECT_NEAR(rest.trace(), 1.0, 1e-12);
  EXPECT_NEAR(charge_distribution(rest, 2)[0], 1.0, 1e-12);
}

TEST(TraceOutPrefix, HalfOfPairIsMixed) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonDensityMatrix rest = trace_out_prefix(density_from_ket(create_from_vacuum(fib, {1})), 1);
  EXPECT_EQ(rest.leaf_count(), 1);
  EXPECT_NEAR(leaf_charge_distribution(rest, 0)[1], 1.0, 1e-12);
}

TEST(StateDistance, DistinguishesPureStates) {
  const AnyonDensityMatrix a = decohered_tau_pair();
  const AnyonDensityMatrix b =
      with_all_totals(density_from_ket(create_from_vacuum(builtin("fibonacci"), {1})));
  EXPECT_NEAR(state_distance(a, b), 1.0 / kPhi, 1e-12);
  EXPECT_NEAR(state_distance(a, a), 0.0, 1e-15);
}

TEST(WithTotals, RejectsDroppedWeight) {
  const AnyonDensityMatrix a = decohered_tau_pair();
  EXPECT_THROW(with_totals(a, {0}), ValidationError);
}

TEST(Snapshot, KetFormat) {
  const std::string s = to_snapshot(create_from_vacuum(builtin("fibonacci"), {1}));
  EXPECT_EQ(s,
            "# anyonsim-state v1 kind=ket category=fibonacci dim=1\n"
            "atoms tau tau\n"
            "shape (0 1)\n"
            "totals 1\n"
            "basis 0 tau tau 1\n"
            "amp 0 1 0\n");
}

}  // namespace
}  // namespace anyon
