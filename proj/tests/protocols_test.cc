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

#include "anyon/protocols.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace anyon {
namespace {

using testing::builtin;
using testing::kPhi;

constexpr const char* kNestedPairs = "cup($a) ; id($a) | cup($a) | id($a)";

AnyonKet nested_pairs(const CategorySpec& s, Label a) {
  return create_from_diagram(s, parse_diagram(kNestedPairs, s, {{"a", a}}));
}

void expect_well_formed(const Trajectory& t, int inside, int n) {
  ASSERT_FALSE(t.steps.empty());
  EXPECT_EQ(t.steps[0].index, 1);
  EXPECT_EQ(t.steps[0].kind, MeasurementKind::Interferometric);
  EXPECT_EQ(t.steps[0].region, inside);
  for (std::size_t i = 1; i < t.steps.size(); ++i) {
    const TrajectoryStep& s = t.steps[i];
    EXPECT_EQ(s.index, static_cast<int>(i) + 1);
    if (s.index % 2 == 0) {
      EXPECT_EQ(s.kind, MeasurementKind::Interferometric);
      EXPECT_EQ(s.region, n);
    } else {
      EXPECT_EQ(s.kind, MeasurementKind::InterferometricUnread);
      EXPECT_EQ(s.region, inside);
      EXPECT_EQ(s.outcome, t.inside_outcome);
      EXPECT_NEAR(s.probability, 1.0, 1e-10);
    }
  }
  if (t.success_step) {
    EXPECT_EQ(*t.success_step % 2, 0);
    EXPECT_EQ(*t.success_step, static_cast<int>(t.steps.size()));
    EXPECT_EQ(t.steps.back().outcome, kVacuum);
    EXPECT_EQ(t.even_steps, *t.success_step / 2);
  }
}

TEST(ForcedMeasurement, AbelianSucceedsImmediately) {
  const CategorySpec& z3 = builtin("z3");
  for (Label a : {1, 2}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Trajectory t = forced_measurement(z3, a, seed);
      ASSERT_TRUE(t.success_step);
      EXPECT_EQ(*t.success_step, 2);
      EXPECT_EQ(t.even_steps, 1);
    }
  }
}

TEST(ForcedMeasurement, TrajectoryShapeAndReversal) {
  for (const std::string name : {"fibonacci", "ising", "su2_4"}) {
    const CategorySpec& s = builtin(name);
    const ChargeLineDecoherence dec(s);
    for (Label a = 1; a < s.rank(); ++a) {
      const AnyonDensityMatrix pure =
          with_all_totals(density_from_ket(create_from_vacuum(s, {s.dual(a)})));
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Trajectory t = forced_measurement(s, a, seed, kDefaultMaxEvenSteps, &dec);
        expect_well_formed(t, 1, 2);
        EXPECT_EQ(t.inside_outcome, a);
        ASSERT_TRUE(t.success_step);
        EXPECT_LT(state_distance(t.final_state, pure), 1e-10) << name << " a=" << a;
        EXPECT_EQ(t.seed, seed);
      }
    }
  }
}

TEST(ForcedMeasurement, EvenStepProbabilitiesAreInverseDimensionSquared) {
  const CategorySpec& fib = builtin("fibonacci");
  const Trajectory t = forced_measurement(fib, 1, 99);
  for (const TrajectoryStep& s : t.steps) {
    if (s.index % 2 == 0) {
      const double want = s.outcome == kVacuum ? 1.0 / (kPhi * kPhi) : 1.0 / kPhi;
      EXPECT_NEAR(s.probability, want, 1e-12);
    }
  }
}

TEST(ForcedMeasurement, TruncationIsRecorded) {
  const CategorySpec& fib = builtin("fibonacci");
  int truncated = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Trajectory t = forced_measurement(fib, 1, seed, 1);
    EXPECT_EQ(t.even_steps, 1);
    if (t.truncated) {
      ++truncated;
      EXPECT_FALSE(t.success_step);
      EXPECT_EQ(t.steps.size(), 2u);
    }
  }
  EXPECT_GT(truncated, 0);
}

TEST(ForcedMeasurement, RejectsVacuumAndBadLimit) {
  const CategorySpec& fib = builtin("fibonacci");
  EXPECT_THROW(forced_measurement(fib, 0, 1), ValidationError);
  EXPECT_THROW(forced_measurement(fib, 1, 1, 0), ValidationError);
}

TEST(ForcedMeasurement, ReplayIsBitIdentical) {
  const CategorySpec& is = builtin("ising");
  const Trajectory a = forced_measurement(is, 1, 1234);
  const Trajectory b = forced_measurement(is, 1, 1234);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].outcome, b.steps[i].outcome);
    EXPECT_EQ(a.steps[i].probability, b.steps[i].probability);
  }
  EXPECT_EQ(a.final_state.matrix(), b.final_state.matrix());
}

TEST(CollectStats, FibonacciRateAndMean) {
  const CategorySpec& fib = builtin("fibonacci");
  const ProtocolStats s = collect_stats(fib, 1, 20000, 42, {.jobs = 4});
  const double p = 1.0 / (kPhi * kPhi);
  EXPECT_NEAR(s.p, p, 1e-15);
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(s.even_step_attempts));
  EXPECT_LT(std::abs(s.p_hat() - p), 3 * sigma);
  // Geometric mean 1/p with variance (1-p)/p^2.
  const double mean = static_cast<double>(s.even_step_attempts) / static_cast<double>(s.trials);
  const double sd_mean = std::sqrt((1 - p) / (p * p) / static_cast<double>(s.trials));
  EXPECT_LT(std::abs(mean - kPhi * kPhi), 3 * sd_mean);
}

TEST(CollectStats, IsingSurvivalIsPowerOfHalf) {
  const CategorySpec& is = builtin("ising");
  const ProtocolStats s = collect_stats(is, 1, 20000, 7, {.jobs = 2});
  EXPECT_EQ(s.survivors(0), s.trials);
  for (int t = 1; t <= 10; ++t) {
    const double q = std::pow(0.5, t);
    EXPECT_NEAR(s.expected_survival(t), q, 1e-15);
    const double band = 3 * std::sqrt(q * (1 - q) / static_cast<double>(s.trials));
    EXPECT_LT(std::abs(s.survival(t) - q), band) << "t=" << t;
    EXPECT_LE(s.survivors(t), s.survivors(t - 1));
  }
}

TEST(CollectStats, AbelianAllSucceedAtFirstStep) {
  const ProtocolStats s = collect_stats(builtin("z3"), 1, 500, 3);
  EXPECT_EQ(s.successes_at[1], 500);
  EXPECT_EQ(s.survivors(1), 0);
  EXPECT_DOUBLE_EQ(s.p_hat(), 1.0);
}

TEST(CollectStats, IndependentOfJobs) {
  const CategorySpec& fib = builtin("fibonacci");
  std::ostringstream l1, l3;
  const ProtocolStats a = collect_stats(fib, 1, 5000, 9, {.jobs = 1, .trajectory_log = &l1});
  const ProtocolStats b = collect_stats(fib, 1, 5000, 9, {.jobs = 3, .trajectory_log = &l3});
  EXPECT_EQ(l1.str(), l3.str());
  EXPECT_EQ(a.successes_at, b.successes_at);
  EXPECT_EQ(a.even_step_attempts, b.even_step_attempts);
}

TEST(CollectStats, LogRoundTrip) {
  const CategorySpec& is = builtin("ising");
  std::ostringstream log;
  const ProtocolStats a = collect_stats(is, 1, 300, 5, {.max_even_steps = 4, .trajectory_log = &log});
  std::istringstream in(log.str());
  const ProtocolStats b = read_trajectory_log(in);
  EXPECT_EQ(b.trials, a.trials);
  EXPECT_EQ(b.successes_at, a.successes_at);
  EXPECT_EQ(b.truncated, a.truncated);
  EXPECT_EQ(b.even_step_attempts, a.even_step_attempts);
  EXPECT_EQ(b.p, a.p);
  EXPECT_EQ(b.seed, a.seed);
  std::ostringstream ca, cb;
  write_stats_csv(a, ca);
  write_stats_csv(b, cb);
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(CollectStats, MergeIsAdditive) {
  const CategorySpec& fib = builtin("fibonacci");
  ProtocolStats a = collect_stats(fib, 1, 100, 1);
  const ProtocolStats b = collect_stats(fib, 1, 50, 2);
  const std::int64_t attempts = a.even_step_attempts + b.even_step_attempts;
  a.merge(b);
  EXPECT_EQ(a.trials, 150);
  EXPECT_EQ(a.even_step_attempts, attempts);
  EXPECT_EQ(a.successes() + a.truncated, 150);
}

TEST(CollectStats, LogErrorsNameTheLine) {
  std::istringstream in(
      "# anyonsim-trajectory v1 category=x anyon=y p=0.5 max_even_steps=3 seed=1\n"
      "trial 0 seed 5\n"
      "end success nine 2\n");
  try {
    read_trajectory_log(in);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream empty("");
  EXPECT_THROW(read_trajectory_log(empty), FormatError);
}

TEST(CollectStats, CsvFormat) {
  ProtocolStats s;
  s.category = "ising";
  s.anyon = "sigma";
  s.p = 0.5;
  s.trials = 4;
  s.seed = 1;
  s.max_even_steps = 2;
  s.successes_at = {0, 2, 1};
  s.truncated = 1;
  s.even_step_attempts = 2 + 2 + 2;
  std::ostringstream out;
  write_stats_csv(s, out);
  EXPECT_EQ(out.str(),
            "# anyonsim-stats v1 category=ising anyon=sigma trials=4 seed=1 max_even_steps=2 p=0.5 "
            "p_hat=0.5 attempts=6 truncated=1\n"
            "t,survivors,expected,sigma\n"
            "0,4,4,0\n"
            "1,2,2,1\n"
            "2,1,1,0.8660254038\n");
}

TEST(GroupProjection, SingleLeafReducesToForcedMeasurement) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonKet pair = create_from_vacuum(fib, {1});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Trajectory g = simulate_projective_on_group(fib, pair, 1, seed);
    const Trajectory f = forced_measurement(fib, 1, seed);
    ASSERT_EQ(g.steps.size(), f.steps.size());
    for (std::size_t i = 0; i < g.steps.size(); ++i) EXPECT_EQ(g.steps[i].outcome, f.steps[i].outcome);
    EXPECT_LT(state_distance(g.final_state, f.final_state), 1e-12);
  }
}

TEST(GroupProjection, NestedPairsMatchDirectProjection) {
  for (const std::string name : {"fibonacci", "ising"}) {
    const CategorySpec& s = builtin(name);
    const ChargeLineDecoherence dec(s);
    const AnyonKet k = nested_pairs(s, 1);
    const AnyonDensityMatrix rho0 = density_from_ket(k);
    const std::vector<double> born = charge_distribution(rho0, 2);
    std::vector<bool> seen(static_cast<std::size_t>(s.rank()), false);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const Trajectory t = simulate_projective_on_group(s, k, 2, seed, kDefaultMaxEvenSteps, &dec);
      expect_well_formed(t, 2, 4);
      ASSERT_TRUE(t.success_step);
      EXPECT_NEAR(t.inside_probability, born[t.inside_outcome], 1e-12);
      const AnyonDensityMatrix direct = project_region(rho0, 2, t.inside_outcome).second;
      EXPECT_LT(state_distance(t.final_state, direct), 1e-8) << name << " seed " << seed;
      seen[t.inside_outcome] = true;
    }
    for (Label x = 0; x < s.rank(); ++x) {
      if (born[x] > 1e-6) EXPECT_TRUE(seen[x]) << name << " outcome " << x << " never sampled";
    }
  }
}

TEST(GroupProjection, NestedPairsHaveIndefiniteInsideCharge) {
  const CategorySpec& fib = builtin("fibonacci");
  const auto p = charge_distribution(nested_pairs(fib, 1), 2);
  EXPECT_NEAR(p[0], 1.0 / (kPhi * kPhi), 1e-12);
  EXPECT_NEAR(p[1], 1.0 / kPhi, 1e-12);
}

TEST(GroupProjection, BornRuleFrequencies) {
  const CategorySpec& fib = builtin("fibonacci");
  const ChargeLineDecoherence dec(fib);
  const AnyonKet k = nested_pairs(fib, 1);
  const int n = 10000;
  int vacuum = 0;
  for (int i = 0; i < n; ++i) {
    const Trajectory t =
        simulate_projective_on_group(fib, k, 2, trial_seed(77, i), kDefaultMaxEvenSteps, &dec);
    vacuum += t.inside_outcome == kVacuum ? 1 : 0;
  }
  const double p = 1.0 / (kPhi * kPhi);
  EXPECT_LT(std::abs(vacuum - n * p), 3 * std::sqrt(n * p * (1 - p)));
}

TEST(GroupProjection, RequiresVacuumTotal) {
  const CategorySpec& fib = builtin("fibonacci");
  const BasisPtr b = FusionBasis::get(fib, {1, 1}, TreeShape::left_canonical(2), {1});
  CVector amps(1);
  amps << 1.0;
  EXPECT_THROW(simulate_projective_on_group(fib, AnyonKet(b, amps), 1, 0), ValidationError);
}

TEST(KetOnly, SingleForcedMeasurementMatchesDensityPath) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonKet pair = create_from_vacuum(fib, {1});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AnyonKet k = ket_only_simulation(fib, pair, {{1, true}}, seed);
    const Trajectory t = forced_measurement(fib, 1, seed);
    EXPECT_LT(state_distance(density_from_ket(k), t.final_state), 1e-8);
    EXPECT_NEAR(std::abs(k.amplitudes()(0)), 1.0, 1e-12);
  }
}

TEST(KetOnly, EmptyScriptLeavesKet) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonKet k0 = create_from_vacuum(fib, {1, 1});
  const AnyonKet k = ket_only_simulation(fib, k0, {}, 1);
  EXPECT_LT(state_distance(density_from_ket(k), density_from_ket(k0)), 1e-14);
}

TEST(KetOnly, TwoMeasurementsOnFourSigmas) {
  const CategorySpec& is = builtin("ising");
  const AnyonKet k0 = nested_pairs(is, 1);
  const std::vector<ScriptEntry> script = {{2, true}, {1, true}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AnyonKet k = ket_only_simulation(is, k0, script, seed);
    const Trajectory t = run_script_density(is, k0, script, seed);
    EXPECT_LT(state_distance(density_from_ket(k), t.final_state), 1e-8) << seed;
  }
}

TEST(KetOnly, RejectsRawEntriesAndNonVacuumTotals) {
  const CategorySpec& fib = builtin("fibonacci");
  const AnyonKet pair = create_from_vacuum(fib, {1});
  EXPECT_THROW(ket_only_simulation(fib, pair, {{1, false}}, 1), ValidationError);
  const BasisPtr b = FusionBasis::get(fib, {1, 1}, TreeShape::left_canonical(2), {1});
  CVector amps(1);
  amps << 1.0;
  EXPECT_THROW(ket_only_simulation(fib, AnyonKet(b, amps), {{1, true}}, 1), ValidationError);
}

}  // namespace
}  // namespace anyon
