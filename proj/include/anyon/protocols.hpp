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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anyon/measurement.hpp"

namespace anyon {

inline constexpr int kDefaultMaxEvenSteps = 200;

struct TrajectoryStep {
  int index = 0;  // 1-based
  MeasurementKind kind = MeasurementKind::Interferometric;
  int region = 0;  // prefix length
  Label outcome = kVacuum;
  double probability = 0.0;
};

/// One run of the ping-pong protocol.
///
/// Step 1 reads the inside region. Even steps read the whole system; odd
/// steps after the first run the inside interferometer unread, and record the
/// inside charge found there with its probability.
struct Trajectory {
  std::vector<TrajectoryStep> steps;
  AnyonDensityMatrix final_state;
  Label inside_outcome = kVacuum;
  double inside_probability = 0.0;
  std::optional<int> success_step;  // first even step index with outcome 0
  int even_steps = 0;               // whole-system reads performed
  bool truncated = false;
  std::uint64_t seed = 0;
};

/// Ping-pong on a vacuum pair with leaves (a, dual(a)); the inside is the
/// first leaf. Stops at the first whole-system outcome 0 or after
/// `max_even_steps` whole-system reads.
Trajectory forced_measurement(const CategorySpec& spec, Label a, std::uint64_t seed,
                              int max_even_steps = kDefaultMaxEvenSteps,
                              const ChargeLineDecoherence* dec = nullptr);

/// Same procedure on an arbitrary total-charge-0 state, with the inside being
/// the first `inside` exposed leaves. On success the final state equals the
/// direct projection of the initial state onto the observed inside charge.
Trajectory simulate_projective_on_group(const CategorySpec& spec, const AnyonKet& initial,
                                        int inside, std::uint64_t seed,
                                        int max_even_steps = kDefaultMaxEvenSteps,
                                        const ChargeLineDecoherence* dec = nullptr);

/// Measurement in a script. A completed entry is read Int on the prefix
/// followed by the ping-pong; a raw entry is the read Int alone.
struct ScriptEntry {
  int inside = 1;
  bool complete = true;
};

/// Runs a script on the density matrix, one rng stream for the whole script.
Trajectory run_script_density(const CategorySpec& spec, const AnyonKet& initial,
                              const std::vector<ScriptEntry>& script, std::uint64_t seed,
                              int max_even_steps = kDefaultMaxEvenSteps,
                              const ChargeLineDecoherence* dec = nullptr);

/// Runs a script tracking only a ket: each completed measurement is a
/// projection of the prefix charge. Consumes the rng exactly as
/// run_script_density does. Throws ValidationError for raw entries, for an
/// initial total charge other than 0, and when a ping-pong would truncate.
AnyonKet ket_only_simulation(const CategorySpec& spec, const AnyonKet& initial,
                             const std::vector<ScriptEntry>& script, std::uint64_t seed,
                             int max_even_steps = kDefaultMaxEvenSteps);

/// Aggregated forced-measurement statistics.
struct ProtocolStats {
  std::string category;
  std::string anyon;
  double p = 0.0;  // 1 / d_a^2
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  int max_even_steps = kDefaultMaxEvenSteps;
  std::vector<std::int64_t> successes_at;  // index t = 1..max_even_steps
  std::int64_t truncated = 0;
  std::int64_t even_step_attempts = 0;

  std::int64_t successes() const;
  double p_hat() const;
  /// Trials with no success within the first t even steps.
  std::int64_t survivors(int t) const;
  double survival(int t) const;
  double expected_survival(int t) const;
  /// Largest t reported in the CSV table.
  int table_length() const;

  /// Adds another aggregate with the same settings.
  void merge(const ProtocolStats& other);
};

struct StatsOptions {
  int max_even_steps = kDefaultMaxEvenSteps;
  int jobs = 1;
  std::ostream* trajectory_log = nullptr;
};

/// Runs `trials` forced measurements with seeds trial_seed(seed, i). Output
/// and statistics do not depend on `jobs`.
ProtocolStats collect_stats(const CategorySpec& spec, Label a, std::int64_t trials,
                            std::uint64_t seed, const StatsOptions& options = {});

/// "# anyonsim-stats v1 ..." header, then t,survivors,expected,sigma rows
/// where expected = N (1-p)^t and sigma = sqrt(N q (1-q)), q = (1-p)^t.
void write_stats_csv(const ProtocolStats& stats, std::ostream& out);

/// Trajectory log: "# anyonsim-trajectory v1 ..." header, then per trial a
/// "trial" line, one "step" line per measurement and an "end" line.
void write_log_header(const ProtocolStats& settings, std::ostream& out);
void write_trajectory(const Trajectory& t, std::int64_t trial, const CategorySpec& spec,
                      std::ostream& out);
/// Re-aggregates a log. Throws FormatError naming the offending line.
ProtocolStats read_trajectory_log(std::istream& in);

}  // namespace anyon
