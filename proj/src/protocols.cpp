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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

namespace anyon {

namespace {

struct RoundResult {
  Label inside_outcome = kVacuum;
  double inside_probability = 0.0;
  std::optional<int> success_step;
  int even_steps = 0;
  bool truncated = false;
};

/// Read Int on the inside, then (if `complete`) alternate whole-system reads
/// with unread inside runs until the whole system reads 0.
RoundResult ping_pong(AnyonDensityMatrix& rho, int inside, bool complete, Rng& rng,
                      const ChargeLineDecoherence& dec, int max_even_steps,
                      std::vector<TrajectoryStep>& steps) {
  const int n = rho.leaf_count();
  auto next_index = [&] { return static_cast<int>(steps.size()) + 1; };

  RoundResult r;
  {
    auto [o, post] = int_measure(rho, {inside, {}}, rng, dec);
    steps.push_back({next_index(), o.kind, inside, o.charge, o.probability});
    rho = std::move(post);
    r.inside_outcome = o.charge;
    r.inside_probability = o.probability;
  }
  if (!complete) return r;
  for (int t = 1; t <= max_even_steps; ++t) {
    auto [o, post] = int_measure(rho, {n, {}}, rng, dec);
    steps.push_back({next_index(), o.kind, n, o.charge, o.probability});
    rho = std::move(post);
    ++r.even_steps;
    if (o.charge == kVacuum) {
      r.success_step = steps.back().index;
      return r;
    }
    if (t == max_even_steps) break;
    rho = int_decohere_unread(rho, {inside, {}}, dec);
    const std::vector<double> dist = charge_distribution(rho, inside);
    const auto best = static_cast<Label>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    steps.push_back({next_index(), MeasurementKind::InterferometricUnread, inside, best, dist[best]});
  }
  r.truncated = true;
  return r;
}

void require_vacuum_total(const AnyonKet& k) {
  for (int i = 0; i < k.basis().dim(); ++i) {
    if (k.basis().total(i) != kVacuum && std::abs(k.amplitudes()(i)) > 1e-12) {
      throw ValidationError("initial state must have total charge 0");
    }
  }
}

Trajectory ping_pong_trajectory(const AnyonDensityMatrix& rho0, int inside, std::uint64_t seed,
                                int max_even_steps, const ChargeLineDecoherence& dec) {
  if (max_even_steps < 1) throw ValidationError("max_even_steps must be at least 1");
  if (inside < 1 || inside > rho0.leaf_count()) {
    throw ValidationError("inside region of " + std::to_string(inside) + " leaves invalid for " +
                          std::to_string(rho0.leaf_count()) + " leaves");
  }
  Rng rng(seed);
  AnyonDensityMatrix rho = rho0;
  std::vector<TrajectoryStep> steps;
  const RoundResult r = ping_pong(rho, inside, true, rng, dec, max_even_steps, steps);
  return Trajectory{std::move(steps), std::move(rho), r.inside_outcome, r.inside_probability,
                    r.success_step,   r.even_steps,   r.truncated,      seed};
}

}  // namespace

Trajectory forced_measurement(const CategorySpec& spec, Label a, std::uint64_t seed,
                              int max_even_steps, const ChargeLineDecoherence* dec) {
  if (a == kVacuum || a < 0 || a >= spec.rank()) {
    throw ValidationError("forced measurement needs a nontrivial charge");
  }
  const AnyonKet pair = create_from_vacuum(spec, {spec.dual(a)});
  std::unique_ptr<ChargeLineDecoherence> owned;
  if (!dec) dec = (owned = std::make_unique<ChargeLineDecoherence>(spec)).get();
  return ping_pong_trajectory(density_from_ket(pair), 1, seed, max_even_steps, *dec);
}

Trajectory simulate_projective_on_group(const CategorySpec& spec, const AnyonKet& initial,
                                        int inside, std::uint64_t seed, int max_even_steps,
                                        const ChargeLineDecoherence* dec) {
  require_vacuum_total(initial);
  std::unique_ptr<ChargeLineDecoherence> owned;
  if (!dec) dec = (owned = std::make_unique<ChargeLineDecoherence>(spec)).get();
  return ping_pong_trajectory(density_from_ket(initial), inside, seed, max_even_steps, *dec);
}

Trajectory run_script_density(const CategorySpec& spec, const AnyonKet& initial,
                              const std::vector<ScriptEntry>& script, std::uint64_t seed,
                              int max_even_steps, const ChargeLineDecoherence* dec) {
  std::unique_ptr<ChargeLineDecoherence> owned;
  if (!dec) dec = (owned = std::make_unique<ChargeLineDecoherence>(spec)).get();
  Rng rng(seed);
  AnyonDensityMatrix rho = density_from_ket(initial);
  std::vector<TrajectoryStep> steps;
  RoundResult last;
  int even = 0;
  bool truncated = false;
  for (const ScriptEntry& e : script) {
    last = ping_pong(rho, e.inside, e.complete, rng, *dec, max_even_steps, steps);
    even += last.even_steps;
    truncated = truncated || last.truncated;
  }
  return Trajectory{std::move(steps), std::move(rho), last.inside_outcome, last.inside_probability,
                    last.success_step, even,          truncated,          seed};
}

AnyonKet ket_only_simulation(const CategorySpec& spec, const AnyonKet& initial,
                             const std::vector<ScriptEntry>& script, std::uint64_t seed,
                             int max_even_steps) {
  require_vacuum_total(initial);
  Rng rng(seed);
  AnyonKet k = to_left_canonical(initial).normalized();
  const int n = k.leaf_count();
  for (std::size_t s = 0; s < script.size(); ++s) {
    const ScriptEntry& e = script[s];
    if (!e.complete) {
      throw ValidationError("script entry " + std::to_string(s) +
                            " is an uncompleted interferometric measurement; a ket cannot hold "
                            "its decohered state");
    }
    if (e.inside < 1 || e.inside > n) {
      throw ValidationError("script entry " + std::to_string(s) + ": region out of range");
    }
    const Label a = sample_charge(charge_distribution(k, e.inside), rng.uniform());
    k = project_region(k, e.inside, a).second;
    // Each whole-system read succeeds with probability 1/d_a^2.
    const double p = 1.0 / (spec.qdim(a) * spec.qdim(a));
    for (int t = 1;; ++t) {
      if (t > max_even_steps) {
        throw ValidationError("script entry " + std::to_string(s) + " truncated after " +
                              std::to_string(max_even_steps) + " whole-system reads");
      }
      if (sample_charge({p, 1.0 - p}, rng.uniform()) == kVacuum) break;
    }
  }
  return k;
}

// ---------------------------------------------------------------------------
// Statistics

std::int64_t ProtocolStats::successes() const {
  std::int64_t s = 0;
  for (auto x : successes_at) s += x;
  return s;
}

double ProtocolStats::p_hat() const {
  return even_step_attempts == 0 ? 0.0
                                 : static_cast<double>(successes()) /
                                       static_cast<double>(even_step_attempts);
}

std::int64_t ProtocolStats::survivors(int t) const {
  std::int64_t s = trials;
  for (int k = 1; k <= t && k < static_cast<int>(successes_at.size()); ++k) s -= successes_at[k];
  return s;
}

double ProtocolStats::survival(int t) const {
  return trials == 0 ? 0.0 : static_cast<double>(survivors(t)) / static_cast<double>(trials);
}

double ProtocolStats::expected_survival(int t) const { return std::pow(1.0 - p, t); }

int ProtocolStats::table_length() const {
  int last = std::min(10, max_even_steps);
  for (int t = 1; t < static_cast<int>(successes_at.size()); ++t) {
    if (successes_at[t] > 0) last = std::max(last, t);
  }
  if (truncated > 0) last = max_even_steps;
  return last;
}

void ProtocolStats::merge(const ProtocolStats& other) {
  if (successes_at.size() < other.successes_at.size()) {
    successes_at.resize(other.successes_at.size(), 0);
  }
  for (std::size_t t = 0; t < other.successes_at.size(); ++t) successes_at[t] += other.successes_at[t];
  trials += other.trials;
  truncated += other.truncated;
  even_step_attempts += other.even_step_attempts;
}

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void record(ProtocolStats& s, const Trajectory& t) {
  if (t.success_step) {
    s.successes_at[t.even_steps] += 1;
  } else {
    s.truncated += 1;
  }
  s.even_step_attempts += t.even_steps;
  s.trials += 1;
}

}  // namespace

ProtocolStats collect_stats(const CategorySpec& spec, Label a, std::int64_t trials,
                            std::uint64_t seed, const StatsOptions& options) {
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (options.max_even_steps < 1) throw ValidationError("max_even_steps must be at least 1");
  if (a == kVacuum || a < 0 || a >= spec.rank()) {
    throw ValidationError("forced measurement needs a nontrivial charge");
  }
  const int jobs = std::max(1, options.jobs);
  ProtocolStats stats;
  stats.category = spec.name();
  stats.anyon = spec.label_name(a);
  stats.p = 1.0 / (spec.qdim(a) * spec.qdim(a));
  stats.seed = seed;
  stats.max_even_steps = options.max_even_steps;
  stats.successes_at.assign(options.max_even_steps + 1, 0);

  const ChargeLineDecoherence dec(spec);
  const AnyonDensityMatrix rho0 = density_from_ket(create_from_vacuum(spec, {spec.dual(a)}));
  if (options.trajectory_log) write_log_header(stats, *options.trajectory_log);

  constexpr std::int64_t kBatch = 4096;
  struct Slot {
    std::optional<Trajectory> trajectory;
    std::string log;
  };
  std::vector<Slot> slots;
  for (std::int64_t start = 0; start < trials; start += kBatch) {
    const std::int64_t count = std::min(kBatch, trials - start);
    slots.assign(static_cast<std::size_t>(count), Slot{});
    auto work = [&](int worker) {
      for (std::int64_t i = worker; i < count; i += jobs) {
        const std::int64_t trial = start + i;
        Trajectory t = ping_pong_trajectory(rho0, 1, trial_seed(seed, static_cast<std::uint64_t>(trial)),
                                            options.max_even_steps, dec);
        Slot& slot = slots[static_cast<std::size_t>(i)];
        if (options.trajectory_log) {
          std::ostringstream buf;
          write_trajectory(t, trial, spec, buf);
          slot.log = buf.str();
        }
        slot.trajectory = std::move(t);
      }
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    for (const Slot& slot : slots) {
      record(stats, *slot.trajectory);
      if (options.trajectory_log) *options.trajectory_log << slot.log;
    }
  }
  return stats;
}

void write_stats_csv(const ProtocolStats& s, std::ostream& out) {
  out << "# anyonsim-stats v1 category=" << s.category << " anyon=" << s.anyon
      << " trials=" << s.trials << " seed=" << s.seed << " max_even_steps=" << s.max_even_steps
      << " p=" << fmt("%.17g", s.p) << " p_hat=" << fmt("%.17g", s.p_hat())
      << " attempts=" << s.even_step_attempts << " truncated=" << s.truncated << "\n";
  out << "t,survivors,expected,sigma\n";
  const double n = static_cast<double>(s.trials);
  for (int t = 0; t <= s.table_length(); ++t) {
    const double q = s.expected_survival(t);
    out << t << "," << s.survivors(t) << "," << fmt("%.10g", n * q) << ","
        << fmt("%.10g", std::sqrt(n * q * (1.0 - q))) << "\n";
  }
}

void write_log_header(const ProtocolStats& s, std::ostream& out) {
  out << "# anyonsim-trajectory v1 category=" << s.category << " anyon=" << s.anyon
      << " p=" << fmt("%.17g", s.p) << " max_even_steps=" << s.max_even_steps
      << " seed=" << s.seed << "\n";
}

void write_trajectory(const Trajectory& t, std::int64_t trial, const CategorySpec& spec,
                      std::ostream& out) {
  out << "trial " << trial << " seed " << t.seed << "\n";
  for (const TrajectoryStep& s : t.steps) {
    out << "step " << s.index << " " << to_string(s.kind) << " " << s.region << " "
        << spec.label_name(s.outcome) << " " << fmt("%.17g", s.probability) << "\n";
  }
  if (t.success_step) {
    out << "end success " << t.even_steps << " " << *t.success_step << "\n";
  } else {
    out << "end truncated " << t.even_steps << "\n";
  }
}

namespace {

template <typename T>
T parse_number(const std::string& text, int line, const char* what) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty()) {
      throw FormatError("log line " + std::to_string(line) + ": bad " + what + " '" + text + "'");
    }
  } else {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw FormatError("log line " + std::to_string(line) + ": bad " + what + " '" + text + "'");
    }
  }
  return value;
}

}  // namespace

ProtocolStats read_trajectory_log(std::istream& in) {
  ProtocolStats s;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string x; words >> x;) w.push_back(x);
    if (!have_header) {
      if (w.size() < 3 || w[0] != "#" || w[1] != "anyonsim-trajectory" || w[2] != "v1") {
        throw FormatError("log line " + std::to_string(lineno) +
                          ": expected '# anyonsim-trajectory v1' header");
      }
      std::map<std::string, std::string> kv;
      for (std::size_t i = 3; i < w.size(); ++i) {
        const auto eq = w[i].find('=');
        if (eq == std::string::npos) {
          throw FormatError("log line " + std::to_string(lineno) + ": bad header field '" + w[i] + "'");
        }
        kv[w[i].substr(0, eq)] = w[i].substr(eq + 1);
      }
      for (const char* key : {"category", "anyon", "p", "max_even_steps"}) {
        if (!kv.count(key)) {
          throw FormatError("log header is missing '" + std::string(key) + "'");
        }
      }
      s.category = kv["category"];
      s.anyon = kv["anyon"];
      s.p = parse_number<double>(kv["p"], lineno, "p");
      s.max_even_steps = parse_number<int>(kv["max_even_steps"], lineno, "max_even_steps");
      if (kv.count("seed")) s.seed = parse_number<std::uint64_t>(kv["seed"], lineno, "seed");
      if (s.max_even_steps < 1) throw FormatError("log header: max_even_steps must be positive");
      s.successes_at.assign(s.max_even_steps + 1, 0);
      have_header = true;
      continue;
    }
    if (w[0] == "trial" || w[0] == "step") continue;
    if (w[0] != "end" || w.size() < 3) {
      throw FormatError("log line " + std::to_string(lineno) + ": unrecognized record '" + line + "'");
    }
    const int even = parse_number<int>(w[2], lineno, "even step count");
    if (even < 0 || even > s.max_even_steps) {
      throw FormatError("log line " + std::to_string(lineno) + ": even step count out of range");
    }
    if (w[1] == "success") {
      if (even < 1) throw FormatError("log line " + std::to_string(lineno) + ": success at step 0");
      s.successes_at[even] += 1;
    } else if (w[1] == "truncated") {
      s.truncated += 1;
    } else {
      throw FormatError("log line " + std::to_string(lineno) + ": unknown end status '" + w[1] + "'");
    }
    s.even_step_attempts += even;
    s.trials += 1;
  }
  if (!have_header) throw FormatError("empty trajectory log");
  return s;
}

}  // namespace anyon
