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

#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <system_error>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "anyon/diagram_eval.hpp"
#include "anyon/protocols.hpp"

namespace anyonsim {

namespace {

using anyon::CategorySpec;
using anyon::Complex;
using anyon::Label;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real() + 0.0, z.imag() + 0.0);
  return buf;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*f) throw IoError("cannot write '" + path + "'");
  return f;
}

CategorySpec load_category_arg(const std::string& name) {
  if (name.empty()) throw UsageError("missing --category");
  try {
    return anyon::resolve_category(name);
  } catch (const std::system_error& e) {
    throw IoError(e.what());
  }
}

Label resolve_anyon(const CategorySpec& spec, const std::string& name) {
  if (name.empty()) throw UsageError("missing --anyon");
  try {
    return spec.resolve(name);
  } catch (const anyon::FormatError&) {
    throw anyon::ValidationError("anyon '" + name + "' is not a label of category " + spec.name());
  }
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const std::string& category, double tolerance, std::ostream& out) {
  const CategorySpec spec = load_category_arg(category);
  const anyon::ModularReport r = anyon::validate_modular(spec);
  out << "category " << spec.name() << " (" << spec.rank() << " labels, D = "
      << fmt("%.15g", spec.total_dim()) << ")\n";
  auto row = [&](const char* name, double v) {
    out << "  " << name << std::string(24 - std::string(name).size(), ' ') << fmt("%.3e", v)
        << (v <= tolerance ? "" : "  FAIL") << "\n";
  };
  row("pentagon residual", r.pentagon);
  row("F unitarity error", r.f_unitarity);
  row("S unitarity error", r.s_unitarity);
  row("S symmetry error", r.s_symmetry);
  row("S vacuum row error", r.s_vacuum_row);
  row("Verlinde residual", r.verlinde);
  row("omega projector error", r.omega_projector);
  out << "  detection               " << (r.detection ? "verified" : "FAIL") << "\n";
  const bool ok = r.passes(tolerance);
  out << "result " << (ok ? "PASS" : "FAIL") << " (tolerance " << fmt("%.0e", tolerance) << ")\n";
  return ok ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// eval

anyon::EvalStrategy parse_strategy(const std::string& s) {
  if (s == "direct") return anyon::EvalStrategy::Direct;
  if (s == "right-fold") return anyon::EvalStrategy::RightFold;
  if (s == "slice-up") return anyon::EvalStrategy::SliceBottomUp;
  if (s == "slice-down") return anyon::EvalStrategy::SliceTopDown;
  throw UsageError("unknown strategy '" + s + "'");
}

int cmd_eval(const std::string& file, const std::string& category, const std::string& anyon_name,
             const std::vector<std::string>& binds, const std::string& strategy_name,
             std::ostream& out) {
  const anyon::EvalStrategy strategy = parse_strategy(strategy_name);
  const CategorySpec spec = load_category_arg(category);
  anyon::DiagramBindings bindings;
  if (!anyon_name.empty()) bindings["a"] = resolve_anyon(spec, anyon_name);
  for (const std::string& b : binds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--bind expects name=label, got '" + b + "'");
    bindings[b.substr(0, eq)] = resolve_anyon(spec, b.substr(eq + 1));
  }
  const std::string text = read_file(file);

  // A line holding only "/" separates the diagram from its normalizer.
  std::string numerator, denominator;
  int split_line = -1;
  {
    std::istringstream lines(text);
    std::string line;
    int n = 0;
    std::ostringstream top, bottom;
    while (std::getline(lines, line)) {
      ++n;
      std::string trimmed = line;
      trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
      trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
      if (trimmed == "/" && split_line < 0) {
        split_line = n;
        continue;
      }
      (split_line < 0 ? top : bottom) << line << "\n";
    }
    numerator = top.str();
    denominator = bottom.str();
  }

  auto parse = [&](const std::string& part, int offset) {
    try {
      return anyon::parse_diagram(part, spec, bindings, offset);
    } catch (const anyon::DiagramError& e) {
      throw anyon::FormatError(file + ": " + e.what());
    }
  };
  const anyon::Diagram num = parse(numerator, 0);
  if (split_line < 0) {
    const anyon::DiagramValue v = anyon::reduce_open(num, spec, strategy);
    if (v.closed()) {
      out << "value " << fmt_complex(v.scalar()) << "\n";
    } else {
      out << anyon::format_value(v, spec);
    }
    return kExitOk;
  }
  const anyon::Diagram den = parse(denominator, split_line);
  if (!num.closed() || !den.closed()) {
    throw anyon::ValidationError("a normalized diagram and its normalizer must both be closed");
  }
  const Complex a = anyon::evaluate_closed(num, spec, strategy);
  const Complex b = anyon::evaluate_closed(den, spec, strategy);
  if (std::abs(b) < 1e-300) throw anyon::ValidationError("normalizer evaluates to zero");
  out << "numerator   " << fmt_complex(a) << "\n";
  out << "denominator " << fmt_complex(b) << "\n";
  out << "normalized  " << fmt_complex(a / b) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

const std::map<std::string, int>& config_keys() {
  static const std::map<std::string, int> keys = {
      {"category", 0}, {"protocol", 0}, {"anyon", 0},          {"setup", 0},
      {"inside", 1},   {"trials", 1},   {"seed", 1},           {"max_even_steps", 1},
      {"jobs", 1},     {"csv", 0},      {"log", 0},            {"snapshot", 0},
  };
  return keys;
}

void validate_run(const RunConfig& c) {
  if (!c.seed) throw UsageError("missing --seed (all randomness must be seeded)");
  if (c.trials < 1) throw anyon::ValidationError("trials must be at least 1, got " + std::to_string(c.trials));
  if (c.max_even_steps < 1) {
    throw anyon::ValidationError("max_even_steps must be at least 1, got " +
                                 std::to_string(c.max_even_steps));
  }
  if (c.jobs < 1) throw anyon::ValidationError("jobs must be at least 1, got " + std::to_string(c.jobs));
}

int cmd_run_forced(const RunConfig& c, std::ostream& out) {
  validate_run(c);
  const CategorySpec spec = load_category_arg(c.category);
  const Label a = resolve_anyon(spec, c.anyon);
  if (a == anyon::kVacuum) throw anyon::ValidationError("anyon must be nontrivial");
  auto csv = open_output(c.csv_path);
  auto log = open_output(c.log_path);

  anyon::StatsOptions opts;
  opts.max_even_steps = c.max_even_steps;
  opts.jobs = c.jobs;
  opts.trajectory_log = log.get();
  const anyon::ProtocolStats s = anyon::collect_stats(spec, a, c.trials, *c.seed, opts);

  const double sigma = std::sqrt(s.p * (1.0 - s.p) / static_cast<double>(std::max<std::int64_t>(1, s.even_step_attempts)));
  out << "forced measurement: category=" << spec.name() << " anyon=" << spec.label_name(a)
      << " trials=" << s.trials << " seed=" << *c.seed << "\n";
  out << "p target        " << fmt("%.15g", s.p) << "\n";
  out << "p estimate      " << fmt("%.15g", s.p_hat()) << "  (sigma " << fmt("%.3g", sigma)
      << ", z " << fmt("%+.2f", sigma > 0 ? (s.p_hat() - s.p) / sigma : 0.0) << ")\n";
  out << "mean even steps "
      << fmt("%.6g", static_cast<double>(s.even_step_attempts) / static_cast<double>(s.trials))
      << "\n";
  out << "truncated       " << s.truncated << "\n";
  if (csv) {
    anyon::write_stats_csv(s, *csv);
    if (!*csv) throw IoError("write failed for '" + c.csv_path + "'");
  } else {
    anyon::write_stats_csv(s, out);
  }
  if (log && !*log) throw IoError("write failed for '" + c.log_path + "'");
  return kExitOk;
}

int cmd_run_group(const RunConfig& c, std::ostream& out) {
  validate_run(c);
  const CategorySpec spec = load_category_arg(c.category);
  if (c.setup.empty()) throw UsageError("group-proj needs --setup with a state diagram");
  const anyon::AnyonKet ket = anyon::create_from_diagram(spec, anyon::parse_diagram(c.setup, spec));
  if (c.inside < 1 || c.inside > ket.leaf_count()) {
    throw anyon::ValidationError("--inside must be in 1.." + std::to_string(ket.leaf_count()));
  }
  auto csv = open_output(c.csv_path);
  auto snapshot = open_output(c.snapshot_path);

  const anyon::ChargeLineDecoherence dec(spec);
  const anyon::AnyonDensityMatrix rho0 = anyon::density_from_ket(ket);
  const std::vector<double> born = anyon::charge_distribution(rho0, c.inside);
  std::map<Label, anyon::AnyonDensityMatrix> oracle;
  for (Label x = 0; x < spec.rank(); ++x) {
    if (born[x] > anyon::kPruneProbability) {
      oracle.emplace(x, anyon::project_region(rho0, c.inside, x).second);
    }
  }

  struct Result {
    Label outcome = 0;
    int even_steps = 0;
    bool truncated = false;
    double distance = 0.0;
  };
  std::vector<Result> results(static_cast<std::size_t>(c.trials));
  std::optional<anyon::AnyonDensityMatrix> first_final;
  auto work = [&](int worker) {
    for (std::int64_t i = worker; i < c.trials; i += c.jobs) {
      const anyon::Trajectory t = anyon::simulate_projective_on_group(
          spec, ket, c.inside, anyon::trial_seed(*c.seed, static_cast<std::uint64_t>(i)),
          c.max_even_steps, &dec);
      Result& r = results[static_cast<std::size_t>(i)];
      r.outcome = t.inside_outcome;
      r.even_steps = t.even_steps;
      r.truncated = t.truncated;
      if (!t.truncated) r.distance = anyon::state_distance(t.final_state, oracle.at(t.inside_outcome));
      if (i == 0) first_final = t.final_state;
    }
  };
  if (c.jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < c.jobs; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  std::map<Label, std::int64_t> counts;
  std::map<Label, std::int64_t> steps;
  std::map<Label, double> worst;
  std::int64_t truncated = 0;
  for (const Result& r : results) {
    counts[r.outcome] += 1;
    steps[r.outcome] += r.even_steps;
    worst[r.outcome] = std::max(worst[r.outcome], r.distance);
    truncated += r.truncated ? 1 : 0;
  }
  double overall = 0.0;
  for (const auto& [x, d] : worst) overall = std::max(overall, d);

  out << "group projection: category=" << spec.name() << " leaves=" << ket.leaf_count()
      << " inside=" << c.inside << " trials=" << c.trials << " seed=" << *c.seed << "\n";
  out << "max trace distance to direct projection " << fmt("%.3e", overall) << "\n";
  out << "truncated " << truncated << "\n";

  std::ostream& table = csv ? static_cast<std::ostream&>(*csv) : out;
  table << "# anyonsim-group-proj v1 category=" << spec.name() << " inside=" << c.inside
        << " trials=" << c.trials << " seed=" << *c.seed << " max_even_steps=" << c.max_even_steps
        << " truncated=" << truncated << "\n";
  table << "outcome,count,expected,sigma,mean_even_steps,max_trace_distance\n";
  const double n = static_cast<double>(c.trials);
  for (Label x = 0; x < spec.rank(); ++x) {
    if (born[x] <= anyon::kPruneProbability && !counts.count(x)) continue;
    const std::int64_t k = counts.count(x) ? counts[x] : 0;
    table << spec.label_name(x) << "," << k << "," << fmt("%.10g", n * born[x]) << ","
          << fmt("%.10g", std::sqrt(n * born[x] * (1.0 - born[x]))) << ","
          << fmt("%.6g", k ? static_cast<double>(steps[x]) / static_cast<double>(k) : 0.0) << ","
          << fmt("%.3e", k ? worst[x] : 0.0) << "\n";
  }
  if (csv && !*csv) throw IoError("write failed for '" + c.csv_path + "'");
  if (snapshot && first_final) {
    *snapshot << anyon::to_snapshot(*first_final);
    if (!*snapshot) throw IoError("write failed for '" + c.snapshot_path + "'");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const std::string& log_path, const std::string& csv_path, std::ostream& out) {
  std::ifstream in(log_path);
  if (!in) throw IoError("cannot read '" + log_path + "'");
  const anyon::ProtocolStats s = anyon::read_trajectory_log(in);
  auto csv = open_output(csv_path);
  out << "trajectory log: category=" << s.category << " anyon=" << s.anyon << " trials=" << s.trials
      << "\n";
  out << "p target        " << fmt("%.15g", s.p) << "\n";
  out << "p estimate      " << fmt("%.15g", s.p_hat()) << "\n";
  out << "truncated       " << s.truncated << "\n";
  anyon::write_stats_csv(s, csv ? static_cast<std::ostream&>(*csv) : out);
  if (csv && !*csv) throw IoError("write failed for '" + csv_path + "'");
  return kExitOk;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(source + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError(source + ": config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    auto it = config_keys().find(key);
    if (it == config_keys().end()) throw UsageError(source + ": unknown config key '" + key + "'");
    const bool integer = it->second == 1;
    if (integer ? !value.is_number_integer() : !value.is_string()) {
      throw UsageError(source + ": key '" + key + "' must be " + (integer ? "an integer" : "a string"));
    }
    if (key == "category") c.category = value.get<std::string>();
    if (key == "protocol") c.protocol = value.get<std::string>();
    if (key == "anyon") c.anyon = value.get<std::string>();
    if (key == "setup") c.setup = value.get<std::string>();
    if (key == "csv") c.csv_path = value.get<std::string>();
    if (key == "log") c.log_path = value.get<std::string>();
    if (key == "snapshot") c.snapshot_path = value.get<std::string>();
    if (key == "inside") c.inside = value.get<int>();
    if (key == "trials") c.trials = value.get<std::int64_t>();
    if (key == "max_even_steps") c.max_even_steps = value.get<int>();
    if (key == "jobs") c.jobs = value.get<int>();
    if (key == "seed") {
      if (value.is_number_unsigned() || value.get<std::int64_t>() >= 0) {
        c.seed = value.get<std::uint64_t>();
      } else {
        throw UsageError(source + ": seed must be nonnegative");
      }
    }
  }
  return c;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"anyonsim: anyon fusion-tree simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "anyonsim 0.1.0");

  std::string category;
  double tolerance = 1e-9;
  auto* check = app.add_subcommand("check", "Validate a category (pentagon, unitarity, Verlinde, modularity)");
  check->add_option("category", category, "Built-in name or category file")->required();
  check->add_option("--tolerance", tolerance, "Largest accepted residual")->capture_default_str();

  std::string diagram_file, anyon_name, strategy = "direct";
  std::vector<std::string> binds;
  auto* eval = app.add_subcommand("eval", "Evaluate a diagram file");
  eval->add_option("file", diagram_file, "Diagram file")->required();
  eval->add_option("--category", category, "Built-in name or category file")->required();
  eval->add_option("--anyon", anyon_name, "Label bound to $a");
  eval->add_option("--bind", binds, "Extra placeholder binding name=label");
  eval->add_option("--strategy", strategy, "direct, right-fold, slice-up or slice-down")
      ->capture_default_str();

  RunConfig flags;
  std::string config_path, protocol;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run a protocol");
  run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  run->add_option("protocol", protocol, "forced or group-proj");
  run->add_option("--config", config_path, "JSON config; flags override its keys");
  auto* o_category = run->add_option("--category", flags.category, "Built-in name or category file");
  auto* o_anyon = run->add_option("--anyon", flags.anyon, "Charge to measure (forced)");
  auto* o_setup = run->add_option("--setup", flags.setup, "State diagram (group-proj)");
  auto* o_inside = run->add_option("--inside", flags.inside, "Inside prefix length (group-proj)");
  auto* o_trials = run->add_option("--trials", flags.trials, "Number of trials");
  auto* o_seed = run->add_option("--seed", seed, "Master seed (required)");
  auto* o_max = run->add_option("--max-even-steps", flags.max_even_steps, "Whole-system reads before giving up");
  auto* o_jobs = run->add_option("--jobs", flags.jobs, "Worker threads");
  auto* o_csv = run->add_option("--csv", flags.csv_path, "CSV output path (default: stdout)");
  auto* o_log = run->add_option("--log", flags.log_path, "Trajectory log path (forced)");
  auto* o_snap = run->add_option("--snapshot", flags.snapshot_path, "Final state of trial 0 (group-proj)");

  std::string log_path, csv_path;
  auto* stats = app.add_subcommand("stats", "Re-aggregate a trajectory log");
  stats->add_option("log", log_path, "Trajectory log")->required();
  stats->add_option("--csv", csv_path, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cmd_check(category, tolerance, out);
    if (*eval) return cmd_eval(diagram_file, category, anyon_name, binds, strategy, out);
    if (*stats) return cmd_stats(log_path, csv_path, out);

    RunConfig c;
    if (!config_path.empty()) c = parse_run_config(read_file(config_path), config_path);
    if (!protocol.empty()) c.protocol = protocol;
    if (*o_category) c.category = flags.category;
    if (*o_anyon) c.anyon = flags.anyon;
    if (*o_setup) c.setup = flags.setup;
    if (*o_inside) c.inside = flags.inside;
    if (*o_trials) c.trials = flags.trials;
    if (*o_seed) c.seed = seed;
    if (*o_max) c.max_even_steps = flags.max_even_steps;
    if (*o_jobs) c.jobs = flags.jobs;
    if (*o_csv) c.csv_path = flags.csv_path;
    if (*o_log) c.log_path = flags.log_path;
    if (*o_snap) c.snapshot_path = flags.snapshot_path;
    if (c.protocol == "forced") return cmd_run_forced(c, out);
    if (c.protocol == "group-proj") return cmd_run_group(c, out);
    throw UsageError(c.protocol.empty() ? "missing protocol (forced or group-proj)"
                                        : "unknown protocol '" + c.protocol + "'");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const anyon::DiagramError& e) {
    err << "diagram error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const anyon::FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const anyon::ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::system_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace anyonsim
