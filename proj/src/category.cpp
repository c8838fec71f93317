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

#include "anyon/category.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

#ifndef ANYON_DATA_DIR
#define ANYON_DATA_DIR "data/categories"
#endif

namespace anyon {

std::uint64_t CategorySpec::next_serial() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "anyonsim-category/1";

[[noreturn]] void format_fail(const std::string& source, const std::string& what) {
  throw FormatError(source + ": " + what);
}

[[noreturn]] void validation_fail(const std::string& source, const std::string& what) {
  throw ValidationError(source + ": " + what);
}

const json& require(const json& doc, const char* key, const std::string& source) {
  auto it = doc.find(key);
  if (it == doc.end()) format_fail(source, std::string("missing key '") + key + "'");
  return *it;
}

int as_label(const json& v, int rank, const std::string& source, const std::string& where) {
  if (!v.is_number_integer()) format_fail(source, where + ": expected an integer label index");
  const auto i = v.get<long long>();
  if (i < 0 || i >= rank) {
    format_fail(source, where + ": label index " + std::to_string(i) + " out of range");
  }
  return static_cast<int>(i);
}

double as_real(const json& v, const std::string& source, const std::string& where) {
  if (!v.is_number()) format_fail(source, where + ": expected a number");
  return v.get<double>();
}

Complex as_complex(const json& v, const std::string& source, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2) format_fail(source, where + ": expected [re, im]");
  return {as_real(v[0], source, where), as_real(v[1], source, where)};
}

}  // namespace

CMatrix CategorySpec::f_matrix(Label a, Label b, Label c, Label d, std::vector<Label>* rows,
                               std::vector<Label>* cols) const {
  std::vector<Label> es, fs;
  for (Label e = 0; e < rank(); ++e) {
    if (fuses(a, b, e) && fuses(e, c, d)) es.push_back(e);
  }
  for (Label f = 0; f < rank(); ++f) {
    if (fuses(b, c, f) && fuses(a, f, d)) fs.push_back(f);
  }
  CMatrix m(static_cast<Eigen::Index>(es.size()), static_cast<Eigen::Index>(fs.size()));
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = 0; j < fs.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = F(a, b, c, d, es[i], fs[j]);
    }
  }
  if (rows) *rows = std::move(es);
  if (cols) *cols = std::move(fs);
  return m;
}

std::optional<Label> CategorySpec::find(std::string_view name) const {
  for (const auto& l : labels_) {
    if (l.name == name) return l.index;
  }
  return std::nullopt;
}

Label CategorySpec::resolve(std::string_view text) const {
  if (auto l = find(text)) return *l;
  int idx = -1;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
  if (ec == std::errc() && ptr == text.data() + text.size() && idx >= 0 && idx < rank()) {
    return idx;
  }
  throw FormatError("unknown charge '" + std::string(text) + "' in category '" + name_ + "'");
}

CategorySpec parse_category(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    format_fail(source, std::string("not a valid category document: ") + e.what());
  }
  if (!doc.is_object()) format_fail(source, "top level must be an object");

  static const std::set<std::string> known = {"format", "name",     "labels",
                                              "dual",   "qdim",     "fusion",
                                              "fsymbols", "smatrix"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) format_fail(source, "unknown key '" + it.key() + "'");
  }
  const auto& fmt = require(doc, "format", source);
  if (!fmt.is_string() || fmt.get<std::string>() != kFormatTag) {
    format_fail(source, std::string("format must be \"") + kFormatTag + "\"");
  }

  CategorySpec spec;
  spec.name_ = doc.value("name", std::string("unnamed"));

  const auto& labels = require(doc, "labels", source);
  if (!labels.is_array() || labels.empty()) format_fail(source, "'labels' must be a nonempty array");
  const int n = static_cast<int>(labels.size());
  std::set<std::string> seen;
  for (int i = 0; i < n; ++i) {
    if (!labels[i].is_string()) format_fail(source, "label names must be strings");
    auto name = labels[i].get<std::string>();
    if (name.empty()) format_fail(source, "empty label name");
    if (!seen.insert(name).second) format_fail(source, "duplicate label '" + name + "'");
    spec.labels_.push_back({i, std::move(name), i, 1.0});
  }

  const auto& dual = require(doc, "dual", source);
  if (!dual.is_array() || static_cast<int>(dual.size()) != n) {
    format_fail(source, "'dual' must list one label per charge");
  }
  for (int i = 0; i < n; ++i) {
    spec.labels_[i].dual = as_label(dual[i], n, source, "dual[" + std::to_string(i) + "]");
  }
  for (int i = 0; i < n; ++i) {
    if (spec.labels_[spec.labels_[i].dual].dual != i) {
      validation_fail(source, "dual map is not an involution at '" + spec.labels_[i].name + "'");
    }
  }
  if (spec.labels_[0].dual != 0) validation_fail(source, "vacuum must be self-dual");

  // Fusion rules.
  spec.fusion_.assign(static_cast<std::size_t>(n) * n * n, 0);
  const auto& fusion = require(doc, "fusion", source);
  if (!fusion.is_array()) format_fail(source, "'fusion' must be an array of [a, b, c] triples");
  for (std::size_t k = 0; k < fusion.size(); ++k) {
    const auto& t = fusion[k];
    const std::string where = "fusion[" + std::to_string(k) + "]";
    if (!t.is_array() || (t.size() != 3 && t.size() != 4)) {
      format_fail(source, where + ": expected [a, b, c] or [a, b, c, multiplicity]");
    }
    const int a = as_label(t[0], n, source, where);
    const int b = as_label(t[1], n, source, where);
    const int c = as_label(t[2], n, source, where);
    long long mult = 1;
    if (t.size() == 4) {
      if (!t[3].is_number_integer()) format_fail(source, where + ": multiplicity must be an integer");
      mult = t[3].get<long long>();
    }
    if (mult > 1 || spec.fusion_[spec.index3(a, b, c)] != 0) {
      validation_fail(source, where + ": fusion multiplicity > 1 is not supported (" +
                                  spec.labels_[a].name + " x " + spec.labels_[b].name + " -> " +
                                  spec.labels_[c].name + ")");
    }
    if (mult == 1) spec.fusion_[spec.index3(a, b, c)] = 1;
  }
  auto N = [&](int a, int b, int c) { return static_cast<int>(spec.fusion_[spec.index3(a, b, c)]); };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const std::string trip =
            spec.labels_[a].name + "," + spec.labels_[b].name + "," + spec.labels_[c].name;
        if (N(a, b, c) != N(b, a, c)) validation_fail(source, "fusion not commutative at " + trip);
      }
      if (N(a, 0, b) != (a == b ? 1 : 0)) {
        validation_fail(source, "vacuum is not a fusion unit for '" + spec.labels_[a].name + "'");
      }
      if (N(a, b, 0) != (b == spec.labels_[a].dual ? 1 : 0)) {
        validation_fail(source, "N^0_{ab} != delta(b, dual a) for a='" + spec.labels_[a].name +
                                    "', b='" + spec.labels_[b].name + "'");
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          int left = 0, right = 0;
          for (int x = 0; x < n; ++x) {
            left += N(a, b, x) * N(x, c, d);
            right += N(b, c, x) * N(a, x, d);
          }
          if (left != right) validation_fail(source, "fusion ring is not associative");
        }
      }
    }
  }
  spec.channels_.assign(static_cast<std::size_t>(n) * n, {});
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (N(a, b, c)) spec.channels_[a * n + b].push_back(c);
      }
    }
  }

  // Quantum dimensions: declared values must match the Perron-Frobenius ones.
  const auto& qdim = require(doc, "qdim", source);
  if (!qdim.is_array() || static_cast<int>(qdim.size()) != n) {
    format_fail(source, "'qdim' must list one value per charge");
  }
  double d2 = 0.0;
  for (int a = 0; a < n; ++a) {
    const double d = as_real(qdim[a], source, "qdim[" + std::to_string(a) + "]");
    if (!(d > 0.0)) validation_fail(source, "qdim of '" + spec.labels_[a].name + "' must be positive");
    spec.labels_[a].qdim = d;
    d2 += d * d;
  }
  for (int a = 0; a < n; ++a) {
    const double spectral = spectral_qdim(spec, a);
    if (std::abs(spectral - spec.labels_[a].qdim) > 1e-9) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "qdim of '" << spec.labels_[a].name << "' declared " << spec.labels_[a].qdim
          << " but the fusion matrix gives " << spectral;
      validation_fail(source, msg.str());
    }
  }
  spec.total_dim_ = std::sqrt(d2);

  // F-symbols: every admissible sextuple must be listed exactly once.
  const auto& fs = require(doc, "fsymbols", source);
  if (!fs.is_array()) format_fail(source, "'fsymbols' must be an array");
  const std::size_t n6 = static_cast<std::size_t>(n) * n * n * n * n * n;
  spec.fsymbols_.assign(n6, Complex(0.0, 0.0));
  std::vector<unsigned char> given(n6, 0);
  auto admissible6 = [&](int a, int b, int c, int d, int e, int f) {
    return N(a, b, e) && N(e, c, d) && N(b, c, f) && N(a, f, d);
  };
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const auto& row = fs[k];
    const std::string where = "fsymbols[" + std::to_string(k) + "]";
    if (!row.is_array() || row.size() != 8) {
      format_fail(source, where + ": expected [a, b, c, d, e, f, re, im]");
    }
    int idx[6];
    for (int i = 0; i < 6; ++i) idx[i] = as_label(row[i], n, source, where);
    if (!admissible6(idx[0], idx[1], idx[2], idx[3], idx[4], idx[5])) {
      validation_fail(source, where + ": F-symbol index is not admissible");
    }
    const auto pos = spec.index6(idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]);
    if (given[pos]) validation_fail(source, where + ": duplicate F-symbol");
    given[pos] = 1;
    spec.fsymbols_[pos] = {as_real(row[6], source, where), as_real(row[7], source, where)};
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e)
            for (int f = 0; f < n; ++f) {
              if (admissible6(a, b, c, d, e, f) && !given[spec.index6(a, b, c, d, e, f)]) {
                validation_fail(source, "missing F-symbol for (" + std::to_string(a) + "," +
                                            std::to_string(b) + "," + std::to_string(c) + "," +
                                            std::to_string(d) + "," + std::to_string(e) + "," +
                                            std::to_string(f) + ")");
              }
            }

  // Zig-zag normalization: F^{a abar a}_{a;0,0} must be exactly +1/d_a.
  for (int a = 0; a < n; ++a) {
    const Complex v = spec.F(a, spec.labels_[a].dual, a, a, 0, 0);
    if (std::abs(v - 1.0 / spec.labels_[a].qdim) > 1e-9) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "F^{a abar a}_{a;0,0} for a='" << spec.labels_[a].name << "' is " << v.real() << "+"
          << v.imag() << "i, expected +1/d_a = " << 1.0 / spec.labels_[a].qdim
          << " (Frobenius-Schur phases must be absorbed into the F-symbols)";
      validation_fail(source, msg.str());
    }
  }

  const auto& s = require(doc, "smatrix", source);
  if (!s.is_array() || static_cast<int>(s.size()) != n) {
    format_fail(source, "'smatrix' must have one row per charge");
  }
  spec.smatrix_.resize(n, n);
  for (int a = 0; a < n; ++a) {
    if (!s[a].is_array() || static_cast<int>(s[a].size()) != n) {
      format_fail(source, "smatrix row " + std::to_string(a) + " has the wrong length");
    }
    for (int b = 0; b < n; ++b) {
      spec.smatrix_(a, b) =
          as_complex(s[a][b], source, "smatrix[" + std::to_string(a) + "][" + std::to_string(b) + "]");
    }
  }
  for (int a = 0; a < n; ++a) {
    if (std::abs(spec.smatrix_(0, a)) < 1e-14) {
      validation_fail(source, "S_0a vanishes for '" + spec.labels_[a].name + "'");
    }
  }
  return spec;
}

CategorySpec load_category(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_category(buf.str(), path.string());
}

std::filesystem::path builtin_category_dir() { return std::filesystem::path(ANYON_DATA_DIR); }

std::vector<std::string> builtin_category_names() {
  return {"trivial", "fibonacci", "ising", "z3", "su2_4"};
}

CategorySpec resolve_category(const std::string& name_or_path) {
  const std::filesystem::path as_path(name_or_path);
  if (std::filesystem::is_regular_file(as_path)) return load_category(as_path);
  const auto bundled = builtin_category_dir() / (name_or_path + ".json");
  if (std::filesystem::is_regular_file(bundled)) return load_category(bundled);
  throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                          "no category file or built-in named '" + name_or_path + "'");
}

double spectral_qdim(const CategorySpec& spec, Label a) {
  const int n = spec.rank();
  RMatrix m(n, n);
  for (int b = 0; b < n; ++b) {
    for (int c = 0; c < n; ++c) m(b, c) = spec.fuses(a, b, c) ? 1.0 : 0.0;
  }
  Eigen::EigenSolver<RMatrix> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double f_unitarity_error(const CategorySpec& spec) {
  const int n = spec.rank();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const CMatrix m = spec.f_matrix(a, b, c, d);
          if (m.size() == 0 && m.rows() == m.cols()) continue;
          worst = std::max(worst, unitarity_error(m));
        }
  return worst;
}

double pentagon_residual(const CategorySpec& spec) {
  // F^{fcd}_{e;g,l} F^{abl}_{e;f,k} = sum_h F^{abc}_{g;f,h} F^{ahd}_{e;g,k} F^{bcd}_{k;h,l}
  const int n = spec.rank();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e)
            for (int f : spec.channels(a, b))
              for (int g : spec.channels(f, c)) {
                if (!spec.fuses(g, d, e)) continue;
                for (int l : spec.channels(c, d))
                  for (int k : spec.channels(b, l)) {
                    if (!spec.fuses(a, k, e)) continue;
                    const Complex lhs = spec.F(f, c, d, e, g, l) * spec.F(a, b, l, e, f, k);
                    Complex rhs(0.0, 0.0);
                    for (int h = 0; h < n; ++h) {
                      rhs += spec.F(a, b, c, g, f, h) * spec.F(a, h, d, e, g, k) *
                             spec.F(b, c, d, k, h, l);
                    }
                    worst = std::max(worst, std::abs(lhs - rhs));
                  }
              }
  return worst;
}

double check_pentagon(const CategorySpec& spec) {
  return std::max(pentagon_residual(spec), f_unitarity_error(spec));
}

double verlinde_residual(const CategorySpec& spec) {
  const int n = spec.rank();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Complex v(0.0, 0.0);
        for (int x = 0; x < n; ++x) {
          v += spec.S(a, x) * spec.S(b, x) * std::conj(spec.S(c, x)) / spec.S(0, x);
        }
        worst = std::max(worst, std::abs(v - (spec.fuses(a, b, c) ? 1.0 : 0.0)));
      }
  return worst;
}

double ModularReport::worst_residual() const {
  return std::max({pentagon, f_unitarity, s_unitarity, s_symmetry, s_vacuum_row, verlinde,
                   omega_projector});
}

ModularReport validate_modular(const CategorySpec& spec) {
  ModularReport r;
  r.pentagon = pentagon_residual(spec);
  r.f_unitarity = f_unitarity_error(spec);
  r.s_unitarity = unitarity_error(spec.smatrix());
  r.s_symmetry = symmetry_error(spec.smatrix());
  for (Label a = 0; a < spec.rank(); ++a) {
    r.s_vacuum_row =
        std::max(r.s_vacuum_row, std::abs(spec.S(0, a) - spec.qdim(a) / spec.total_dim()));
  }
  r.verlinde = verlinde_residual(spec);
  r.omega_projector = omega_projector_error(spec);
  r.detection = verify_detection(spec);
  return r;
}

Complex monodromy(const CategorySpec& spec, Label a, Label b) {
  return spec.S(a, b) * spec.S(0, 0) / (spec.S(0, a) * spec.S(0, b));
}

bool verify_detection(const CategorySpec& spec, double tolerance) {
  for (Label a = 1; a < spec.rank(); ++a) {
    bool detected = false;
    for (Label b = 0; b < spec.rank() && !detected; ++b) {
      detected = std::abs(monodromy(spec, b, a) - 1.0) > tolerance;
    }
    if (!detected) return false;
  }
  return true;
}

OmegaLoop omega_coefficients(const CategorySpec& spec, Label a) {
  OmegaLoop loop;
  loop.target = a;
  loop.coeffs.resize(spec.rank());
  for (Label x = 0; x < spec.rank(); ++x) loop.coeffs(x) = spec.S(0, a) * std::conj(spec.S(x, a));
  return loop;
}

Complex loop_value(const CategorySpec& spec, Label x, Label b) {
  return spec.S(x, b) / spec.S(0, b);
}

double omega_projector_error(const CategorySpec& spec) {
  double worst = 0.0;
  for (Label a = 0; a < spec.rank(); ++a) {
    const OmegaLoop w = omega_coefficients(spec, a);
    for (Label b = 0; b < spec.rank(); ++b) {
      Complex v(0.0, 0.0);
      for (Label x = 0; x < spec.rank(); ++x) v += w.coeffs(x) * loop_value(spec, x, b);
      worst = std::max(worst, std::abs(v - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace anyon
