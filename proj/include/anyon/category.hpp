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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anyon/linalg.hpp"

namespace anyon {

/// Index of a charge in a category. Label 0 is always the vacuum.
using Label = int;
inline constexpr Label kVacuum = 0;

/// Malformed input document (category file, diagram, state snapshot, log).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that is well formed but violates a mathematical requirement.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChargeLabel {
  Label index = kVacuum;
  std::string name;
  Label dual = kVacuum;
  double qdim = 1.0;
};

/// Multiplicity-free unitary modular tensor category data.
///
/// F-symbol convention: |(a b)_e c; d> = sum_f F^{abc}_{d;e,f} |a (b c)_f; d>.
/// Instances are immutable once loaded and may be shared across threads.
class CategorySpec {
 public:
  const std::string& name() const { return name_; }
  /// Identifies the loaded data; copies share it. Keys per-category caches.
  std::uint64_t serial() const { return serial_; }
  int rank() const { return static_cast<int>(labels_.size()); }
  const std::vector<ChargeLabel>& labels() const { return labels_; }
  const ChargeLabel& label(Label a) const { return labels_.at(a); }
  const std::string& label_name(Label a) const { return labels_.at(a).name; }
  Label dual(Label a) const { return labels_[a].dual; }
  double qdim(Label a) const { return labels_[a].qdim; }
  double total_dim() const { return total_dim_; }

  /// N^c_{ab} in {0, 1}.
  bool fuses(Label a, Label b, Label c) const { return fusion_[index3(a, b, c)] != 0; }
  /// Channels c with N^c_{ab} = 1, ascending.
  const std::vector<Label>& channels(Label a, Label b) const { return channels_[a * rank() + b]; }

  /// F^{abc}_{d;e,f}; zero when the labelling is not admissible.
  Complex F(Label a, Label b, Label c, Label d, Label e, Label f) const {
    return fsymbols_[index6(a, b, c, d, e, f)];
  }
  /// F-matrix for fixed (a,b,c,d); rows indexed by e, columns by f.
  CMatrix f_matrix(Label a, Label b, Label c, Label d, std::vector<Label>* rows = nullptr,
                   std::vector<Label>* cols = nullptr) const;

  const CMatrix& smatrix() const { return smatrix_; }
  Complex S(Label a, Label b) const { return smatrix_(a, b); }

  std::optional<Label> find(std::string_view name) const;
  /// Resolves a label by name, falling back to a decimal index. Throws FormatError.
  Label resolve(std::string_view name_or_index) const;

 private:
  friend CategorySpec parse_category(std::string_view, const std::string&);

  std::size_t index3(Label a, Label b, Label c) const {
    const auto n = static_cast<std::size_t>(rank());
    return (static_cast<std::size_t>(a) * n + b) * n + c;
  }
  std::size_t index6(Label a, Label b, Label c, Label d, Label e, Label f) const {
    const auto n = static_cast<std::size_t>(rank());
    return ((((static_cast<std::size_t>(a) * n + b) * n + c) * n + d) * n + e) * n + f;
  }

  static std::uint64_t next_serial();

  std::uint64_t serial_ = next_serial();
  std::string name_;
  std::vector<ChargeLabel> labels_;
  std::vector<unsigned char> fusion_;
  std::vector<std::vector<Label>> channels_;
  std::vector<Complex> fsymbols_;
  CMatrix smatrix_;
  double total_dim_ = 1.0;
};

/// Parses a category document. `source` names the input in error messages.
///
/// Populates duals, quantum dimensions and D. Structural problems throw
/// FormatError; violations of the fusion axioms, quantum-dimension mismatches
/// against the fusion-matrix spectral radius (1e-9), fusion multiplicity, and
/// a vacuum-pair element F^{a abar a}_{a;0,0} other than +1/d_a throw
/// ValidationError. Pentagon and S-matrix checks are separate.
CategorySpec parse_category(std::string_view text, const std::string& source = "<string>");
CategorySpec load_category(const std::filesystem::path& path);

/// Directory holding the bundled category files.
std::filesystem::path builtin_category_dir();
std::vector<std::string> builtin_category_names();
/// Accepts a bundled name ("fibonacci") or a path to a category file.
CategorySpec resolve_category(const std::string& name_or_path);

/// Largest fusion-matrix eigenvalue modulus for charge a.
double spectral_qdim(const CategorySpec& spec, Label a);

/// Worst of the pentagon residual and the F-matrix unitarity error.
double check_pentagon(const CategorySpec& spec);
double pentagon_residual(const CategorySpec& spec);
double f_unitarity_error(const CategorySpec& spec);

/// Largest |sum_x S_ax S_bx conj(S_cx) / S_0x - N^c_ab|.
double verlinde_residual(const CategorySpec& spec);

struct ModularReport {
  double pentagon = 0.0;
  double f_unitarity = 0.0;
  double s_unitarity = 0.0;
  double s_symmetry = 0.0;
  double s_vacuum_row = 0.0;  // max |S_0a - d_a/D|
  double verlinde = 0.0;
  double omega_projector = 0.0;
  bool detection = true;

  double worst_residual() const;
  bool passes(double tolerance) const { return detection && worst_residual() <= tolerance; }
};

ModularReport validate_modular(const CategorySpec& spec);

/// M_{ab} = S_ab S_00 / (S_0a S_0b).
Complex monodromy(const CategorySpec& spec, Label a, Label b);

/// True iff every nontrivial charge has some b with M_{ba} != 1.
bool verify_detection(const CategorySpec& spec, double tolerance = 1e-9);

/// Formal combination sum_x c_x (x-loop) projecting an encircled line onto charge `target`.
struct OmegaLoop {
  Label target = kVacuum;
  CVector coeffs;
};

/// c_x = S_0a conj(S_xa).
OmegaLoop omega_coefficients(const CategorySpec& spec, Label a);

/// Value S_xb / S_0b of an x-loop encircling a b-line.
Complex loop_value(const CategorySpec& spec, Label x, Label b);

/// Largest deviation of sum_x c_x S_xb/S_0b from delta_ab over all pairs.
double omega_projector_error(const CategorySpec& spec);

}  // namespace anyon
