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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anyon/anyon_state.hpp"
#include "anyon/rng.hpp"

namespace anyon {

/// Interferometer enclosing exposed leaves 0..prefix-1. prefix equal to the
/// leaf count encloses the whole system.
struct InterferometerRegion {
  int prefix = 1;
  std::optional<Label> probe;  // metadata only
};

enum class MeasurementKind { Projective, Interferometric, InterferometricUnread };

std::string to_string(MeasurementKind kind);

struct MeasurementOutcome {
  Label charge = kVacuum;
  double probability = 0.0;
  MeasurementKind kind = MeasurementKind::Projective;
};

/// Probabilities below this are treated as zero before sampling.
inline constexpr double kPruneProbability = 1e-12;
/// Probabilities below minus this are reported as an invalid state.
inline constexpr double kNegativeProbability = 1e-10;

/// Inverse-CDF draw over labels in ascending order using one uniform u.
Label sample_charge(const std::vector<double>& probabilities, double u);

/// Superoperator removing every non-vacuum charge line between a region and
/// its complement.
///
/// For a region of total a and a complement of total b fused to c, the
/// physical block P_c maps to sum_{c''} K^{ab}_{c''c} P_c. The weights are
/// found by expanding split(c->a,b) fuse(a,b->c) in the basis of diagrams
/// where a and b exchange a line e, inserting an omega_0 loop on e and
/// evaluating with the diagram engine.
class ChargeLineDecoherence {
 public:
  explicit ChargeLineDecoherence(const CategorySpec& spec);

  const CategorySpec& spec() const { return *spec_; }
  /// K^{ab}_{out,in}; zero when a channel is not admissible.
  double weight(Label a, Label b, Label out, Label in) const {
    return k_[((static_cast<std::size_t>(a) * rank_ + b) * rank_ + out) * rank_ + in];
  }

  /// Applies the superoperator across the cut after prefix m (1 <= m < n).
  /// Returns a left-canonical state over every reachable total.
  AnyonDensityMatrix apply(const AnyonDensityMatrix& rho, int m) const;

 private:
  const CategorySpec* spec_;
  std::size_t rank_;
  std::vector<double> k_;
};

/// Probability of each region charge and the normalized projection onto one.
std::vector<double> region_distribution(const AnyonDensityMatrix& rho, int m);
std::pair<double, AnyonDensityMatrix> project_region(const AnyonDensityMatrix& rho, int m,
                                                     Label a);
std::pair<double, AnyonKet> project_region(const AnyonKet& k, int m, Label a);
/// sum_a P_a rho P_a on the region charge.
AnyonDensityMatrix dephase_region(const AnyonDensityMatrix& rho, int m);

/// Projective measurement of one exposed leaf (an atom or a composite).
std::pair<MeasurementOutcome, AnyonDensityMatrix> proj_measure(const AnyonDensityMatrix& rho,
                                                               int leaf, Rng& rng);
/// Projection of one exposed leaf onto charge a, normalized.
std::pair<double, AnyonDensityMatrix> project_leaf(const AnyonDensityMatrix& rho, int leaf,
                                                   Label a);

/// Asymptotic interferometric measurement of a prefix region: sample the
/// region charge, project, remove region/complement charge lines, renormalize.
std::pair<MeasurementOutcome, AnyonDensityMatrix> int_measure(const AnyonDensityMatrix& rho,
                                                              const InterferometerRegion& region,
                                                              Rng& rng,
                                                              const ChargeLineDecoherence& dec);
std::pair<MeasurementOutcome, AnyonDensityMatrix> int_measure(const AnyonDensityMatrix& rho,
                                                              const InterferometerRegion& region,
                                                              Rng& rng);

/// Interferometer run without reading the outcome. Deterministic.
AnyonDensityMatrix int_decohere_unread(const AnyonDensityMatrix& rho,
                                       const InterferometerRegion& region,
                                       const ChargeLineDecoherence& dec);
AnyonDensityMatrix int_decohere_unread(const AnyonDensityMatrix& rho,
                                       const InterferometerRegion& region);

}  // namespace anyon
