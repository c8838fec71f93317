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

#include "anyon/measurement.hpp"

#include <Eigen/LU>

#include "anyon/diagram_eval.hpp"

namespace anyon {

std::string to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::Projective:
      return "proj";
    case MeasurementKind::Interferometric:
      return "int";
    case MeasurementKind::InterferometricUnread:
      return "int-unread";
  }
  return "?";
}

Label sample_charge(const std::vector<double>& probabilities, double u) {
  std::vector<double> q(probabilities.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (p < -kNegativeProbability) {
      throw ValidationError("negative outcome probability " + std::to_string(p) + " for charge " +
                            std::to_string(i));
    }
    q[i] = p < kPruneProbability ? 0.0 : p;
    total += q[i];
  }
  if (!(total > 0.0)) throw ValidationError("no outcome has positive probability");
  double acc = 0.0;
  Label last = -1;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    last = static_cast<Label>(i);
    acc += q[i] / total;
    if (u < acc) return last;
  }
  return last;
}

ChargeLineDecoherence::ChargeLineDecoherence(const CategorySpec& spec)
    : spec_(&spec), rank_(static_cast<std::size_t>(spec.rank())) {
  k_.assign(rank_ * rank_ * rank_ * rank_, 0.0);
  DiagramEvaluator ev(spec);
  const int r = spec.rank();
  auto block = [](const Morphism& m, Label c) {
    auto it = m.blocks.find(c);
    return it == m.blocks.end() ? Complex(0.0, 0.0) : it->second(0, 0);
  };
  for (Label a = 0; a < r; ++a) {
    for (Label b = 0; b < r; ++b) {
      const auto& cs = spec.channels(a, b);
      std::vector<Label> es;
      for (Label e = 0; e < r; ++e) {
        if (spec.fuses(a, e, a) && spec.fuses(e, b, b)) es.push_back(e);
      }
      const auto nc = static_cast<Eigen::Index>(cs.size());
      if (static_cast<Eigen::Index>(es.size()) != nc) {
        throw ValidationError("decoherence: channel counts differ for " + spec.label_name(a) +
                              ", " + spec.label_name(b));
      }
      // Columns: the diagrams X_c = split(c->a,b) fuse(a,b->c), as values per channel.
      CMatrix x = CMatrix::Zero(nc, nc);
      for (Eigen::Index j = 0; j < nc; ++j) {
        const Label c = cs[j];
        const Morphism m = ev.evaluate(
            Diagram::compose(Diagram::fuse(spec, a, b, c), Diagram::split(spec, c, a, b)));
        for (Eigen::Index i = 0; i < nc; ++i) x(i, j) = block(m, cs[i]);
      }
      // Columns: a emits e, b absorbs it; with and without omega_0 on e.
      CMatrix y = CMatrix::Zero(nc, nc);
      CMatrix y0 = CMatrix::Zero(nc, nc);
      for (Eigen::Index j = 0; j < nc; ++j) {
        const Label e = es[j];
        const Diagram lower = Diagram::split(spec, a, a, e) | Diagram::identity(spec, b);
        const Diagram upper = Diagram::identity(spec, a) | Diagram::fuse(spec, e, b, b);
        const Diagram loop = Diagram::omega(spec, kVacuum, {a, e, b}, 1, 1);
        const Morphism plain = ev.evaluate(Diagram::compose(lower, upper));
        const Morphism cut = ev.evaluate(Diagram::compose(Diagram::compose(lower, loop), upper));
        for (Eigen::Index i = 0; i < nc; ++i) {
          y(i, j) = block(plain, cs[i]);
          y0(i, j) = block(cut, cs[i]);
        }
      }
      // x = y g, so the decohered image of X_c is column c of y0 g.
      const CMatrix g = y.fullPivLu().solve(x);
      const CMatrix image = y0 * g;
      for (Eigen::Index j = 0; j < nc; ++j) {
        const Label c = cs[j];
        for (Eigen::Index i = 0; i < nc; ++i) {
          const Label out = cs[i];
          // Matrix-unit coefficient, then physical normalization d_out / d_in.
          const Complex km = image(i, j) / x(j, j);
          const std::size_t idx =
              ((static_cast<std::size_t>(a) * rank_ + b) * rank_ + out) * rank_ + c;
          k_[idx] = km.real() * spec.qdim(out) / spec.qdim(c);
        }
      }
    }
  }
}

AnyonDensityMatrix ChargeLineDecoherence::apply(const AnyonDensityMatrix& rho, int m) const {
  if (rho.spec().serial() != spec_->serial()) {
    throw ValidationError("decoherence built for category " + spec_->name() +
                          " applied to a state of " + rho.spec().name());
  }
  const AnyonDensityMatrix r = to_prefix_split(with_all_totals(rho), m);
  const auto& b = r.basis();
  const auto& s = b.shape();
  const int x = s.root(), pin = s.left(x), pout = s.right(x);
  CMatrix out = CMatrix::Zero(b.dim(), b.dim());
  for (int i = 0; i < b.dim(); ++i) {
    const auto& vi = b.element(i);
    for (int j = 0; j < b.dim(); ++j) {
      const Complex z = r.matrix()(i, j);
      if (z == Complex(0.0, 0.0)) continue;
      const auto& vj = b.element(j);
      if (vi[pin] != vj[pin] || vi[pout] != vj[pout] || vi[x] != vj[x]) continue;
      const Label ca = vi[pin], cb = vi[pout], c = vi[x];
      for (Label c2 : spec_->channels(ca, cb)) {
        const double w = weight(ca, cb, c2, c);
        if (w == 0.0) continue;
        std::vector<Label> wi = vi, wj = vj;
        wi[x] = c2;
        wj[x] = c2;
        out(b.index_of(wi), b.index_of(wj)) += w * z;
      }
    }
  }
  return to_left_canonical(from_prefix_split(AnyonDensityMatrix(r.basis_ptr(), out), m));
}

namespace {

void check_region(const AnyonDensityMatrix& rho, int m) {
  if (m < 1 || m > rho.leaf_count()) {
    throw ValidationError("interferometer region of " + std::to_string(m) + " leaves invalid for " +
                          std::to_string(rho.leaf_count()) + " leaves");
  }
}

/// Keeps entries whose labels at `node` are both `a` (or both equal if a < 0).
CMatrix mask_node(const FusionBasis& b, const CMatrix& m, int node, Label a) {
  CMatrix out = m;
  for (int i = 0; i < b.dim(); ++i) {
    for (int j = 0; j < b.dim(); ++j) {
      const Label li = b.element(i)[node], lj = b.element(j)[node];
      const bool keep = a < 0 ? li == lj : (li == a && lj == a);
      if (!keep) out(i, j) = 0.0;
    }
  }
  return out;
}

std::pair<double, AnyonDensityMatrix> project_node(const AnyonDensityMatrix& r, int node, Label a) {
  const CMatrix masked = mask_node(r.basis(), r.matrix(), node, a);
  const double p = masked.trace().real() / r.trace();
  if (!(p > 0.0)) throw ValidationError("projection onto a zero-probability charge");
  return {p, AnyonDensityMatrix(r.basis_ptr(), masked / masked.trace().real())};
}

}  // namespace

std::vector<double> region_distribution(const AnyonDensityMatrix& rho, int m) {
  check_region(rho, m);
  return charge_distribution(rho, m);
}

std::pair<double, AnyonDensityMatrix> project_region(const AnyonDensityMatrix& rho, int m,
                                                     Label a) {
  check_region(rho, m);
  const AnyonDensityMatrix r = to_left_canonical(rho);
  return project_node(r, r.basis().shape().prefix_node(m), a);
}

std::pair<double, AnyonKet> project_region(const AnyonKet& k, int m, Label a) {
  const AnyonKet c = to_left_canonical(k);
  const int node = c.basis().shape().prefix_node(m);
  CVector v = c.amplitudes();
  for (int i = 0; i < c.basis().dim(); ++i) {
    if (c.basis().element(i)[node] != a) v(i) = 0.0;
  }
  const double p = v.squaredNorm() / c.amplitudes().squaredNorm();
  if (!(p > 0.0)) throw ValidationError("projection onto a zero-probability charge");
  return {p, AnyonKet(c.basis_ptr(), v).normalized()};
}

AnyonDensityMatrix dephase_region(const AnyonDensityMatrix& rho, int m) {
  check_region(rho, m);
  const AnyonDensityMatrix r = to_left_canonical(rho);
  return AnyonDensityMatrix(r.basis_ptr(),
                            mask_node(r.basis(), r.matrix(), r.basis().shape().prefix_node(m), -1));
}

std::pair<double, AnyonDensityMatrix> project_leaf(const AnyonDensityMatrix& rho, int leaf,
                                                   Label a) {
  const auto& s = rho.basis().shape();
  if (leaf < 0 || leaf >= s.leaf_count()) {
    throw ValidationError("leaf index " + std::to_string(leaf) + " out of range");
  }
  return project_node(rho, s.leaves()[leaf], a);
}

std::pair<MeasurementOutcome, AnyonDensityMatrix> proj_measure(const AnyonDensityMatrix& rho,
                                                               int leaf, Rng& rng) {
  const std::vector<double> dist = leaf_charge_distribution(rho, leaf);
  const Label a = sample_charge(dist, rng.uniform());
  auto [p, post] = project_leaf(rho, leaf, a);
  return {MeasurementOutcome{a, dist[a], MeasurementKind::Projective}, std::move(post)};
}

std::pair<MeasurementOutcome, AnyonDensityMatrix> int_measure(const AnyonDensityMatrix& rho,
                                                              const InterferometerRegion& region,
                                                              Rng& rng,
                                                              const ChargeLineDecoherence& dec) {
  const int m = region.prefix;
  const std::vector<double> dist = region_distribution(rho, m);
  const Label a = sample_charge(dist, rng.uniform());
  auto [p, post] = project_region(rho, m, a);
  if (m < rho.leaf_count()) post = dec.apply(post, m).normalized();
  return {MeasurementOutcome{a, dist[a], MeasurementKind::Interferometric}, std::move(post)};
}

std::pair<MeasurementOutcome, AnyonDensityMatrix> int_measure(const AnyonDensityMatrix& rho,
                                                              const InterferometerRegion& region,
                                                              Rng& rng) {
  return int_measure(rho, region, rng, ChargeLineDecoherence(rho.spec()));
}

AnyonDensityMatrix int_decohere_unread(const AnyonDensityMatrix& rho,
                                       const InterferometerRegion& region,
                                       const ChargeLineDecoherence& dec) {
  const int m = region.prefix;
  AnyonDensityMatrix out = dephase_region(rho, m);
  if (m < rho.leaf_count()) out = dec.apply(out, m);
  return out;
}

AnyonDensityMatrix int_decohere_unread(const AnyonDensityMatrix& rho,
                                       const InterferometerRegion& region) {
  return int_decohere_unread(rho, region, ChargeLineDecoherence(rho.spec()));
}

}  // namespace anyon
