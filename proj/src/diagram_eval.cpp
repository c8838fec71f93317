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

#include "anyon/diagram_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace anyon {

namespace {

Eigen::Index dim(FusionSpaceCache& spaces, const std::vector<Label>& leaves, Label c) {
  return static_cast<Eigen::Index>(spaces.trees(leaves, c).size());
}

std::vector<Label> common_totals(FusionSpaceCache& spaces, const std::vector<Label>& bottom,
                                 const std::vector<Label>& top) {
  std::vector<Label> out;
  const auto& tb = spaces.totals(bottom);
  for (Label c : spaces.totals(top)) {
    if (std::find(tb.begin(), tb.end(), c) != tb.end()) out.push_back(c);
  }
  return out;
}

void flatten_tensor(const Diagram& d, std::vector<Diagram>& out) {
  if (d.kind() == Diagram::Kind::Tensor) {
    flatten_tensor(d.children()[0], out);
    flatten_tensor(d.children()[1], out);
  } else {
    out.push_back(d);
  }
}

}  // namespace

double DiagramEvaluator::vertex_weight(Label a, Label b, Label c) const {
  return std::pow(spec_->qdim(a) * spec_->qdim(b) / spec_->qdim(c), 0.25);
}

Morphism DiagramEvaluator::identity(const std::vector<Label>& strands) {
  Morphism m{strands, strands, {}};
  for (Label c : spaces_.totals(strands)) {
    const auto n = dim(spaces_, strands, c);
    m.blocks[c] = CMatrix::Identity(n, n);
  }
  return m;
}

Morphism DiagramEvaluator::compose(const Morphism& lower, const Morphism& upper) {
  if (lower.top != upper.bottom) throw ValidationError("compose: interface mismatch");
  Morphism m{lower.bottom, upper.top, {}};
  for (Label c : common_totals(spaces_, lower.bottom, upper.top)) {
    auto lo = lower.blocks.find(c);
    auto up = upper.blocks.find(c);
    if (lo != lower.blocks.end() && up != upper.blocks.end()) {
      m.blocks[c] = up->second * lo->second;
    } else {
      m.blocks[c] = CMatrix::Zero(dim(spaces_, upper.top, c), dim(spaces_, lower.bottom, c));
    }
  }
  return m;
}

Morphism DiagramEvaluator::tensor(const Morphism& left, const Morphism& right) {
  std::vector<Label> bottom = left.bottom;
  bottom.insert(bottom.end(), right.bottom.begin(), right.bottom.end());
  std::vector<Label> top = left.top;
  top.insert(top.end(), right.top.begin(), right.top.end());
  Morphism m{bottom, top, {}};
  for (Label c : common_totals(spaces_, bottom, top)) {
    const auto& rt = spaces_.recoupling(left.top, right.top, c);
    const auto& rb = spaces_.recoupling(left.bottom, right.bottom, c);
    CMatrix mid = CMatrix::Zero(static_cast<Eigen::Index>(rt.columns.size()),
                                static_cast<Eigen::Index>(rb.columns.size()));
    for (std::size_t i = 0; i < rt.columns.size(); ++i) {
      const auto& r = rt.columns[i];
      auto fl = left.blocks.find(r.c1);
      auto fr = right.blocks.find(r.c2);
      if (fl == left.blocks.end() || fr == right.blocks.end()) continue;
      for (std::size_t j = 0; j < rb.columns.size(); ++j) {
        const auto& s = rb.columns[j];
        if (s.c1 != r.c1 || s.c2 != r.c2) continue;
        mid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            fl->second(r.i1, s.i1) * fr->second(r.i2, s.i2);
      }
    }
    m.blocks[c] = rt.matrix * mid * rb.matrix.adjoint();
  }
  return m;
}

Morphism DiagramEvaluator::loop_layer(const std::vector<Label>& layer, int first, int last,
                                      const std::vector<Complex>& value_by_charge) {
  const std::vector<Label> before(layer.begin(), layer.begin() + first);
  const std::vector<Label> group(layer.begin() + first, layer.begin() + last + 1);
  const std::vector<Label> after(layer.begin() + last + 1, layer.end());
  Morphism w{group, group, {}};
  for (Label e : spaces_.totals(group)) {
    const auto n = dim(spaces_, group, e);
    w.blocks[e] = value_by_charge[e] * CMatrix::Identity(n, n);
  }
  return tensor(tensor(identity(before), w), identity(after));
}

Morphism DiagramEvaluator::generator(const Diagram& d) {
  using K = Diagram::Kind;
  const auto& lab = d.labels();
  auto one = [](Complex z) {
    CMatrix m(1, 1);
    m(0, 0) = z;
    return m;
  };
  Morphism m{d.bottom(), d.top(), {}};
  switch (d.kind()) {
    case K::Empty:
      m.blocks[kVacuum] = one(1.0);
      return m;
    case K::Scalar:
      m.blocks[kVacuum] = one(d.value());
      return m;
    case K::Identity:
      m.blocks[lab[0]] = one(1.0);
      return m;
    case K::Cup:
    case K::Cap:
      m.blocks[kVacuum] = one(std::sqrt(spec_->qdim(lab[0])));
      return m;
    case K::Split:
      m.blocks[lab[0]] = one(vertex_weight(lab[1], lab[2], lab[0]));
      return m;
    case K::Fuse:
      m.blocks[lab[2]] = one(vertex_weight(lab[0], lab[1], lab[2]));
      return m;
    case K::Omega: {
      // Expand omega_a = sum_x c_x (x-loop), then each x-loop acts by S_xe / S_0e.
      const OmegaLoop w = omega_coefficients(*spec_, lab[0]);
      std::vector<Complex> values(spec_->rank(), Complex(0.0, 0.0));
      for (Label e = 0; e < spec_->rank(); ++e) {
        for (Label x = 0; x < spec_->rank(); ++x) values[e] += w.coeffs(x) * loop_value(*spec_, x, e);
      }
      return loop_layer(d.bottom(), d.first(), d.last(), values);
    }
    case K::Loop: {
      std::vector<Complex> values(spec_->rank());
      for (Label e = 0; e < spec_->rank(); ++e) values[e] = loop_value(*spec_, lab[0], e);
      return loop_layer(d.bottom(), d.first(), d.last(), values);
    }
    default:
      break;
  }
  throw ValidationError("internal: not a generator");
}

Morphism DiagramEvaluator::tensor_as(const Diagram& l, const Diagram& r, EvalStrategy s) {
  const Morphism ml = evaluate(l, s);
  const Morphism mr = evaluate(r, s);
  switch (s) {
    case EvalStrategy::SliceBottomUp:
      return compose(tensor(ml, identity(r.bottom())), tensor(identity(l.top()), mr));
    case EvalStrategy::SliceTopDown:
      return compose(tensor(identity(l.bottom()), mr), tensor(ml, identity(r.top())));
    default:
      return tensor(ml, mr);
  }
}

Morphism DiagramEvaluator::evaluate(const Diagram& d, EvalStrategy strategy) {
  using K = Diagram::Kind;
  switch (d.kind()) {
    case K::Compose:
      return compose(evaluate(d.children()[0], strategy), evaluate(d.children()[1], strategy));
    case K::Sum: {
      Morphism a = evaluate(d.children()[0], strategy);
      const Morphism b = evaluate(d.children()[1], strategy);
      for (const auto& [c, blk] : b.blocks) {
        auto it = a.blocks.find(c);
        if (it == a.blocks.end()) {
          a.blocks[c] = blk;
        } else {
          it->second += blk;
        }
      }
      return a;
    }
    case K::Tensor: {
      if (strategy != EvalStrategy::RightFold) {
        return tensor_as(d.children()[0], d.children()[1], strategy);
      }
      std::vector<Diagram> factors;
      flatten_tensor(d, factors);
      Morphism acc = evaluate(factors.back(), strategy);
      for (auto it = factors.rbegin() + 1; it != factors.rend(); ++it) {
        acc = tensor(evaluate(*it, strategy), acc);
      }
      return acc;
    }
    default:
      return generator(d);
  }
}

Complex DiagramValue::coefficient(const BasisKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

Complex DiagramValue::scalar() const {
  if (!closed()) throw ValidationError("scalar() requires a closed diagram");
  return coefficient(BasisKey{});
}

void DiagramValue::add(const BasisKey& key, Complex c) {
  auto& slot = terms_[key];
  slot += c;
  if (std::abs(slot) <= kCoefficientCutoff) terms_.erase(key);
}

DiagramValue& DiagramValue::operator+=(const DiagramValue& other) {
  if (other.bottom_ != bottom_ || other.top_ != top_) {
    throw ValidationError("cannot add diagram values with different boundaries");
  }
  for (const auto& [k, v] : other.terms_) add(k, v);
  return *this;
}

DiagramValue& DiagramValue::operator*=(Complex s) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (std::abs(it->second) <= kCoefficientCutoff) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

double DiagramValue::distance(const DiagramValue& other) const {
  double worst = 0.0;
  for (const auto& [k, v] : terms_) worst = std::max(worst, std::abs(v - other.coefficient(k)));
  for (const auto& [k, v] : other.terms_) worst = std::max(worst, std::abs(v - coefficient(k)));
  return worst;
}

DiagramValue to_value(const Morphism& m, FusionSpaceCache& spaces) {
  DiagramValue v(m.bottom, m.top);
  for (const auto& [c, blk] : m.blocks) {
    const auto& rows = spaces.trees(m.top, c);
    const auto& cols = spaces.trees(m.bottom, c);
    for (Eigen::Index i = 0; i < blk.rows(); ++i) {
      for (Eigen::Index j = 0; j < blk.cols(); ++j) {
        if (std::abs(blk(i, j)) > kCoefficientCutoff) {
          v.add(BasisKey{c, rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]},
                blk(i, j));
        }
      }
    }
  }
  return v;
}

Complex evaluate_closed(const Diagram& d, const CategorySpec& spec, EvalStrategy strategy) {
  if (!d.closed()) {
    throw ValidationError("evaluate_closed: diagram has " + std::to_string(d.bottom().size()) +
                          " bottom and " + std::to_string(d.top().size()) + " top strands");
  }
  DiagramEvaluator ev(spec);
  const Morphism m = ev.evaluate(d, strategy);
  auto it = m.blocks.find(kVacuum);
  return it == m.blocks.end() ? Complex(0.0, 0.0) : it->second(0, 0);
}

DiagramValue reduce_open(const Diagram& d, const CategorySpec& spec, EvalStrategy strategy) {
  DiagramEvaluator ev(spec);
  return to_value(ev.evaluate(d, strategy), ev.spaces());
}

Diagram basis_diagram(const CategorySpec& spec, const std::vector<Label>& bottom,
                      const std::vector<Label>& top, const BasisKey& key) {
  auto check_tree = [&](const std::vector<Label>& leaves, const TreeEdges& t) {
    const auto trees = left_canonical_trees(spec, leaves, key.total);
    if (std::find(trees.begin(), trees.end(), t) == trees.end()) {
      throw ValidationError("basis_diagram: tree is not admissible for the boundary");
    }
  };
  check_tree(bottom, key.bottom);
  check_tree(top, key.top);

  DiagramEvaluator ev(spec);
  double weight = 1.0;
  Diagram lower = Diagram::identity(spec, bottom);
  // Fuse x_1..x_n down to the total along the left-canonical tree.
  for (std::size_t k = 1; k < bottom.size(); ++k) {
    const Label acc = key.bottom[k - 1], x = bottom[k], out = key.bottom[k];
    std::vector<Label> rest(bottom.begin() + static_cast<long>(k) + 1, bottom.end());
    const bool last = k + 1 == bottom.size();
    Diagram vertex = (last && top.empty()) ? Diagram::cap(spec, x) : Diagram::fuse(spec, acc, x, out);
    weight *= ev.vertex_weight(acc, x, out);
    lower = Diagram::compose(lower, Diagram::tensor(vertex, Diagram::identity(spec, rest)));
  }
  if (!bottom.empty() && top.empty() && bottom.size() == 1) {
    throw ValidationError("basis_diagram: a lone vacuum strand cannot end on an empty boundary");
  }
  if (bottom.empty() && top.size() == 1) {
    throw ValidationError("basis_diagram: a lone vacuum strand cannot start on an empty boundary");
  }
  // Split the total back out along the top tree, last vertex first.
  Diagram d = lower;
  for (std::size_t k = top.size(); k-- > 1;) {
    const Label acc = key.top[k - 1], x = top[k], out = key.top[k];
    std::vector<Label> rest(top.begin() + static_cast<long>(k) + 1, top.end());
    const bool first = k + 1 == top.size();
    Diagram vertex =
        (first && bottom.empty()) ? Diagram::cup(spec, x) : Diagram::split(spec, out, acc, x);
    weight *= ev.vertex_weight(acc, x, out);
    d = Diagram::compose(d, Diagram::tensor(vertex, Diagram::identity(spec, rest)));
  }
  return Diagram::tensor(Diagram::scalar(1.0 / weight), d);
}

std::string format_value(const DiagramValue& v, const CategorySpec& spec) {
  auto tree = [&](const TreeEdges& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) s += " ";
      s += spec.label_name(t[i]);
    }
    return s + ")";
  };
  std::ostringstream out;
  if (v.closed()) {
    char buf[96];
    const Complex z = v.scalar();
    std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real(), z.imag());
    out << buf << "\n";
    return out.str();
  }
  for (const auto& [k, z] : v.terms()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.15g%+.15gi", z.real(), z.imag());
    out << "total " << spec.label_name(k.total) << " top " << tree(k.top) << " bottom "
        << tree(k.bottom) << " : " << buf << "\n";
  }
  if (v.terms().empty()) out << "0\n";
  return out.str();
}

}  // namespace anyon
