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

#include <gtest/gtest.h>

#include <cmath>
#include <system_error>

#include "json.hpp"
#include "test_support.hpp"

namespace anyon {
namespace {

using testing::builtin;
using testing::kPhi;
using nlohmann::json;

json fib_doc() { return json::parse(testing::slurp(testing::data_path("categories/fibonacci.json"))); }

TEST(Category, FibonacciQdimIsLargestEigenvalueOfFusionMatrix) {
  const CategorySpec& fib = builtin("fibonacci");
  // N_tau = [[0,1],[1,1]]: eigenvalues (1 +- sqrt(5)) / 2.
  const double tr = 1.0, det = -1.0;
  const double largest = (tr + std::sqrt(tr * tr - 4.0 * det)) / 2.0;
  EXPECT_NEAR(fib.qdim(fib.resolve("tau")), largest, 1e-12);
  EXPECT_NEAR(spectral_qdim(fib, 1), largest, 1e-9);
  EXPECT_NEAR(fib.total_dim(), std::sqrt(1.0 + largest * largest), 1e-12);
}

TEST(Category, TrivialHasOneLabel) {
  const CategorySpec& t = builtin("trivial");
  EXPECT_EQ(t.rank(), 1);
  EXPECT_DOUBLE_EQ(t.total_dim(), 1.0);
  EXPECT_EQ(check_pentagon(t), 0.0);
  EXPECT_TRUE(verify_detection(t));
}

TEST(Category, IsingDimensions) {
  const CategorySpec& is = builtin("ising");
  const Label sigma = is.resolve("sigma");
  EXPECT_NEAR(is.qdim(sigma), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(spectral_qdim(is, sigma), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(is.total_dim(), 2.0, 1e-12);
}

TEST(Category, BuiltinsPassAllChecks) {
  for (const auto& name : testing::modular_builtins()) {
    SCOPED_TRACE(name);
    const CategorySpec& s = builtin(name);
    EXPECT_LT(pentagon_residual(s), 1e-10);
    EXPECT_LT(f_unitarity_error(s), 1e-12);
    EXPECT_LT(verlinde_residual(s), 1e-10);
    const ModularReport r = validate_modular(s);
    EXPECT_LT(r.s_unitarity, 1e-10);
    EXPECT_LT(r.s_symmetry, 1e-10);
    EXPECT_LT(r.s_vacuum_row, 1e-10);
    EXPECT_TRUE(r.passes(1e-9));
    EXPECT_TRUE(verify_detection(s));
  }
}

TEST(Category, BuiltinNamesAreListed) {
  const auto names = builtin_category_names();
  for (const auto& n : testing::modular_builtins()) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}

TEST(Category, FlippedOffDiagonalBreaksPentagon) {
  json doc = fib_doc();
  for (auto& f : doc["fsymbols"]) {
    if (f[0] == 1 && f[1] == 1 && f[2] == 1 && f[3] == 1 && f[4] == 0 && f[5] == 1) {
      f[6] = -f[6].get<double>();
    }
  }
  const CategorySpec bad = parse_category(doc.dump(), "perturbed");
  EXPECT_GT(check_pentagon(bad), 0.1);
}

TEST(Category, MonodromyExamples) {
  const CategorySpec& is = builtin("ising");
  const CategorySpec& fib = builtin("fibonacci");
  for (Label b = 0; b < is.rank(); ++b) EXPECT_NEAR(std::abs(monodromy(is, 0, b) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(monodromy(is, is.resolve("psi"), is.resolve("sigma")) + 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(monodromy(fib, 1, 1) + 1.0 / (kPhi * kPhi)), 0.0, 1e-12);
  for (const auto& name : testing::modular_builtins()) {
    const CategorySpec& s = builtin(name);
    for (Label a = 0; a < s.rank(); ++a) {
      for (Label b = 0; b < s.rank(); ++b) EXPECT_LE(std::abs(monodromy(s, a, b)), 1.0 + 1e-12);
    }
  }
}

TEST(Category, MonodromyOfAbelianPairsIsAPhase) {
  const CategorySpec& z3 = builtin("z3");
  for (Label a = 0; a < 3; ++a) {
    for (Label b = 0; b < 3; ++b) EXPECT_NEAR(std::abs(monodromy(z3, a, b)), 1.0, 1e-12);
  }
}

TEST(Category, IsingOmegaZeroCoefficients) {
  const CategorySpec& is = builtin("ising");
  const OmegaLoop w = omega_coefficients(is, 0);
  EXPECT_NEAR(std::abs(w.coeffs[0] - 0.25), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w.coeffs[1] - std::sqrt(2.0) / 4.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w.coeffs[2] - 0.25), 0.0, 1e-12);
}

TEST(Category, OmegaProjectorContract) {
  for (const auto& name : testing::modular_builtins()) {
    const CategorySpec& s = builtin(name);
    for (Label a = 0; a < s.rank(); ++a) {
      const OmegaLoop w = omega_coefficients(s, a);
      for (Label b = 0; b < s.rank(); ++b) {
        Complex sum = 0.0;
        for (Label x = 0; x < s.rank(); ++x) sum += w.coeffs[x] * loop_value(s, x, b);
        EXPECT_NEAR(std::abs(sum - (a == b ? 1.0 : 0.0)), 0.0, 1e-10) << name << " " << a << " " << b;
      }
    }
    EXPECT_LT(omega_projector_error(s), 1e-10);
  }
}

TEST(Category, VacuumPairElementIsInverseDimension) {
  for (const auto& name : testing::modular_builtins()) {
    const CategorySpec& s = builtin(name);
    for (Label a = 0; a < s.rank(); ++a) {
      const Label ab = s.dual(a);
      EXPECT_NEAR(std::abs(s.F(ab, a, ab, ab, 0, 0) - 1.0 / s.qdim(a)), 0.0, 1e-10) << name << a;
    }
  }
}

TEST(Category, ResolveByNameOrIndex) {
  const CategorySpec& is = builtin("ising");
  EXPECT_EQ(is.resolve("psi"), 2);
  EXPECT_EQ(is.resolve("1"), 0);
  EXPECT_THROW(is.resolve("tau"), FormatError);
}

TEST(CategoryErrors, MalformedDocument) {
  EXPECT_THROW(parse_category("{ not json", "bad"), FormatError);
  EXPECT_THROW(parse_category("[]", "bad"), FormatError);
  json doc = fib_doc();
  doc["extra"] = 1;
  EXPECT_THROW(parse_category(doc.dump(), "bad"), FormatError);
}

TEST(CategoryErrors, LabelOutOfRange) {
  json doc = fib_doc();
  doc["fusion"].push_back({1, 1, 7});
  EXPECT_THROW(parse_category(doc.dump(), "bad"), FormatError);
}

TEST(CategoryErrors, QdimMismatch) {
  json doc = fib_doc();
  doc["qdim"][1] = 1.6;
  try {
    parse_category(doc.dump(), "mismatch.json");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("mismatch.json"), std::string::npos);
  }
}

TEST(CategoryErrors, MultiplicityRejected) {
  json doc = fib_doc();
  doc["fusion"][4] = {1, 1, 1, 2};
  EXPECT_THROW(parse_category(doc.dump(), "bad"), ValidationError);
}

TEST(CategoryErrors, WrongVacuumPairSignRejected) {
  json doc = fib_doc();
  for (auto& f : doc["fsymbols"]) {
    if (f[0] == 1 && f[1] == 1 && f[2] == 1 && f[3] == 1 && f[4] == 0 && f[5] == 0) {
      f[6] = -f[6].get<double>();
    }
  }
  EXPECT_THROW(parse_category(doc.dump(), "bad"), ValidationError);
}

TEST(CategoryErrors, MissingFile) {
  EXPECT_THROW(resolve_category("/nonexistent/cat.json"), std::system_error);
}

}  // namespace
}  // namespace anyon
