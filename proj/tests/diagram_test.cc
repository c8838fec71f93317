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

#include "anyon/diagram.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace anyon {
namespace {

using testing::builtin;

TEST(DiagramParse, CupBoundaries) {
  const CategorySpec& fib = builtin("fibonacci");
  const Diagram d = parse_diagram("cup(tau)", fib);
  EXPECT_TRUE(d.bottom().empty());
  EXPECT_EQ(d.top(), (std::vector<Label>{1, 1}));
  EXPECT_EQ(d.kind(), Diagram::Kind::Cup);
}

TEST(DiagramParse, CupOfNonSelfDualCharge) {
  const CategorySpec& z3 = builtin("z3");
  const Diagram d = parse_diagram("cup(1)", z3);
  EXPECT_EQ(d.top(), (std::vector<Label>{z3.dual(1), 1}));
}

TEST(DiagramParse, VacuumBubbleIsClosed) {
  const CategorySpec& fib = builtin("fibonacci");
  EXPECT_TRUE(parse_diagram("cap(tau) \xE2\x88\x98 cup(tau)", fib).closed());
  EXPECT_TRUE(parse_diagram("cup(tau) ; cap(tau)", fib).closed());
}

TEST(DiagramParse, VacuumPairFileIsClosed) {
  const CategorySpec& is = builtin("ising");
  const std::string text = testing::slurp(testing::data_path("diagrams/vacuum_pair.dgm"));
  const std::string top = text.substr(0, text.find("\n/\n"));
  const Diagram d = parse_diagram(top, is, {{"a", is.resolve("sigma")}});
  EXPECT_TRUE(d.closed());
  EXPECT_EQ(d.generator_count(), 3);
}

TEST(DiagramParse, OmegaInfersItsLayer) {
  const CategorySpec& fib = builtin("fibonacci");
  const Diagram d = parse_diagram("cup(tau) | cup(tau) ; omega(0){1..2}", fib);
  EXPECT_EQ(d.top(), (std::vector<Label>{1, 1, 1, 1}));
}

TEST(DiagramParse, SumOfEqualTypes) {
  const CategorySpec& fib = builtin("fibonacci");
  const Diagram d = parse_diagram("id(tau) + scalar(2) | id(tau)", fib);
  EXPECT_EQ(d.kind(), Diagram::Kind::Sum);
  EXPECT_EQ(d.top(), std::vector<Label>{1});
}

TEST(DiagramParse, TextRoundTrip) {
  const CategorySpec& is = builtin("ising");
  const Diagram d = parse_diagram(
      "cup(sigma) ; split(sigma -> sigma, 1) | id(sigma) ; id(sigma) | fuse(1, sigma -> sigma) ; "
      "loop(psi){0..1} ; cap(sigma)",
      is);
  const Diagram e = parse_diagram(d.to_string(is), is);
  EXPECT_EQ(e.to_string(is), d.to_string(is));
  EXPECT_TRUE(e.closed());
}

void expect_error_at(const std::string& text, int line, int column) {
  const CategorySpec& fib = builtin("fibonacci");
  try {
    parse_diagram(text, fib);
    FAIL() << "expected DiagramError for: " << text;
  } catch (const DiagramError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.column(), column) << e.what();
  }
}

TEST(DiagramErrors, SyntaxPositions) {
  expect_error_at("cup(tau", 1, 8);
  expect_error_at("cup(tau) ;\n  bogus(tau)", 2, 3);
  expect_error_at("cup(sigma)", 1, 5);
  expect_error_at("cup(tau) $", 1, 10);
}

TEST(DiagramErrors, InterfaceMismatch) {
  const CategorySpec& fib = builtin("fibonacci");
  EXPECT_THROW(parse_diagram("cup(tau) ; id(tau)", fib), DiagramError);
  EXPECT_THROW(parse_diagram("id(tau) + id(1)", fib), DiagramError);
}

TEST(DiagramErrors, InadmissibleVertex) {
  const CategorySpec& is = builtin("ising");
  EXPECT_THROW(parse_diagram("split(sigma -> sigma, sigma)", is), DiagramError);
  EXPECT_THROW(parse_diagram("fuse(psi, psi -> sigma)", is), DiagramError);
}

TEST(DiagramErrors, OmegaRangeChecked) {
  const CategorySpec& fib = builtin("fibonacci");
  EXPECT_THROW(parse_diagram("cup(tau) ; omega(0){1..3}", fib), DiagramError);
  EXPECT_THROW(parse_diagram("cup(tau) ; omega(0){1..0}", fib), DiagramError);
}

TEST(DiagramErrors, UnboundPlaceholder) {
  const CategorySpec& fib = builtin("fibonacci");
  EXPECT_THROW(parse_diagram("cup($a)", fib), DiagramError);
  EXPECT_NO_THROW(parse_diagram("cup($a)", fib, {{"a", 1}}));
}

TEST(DiagramBuild, TensorWithEmptyIsNeutral) {
  const CategorySpec& fib = builtin("fibonacci");
  const Diagram c = Diagram::cup(fib, 1);
  EXPECT_EQ((Diagram::empty() | c).top(), c.top());
  EXPECT_EQ((c | Diagram::empty()).top(), c.top());
  EXPECT_EQ(Diagram::identity(fib, std::vector<Label>{}).kind(), Diagram::Kind::Empty);
}

TEST(DiagramBuild, ComposeChecksInterfaces) {
  const CategorySpec& fib = builtin("fibonacci");
  EXPECT_THROW(Diagram::compose(Diagram::cup(fib, 1), Diagram::identity(fib, 1)), ValidationError);
  EXPECT_NO_THROW(Diagram::compose(Diagram::cup(fib, 1), Diagram::cap(fib, 1)));
}

}  // namespace
}  // namespace anyon
