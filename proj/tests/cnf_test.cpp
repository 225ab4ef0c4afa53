// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "nlsat/cnf.hpp"
#include "nlsat/error.hpp"
#include "nlsat/rational.hpp"
#include "nlsat/rng.hpp"
#include "oracle.hpp"

namespace nlsat {
namespace {

TEST(Rational, NormalizesSignAndGcd) {
  Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_THROW(Rational(1, 0), StructuralError);
}

TEST(Rational, ParseForms) {
  EXPECT_EQ(Rational::parse("17/4"), Rational(17, 4));
  EXPECT_EQ(Rational::parse("4.25"), Rational(17, 4));
  EXPECT_EQ(Rational::parse("-0.5"), Rational(-1, 2));
  EXPECT_EQ(Rational::parse("7"), Rational::from_int(7));
  EXPECT_THROW(Rational::parse("4."), StructuralError);
  EXPECT_THROW(Rational::parse("x"), StructuralError);
  EXPECT_THROW(Rational::parse("1/0"), StructuralError);
}

TEST(Rational, ExactString) {
  EXPECT_EQ(Rational(17, 4).to_exact_string(), "4.25");
  EXPECT_EQ(Rational(22, 5).to_exact_string(), "4.4");
  EXPECT_EQ(Rational(7, 1).to_exact_string(), "7.0");
  EXPECT_EQ(Rational(0, 3).to_exact_string(), "0.0");
  EXPECT_EQ(Rational(-1, 8).to_exact_string(), "-0.125");
  EXPECT_EQ(Rational(14, 3).to_exact_string(), "14/3");
  // Round trip through parse for every m/n on a grid.
  for (std::int64_t n = 1; n <= 40; ++n) {
    for (std::int64_t m = 0; m <= 8 * n; ++m) {
      Rational r(m, n);
      ASSERT_EQ(Rational::parse(r.to_exact_string()), r) << m << "/" << n;
    }
  }
}

TEST(Rational, FloorCeilTimes) {
  Rational r(14, 3);
  EXPECT_EQ(r.ceil_times(3), 14);
  EXPECT_EQ(r.ceil_times(10), 47);
  EXPECT_EQ(r.floor_times(10), 46);
  EXPECT_EQ(Rational(-7, 2).floor_times(1), -4);
  EXPECT_EQ(Rational(-7, 2).ceil_times(1), -3);
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
}

TEST(Clause, CanonicalSortsAndRejects) {
  Clause c = Clause::canonical({Literal::neg(3), Literal::pos(1), Literal::pos(2)});
  ASSERT_EQ(c.width(), 3u);
  EXPECT_EQ(c[0], Literal::pos(1));
  EXPECT_EQ(c[2], Literal::neg(3));
  EXPECT_FALSE(c.is_raw());
  EXPECT_THROW(Clause::canonical({Literal::pos(1), Literal::pos(1)}), StructuralError);
  EXPECT_THROW(Clause::canonical({Literal::pos(1), Literal::neg(1)}), StructuralError);
  EXPECT_THROW(Clause::canonical({Literal::pos(0)}), StructuralError);
  EXPECT_THROW(Clause::canonical(std::span<const Literal>{}), StructuralError);
  EXPECT_THROW(Clause::canonical({Literal::pos(1), Literal::pos(2), Literal::pos(3), Literal::pos(4)}),
               StructuralError);
}

TEST(Clause, NormalizeShapes) {
  auto t = normalize_clause(Clause::raw({Literal::pos(2), Literal::neg(2), Literal::pos(1)}));
  EXPECT_EQ(t.shape, ClauseShape::Tautology);
  auto u = normalize_clause(Clause::raw({Literal::neg(4), Literal::neg(4), Literal::neg(4)}));
  EXPECT_EQ(u.shape, ClauseShape::Unit);
  EXPECT_EQ(u.clause, Clause::canonical({Literal::neg(4)}));
  auto two = normalize_clause(Clause::raw({Literal::pos(5), Literal::neg(1), Literal::pos(5)}));
  EXPECT_EQ(two.shape, ClauseShape::TwoClause);
  EXPECT_EQ(two.clause, Clause::canonical({Literal::neg(1), Literal::pos(5)}));
  auto three = normalize_clause(Clause::raw({Literal::pos(3), Literal::pos(1), Literal::pos(2)}));
  EXPECT_EQ(three.shape, ClauseShape::ThreeClause);
  EXPECT_FALSE(three.clause.is_raw());
}

// Normalization preserves the clause's truth value under every assignment.
TEST(Clause, NormalizePreservesSemantics) {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<Literal, 3> lits;
    for (auto& l : lits) l = {VarId{1 + static_cast<std::uint32_t>(rng.below(4))}, rng.bernoulli(0.5)};
    Clause raw = Clause::raw(lits);
    auto norm = normalize_clause(raw);
    for (std::uint64_t bits = 0; bits < 16; ++bits) {
      bool expect = testing::clause_true(raw, bits);
      bool got = norm.shape == ClauseShape::Tautology ? true : testing::clause_true(norm.clause, bits);
      ASSERT_EQ(expect, got);
    }
  }
}

TEST(CnfFormula, AlphaAndRange) {
  CnfFormula f(4, {Clause::canonical({Literal::pos(1), Literal::neg(4)})});
  f.add_clause(Clause::canonical({Literal::pos(2)}));
  EXPECT_EQ(f.alpha(), Rational(1, 2));
  EXPECT_THROW(f.add_clause(Clause::canonical({Literal::pos(5)})), StructuralError);
  EXPECT_THROW(CnfFormula().alpha(), StructuralError);
}

TEST(CnfFormula, EvaluateMatchesTruthTable) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto f = testing::random_formula(6, 1 + rng.below(20), 0.5, rng);
    for (std::uint64_t bits = 0; bits < 64; ++bits) {
      Assignment a(6);
      for (std::uint32_t v = 1; v <= 6; ++v) a.set(VarId{v}, (bits >> (v - 1)) & 1u);
      bool expect = true;
      for (const auto& c : f.clauses()) expect = expect && testing::clause_true(c, bits);
      ASSERT_EQ(evaluate(f, a), expect);
    }
  }
}

TEST(CnfFormula, EvaluateRejectsPartial) {
  CnfFormula f(3, {Clause::canonical({Literal::pos(1)})});
  Assignment a(3);
  a.set(VarId{1}, true);
  try {
    evaluate(f, a);
    FAIL();
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("missing variables: 2 3"), std::string::npos);
  }
}

TEST(Dimacs, RoundTrip) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto f = testing::random_formula(1 + static_cast<std::uint32_t>(rng.below(12)), rng.below(30), 0.7, rng);
    ASSERT_EQ(from_dimacs(to_dimacs(f)), f);
  }
}

TEST(Dimacs, Errors) {
  EXPECT_THROW(from_dimacs("1 2 0\n"), ParseError);
  EXPECT_THROW(from_dimacs("p cnf 2 1\n1 3 0\n"), ParseError);
  EXPECT_THROW(from_dimacs("p cnf 2 2\n1 2 0\n"), ParseError);
  EXPECT_THROW(from_dimacs("p cnf 2 1\n1 2\n"), ParseError);
  EXPECT_THROW(from_dimacs("p cnf 4 1\n1 2 3 4 0\n"), ParseError);
  try {
    from_dimacs("c hello\np cnf 2 1\n1 x 0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 3u);
  }
  auto f = from_dimacs("c comment\np cnf 3 2\n-1 2 0\n-2\n3 0\n");
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.clauses()[1], Clause::canonical({Literal::neg(2), Literal::pos(3)}));
}

TEST(Dimacs, RawClausesStayRaw) {
  auto f = from_dimacs("p cnf 3 1\n2 1 2 0\n");
  EXPECT_TRUE(f.clauses()[0].is_raw());
  EXPECT_THROW(to_dimacs(f), StructuralError);
}

}  // namespace
}  // namespace nlsat
