// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "nlsat/error.hpp"
#include "nlsat/sampler.hpp"
#include "nlsat/strategy.hpp"
#include "oracle.hpp"

namespace nlsat {
namespace {

constexpr double kZ999 = 3.090;  // upper 0.1% normal quantile

TEST(Sampler, AdmissibleCounts) {
  auto r = admissible_clause_counts(10, Rational::parse("4.15"), Rational::parse("4.25"));
  EXPECT_EQ(r.lo, 42);
  EXPECT_EQ(r.hi, 42);
  EXPECT_TRUE(admissible_clause_counts(10, Rational::parse("4.11"), Rational::parse("4.19")).empty());
  auto all = admissible_clause_counts(12, Rational(14, 3), Rational(31, 6));
  EXPECT_EQ(all.lo, 56);
  EXPECT_EQ(all.hi, 62);
}

TEST(Sampler, EmptyBandIsAnError) {
  SampleSpec spec;
  spec.n = 10;
  spec.alpha_min = Rational::parse("4.11");
  spec.alpha_max = Rational::parse("4.19");
  Rng rng(1);
  try {
    sample_formula(spec, rng);
    FAIL();
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("no integer m"), std::string::npos);
  }
}

TEST(Sampler, ValidateRejects) {
  SampleSpec spec;
  spec.n = 1;
  EXPECT_THROW(spec.validate(), StructuralError);
  spec.n = 5;
  spec.p_int = 1.5;
  EXPECT_THROW(spec.validate(), StructuralError);
  spec.p_int = 1;
  spec.alpha_min = Rational::from_int(3);
  spec.alpha_max = Rational::from_int(2);
  EXPECT_THROW(spec.validate(), StructuralError);
  EXPECT_THROW(parse_strategy("easy"), StructuralError);
  EXPECT_EQ(parse_strategy("biased"), Strategy::Biased);
}

TEST(Sampler, ClausesUseDistinctVariables) {
  SampleSpec spec;
  spec.n = 3;
  spec.p_int = 0.5;
  Rng rng(2);
  for (int i = 0; i < 5000; ++i) {
    Clause c = sample_clause(spec, rng);
    std::set<std::uint32_t> vars;
    for (const auto& l : c.literals()) vars.insert(l.var.index);
    ASSERT_EQ(vars.size(), c.width());
    ASSERT_FALSE(c.is_raw());
  }
}

TEST(Sampler, WidthSignAndVariableFrequencies) {
  SampleSpec spec;
  spec.n = 8;
  spec.p_int = 0.3;
  spec.p_neg = 0.5;
  Rng rng(3);
  const int draws = 40000;
  std::vector<double> var_count(spec.n, 0.0);
  double threes = 0, negs = 0, lits = 0;
  for (int i = 0; i < draws; ++i) {
    Clause c = sample_clause(spec, rng);
    threes += c.width() == 3;
    for (const auto& l : c.literals()) {
      var_count[l.var.index - 1] += 1;
      negs += l.negated;
      lits += 1;
    }
  }
  auto within = [](double observed, double trials, double p) {
    return std::abs(observed - trials * p) <= kZ999 * std::sqrt(trials * p * (1 - p));
  };
  EXPECT_TRUE(within(threes, draws, 0.3)) << threes;
  EXPECT_TRUE(within(negs, lits, 0.5)) << negs;
  std::vector<double> expected(spec.n, lits / spec.n);
  EXPECT_LT(testing::chi_square(var_count, expected), testing::chi_square_critical(spec.n - 1, kZ999));
}

// Ordered triples with replacement over n variables: all equal with
// probability n/n^3, exactly two equal with 3n(n-1)/n^3.
TEST(Sampler, WithReplacementCoincidences) {
  SampleSpec spec;
  spec.n = 5;
  spec.with_replacement = true;
  Rng rng(4);
  const int draws = 30000;
  double triple = 0, pair = 0;
  for (int i = 0; i < draws; ++i) {
    Clause c = sample_clause(spec, rng);
    ASSERT_TRUE(c.is_raw());
    auto a = c[0].var, b = c[1].var, d = c[2].var;
    int eq = (a == b) + (a == d) + (b == d);
    triple += eq == 3;
    pair += eq == 1;
  }
  const double n = spec.n;
  const double p_triple = 1.0 / (n * n), p_pair = 3.0 * (n - 1) / (n * n);
  EXPECT_NEAR(triple / draws, p_triple, kZ999 * std::sqrt(p_triple * (1 - p_triple) / draws));
  EXPECT_NEAR(pair / draws, p_pair, kZ999 * std::sqrt(p_pair * (1 - p_pair) / draws));
}

TEST(Sampler, ClauseCountUniformOverBand) {
  SampleSpec spec;
  spec.n = 10;
  spec.alpha_min = Rational::parse("4.0");
  spec.alpha_max = Rational::parse("4.5");
  Rng rng(5);
  std::map<std::size_t, double> seen;
  const int draws = 6000;
  for (int i = 0; i < draws; ++i) seen[sample_formula(spec, rng).size()] += 1;
  ASSERT_EQ(seen.size(), 6u);
  EXPECT_EQ(seen.begin()->first, 40u);
  EXPECT_EQ(seen.rbegin()->first, 45u);
  std::vector<double> obs, exp;
  for (auto& [m, c] : seen) {
    obs.push_back(c);
    exp.push_back(draws / 6.0);
  }
  EXPECT_LT(testing::chi_square(obs, exp), testing::chi_square_critical(5, kZ999));
}

TEST(Sampler, SeededDeterminism) {
  SampleSpec spec;
  spec.n = 12;
  Rng a(99), b(99), c(100);
  auto fa = sample_formula(spec, a);
  EXPECT_EQ(fa, sample_formula(spec, b));
  EXPECT_NE(fa, sample_formula(spec, c));
}

TEST(Sampler, TooFewVariablesForWidth) {
  SampleSpec spec;
  spec.n = 2;
  spec.p_int = 1.0;
  Rng rng(1);
  EXPECT_THROW(sample_clause(spec, rng), StructuralError);
}

TEST(Rng, BelowIsUniform) {
  Rng rng(6);
  std::vector<double> obs(7, 0.0);
  for (int i = 0; i < 70000; ++i) obs[rng.below(7)] += 1;
  EXPECT_LT(testing::chi_square(obs, std::vector<double>(7, 10000.0)), testing::chi_square_critical(6, kZ999));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_EQ(tag("grl"), tag("grl"));
}

CriticalBand band_12() { return {4.88, Rational(14, 3), Rational(31, 6)}; }

TEST(Strategy, Bands) {
  StrategyConfig cfg;
  CriticalBand b = band_12();
  auto naive = strategy_bands(Strategy::Naive, nullptr, cfg, false);
  ASSERT_EQ(naive.intervals.size(), 1u);
  EXPECT_EQ(naive.intervals[0].second, Rational::from_int(8));

  auto hard = strategy_bands(Strategy::Hard, &b, cfg, false);
  EXPECT_EQ(hard.intervals[0], std::make_pair(Rational(14, 3), Rational(31, 6)));
  auto wide = strategy_bands(Strategy::Hard, &b, cfg, true);
  EXPECT_EQ(wide.intervals[0], std::make_pair(Rational(11, 3), Rational(37, 6)));

  // 2 * 31/6 = 31/3 lies past naive_hi = 8, so only the low side remains.
  auto biased = strategy_bands(Strategy::Biased, &b, cfg, false);
  ASSERT_EQ(biased.intervals.size(), 1u);
  EXPECT_EQ(biased.intervals[0], std::make_pair(Rational(1, 2), Rational(7, 3)));
  cfg.naive_hi = Rational::from_int(12);
  auto both = strategy_bands(Strategy::Biased, &b, cfg, false);
  ASSERT_EQ(both.intervals.size(), 2u);
  EXPECT_EQ(both.intervals[1], std::make_pair(Rational(31, 3), Rational::from_int(12)));

  EXPECT_THROW(strategy_bands(Strategy::Hard, nullptr, cfg, false), CalibrationError);
}

TEST(Strategy, HardWidenClampsAtZero) {
  StrategyConfig cfg;
  cfg.widen = Rational::from_int(3);
  CriticalBand b{2.0, Rational(2, 1), Rational(21, 10)};
  auto wide = strategy_bands(Strategy::Hard, &b, cfg, true);
  EXPECT_EQ(wide.intervals[0].first, Rational::from_int(0));
}

// Every admissible m in the union is equally likely, overlaps counted once.
TEST(Strategy, DrawIsUniformOverUnion) {
  AlphaBands bands{{{Rational(1, 1), Rational(2, 1)}, {Rational(3, 2), Rational(5, 2)}, {Rational(4, 1), Rational(4, 1)}}};
  Rng rng(7);
  std::map<std::int64_t, double> seen;
  const int draws = 16000;
  for (int i = 0; i < draws; ++i) seen[draw_clause_count(4, bands, rng)] += 1;
  // n=4: m in 4..10 and 16.
  std::vector<std::int64_t> keys;
  std::vector<double> obs;
  for (auto& [m, c] : seen) {
    keys.push_back(m);
    obs.push_back(c);
  }
  EXPECT_EQ(keys, (std::vector<std::int64_t>{4, 5, 6, 7, 8, 9, 10, 16}));
  EXPECT_LT(testing::chi_square(obs, std::vector<double>(8, draws / 8.0)), testing::chi_square_critical(7, kZ999));
  EXPECT_THROW(draw_clause_count(10, AlphaBands{{{Rational::parse("4.11"), Rational::parse("4.19")}}}, rng),
               StructuralError);
}

TEST(Strategy, DiversityFraction) {
  CalibrationTable table;
  CalibrationKey key{12, 1.0, 0.5};
  table.set(key, CalibrationEntry{{}, band_12()});
  StrategyConfig cfg;
  cfg.diversity_fraction = 0.25;
  Rng rng(8);
  double div = 0;
  const int draws = 8000;
  for (int i = 0; i < draws; ++i) {
    auto d = draw_for_strategy(Strategy::Hard, key, table, cfg, true, rng);
    div += d.diversity;
    if (!d.diversity) {
      ASSERT_TRUE(d.m >= 56 && d.m <= 62) << d.m;
    }
  }
  EXPECT_NEAR(div / draws, 0.25, kZ999 * std::sqrt(0.25 * 0.75 / draws));
  for (int i = 0; i < 500; ++i) {
    ASSERT_FALSE(draw_for_strategy(Strategy::Hard, key, table, cfg, false, rng).diversity);
    ASSERT_FALSE(draw_for_strategy(Strategy::Biased, key, table, cfg, true, rng).diversity);
  }
  EXPECT_THROW(draw_for_strategy(Strategy::Hard, CalibrationKey{13, 1.0, 0.5}, table, cfg, true, rng),
               CalibrationError);
}

TEST(Strategy, SampleSolvesItsFormula) {
  CalibrationTable table;
  table.set({12, 1.0, 0.5}, CalibrationEntry{{}, band_12()});
  SampleSpec spec;
  spec.n = 12;
  Rng rng(10);
  for (int i = 0; i < 50; ++i) {
    auto s = sample_with_strategy(spec, table, StrategyConfig{}, true, rng);
    ASSERT_EQ(s.result.label == SatLabel::Sat, testing::truth_table_sat(s.formula));
  }
}

}  // namespace
}  // namespace nlsat
