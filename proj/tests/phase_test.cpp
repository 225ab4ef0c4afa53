// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "nlsat/error.hpp"
#include "nlsat/phase.hpp"

namespace nlsat {
namespace {

// Wilson bounds are the roots in p of (p_hat - p)^2 = z^2 p (1 - p) / n.
double wilson_by_roots(double successes, double n, double z) {
  double ph = successes / n, k = z * z / n;
  double a = 1 + k, b = -(2 * ph + k), c = ph * ph;
  double disc = std::sqrt(b * b - 4 * a * c);
  return disc / (2 * a);
}

TEST(Phase, WilsonHalfWidth) {
  for (std::uint64_t n : {1u, 10u, 200u, 500u}) {
    for (std::uint64_t s = 0; s <= n; s += std::max<std::uint64_t>(1, n / 7)) {
      EXPECT_NEAR(wilson_half_width(s, n), wilson_by_roots(double(s), double(n), 1.96), 1e-12) << s << "/" << n;
    }
  }
  EXPECT_EQ(wilson_half_width(0, 0), 1.0);
}

TEST(Phase, EstimatesFallWithAlpha) {
  EstimateOptions opts;
  opts.trials = 200;
  auto lo = estimate_psat(10, 1.0, 0.5, 1.0, opts);
  auto hi = estimate_psat(10, 1.0, 0.5, 8.0, opts);
  EXPECT_GT(lo.p_hat, 0.9);
  EXPECT_LT(hi.p_hat, 0.1);
  EXPECT_EQ(lo.trials, 200u);
  EXPECT_NEAR(lo.half_width, wilson_half_width(lo.sat_count, 200), 1e-15);
  EXPECT_THROW(estimate_psat(10, 1.0, 0.5, -1.0, opts), StructuralError);
}

TEST(Phase, EstimateIndependentOfJobs) {
  EstimateOptions one, many;
  one.trials = many.trials = 300;
  many.jobs = 4;
  EXPECT_EQ(estimate_psat(12, 1.0, 0.5, 4.5, one).sat_count, estimate_psat(12, 1.0, 0.5, 4.5, many).sat_count);
  EXPECT_EQ(estimate_psat_at(12, 1.0, 0.5, 54, one).sat_count, estimate_psat_at(12, 1.0, 0.5, 54, many).sat_count);
}

TEST(Phase, CurveRejectsUnsortedAlphas) {
  std::vector<double> alphas{2.0, 1.0};
  EXPECT_THROW(phase_curve(8, 1.0, 0.5, alphas, EstimateOptions{}), StructuralError);
}

TEST(Phase, CalibrateSmallN) {
  CalibrationOptions opts;
  opts.trials_per_point = 300;
  auto entry = calibrate_critical(10, 1.0, 0.5, opts);
  ASSERT_TRUE(entry.band);
  const auto& b = *entry.band;
  EXPECT_GT(b.alpha_c, 3.5);
  EXPECT_LT(b.alpha_c, 5.5);
  EXPECT_LE(b.lo.to_double(), b.alpha_c + 0.1);
  EXPECT_GE(b.hi.to_double(), b.alpha_c - 0.1);
  // Band edges sit on the m/10 grid.
  EXPECT_EQ(10 % b.lo.den(), 0);
  EXPECT_EQ(10 % b.hi.den(), 0);
}

TEST(Phase, CalibrateNeedsBracket) {
  CalibrationOptions opts;
  opts.trials_per_point = 100;
  opts.alpha_max = 2.0;
  EXPECT_THROW(calibrate_critical(10, 1.0, 0.5, opts), CalibrationError);
  opts.alpha_min = 6.0;
  opts.alpha_max = 10.0;
  EXPECT_THROW(calibrate_critical(10, 1.0, 0.5, opts), CalibrationError);
  opts.alpha_min = 3.0;
  opts.alpha_max = 3.0;
  EXPECT_THROW(calibrate_critical(10, 1.0, 0.5, opts), StructuralError);
}

TEST(Phase, TableTextRoundTrip) {
  CalibrationTable t;
  CalibrationEntry e;
  e.points.push_back({4.5, 0.52, 0.04, 156, 300});
  e.band = CriticalBand{4.5, Rational(43, 10), Rational(47, 10)};
  t.set({10, 1.0, 0.5}, e);
  t.set({7, 0.0, 0.5}, CalibrationEntry{{}, CriticalBand{2.0, Rational(2, 1), Rational(15, 7)}});
  auto back = CalibrationTable::from_text(t.to_text());
  EXPECT_EQ(back.to_text(), t.to_text());
  const auto* b = back.band({10, 1.0, 0.5});
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->hi, Rational(47, 10));
  EXPECT_EQ(back.find({10, 1.0, 0.5})->points[0].sat_count, 156u);
  EXPECT_EQ(back.band({11, 1.0, 0.5}), nullptr);
}

TEST(Phase, TableParseErrors) {
  EXPECT_THROW(CalibrationTable::from_text("hello\n"), ParseError);
  EXPECT_THROW(CalibrationTable::from_text("nlsat-calibration 1\n10 1 0.5 x 0.5 300\n"), ParseError);
  EXPECT_THROW(CalibrationTable::from_text("nlsat-calibration 1\nband 10 1 0.5 4.5 1/0 2\n"), ParseError);
  EXPECT_TRUE(CalibrationTable::from_text("").entries().empty());
}

TEST(Phase, SaveAndLoad) {
  auto dir = std::filesystem::temp_directory_path() / "nlsat_phase_test";
  std::filesystem::remove_all(dir);
  CalibrationTable t;
  t.set({9, 1.0, 0.5}, CalibrationEntry{{}, CriticalBand{4.4, Rational(4, 1), Rational(5, 1)}});
  t.save(dir / "sub" / "cal.txt");
  EXPECT_EQ(CalibrationTable::load(dir / "sub" / "cal.txt").to_text(), t.to_text());
  EXPECT_TRUE(CalibrationTable::load(dir / "missing.txt").entries().empty());
  std::filesystem::remove_all(dir);
}

TEST(Phase, EnsureCalibratedUsesCache) {
  CalibrationTable t;
  CriticalBand fake{9.0, Rational(9, 1), Rational(9, 1)};
  t.set({10, 1.0, 0.5}, CalibrationEntry{{}, fake});
  CalibrationOptions opts;
  EXPECT_EQ(ensure_calibrated(t, {10, 1.0, 0.5}, opts).alpha_c, 9.0);
}

TEST(Phase, FormatDoubleShortest) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

}  // namespace
}  // namespace nlsat
