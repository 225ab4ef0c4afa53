// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Monte Carlo estimates of P(sat) as a function of the clause/variable ratio,
// bisection for the 0.5 crossover, and the persisted calibration table.

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlsat/rational.hpp"
#include "nlsat/solver.hpp"

namespace nlsat {

struct EstimateOptions {
  std::uint64_t trials = 500;
  std::uint64_t seed = 1;
  /// 1 runs the serial reference kernel; anything else the OpenMP kernel.
  int jobs = 1;
  /// Fresh formulas tried for a trial whose solve exhausts the budget.
  unsigned retry_cap = 8;
  SolverOptions solver;
};

struct PsatEstimate {
  double alpha = 0.0;
  double p_hat = 0.0;
  /// Wilson 95% half-width.
  double half_width = 0.0;
  std::uint64_t sat_count = 0;
  std::uint64_t trials = 0;
};

/// Half-width of the Wilson score interval for successes/trials.
double wilson_half_width(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

/// P(sat) at a real-valued alpha. Each trial draws m = floor(alpha*n) or
/// ceil(alpha*n), the latter with probability frac(alpha*n), so the expected
/// clause count is exactly alpha*n and the curve is continuous in alpha.
PsatEstimate estimate_psat(std::uint32_t n, double p_int, double p_neg, double alpha, const EstimateOptions& opts);

/// P(sat) at exactly m clauses.
PsatEstimate estimate_psat_at(std::uint32_t n, double p_int, double p_neg, std::int64_t m,
                              const EstimateOptions& opts);

struct PhaseCurve {
  std::vector<double> alphas;
  std::vector<double> p_sat;
  std::vector<double> half_widths;
};

/// Throws StructuralError unless `alphas` is strictly increasing.
PhaseCurve phase_curve(std::uint32_t n, double p_int, double p_neg, std::span<const double> alphas,
                       const EstimateOptions& opts);

struct CalibrationKey {
  std::uint32_t n = 0;
  double p_int = 1.0;
  double p_neg = 0.5;

  friend auto operator<=>(const CalibrationKey&, const CalibrationKey&) = default;
};

struct CriticalBand {
  /// Bisection result with |p_hat - 0.5| <= tolerance.
  double alpha_c = 0.0;
  /// Grid points m/n. The band always contains floor and ceil of alpha_c*n
  /// and extends outward while p_hat stays in [0.4, 0.6].
  Rational lo;
  Rational hi;
};

struct CalibrationEntry {
  std::vector<PsatEstimate> points;
  std::optional<CriticalBand> band;
};

struct CalibrationOptions {
  double tolerance = 0.02;
  std::uint64_t trials_per_point = 500;
  double alpha_min = 0.0;
  double alpha_max = 10.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  int max_iterations = 40;
  SolverOptions solver;
};

/// Locates the P(sat) = 0.5 crossover by bisection and the surrounding
/// [0.4, 0.6] band on the m/n grid. Throws CalibrationError when the search
/// range does not bracket 0.5 or the estimates are non-monotone beyond their
/// confidence intervals.
CalibrationEntry calibrate_critical(std::uint32_t n, double p_int, double p_neg, const CalibrationOptions& opts);

/// Calibration cache. Text format, one record per line:
///
///   nlsat-calibration 1
///   <n> <p_int> <p_neg> <alpha> <p_hat> <trials>
///   band <n> <p_int> <p_neg> <alpha_c> <alpha_lo> <alpha_hi>
///
/// `#` starts a comment line; alpha_lo/alpha_hi are exact ratios ("9/2").
class CalibrationTable {
 public:
  const CalibrationEntry* find(const CalibrationKey& key) const;
  const CriticalBand* band(const CalibrationKey& key) const;
  void set(const CalibrationKey& key, CalibrationEntry entry);
  const std::map<CalibrationKey, CalibrationEntry>& entries() const { return entries_; }

  std::string to_text() const;
  static CalibrationTable from_text(std::string_view text);

  /// Missing files load as an empty table.
  static CalibrationTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::map<CalibrationKey, CalibrationEntry> entries_;
};

/// Returns the band for `key`, calibrating and storing it first if absent.
const CriticalBand& ensure_calibrated(CalibrationTable& table, const CalibrationKey& key,
                                      const CalibrationOptions& opts);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace nlsat
