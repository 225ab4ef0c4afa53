// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Hard / naive / biased choice of the clause count for one instance.

#pragma once

#include <cstdint>
#include <vector>

#include "nlsat/phase.hpp"
#include "nlsat/sampler.hpp"
#include "nlsat/solver.hpp"

namespace nlsat {

struct StrategyConfig {
  /// Naive draws from this band.
  Rational naive_lo = Rational(1, 2);
  Rational naive_hi = Rational::from_int(8);
  /// Biased draws from [naive_lo, lo * low_factor] ∪ [hi * high_factor, naive_hi].
  Rational biased_low_factor = Rational(1, 2);
  Rational biased_high_factor = Rational::from_int(2);
  /// Share of hard draws taken from the band widened by `widen` on each side.
  double diversity_fraction = 0.1;
  Rational widen = Rational::from_int(1);
};

/// Closed alpha intervals; m is drawn uniformly over the union of their
/// admissible integers.
struct AlphaBands {
  std::vector<std::pair<Rational, Rational>> intervals;
};

AlphaBands strategy_bands(Strategy s, const CriticalBand* band, const StrategyConfig& cfg, bool diversity);

/// Uniform over the distinct admissible m of all intervals. Throws
/// StructuralError when none admits an integer.
std::int64_t draw_clause_count(std::uint32_t n, const AlphaBands& bands, Rng& rng);

struct ClauseCountDraw {
  std::int64_t m = 0;
  bool diversity = false;
};

/// Looks up the band when the strategy needs one (CalibrationError "run
/// calibrate first" otherwise); a hard draw becomes a diversity draw with
/// probability diversity_fraction when `allow_diversity` is set.
ClauseCountDraw draw_for_strategy(Strategy s, const CalibrationKey& key, const CalibrationTable& table,
                                  const StrategyConfig& cfg, bool allow_diversity, Rng& rng);

struct StrategySample {
  CnfFormula formula;
  SolveResult result;
  bool diversity = false;
};

/// One formula of spec.n variables under spec.strategy, solved.
StrategySample sample_with_strategy(const SampleSpec& spec, const CalibrationTable& table, const StrategyConfig& cfg,
                                    bool allow_diversity, Rng& rng, const SolverOptions& solver = {});

}  // namespace nlsat
