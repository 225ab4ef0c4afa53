// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/strategy.hpp"

#include <algorithm>

#include "nlsat/error.hpp"

namespace nlsat {

namespace {

Rational scale(const Rational& a, const Rational& k) {
  // Small numerators only; the band endpoints are m/n with n <= a few hundred.
  return Rational(a.num() * k.num(), a.den() * k.den());
}

}  // namespace

AlphaBands strategy_bands(Strategy s, const CriticalBand* band, const StrategyConfig& cfg, bool diversity) {
  AlphaBands out;
  if (s == Strategy::Naive) {
    out.intervals.emplace_back(cfg.naive_lo, cfg.naive_hi);
    return out;
  }
  if (band == nullptr) throw CalibrationError("no critical band for this size; run calibrate first");
  if (s == Strategy::Hard) {
    if (!diversity) {
      out.intervals.emplace_back(band->lo, band->hi);
    } else {
      Rational lo = band->lo - cfg.widen;
      if (lo < Rational::from_int(0)) lo = Rational::from_int(0);
      out.intervals.emplace_back(lo, band->hi + cfg.widen);
    }
    return out;
  }
  Rational low_end = scale(band->lo, cfg.biased_low_factor);
  Rational high_start = scale(band->hi, cfg.biased_high_factor);
  if (!(low_end < cfg.naive_lo)) out.intervals.emplace_back(cfg.naive_lo, low_end);
  if (!(cfg.naive_hi < high_start)) out.intervals.emplace_back(high_start, cfg.naive_hi);
  return out;
}

std::int64_t draw_clause_count(std::uint32_t n, const AlphaBands& bands, Rng& rng) {
  std::vector<ClauseCountRange> ranges;
  for (const auto& [lo, hi] : bands.intervals) {
    auto r = admissible_clause_counts(n, lo, hi);
    if (!r.empty()) ranges.push_back(r);
  }
  std::sort(ranges.begin(), ranges.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  // Merge overlaps so every distinct m has the same weight.
  std::vector<ClauseCountRange> merged;
  for (const auto& r : ranges) {
    if (!merged.empty() && r.lo <= merged.back().hi + 1) {
      merged.back().hi = std::max(merged.back().hi, r.hi);
    } else {
      merged.push_back(r);
    }
  }
  std::int64_t total = 0;
  for (const auto& r : merged) total += r.count();
  if (total == 0) {
    std::string desc;
    for (const auto& [lo, hi] : bands.intervals) desc += " [" + lo.to_string() + ", " + hi.to_string() + "]";
    throw StructuralError("no integer clause count at n=" + std::to_string(n) + " in alpha bands" + desc);
  }
  auto pick = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
  for (const auto& r : merged) {
    if (pick < r.count()) return r.lo + pick;
    pick -= r.count();
  }
  return merged.back().hi;
}

ClauseCountDraw draw_for_strategy(Strategy s, const CalibrationKey& key, const CalibrationTable& table,
                                  const StrategyConfig& cfg, bool allow_diversity, Rng& rng) {
  const CriticalBand* band = nullptr;
  if (s != Strategy::Naive) {
    band = table.band(key);
    if (band == nullptr) {
      throw CalibrationError("no calibration for n=" + std::to_string(key.n) + " p_int=" + format_double(key.p_int) +
                             " p_neg=" + format_double(key.p_neg) + "; run calibrate first");
    }
  }
  ClauseCountDraw d;
  // The coin is always tossed so the stream layout does not depend on the strategy.
  bool coin = rng.bernoulli(cfg.diversity_fraction);
  d.diversity = s == Strategy::Hard && allow_diversity && coin;
  d.m = draw_clause_count(key.n, strategy_bands(s, band, cfg, d.diversity), rng);
  return d;
}

StrategySample sample_with_strategy(const SampleSpec& spec, const CalibrationTable& table, const StrategyConfig& cfg,
                                    bool allow_diversity, Rng& rng, const SolverOptions& solver) {
  spec.validate();
  CalibrationKey key{spec.n, spec.p_int, spec.p_neg};
  auto draw = draw_for_strategy(spec.strategy, key, table, cfg, allow_diversity, rng);
  StrategySample out;
  out.formula = sample_formula_with_m(spec, draw.m, rng);
  out.result = solve(out.formula, solver);
  out.diversity = draw.diversity;
  return out;
}

}  // namespace nlsat
