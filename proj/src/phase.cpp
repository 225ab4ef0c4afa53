// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/phase.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nlsat/error.hpp"
#include "nlsat/kernels.hpp"
#include "nlsat/rng.hpp"

namespace nlsat {

namespace {

constexpr double kBandLow = 0.4;
constexpr double kBandHigh = 0.6;

std::uint64_t point_stream(std::uint64_t seed, std::uint32_t n, double p_int, double p_neg, std::uint64_t where) {
  return derive_seed(seed, {tag("psat"), n, std::bit_cast<std::uint64_t>(p_int), std::bit_cast<std::uint64_t>(p_neg),
                            where});
}

PsatEstimate run_batch(const kernels::TrialBatch& batch, double alpha, const EstimateOptions& opts) {
  if (opts.trials == 0) throw StructuralError("estimate_psat needs at least one trial");
  std::uint64_t sat = opts.jobs <= 1 ? kernels::count_sat_serial(batch, opts.trials)
                                     : kernels::count_sat_omp(batch, opts.trials, opts.jobs);
  PsatEstimate e;
  e.alpha = alpha;
  e.sat_count = sat;
  e.trials = opts.trials;
  e.p_hat = static_cast<double>(sat) / static_cast<double>(opts.trials);
  e.half_width = wilson_half_width(sat, opts.trials);
  return e;
}

bool in_band(double p) { return p >= kBandLow && p <= kBandHigh; }

// A bisection run compares every pair of its points, so a single pair test at
// 95% would fire on sampling noise alone. Each pair uses a two-proportion
// z-test at z = 3.29 (two-sided 0.1%).
constexpr double kMonotoneZ = 3.29;

void check_monotone(std::vector<PsatEstimate> points) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const auto& a = points[i];
      const auto& b = points[j];
      if (b.p_hat <= a.p_hat) continue;
      double pooled = static_cast<double>(a.sat_count + b.sat_count) / static_cast<double>(a.trials + b.trials);
      double se = std::sqrt(pooled * (1 - pooled) * (1.0 / static_cast<double>(a.trials) + 1.0 / static_cast<double>(b.trials)));
      if (b.p_hat - a.p_hat > kMonotoneZ * se) {
        throw CalibrationError("non-monotone estimates: p_hat(" + format_double(a.alpha) + ")=" +
                               format_double(a.p_hat) + " < p_hat(" + format_double(b.alpha) + ")=" +
                               format_double(b.p_hat) + " beyond sampling noise; increase trials_per_point");
      }
    }
  }
}

}  // namespace

double wilson_half_width(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  return z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

PsatEstimate estimate_psat(std::uint32_t n, double p_int, double p_neg, double alpha, const EstimateOptions& opts) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw StructuralError("alpha must be finite and >= 0");
  kernels::TrialBatch batch;
  batch.n = n;
  batch.p_int = p_int;
  batch.p_neg = p_neg;
  batch.alpha = alpha;
  batch.stream_seed = point_stream(opts.seed, n, p_int, p_neg, std::bit_cast<std::uint64_t>(alpha));
  batch.retry_cap = opts.retry_cap;
  batch.solver = opts.solver;
  return run_batch(batch, alpha, opts);
}

PsatEstimate estimate_psat_at(std::uint32_t n, double p_int, double p_neg, std::int64_t m,
                              const EstimateOptions& opts) {
  if (m < 0) throw StructuralError("negative clause count");
  kernels::TrialBatch batch;
  batch.n = n;
  batch.p_int = p_int;
  batch.p_neg = p_neg;
  batch.fixed_m = m;
  const double alpha = static_cast<double>(m) / static_cast<double>(n);
  batch.stream_seed = point_stream(opts.seed, n, p_int, p_neg, std::bit_cast<std::uint64_t>(alpha));
  batch.retry_cap = opts.retry_cap;
  batch.solver = opts.solver;
  return run_batch(batch, alpha, opts);
}

PhaseCurve phase_curve(std::uint32_t n, double p_int, double p_neg, std::span<const double> alphas,
                       const EstimateOptions& opts) {
  PhaseCurve curve;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (i > 0 && !(alphas[i] > alphas[i - 1])) throw StructuralError("phase curve alphas must be strictly increasing");
    PsatEstimate e = estimate_psat(n, p_int, p_neg, alphas[i], opts);
    curve.alphas.push_back(alphas[i]);
    curve.p_sat.push_back(e.p_hat);
    curve.half_widths.push_back(e.half_width);
  }
  return curve;
}

CalibrationEntry calibrate_critical(std::uint32_t n, double p_int, double p_neg, const CalibrationOptions& opts) {
  if (n < 2) throw StructuralError("calibration needs n >= 2");
  if (!(opts.alpha_min >= 0.0) || !(opts.alpha_max > opts.alpha_min)) {
    throw StructuralError("calibration search range must satisfy 0 <= alpha_min < alpha_max");
  }
  EstimateOptions est;
  est.trials = opts.trials_per_point;
  est.seed = opts.seed;
  est.jobs = opts.jobs;
  est.solver = opts.solver;

  CalibrationEntry entry;
  auto at = [&](double alpha) {
    entry.points.push_back(estimate_psat(n, p_int, p_neg, alpha, est));
    return entry.points.back();
  };

  PsatEstimate low = at(opts.alpha_min);
  PsatEstimate high = at(opts.alpha_max);
  if (low.p_hat < 0.5) {
    throw CalibrationError("p_hat(" + format_double(opts.alpha_min) + ")=" + format_double(low.p_hat) +
                           " is already below 0.5; lower alpha_min");
  }
  if (high.p_hat > 0.5) {
    throw CalibrationError("p_hat(" + format_double(opts.alpha_max) + ")=" + format_double(high.p_hat) +
                           " is still above 0.5; raise alpha_max");
  }

  double lo = opts.alpha_min;
  double hi = opts.alpha_max;
  std::optional<double> alpha_c;
  for (int it = 0; it < opts.max_iterations && !alpha_c; ++it) {
    double mid = 0.5 * (lo + hi);
    PsatEstimate e = at(mid);
    if (std::abs(e.p_hat - 0.5) <= opts.tolerance) {
      alpha_c = mid;
    } else if (e.p_hat > 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  check_monotone(entry.points);
  if (!alpha_c) {
    throw CalibrationError("bisection did not reach |p_hat - 0.5| <= " + format_double(opts.tolerance) + " within " +
                           std::to_string(opts.max_iterations) + " iterations; increase trials_per_point");
  }

  // Band on the m/n grid around alpha_c.
  const std::int64_t m_min = static_cast<std::int64_t>(std::ceil(opts.alpha_min * n));
  const std::int64_t m_max = static_cast<std::int64_t>(std::floor(opts.alpha_max * n));
  std::int64_t lo_m = static_cast<std::int64_t>(std::floor(*alpha_c * n));
  std::int64_t hi_m = static_cast<std::int64_t>(std::ceil(*alpha_c * n));
  auto grid = [&](std::int64_t m) {
    entry.points.push_back(estimate_psat_at(n, p_int, p_neg, m, est));
    return entry.points.back().p_hat;
  };
  grid(lo_m);
  if (hi_m != lo_m) grid(hi_m);
  while (lo_m - 1 >= m_min && in_band(grid(lo_m - 1))) --lo_m;
  while (hi_m + 1 <= m_max && in_band(grid(hi_m + 1))) ++hi_m;
  check_monotone(entry.points);

  entry.band = CriticalBand{*alpha_c, Rational(lo_m, n), Rational(hi_m, n)};
  return entry;
}

//===----------------------------------------------------------------------===//
// CalibrationTable
//===----------------------------------------------------------------------===//

const CalibrationEntry* CalibrationTable::find(const CalibrationKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const CriticalBand* CalibrationTable::band(const CalibrationKey& key) const {
  const CalibrationEntry* e = find(key);
  return e && e->band ? &*e->band : nullptr;
}

void CalibrationTable::set(const CalibrationKey& key, CalibrationEntry entry) { entries_[key] = std::move(entry); }

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string CalibrationTable::to_text() const {
  std::string out = "nlsat-calibration 1\n";
  out += "# <n> <p_int> <p_neg> <alpha> <p_hat> <trials>\n";
  out += "# band <n> <p_int> <p_neg> <alpha_c> <alpha_lo> <alpha_hi>\n";
  for (const auto& [key, entry] : entries_) {
    std::string prefix =
        std::to_string(key.n) + " " + format_double(key.p_int) + " " + format_double(key.p_neg) + " ";
    for (const auto& p : entry.points) {
      out += prefix + format_double(p.alpha) + " " + format_double(p.p_hat) + " " + std::to_string(p.trials) + "\n";
    }
    if (entry.band) {
      out += "band " + prefix + format_double(entry.band->alpha_c) + " " + entry.band->lo.to_string() + " " +
             entry.band->hi.to_string() + "\n";
    }
  }
  return out;
}

namespace {

double to_double(std::string_view tok, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

CalibrationTable CalibrationTable::from_text(std::string_view text) {
  CalibrationTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (!header) {
      if (toks.size() != 2 || toks[0] != "nlsat-calibration" || toks[1] != "1") {
        throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected header 'nlsat-calibration 1'");
      }
      header = true;
      continue;
    }
    try {
      if (toks.size() == 7 && toks[0] == "band") {
        CalibrationKey key{static_cast<std::uint32_t>(to_double(toks[1], line_no)), to_double(toks[2], line_no),
                           to_double(toks[3], line_no)};
        table.entries_[key].band =
            CriticalBand{to_double(toks[4], line_no), Rational::parse(toks[5]), Rational::parse(toks[6])};
      } else if (toks.size() == 6) {
        CalibrationKey key{static_cast<std::uint32_t>(to_double(toks[0], line_no)), to_double(toks[1], line_no),
                           to_double(toks[2], line_no)};
        PsatEstimate p;
        p.alpha = to_double(toks[3], line_no);
        p.p_hat = to_double(toks[4], line_no);
        p.trials = static_cast<std::uint64_t>(to_double(toks[5], line_no));
        p.sat_count = static_cast<std::uint64_t>(std::llround(p.p_hat * static_cast<double>(p.trials)));
        p.half_width = wilson_half_width(p.sat_count, p.trials);
        table.entries_[key].points.push_back(p);
      } else {
        throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected 6 fields or a band record");
      }
    } catch (const StructuralError& e) {
      throw ParseError(line_no, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header && line_no > 0) throw ParseError(1, "missing 'nlsat-calibration 1' header");
  return table;
}

CalibrationTable CalibrationTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void CalibrationTable::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write calibration cache " + tmp.string());
    out << to_text();
  }
  std::filesystem::rename(tmp, path);
}

const CriticalBand& ensure_calibrated(CalibrationTable& table, const CalibrationKey& key,
                                      const CalibrationOptions& opts) {
  if (const CriticalBand* b = table.band(key)) return *b;
  table.set(key, calibrate_critical(key.n, key.p_int, key.p_neg, opts));
  return *table.band(key);
}

}  // namespace nlsat
