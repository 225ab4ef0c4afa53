// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: nlsat_acceptance [path-to-nlsat-cli]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "nlsat/dataset.hpp"
#include "nlsat/kernels.hpp"
#include "nlsat/phase.hpp"
#include "nlsat/retrofit.hpp"
#include "nlsat/sampler.hpp"
#include "nlsat/solver.hpp"
#include "nlsat/strategy.hpp"
#include "oracle.hpp"

#ifndef NLSAT_CLI_PATH
#define NLSAT_CLI_PATH "nlsat"
#endif

namespace fs = std::filesystem;
using namespace nlsat;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void run(int id, const char* name, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++g_failed;
  std::printf("%s [%d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Shared state: one calibration table and a scratch directory.
struct Env {
  fs::path dir;
  CalibrationTable table;
  fs::path cache() const { return dir / "cache" / "calibration.txt"; }
};

Outcome oracle_equivalence() {
  Rng rng(20260101);
  const double p_ints[] = {0.0, 0.5, 1.0};
  int agree = 0, total = 0;
  for (int i = 0; i < 6000; ++i) {
    SampleSpec spec;
    spec.n = 3 + static_cast<std::uint32_t>(rng.below(14));
    spec.p_int = p_ints[i % 3];
    double alpha = 1.0 + 5.0 * rng.uniform01();
    auto m = static_cast<std::int64_t>(alpha * spec.n + 0.5);
    auto f = sample_formula_with_m(spec, m, rng);
    bool a = solve(f).label == SatLabel::Sat;
    bool b = solve_bruteforce(f).label == SatLabel::Sat;
    agree += a == b;
    ++total;
  }
  return {agree == total, fmt("%d/%d labels agree", agree, total)};
}

Outcome phase_transition() {
  CalibrationOptions co;
  co.trials_per_point = 500;
  co.jobs = kernels::default_jobs();
  auto three = calibrate_critical(12, 1.0, 0.5, co);
  auto two = calibrate_critical(12, 0.0, 0.5, co);
  if (!three.band || !two.band) return {false, "calibration produced no band"};
  const double ac = three.band->alpha_c;
  EstimateOptions eo;
  eo.trials = 500;
  eo.seed = 777;
  eo.jobs = co.jobs;
  auto lo = estimate_psat(12, 1.0, 0.5, 2.0, eo);
  auto mid = estimate_psat(12, 1.0, 0.5, ac, eo);
  auto hi = estimate_psat(12, 1.0, 0.5, 7.0, eo);
  bool in_range = ac >= 3.5 && ac <= 5.5;
  bool gap1 = lo.p_hat - mid.p_hat > lo.half_width + mid.half_width;
  bool gap2 = mid.p_hat - hi.p_hat > mid.half_width + hi.half_width;
  bool left = two.band->alpha_c < ac;
  return {in_range && gap1 && gap2 && left,
          fmt("alpha_c=%.3f, p(2)=%.3f±%.3f p(alpha_c)=%.3f±%.3f p(7)=%.3f±%.3f, 2-SAT alpha_c=%.3f", ac, lo.p_hat,
              lo.half_width, mid.p_hat, mid.half_width, hi.p_hat, hi.half_width, two.band->alpha_c)};
}

Outcome critical_band(Env& env) {
  CalibrationOptions co;
  co.jobs = kernels::default_jobs();
  ensure_calibrated(env.table, {10, 1.0, 0.5}, co);
  SampleSpec spec;
  spec.n = 10;
  spec.strategy = Strategy::Hard;
  StrategyConfig sc;
  Rng rng(31);
  int sat = 0;
  const int total = 2000;
  for (int i = 0; i < total; ++i) {
    sat += sample_with_strategy(spec, env.table, sc, false, rng).result.label == SatLabel::Sat;
  }
  double frac = static_cast<double>(sat) / total;
  return {frac >= 0.4 && frac <= 0.6, fmt("raw sat fraction %.3f over %d hard formulas", frac, total)};
}

Outcome hardness_ordering(Env& env, const std::vector<InstanceRecord>& ruletaker) {
  CalibrationOptions co;
  co.jobs = kernels::default_jobs();
  ensure_calibrated(env.table, {10, 1.0, 0.5}, co);
  StrategyConfig sc;
  auto median_conflicts = [&](Strategy s, std::uint64_t seed) {
    SampleSpec spec;
    spec.n = 10;
    spec.strategy = s;
    Rng rng(seed);
    std::vector<double> c;
    for (int i = 0; i < 500; ++i) {
      c.push_back(static_cast<double>(sample_with_strategy(spec, env.table, sc, false, rng).result.stats.conflicts));
    }
    return median(c);
  };
  double hard = median_conflicts(Strategy::Hard, 41);
  double biased = median_conflicts(Strategy::Biased, 42);

  // Rule chains over two entities: every literal is settled by propagation.
  auto C = [](std::initializer_list<std::int64_t> lits) {
    std::vector<Literal> v;
    for (auto x : lits) v.push_back(Literal::from_dimacs(x));
    return Clause::canonical(v);
  };
  RuleTakerTheory chain{12, {}, {Literal::pos(1), Literal::pos(11), Literal::pos(10), Literal::pos(12)}};
  for (std::int64_t base : {0, 6}) {
    chain.rules.push_back(C({-(base + 1), base + 2}));
    chain.rules.push_back(C({-(base + 4), base + 3}));
    chain.rules.push_back(C({-(base + 2), -(base + 3)}));
  }
  std::uint64_t chain_decisions = 0;
  int chain_queries = 0;
  for (std::uint32_t v = 1; v <= 12; ++v) {
    for (bool neg : {false, true}) {
      Literal q{VarId{v}, neg};
      auto e = check_entailment(chain.formula(), q);
      if (e == Entailment::Unknown) continue;
      chain_decisions += refutation_stats(chain, q, e == Entailment::Entailed).decisions;
      ++chain_queries;
    }
  }
  std::vector<double> rt_dec;
  for (const auto& r : ruletaker) rt_dec.push_back(static_cast<double>(r.stats.decisions));
  double rt_median = rt_dec.empty() ? -1.0 : median(rt_dec);
  return {hard > biased && chain_decisions == 0 && chain_queries > 0 && rt_median == 0.0,
          fmt("median conflicts hard=%.1f biased=%.1f; chain decisions=%llu over %d queries; "
              "ruletaker median decisions=%.1f",
              hard, biased, static_cast<unsigned long long>(chain_decisions), chain_queries, rt_median)};
}

struct Generated {
  std::vector<InstanceRecord> grl, rcl, ruletaker;
  double grl_seconds = -1.0;
  int grl_jobs = 1;
  std::string error;
};

std::uint64_t verify_written(Env& env, const Dataset& d, const char* name, std::uint64_t* records) {
  fs::path p = env.dir / name;
  write_dataset(p, d);
  auto rep = verify_dataset(p);
  *records = rep.records;
  return rep.issues.size();
}

Outcome round_trip(Env& env, Generated& g) {
  std::string detail;
  bool pass = true;

  DatasetConfig grl;
  grl.fragment = Fragment::Grl;
  grl.size_lo = 5;
  grl.size_hi = 12;
  grl.per_size = 1250;
  grl.seed = 101;
  grl.jobs = kernels::default_jobs();
  for (const auto& key : required_calibrations(grl)) {
    CalibrationOptions co;
    co.jobs = grl.jobs;
    ensure_calibrated(env.table, key, co);
  }
  auto t0 = Clock::now();
  Dataset dg = generate_dataset(grl, env.table);
  g.grl_seconds = seconds_since(t0);
  g.grl_jobs = grl.jobs;

  DatasetConfig rcl;
  rcl.fragment = Fragment::Rcl;
  rcl.size_lo = 16;
  rcl.size_hi = 70;
  rcl.per_size = 182;
  rcl.seed = 102;
  rcl.calibration_trials = 200;
  rcl.jobs = kernels::default_jobs();
  Dataset dr = generate_dataset(rcl, env.table);

  DatasetConfig rt;
  rt.fragment = Fragment::RuleTaker;
  rt.size_lo = 5;
  rt.size_hi = 7;
  rt.per_size = 3334;
  rt.seed = 103;
  rt.jobs = kernels::default_jobs();
  Dataset dt = generate_dataset(rt, env.table);

  env.table.save(env.cache());
  for (auto [d, name] : {std::pair{&dg, "grl.jsonl"}, {&dr, "rcl.jsonl"}, {&dt, "ruletaker.jsonl"}}) {
    std::uint64_t n = 0;
    auto bad = verify_written(env, *d, name, &n);
    pass = pass && bad == 0 && n >= 10000;
    detail += fmt("%s%s %llu records %llu mismatches", detail.empty() ? "" : "; ", name,
                  static_cast<unsigned long long>(n), static_cast<unsigned long long>(bad));
  }
  g.grl = std::move(dg.records);
  g.rcl = std::move(dr.records);
  g.ruletaker = std::move(dt.records);
  return {pass, detail};
}

// Random problems of mixed width over at most 4 predicates and 3 constants,
// plus the generator's own width-3 problems.
Outcome grounding() {
  Rng rng(61);
  int agree = 0, total = 0;
  auto random_clause = [&](std::uint32_t np) {
    std::uint32_t w = 1 + static_cast<std::uint32_t>(rng.below(std::min<std::uint32_t>(3, np)));
    std::vector<std::uint32_t> preds(np);
    for (std::uint32_t i = 0; i < np; ++i) preds[i] = i + 1;
    std::vector<Literal> lits;
    for (std::uint32_t k = 0; k < w; ++k) {
      auto j = k + rng.below(np - k);
      std::swap(preds[k], preds[j]);
      lits.push_back({VarId{preds[k]}, rng.bernoulli(0.5)});
    }
    return Clause::canonical(lits);
  };
  for (int i = 0; i < 1500; ++i) {
    RclProblem p;
    if (i % 2 == 0) {
      p.n_predicates = 1 + static_cast<std::uint32_t>(rng.below(4));
      p.n_constants = 1 + static_cast<std::uint32_t>(rng.below(3));
      auto nu = rng.below(2 * p.n_predicates + 2);
      auto ng = rng.below(2 * p.ground_vars() + 1);
      for (std::uint64_t k = 0; k < nu; ++k) p.universal.push_back(random_clause(p.n_predicates));
      for (std::uint64_t k = 0; k < ng; ++k) {
        p.ground.push_back({static_cast<std::uint32_t>(rng.below(p.n_constants)), random_clause(p.n_predicates)});
      }
    } else {
      RclShape shape{3 + static_cast<std::uint32_t>(rng.below(2)), 1 + static_cast<std::uint32_t>(rng.below(3))};
      p = sample_rcl_problem(shape, static_cast<std::int64_t>(rng.below(6 * shape.ground_vars() + 1)), 0.3, 0.5, rng);
    }
    bool got = solve(ground_rcl(p).first).label == SatLabel::Sat;
    agree += got == testing::fo_satisfiable(p);
    ++total;
  }
  return {agree == total, fmt("%d/%d problems agree with the first-order oracle", agree, total)};
}

// Rules are the non-unit clauses of the stored formula, facts the units.
Outcome retrofit_validity(const std::vector<InstanceRecord>& recs) {
  std::uint64_t ok = 0, pos = 0;
  for (const auto& r : recs) {
    CnfFormula f = from_dimacs(r.dimacs);
    CnfFormula rules(f.n_vars(), {});
    for (const auto& c : f.clauses()) {
      if (c.width() > 1) rules.add_clause(c);
    }
    bool good = r.conjecture.has_value() && solve(rules).label == SatLabel::Sat && solve(f).label == SatLabel::Sat;
    if (good) {
      auto e = check_entailment(f, *r.conjecture);
      good = (e == Entailment::Entailed && r.label == "true") || (e == Entailment::Contradicted && r.label == "false");
    }
    ok += good;
    pos += r.positive();
  }
  bool balanced = !recs.empty() && 2 * pos == recs.size();
  return {ok == recs.size() && balanced && !recs.empty(),
          fmt("%llu/%zu valid, %llu true / %llu false", static_cast<unsigned long long>(ok), recs.size(),
              static_cast<unsigned long long>(pos), static_cast<unsigned long long>(recs.size() - pos))};
}

Outcome determinism(Env& env, const std::string& cli) {
  env.table.save(env.cache());
  std::string base = "NLSAT_CACHE_DIR='" + (env.dir / "cache").string() + "' '" + cli +
                     "' generate --fragment grl --sizes 5..12 --per-size 200 --seed 7 --out '";
  fs::path a = env.dir / "jobs1.jsonl", b = env.dir / "jobs8.jsonl";
  int ra = std::system((base + a.string() + "' --jobs 1 >/dev/null").c_str());
  int rb = std::system((base + b.string() + "' --jobs 8 >/dev/null").c_str());
  if (ra != 0 || rb != 0) return {false, fmt("generate exited with %d / %d", ra, rb)};
  std::string sa = slurp(a), sb = slurp(b);
  return {!sa.empty() && sa == sb, fmt("%zu bytes at --jobs 1, %zu at --jobs 8, %s", sa.size(), sb.size(),
                                       sa == sb ? "identical" : "different")};
}

Outcome scale(const Generated& g) {
  if (g.grl_seconds < 0) return {false, "GRL generation did not run"};
  std::uint64_t pos = 0;
  for (const auto& r : g.grl) pos += r.positive();
  bool balanced = 2 * pos == g.grl.size();
  return {g.grl_seconds < 300.0 && g.grl.size() == 10000 && balanced,
          fmt("%zu GRL 5..12 hard records (%llu sat) in %.1fs with %d worker(s)", g.grl.size(),
              static_cast<unsigned long long>(pos), g.grl_seconds, g.grl_jobs)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : NLSAT_CLI_PATH;
  Env env;
  env.dir = fs::temp_directory_path() / ("nlsat-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(env.dir / "cache");

  Generated g;
  run(1, "oracle equivalence", oracle_equivalence);
  run(2, "phase transition", phase_transition);
  run(3, "critical band balance", [&] { return critical_band(env); });
  // Criterion 5 generates the datasets that 4, 7 and 9 inspect.
  run(5, "round-trip integrity", [&] { return round_trip(env, g); });
  run(4, "hardness ordering", [&] { return hardness_ordering(env, g.ruletaker); });
  run(6, "grounding correctness", grounding);
  run(7, "retrofit validity", [&] { return retrofit_validity(g.ruletaker); });
  run(8, "determinism", [&] { return determinism(env, cli); });
  run(9, "scale", [&] { return scale(g); });

  std::error_code ec;
  fs::remove_all(env.dir, ec);
  std::printf("%d criterion(s) failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
