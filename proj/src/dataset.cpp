// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "nlsat/error.hpp"
#include "nlsat/kernels.hpp"

namespace nlsat {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

Lexicons Lexicons::load(const LexiconPaths& paths) {
  auto pick = [](const std::string& path, const Lexicon& builtin, WordKind kind) {
    return path.empty() ? builtin : Lexicon::load(path, kind);
  };
  return {pick(paths.food, Lexicon::builtin_food(), WordKind::CountNoun),
          pick(paths.occupations, Lexicon::builtin_occupations(), WordKind::CountNoun),
          pick(paths.names, Lexicon::builtin_names(), WordKind::ProperNoun),
          pick(paths.attributes, Lexicon::builtin_attributes(), WordKind::Attribute)};
}

std::pair<std::uint32_t, std::uint32_t> parse_size_range(std::string_view text) {
  auto parse_u = [&](std::string_view s) {
    std::uint32_t v = 0;
    if (s.empty()) throw StructuralError("bad size range '" + std::string(text) + "'");
    for (char c : s) {
      if (c < '0' || c > '9') throw StructuralError("bad size range '" + std::string(text) + "'");
      v = v * 10 + static_cast<std::uint32_t>(c - '0');
    }
    return v;
  };
  auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    auto v = parse_u(text);
    return {v, v};
  }
  return {parse_u(text.substr(0, dots)), parse_u(text.substr(dots + 2))};
}

void DatasetConfig::validate() const {
  auto bad = [](const std::string& msg) { throw StructuralError("config: " + msg); };
  if (!seed) bad("seed is required");
  if (per_size == 0) bad("per_size must be positive");
  if (size_lo > size_hi) bad("size range is empty");
  if (!(p_int >= 0 && p_int <= 1)) bad("p_int must lie in [0, 1]");
  if (!(p_neg >= 0 && p_neg <= 1)) bad("p_neg must lie in [0, 1]");
  if (!(strategy_config.diversity_fraction >= 0 && strategy_config.diversity_fraction <= 1)) {
    bad("diversity_fraction must lie in [0, 1]");
  }
  if (!(ground_fraction >= 0 && ground_fraction <= 1)) bad("ground_fraction must lie in [0, 1]");
  if (split.train < 0 || split.dev < 0 || split.test < 0 ||
      std::abs(split.train + split.dev + split.test - 1.0) > 1e-9) {
    bad("split ratios must be non-negative and sum to 1");
  }
  if (batch == 0) bad("batch must be positive");
  if (stall_window == 0) bad("stall_window must be positive");
  switch (fragment) {
    case Fragment::Grl:
      if (size_lo < (p_int > 0 ? 3u : 2u)) bad("grl sizes start at 3 (2 when p_int = 0)");
      break;
    case Fragment::Rcl:
      if (p_int != 1.0) bad("rcl needs p_int = 1 (relative clause rules have three literals)");
      if (size_lo < 10) bad("rcl ground sizes start at 10 (5 predicates, 2 constants)");
      break;
    case Fragment::RuleTaker:
      if (size_lo < 3) bad("ruletaker sizes start at 3");
      if (entity.empty()) bad("entity must be set");
      break;
  }
}

namespace {

Rational rational_from_json(const json& j, const char* key) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational::from_int(j.get<std::int64_t>());
  if (j.is_number()) return Rational::parse(j.dump());
  throw StructuralError(std::string("config: ") + key + " must be a number or a ratio string");
}

std::pair<Rational, Rational> rational_pair(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw StructuralError(std::string("config: ") + key + " must be [lo, hi]");
  return {rational_from_json(j[0], key), rational_from_json(j[1], key)};
}

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw StructuralError(std::string("config: ") + key + " has the wrong type");
  }
}

}  // namespace

void DatasetConfig::merge_json(const json& j) {
  if (!j.is_object()) throw StructuralError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "fragment") {
      fragment = parse_fragment(get_as<std::string>(v, k));
    } else if (key == "sizes") {
      if (v.is_string()) {
        std::tie(size_lo, size_hi) = parse_size_range(v.get<std::string>());
      } else if (v.is_array() && v.size() == 2) {
        size_lo = get_as<std::uint32_t>(v[0], k);
        size_hi = get_as<std::uint32_t>(v[1], k);
      } else {
        size_lo = size_hi = get_as<std::uint32_t>(v, k);
      }
    } else if (key == "per_size") {
      per_size = get_as<std::uint64_t>(v, k);
    } else if (key == "strategy") {
      strategy = parse_strategy(get_as<std::string>(v, k));
    } else if (key == "diversity_fraction") {
      strategy_config.diversity_fraction = get_as<double>(v, k);
    } else if (key == "widen") {
      strategy_config.widen = rational_from_json(v, k);
    } else if (key == "naive_band") {
      std::tie(strategy_config.naive_lo, strategy_config.naive_hi) = rational_pair(v, k);
    } else if (key == "biased_factors") {
      std::tie(strategy_config.biased_low_factor, strategy_config.biased_high_factor) = rational_pair(v, k);
    } else if (key == "balance_diversity") {
      balance_diversity = get_as<bool>(v, k);
    } else if (key == "split") {
      auto r = get_as<std::vector<double>>(v, k);
      if (r.size() != 3) throw StructuralError("config: split must be [train, dev, test]");
      split = {r[0], r[1], r[2]};
    } else if (key == "seed") {
      seed = get_as<std::uint64_t>(v, k);
    } else if (key == "p_int") {
      p_int = get_as<double>(v, k);
    } else if (key == "p_neg") {
      p_neg = get_as<double>(v, k);
    } else if (key == "ground_fraction") {
      ground_fraction = get_as<double>(v, k);
    } else if (key == "no_rewrite_prob") {
      render.no_rewrite_prob = get_as<double>(v, k);
    } else if (key == "token_budget") {
      render.token_budget = get_as<std::size_t>(v, k);
    } else if (key == "retrofit_alpha") {
      std::tie(retrofit_alpha_min, retrofit_alpha_max) = rational_pair(v, k);
    } else if (key == "entity") {
      entity = get_as<std::string>(v, k);
    } else if (key == "lexicons") {
      if (!v.is_object()) throw StructuralError("config: lexicons must be an object");
      for (const auto& [lk, lv] : v.items()) {
        auto path = get_as<std::string>(lv, k);
        if (lk == "food") {
          lexicons.food = path;
        } else if (lk == "occupations") {
          lexicons.occupations = path;
        } else if (lk == "names") {
          lexicons.names = path;
        } else if (lk == "attributes") {
          lexicons.attributes = path;
        } else {
          throw StructuralError("config: unknown lexicon '" + lk + "'");
        }
      }
    } else if (key == "calibration") {
      if (!v.is_object()) throw StructuralError("config: calibration must be an object");
      for (const auto& [ck, cv] : v.items()) {
        if (ck == "trials") {
          calibration_trials = get_as<std::uint64_t>(cv, k);
        } else if (ck == "tolerance") {
          calibration_tolerance = get_as<double>(cv, k);
        } else if (ck == "seed") {
          calibration_seed = get_as<std::uint64_t>(cv, k);
        } else {
          throw StructuralError("config: unknown calibration key '" + ck + "'");
        }
      }
    } else if (key == "batch") {
      batch = get_as<std::uint64_t>(v, k);
    } else if (key == "stall_window") {
      stall_window = get_as<std::uint64_t>(v, k);
    } else if (key == "stall_min_rate") {
      stall_min_rate = get_as<double>(v, k);
    } else if (key == "max_decisions") {
      max_decisions = get_as<std::uint64_t>(v, k);
    } else if (key == "jobs") {
      jobs = get_as<int>(v, k);
    } else {
      throw StructuralError("config: unknown key '" + key + "'");
    }
  }
}

ordered_json DatasetConfig::to_json() const {
  ordered_json j;
  j["fragment"] = to_string(fragment);
  j["sizes"] = std::to_string(size_lo) + ".." + std::to_string(size_hi);
  j["per_size"] = per_size;
  j["strategy"] = to_string(strategy);
  j["diversity_fraction"] = strategy_config.diversity_fraction;
  j["widen"] = strategy_config.widen.to_string();
  j["naive_band"] = {strategy_config.naive_lo.to_string(), strategy_config.naive_hi.to_string()};
  j["biased_factors"] = {strategy_config.biased_low_factor.to_string(), strategy_config.biased_high_factor.to_string()};
  j["balance_diversity"] = balance_diversity;
  j["split"] = {split.train, split.dev, split.test};
  if (seed) j["seed"] = *seed;
  j["p_int"] = p_int;
  j["p_neg"] = p_neg;
  j["ground_fraction"] = ground_fraction;
  j["no_rewrite_prob"] = render.no_rewrite_prob;
  j["token_budget"] = render.token_budget;
  j["retrofit_alpha"] = {retrofit_alpha_min.to_string(), retrofit_alpha_max.to_string()};
  j["entity"] = entity;
  j["lexicons"] = {{"food", lexicons.food},
                   {"occupations", lexicons.occupations},
                   {"names", lexicons.names},
                   {"attributes", lexicons.attributes}};
  j["calibration"] = {{"trials", calibration_trials}, {"tolerance", calibration_tolerance}, {"seed", calibration_seed}};
  j["batch"] = batch;
  j["stall_window"] = stall_window;
  j["stall_min_rate"] = stall_min_rate;
  j["max_decisions"] = max_decisions;
  return j;
}

std::vector<CalibrationKey> required_calibrations(const DatasetConfig& cfg) {
  std::vector<CalibrationKey> keys;
  if (cfg.strategy == Strategy::Naive) return keys;
  if (cfg.fragment == Fragment::Grl) {
    for (auto n = cfg.size_lo; n <= cfg.size_hi; ++n) keys.push_back({n, cfg.p_int, cfg.p_neg});
  } else if (cfg.fragment == Fragment::Rcl) {
    for (auto n : rcl_reachable_sizes(cfg.size_lo, cfg.size_hi)) keys.push_back({n, 1.0, cfg.p_neg});
  }
  return keys;
}

// ---------------------------------------------------------------------------
// Records

ordered_json InstanceRecord::to_json() const {
  ordered_json j;
  j["id"] = id;
  j["fragment"] = nlsat::to_string(fragment);
  j["text"] = text;
  j["label"] = label;
  j["n_vars"] = n_vars;
  if (n_ground_vars) j["n_ground_vars"] = *n_ground_vars;
  j["n_clauses"] = n_clauses;
  j["alpha"] = alpha;
  j["strategy"] = strategy;
  j["seed_index"] = seed_index;
  j["split"] = split;
  j["stats"] = {{"decisions", stats.decisions}, {"conflicts", stats.conflicts}, {"propagations", stats.propagations}};
  j["dimacs"] = dimacs;
  j["size"] = size;
  j["diversity"] = diversity;
  ordered_json b;
  b["words"] = binding.words;
  if (!binding.constants.empty()) b["constants"] = binding.constants;
  if (!binding.entity.empty()) b["entity"] = binding.entity;
  j["binding"] = b;
  if (conjecture) {
    j["conjecture_text"] = conjecture_text;
    j["conjecture"] = conjecture->to_dimacs();
  }
  return j;
}

InstanceRecord InstanceRecord::from_json(const json& j) {
  auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw StructuralError(std::string("missing field '") + key + "'");
    return j.at(key);
  };
  try {
    InstanceRecord r;
    r.id = field("id").get<std::string>();
    r.fragment = parse_fragment(field("fragment").get<std::string>());
    r.text = field("text").get<std::string>();
    r.label = field("label").get<std::string>();
    r.n_vars = field("n_vars").get<std::uint32_t>();
    if (j.contains("n_ground_vars")) r.n_ground_vars = j.at("n_ground_vars").get<std::uint32_t>();
    r.n_clauses = field("n_clauses").get<std::uint64_t>();
    r.alpha = field("alpha").get<std::string>();
    r.strategy = field("strategy").get<std::string>();
    r.seed_index = field("seed_index").get<std::uint64_t>();
    r.split = field("split").get<std::string>();
    const auto& s = field("stats");
    r.stats.decisions = s.at("decisions").get<std::uint64_t>();
    r.stats.conflicts = s.at("conflicts").get<std::uint64_t>();
    r.stats.propagations = s.at("propagations").get<std::uint64_t>();
    r.dimacs = field("dimacs").get<std::string>();
    r.size = j.value("size", r.n_vars);
    r.diversity = j.value("diversity", false);
    if (j.contains("binding")) {
      const auto& b = j.at("binding");
      r.binding.words = b.at("words").get<std::vector<std::string>>();
      r.binding.constants = b.value("constants", std::vector<std::string>{});
      r.binding.entity = b.value("entity", std::string{});
    }
    if (j.contains("conjecture")) {
      r.conjecture = Literal::from_dimacs(j.at("conjecture").get<std::int64_t>());
      r.conjecture_text = field("conjecture_text").get<std::string>();
    }
    return r;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("bad record: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct Candidate {
  bool valid = false;
  bool positive = false;
  std::uint64_t seed = 0;
  InstanceRecord rec;
  std::string key;
  RetrofitReject reject = RetrofitReject::None;
  std::optional<RuleTakerTheory> theory;
  ConjecturePools pools;
};

struct GenContext {
  const DatasetConfig& cfg;
  const Lexicons& lex;
  const CalibrationTable& table;
  SolverOptions solver;
};

const CriticalBand* band_for(const GenContext& ctx, std::uint32_t n, double p_int) {
  if (ctx.cfg.strategy == Strategy::Naive) return nullptr;
  const CriticalBand* band = ctx.table.band({n, p_int, ctx.cfg.p_neg});
  if (band == nullptr) throw CalibrationError("no calibration for n=" + std::to_string(n) + "; run calibrate first");
  return band;
}

void fill_formula_fields(InstanceRecord& rec, const CnfFormula& f) {
  rec.n_clauses = f.size();
  rec.alpha = f.alpha().to_exact_string();
  rec.dimacs = to_dimacs(f);
}

Candidate grl_candidate(const GenContext& ctx, std::uint32_t n, bool diversity, std::uint64_t seed) {
  const auto& cfg = ctx.cfg;
  Candidate c;
  c.seed = seed;
  Rng rng(seed);
  SampleSpec spec;
  spec.n = n;
  spec.p_int = cfg.p_int;
  spec.p_neg = cfg.p_neg;
  auto bands = strategy_bands(cfg.strategy, band_for(ctx, n, cfg.p_int), cfg.strategy_config, diversity);
  CnfFormula f = sample_formula_with_m(spec, draw_clause_count(n, bands, rng), rng);
  SolveResult res = solve(f, ctx.solver);
  VarBinding b = bind_vocabulary(n, ctx.lex.food, rng);
  NlTheory t = render_grl(f, b, cfg.render);
  c.valid = true;
  c.positive = res.label == SatLabel::Sat;
  c.rec.fragment = Fragment::Grl;
  c.rec.text = t.text();
  c.rec.label = to_string(res.label);
  c.rec.n_vars = n;
  c.rec.strategy = to_string(cfg.strategy);
  c.rec.stats = res.stats;
  c.rec.binding = std::move(b);
  fill_formula_fields(c.rec, f);
  c.key = c.rec.dimacs;
  return c;
}

Candidate rcl_candidate(const GenContext& ctx, std::uint32_t target, bool diversity, std::uint64_t seed) {
  const auto& cfg = ctx.cfg;
  Candidate c;
  c.seed = seed;
  Rng rng(seed);
  RclShape shape = choose_rcl_shape(target, cfg.size_lo, cfg.size_hi, rng);
  const std::uint32_t n_ground = shape.ground_vars();
  auto bands = strategy_bands(cfg.strategy, band_for(ctx, n_ground, 1.0), cfg.strategy_config, diversity);
  std::int64_t m = draw_clause_count(n_ground, bands, rng);
  RclProblem p = sample_rcl_problem(shape, m, cfg.ground_fraction, cfg.p_neg, rng);
  auto [f, map] = ground_rcl(p);
  SolveResult res = solve(f, ctx.solver);
  VarBinding b = bind_vocabulary(p, ctx.lex.occupations, ctx.lex.names, rng);
  NlTheory t = render_rcl(p, b, ctx.lex.occupations, &rng, cfg.render);
  c.valid = true;
  c.positive = res.label == SatLabel::Sat;
  c.rec.fragment = Fragment::Rcl;
  c.rec.text = t.text();
  c.rec.label = to_string(res.label);
  c.rec.n_vars = p.n_predicates;
  c.rec.n_ground_vars = n_ground;
  c.rec.strategy = to_string(cfg.strategy);
  c.rec.stats = res.stats;
  c.rec.binding = std::move(b);
  fill_formula_fields(c.rec, f);
  // Different problems can ground to the same formula only if identical.
  c.key = c.rec.text;
  return c;
}

Candidate ruletaker_candidate(const GenContext& ctx, std::uint32_t n, std::uint64_t seed) {
  const auto& cfg = ctx.cfg;
  Candidate c;
  c.seed = seed;
  Rng rng(seed);
  RetrofitSpec spec;
  spec.sizes = {n};
  spec.p_int = cfg.p_int;
  spec.p_neg = cfg.p_neg;
  spec.alpha_min = cfg.retrofit_alpha_min;
  spec.alpha_max = cfg.retrofit_alpha_max;
  CnfFormula raw = sample_retrofit_formula(spec, rng);
  auto outcome = retrofit(raw, ctx.solver);
  c.reject = outcome.reason;
  if (!outcome.theory) return c;
  c.pools = conjecture_pools(*outcome.theory, ctx.solver);
  c.valid = !(c.pools.entailed.empty() && c.pools.entailed_trivial.empty());
  if (!c.valid) return c;
  c.rec.binding.words = choose_words(n, ctx.lex.attributes, rng);
  c.rec.binding.entity = cfg.entity;
  c.theory = std::move(outcome.theory);
  return c;
}

/// Fills in the label-dependent part of a rule-theory candidate.
void finish_ruletaker(const GenContext& ctx, Candidate& c, bool label) {
  Rng rng(derive_seed(c.seed, {tag("conjecture"), label ? 1u : 0u}));
  auto inst = make_instance(*c.theory, c.pools, label, rng, ctx.solver);
  if (!inst) throw StructuralError("internal: empty conjecture pool");
  auto text = render_ruletaker(*inst, c.rec.binding, ctx.cfg.render);
  CnfFormula f = inst->theory.formula();
  c.positive = label;
  c.rec.fragment = Fragment::RuleTaker;
  c.rec.text = text.theory.text();
  c.rec.label = label ? "true" : "false";
  c.rec.n_vars = inst->theory.n_vars;
  c.rec.strategy = "retrofit";
  c.rec.stats = inst->stats;
  c.rec.conjecture = inst->conjecture;
  c.rec.conjecture_text = text.conjecture;
  fill_formula_fields(c.rec, f);
  c.key = c.rec.dimacs + "|" + std::to_string(inst->conjecture.to_dimacs());
}

struct Quota {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  /// Label-agnostic slots (unbalanced diversity draws).
  std::uint64_t any = 0;

  bool filled() const { return pos == 0 && neg == 0 && any == 0; }
  bool wants(bool positive) const { return any > 0 || (positive ? pos : neg) > 0; }
  void take(bool positive) {
    if (positive && pos > 0) {
      --pos;
    } else if (!positive && neg > 0) {
      --neg;
    } else {
      --any;
    }
  }
};

Quota make_quota(std::uint64_t count, bool balanced) {
  Quota q;
  if (balanced) {
    q.pos = (count + 1) / 2;
    q.neg = count / 2;
  } else {
    q.any = count;
  }
  return q;
}

void generate_bucket(const GenContext& ctx, std::uint32_t size, bool diversity, Quota quota,
                     std::vector<InstanceRecord>& out, std::unordered_set<std::string>& seen, ordered_json& audit) {
  const auto& cfg = ctx.cfg;
  const std::uint64_t stream = derive_seed(*cfg.seed, {tag(to_string(cfg.fragment)), size, diversity ? 1u : 0u});
  std::vector<char> window(cfg.stall_window, 0);
  std::uint64_t window_accepts = 0;
  std::uint64_t examined = 0;
  std::uint64_t accepted = 0;
  std::map<std::string, std::uint64_t> rejects;
  std::vector<Candidate> batch(cfg.batch);
  std::uint64_t next = 0;
  while (!quota.filled()) {
    const std::uint64_t base = next;
    kernels::for_each_index(batch.size(), cfg.jobs, [&](std::size_t i) {
      const std::uint64_t index = base + i;
      const std::uint64_t seed = derive_seed(stream, {index});
      switch (cfg.fragment) {
        case Fragment::Grl:
          batch[i] = grl_candidate(ctx, size, diversity, seed);
          break;
        case Fragment::Rcl:
          batch[i] = rcl_candidate(ctx, size, diversity, seed);
          break;
        default:
          batch[i] = ruletaker_candidate(ctx, size, seed);
      }
      batch[i].rec.seed_index = index;
    });
    next += batch.size();
    for (auto& c : batch) {
      if (quota.filled()) break;
      bool ok = false;
      if (!c.valid) {
        ++rejects[c.reject == RetrofitReject::None ? "no conjecture" : to_string(c.reject)];
      } else {
        if (cfg.fragment == Fragment::RuleTaker) {
          // Both pools are non-empty together (q entailed iff ~q contradicted),
          // so the label goes to whichever side still needs more.
          bool label = quota.any > 0 || quota.pos >= quota.neg;
          finish_ruletaker(ctx, c, label);
        }
        if (!quota.wants(c.positive)) {
          ++rejects["label quota full"];
        } else if (!seen.insert(c.key).second) {
          ++rejects["duplicate"];
        } else {
          ok = true;
          quota.take(c.positive);
          c.rec.size = size;
          c.rec.diversity = diversity;
          out.push_back(std::move(c.rec));
          ++accepted;
        }
      }
      auto slot = examined % cfg.stall_window;
      window_accepts += (ok ? 1 : 0) - window[slot];
      window[slot] = ok ? 1 : 0;
      ++examined;
      if (examined >= cfg.stall_window &&
          static_cast<double>(window_accepts) < cfg.stall_min_rate * static_cast<double>(cfg.stall_window)) {
        std::ostringstream msg;
        msg << "generation stalled at size " << size << (diversity ? " (diversity)" : "") << ": " << window_accepts
            << " of the last " << cfg.stall_window << " candidates accepted; still need " << quota.pos
            << " positive, " << quota.neg << " negative, " << quota.any << " any; rejections:";
        for (const auto& [why, count] : rejects) msg << " " << why << "=" << count;
        throw GenerationStalled(msg.str());
      }
    }
  }
  ordered_json a;
  a["candidates"] = examined;
  a["accepted"] = accepted;
  for (const auto& [why, count] : rejects) a["rejected"][why] = count;
  audit[std::to_string(size) + (diversity ? "/diversity" : "")] = a;
}

}  // namespace

Dataset generate_dataset(const DatasetConfig& cfg, CalibrationTable& table) {
  cfg.validate();
  CalibrationOptions copts;
  copts.tolerance = cfg.calibration_tolerance;
  copts.trials_per_point = cfg.calibration_trials;
  copts.seed = cfg.calibration_seed;
  copts.jobs = cfg.jobs;
  copts.solver.max_decisions = cfg.max_decisions;
  for (const auto& key : required_calibrations(cfg)) ensure_calibrated(table, key, copts);

  Lexicons lex = Lexicons::load(cfg.lexicons);
  GenContext ctx{cfg, lex, table, {}};
  ctx.solver.max_decisions = cfg.max_decisions;

  Dataset d;
  std::unordered_set<std::string> seen;
  ordered_json audit = ordered_json::object();
  const bool hard = cfg.strategy == Strategy::Hard && cfg.fragment != Fragment::RuleTaker;
  for (auto size = cfg.size_lo; size <= cfg.size_hi; ++size) {
    std::uint64_t n_div = 0;
    if (hard) {
      n_div = static_cast<std::uint64_t>(std::floor(cfg.strategy_config.diversity_fraction *
                                                    static_cast<double>(cfg.per_size) * cfg.split.train + 1e-9));
    }
    std::vector<InstanceRecord> bucket;
    Quota div_quota = make_quota(n_div, cfg.balance_diversity);
    if (n_div > 0) generate_bucket(ctx, size, true, div_quota, bucket, seen, audit);
    // The core quota completes the size to an exact half/half split.
    Quota core_quota = make_quota(cfg.per_size - n_div, true);
    if (cfg.balance_diversity) {
      core_quota.pos = (cfg.per_size + 1) / 2 - div_quota.pos;
      core_quota.neg = cfg.per_size / 2 - div_quota.neg;
    }
    generate_bucket(ctx, size, false, core_quota, bucket, seen, audit);
    for (std::size_t k = 0; k < bucket.size(); ++k) {
      bucket[k].id = std::string(to_string(cfg.fragment)) + "-" + std::to_string(size) + "-" + std::to_string(k);
      d.records.push_back(std::move(bucket[k]));
    }
  }
  d.warnings = split_dataset(d.records, cfg.split, *cfg.seed);
  d.header["schema"] = "nlsat-dataset";
  d.header["version"] = kDatasetSchemaVersion;
  d.header["fragment"] = to_string(cfg.fragment);
  d.header["branching"] = kBranchingRule;
  d.header["records"] = d.records.size();
  d.header["config"] = cfg.to_json();
  d.audit = std::move(audit);
  return d;
}

// ---------------------------------------------------------------------------
// Splits

std::vector<std::uint64_t> largest_remainder(std::uint64_t total, const std::vector<double>& ratios) {
  double sum = 0;
  for (double r : ratios) sum += r;
  std::vector<std::uint64_t> counts(ratios.size());
  std::vector<double> frac(ratios.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    double q = static_cast<double>(total) * ratios[i] / sum;
    // The epsilon absorbs representation error such as 1000 * 0.8 = 799.99...
    double fl = std::floor(q + 1e-9);
    counts[i] = static_cast<std::uint64_t>(fl);
    frac[i] = q - fl;
    assigned += counts[i];
  }
  std::vector<std::size_t> order(ratios.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

std::vector<std::string> split_dataset(std::vector<InstanceRecord>& records, const SplitRatios& ratios,
                                       std::uint64_t seed) {
  static const char* const kNames[] = {"train", "dev", "test"};
  std::vector<std::string> warnings;
  std::map<std::uint32_t, std::map<int, std::vector<std::size_t>>> cells;
  for (std::size_t i = 0; i < records.size(); ++i) cells[records[i].size][records[i].positive() ? 1 : 0].push_back(i);

  auto assign = [&](std::vector<std::size_t> members, std::uint64_t stream) {
    std::vector<std::size_t> pinned;
    std::vector<std::size_t> rest;
    for (auto i : members) (records[i].diversity ? pinned : rest).push_back(i);
    Rng rng(stream);
    for (std::size_t i = rest.size(); i > 1; --i) std::swap(rest[i - 1], rest[rng.below(i)]);
    pinned.insert(pinned.end(), rest.begin(), rest.end());
    auto counts = largest_remainder(pinned.size(), {ratios.train, ratios.dev, ratios.test});
    std::size_t k = 0;
    for (int s = 0; s < 3; ++s) {
      for (std::uint64_t c = 0; c < counts[s]; ++c) records[pinned[k++]].split = kNames[s];
    }
  };

  for (auto& [size, by_label] : cells) {
    bool small = false;
    for (auto& [label, members] : by_label) small = small || members.size() < 10;
    if (small) {
      warnings.push_back("size " + std::to_string(size) + ": a label cell has fewer than 10 records; split unstratified within the size");
      std::vector<std::size_t> all;
      for (auto& [label, members] : by_label) all.insert(all.end(), members.begin(), members.end());
      std::sort(all.begin(), all.end());
      assign(all, derive_seed(seed, {tag("split"), size, 2}));
    } else {
      for (auto& [label, members] : by_label) assign(members, derive_seed(seed, {tag("split"), size, static_cast<std::uint64_t>(label)}));
    }
  }
  return warnings;
}

// ---------------------------------------------------------------------------
// Reports

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  std::size_t h = values.size() / 2;
  return values.size() % 2 == 1 ? values[h] : (values[h - 1] + values[h]) / 2.0;
}

namespace {

StatsRow make_row(const std::string& scope, const std::vector<const InstanceRecord*>& rs) {
  StatsRow row;
  row.scope = scope;
  row.count = rs.size();
  std::vector<double> dec;
  std::vector<double> conf;
  std::uint64_t pos = 0;
  for (const auto* r : rs) {
    dec.push_back(static_cast<double>(r->stats.decisions));
    conf.push_back(static_cast<double>(r->stats.conflicts));
    pos += r->positive() ? 1 : 0;
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  row.positive_fraction = rs.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(rs.size());
  row.mean_decisions = mean(dec);
  row.median_decisions = median(dec);
  row.mean_conflicts = mean(conf);
  row.median_conflicts = median(conf);
  return row;
}

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

StatsReport stats_report(const std::vector<InstanceRecord>& records, const std::string& name) {
  StatsReport rep;
  if (records.empty()) return rep;
  std::vector<const InstanceRecord*> all;
  std::map<std::uint32_t, std::vector<const InstanceRecord*>> by_size;
  for (const auto& r : records) {
    all.push_back(&r);
    by_size[r.size].push_back(&r);
  }
  rep.rows.push_back(make_row(name, all));
  for (const auto& [size, rs] : by_size) rep.rows.push_back(make_row("size=" + std::to_string(size), rs));
  return rep;
}

std::string StatsReport::to_text() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %8s %9s %9s %9s %9s %9s\n", "scope", "count", "positive", "dec_avg", "dec_med",
                "conf_avg", "conf_med");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-12s %8llu %8s%% %9s %9s %9s %9s\n", r.scope.c_str(),
                  static_cast<unsigned long long>(r.count), fmt1(100.0 * r.positive_fraction).c_str(),
                  fmt1(r.mean_decisions).c_str(), fmt1(r.median_decisions).c_str(), fmt1(r.mean_conflicts).c_str(),
                  fmt1(r.median_conflicts).c_str());
    out += buf;
  }
  return out;
}

std::string StatsReport::to_tsv() const {
  std::string out = "scope\tcount\tpositive_pct\tmean_decisions\tmedian_decisions\tmean_conflicts\tmedian_conflicts\n";
  for (const auto& r : rows) {
    out += r.scope + "\t" + std::to_string(r.count) + "\t" + fmt1(100.0 * r.positive_fraction) + "\t" +
           fmt1(r.mean_decisions) + "\t" + fmt1(r.median_decisions) + "\t" + fmt1(r.mean_conflicts) + "\t" +
           fmt1(r.median_conflicts) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

std::string dataset_to_jsonl(const Dataset& d) {
  std::string out = d.header.dump() + "\n";
  for (const auto& r : d.records) out += r.to_json().dump() + "\n";
  return out;
}

namespace {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& d,
                   const std::optional<std::filesystem::path>& cnf_dir) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_atomic(path, dataset_to_jsonl(d));
  auto stats_path = path;
  stats_path += ".stats.txt";
  write_atomic(stats_path, stats_report(d.records, path.filename().string()).to_text());
  if (cnf_dir) {
    std::filesystem::create_directories(*cnf_dir);
    for (const auto& r : d.records) {
      write_atomic(*cnf_dir / (r.id + ".cnf"), "c " + r.id + " label=" + r.label + "\n" + r.dimacs);
    }
  }
}

LoadedDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  LoadedDataset out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      out.issues.push_back({line_no, std::string("invalid JSON: ") + e.what()});
      continue;
    }
    if (j.is_object() && j.contains("schema")) {
      if (j.value("version", 0) != kDatasetSchemaVersion) {
        out.issues.push_back({line_no, "unsupported schema version"});
      }
      out.dataset.header = ordered_json::parse(line);
      continue;
    }
    try {
      out.dataset.records.push_back(InstanceRecord::from_json(j));
      out.lines.push_back(line_no);
    } catch (const Error& e) {
      out.issues.push_back({line_no, e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

std::string first_difference(const CnfFormula& a, const CnfFormula& b) {
  if (a.n_vars() != b.n_vars()) {
    return "text has " + std::to_string(a.n_vars()) + " variables, dimacs " + std::to_string(b.n_vars());
  }
  if (a.size() != b.size()) {
    return "text has " + std::to_string(a.size()) + " clauses, dimacs " + std::to_string(b.size());
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.clauses()[i] == b.clauses()[i])) return "clause " + std::to_string(i + 1) + " differs";
  }
  return "formulas differ";
}

std::string stats_string(const SolveStats& s) {
  return std::to_string(s.decisions) + "/" + std::to_string(s.conflicts) + "/" + std::to_string(s.propagations);
}

}  // namespace

std::vector<VerifyIssue> verify_record(const InstanceRecord& r, const Lexicons& lex, const VerifyOptions& opts) {
  std::vector<VerifyIssue> issues;
  auto issue = [&](std::string kind, std::string detail) { issues.push_back({0, r.id, std::move(kind), std::move(detail)}); };
  CnfFormula stored;
  try {
    stored = from_dimacs(r.dimacs);
  } catch (const Error& e) {
    issue("dimacs", e.what());
    return issues;
  }
  ParseOptions popts;
  popts.lenient = opts.lenient;
  popts.binding = &r.binding;
  CnfFormula parsed;
  std::optional<RuleTakerParse> rt;
  try {
    auto sentences = split_sentences(r.text);
    switch (r.fragment) {
      case Fragment::Grl:
        parsed = parse_grl(sentences, lex.food, popts).formula;
        break;
      case Fragment::Rcl:
        parsed = ground_rcl(parse_rcl(sentences, lex.occupations, lex.names, popts).problem).first;
        break;
      default:
        rt = parse_ruletaker(sentences, r.conjecture_text, lex.attributes, popts);
        parsed = rt->theory.formula();
    }
  } catch (const Error& e) {
    issue("parse", e.what());
    return issues;
  }
  if (!(parsed == stored)) {
    issue("cnf", first_difference(parsed, stored));
    return issues;
  }
  if (r.n_clauses != stored.size() || (stored.n_vars() > 0 && r.alpha != stored.alpha().to_exact_string())) {
    issue("metadata", "n_clauses/alpha disagree with the formula");
  }
  try {
    if (r.fragment != Fragment::RuleTaker) {
      SolveResult res = solve(stored, opts.solver);
      if (r.label != to_string(res.label)) {
        issue("label", std::string("stored ") + r.label + ", solver says " + to_string(res.label));
      } else if (!(res.stats == r.stats)) {
        issue("stats", "stored " + stats_string(r.stats) + ", solver gives " + stats_string(res.stats));
      }
      if (!opts.external_solver.empty()) {
        SatLabel ext = solve_external(stored, opts.external_solver);
        if (to_string(ext) != r.label) issue("external", std::string("external solver says ") + to_string(ext));
      }
      return issues;
    }
    if (!r.conjecture || !(*r.conjecture == rt->conjecture)) {
      issue("conjecture", "conjecture text does not match the stored conjecture");
      return issues;
    }
    if (solve(CnfFormula(rt->theory.n_vars, rt->theory.rules), opts.solver).label != SatLabel::Sat) {
      issue("theory", "rules are unsatisfiable");
      return issues;
    }
    Entailment e;
    try {
      e = check_entailment(stored, rt->conjecture, opts.solver);
    } catch (const DegenerateTheory&) {
      issue("theory", "rules and facts are unsatisfiable");
      return issues;
    }
    std::string expected = e == Entailment::Entailed ? "true" : e == Entailment::Contradicted ? "false" : "unknown";
    if (expected != r.label) {
      issue("label", "stored " + r.label + ", entailment check says " + expected);
    } else {
      auto s = refutation_stats(rt->theory, rt->conjecture, r.label == "true", opts.solver);
      if (!(s == r.stats)) issue("stats", "stored " + stats_string(r.stats) + ", solver gives " + stats_string(s));
    }
    if (!opts.external_solver.empty()) {
      CnfFormula refute = stored;
      refute.add_clause(Clause::canonical({r.label == "true" ? ~rt->conjecture : rt->conjecture}));
      if (solve_external(refute, opts.external_solver) != SatLabel::Unsat) {
        issue("external", "external solver does not refute the negated label");
      }
    }
  } catch (const BudgetExhausted& e) {
    issue("budget", e.what());
  }
  return issues;
}

VerifyReport verify_dataset(const std::filesystem::path& path, const VerifyOptions& opts) {
  LoadedDataset loaded = load_dataset(path);
  VerifyReport rep;
  for (const auto& li : loaded.issues) rep.issues.push_back({li.line, "", "schema", li.message});
  LexiconPaths paths = opts.lexicons;
  const auto& header = loaded.dataset.header;
  if (header.contains("config") && header["config"].contains("lexicons")) {
    const auto& l = header["config"]["lexicons"];
    auto take = [&](const char* key, std::string& dst) {
      if (l.contains(key) && l[key].is_string() && !l[key].get<std::string>().empty()) dst = l[key].get<std::string>();
    };
    take("food", paths.food);
    take("occupations", paths.occupations);
    take("names", paths.names);
    take("attributes", paths.attributes);
  }
  Lexicons lex = Lexicons::load(paths);
  const auto& records = loaded.dataset.records;
  rep.records = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (auto& issue : verify_record(records[i], lex, opts)) {
      issue.line = loaded.lines[i];
      rep.issues.push_back(std::move(issue));
    }
  }
  return rep;
}

}  // namespace nlsat
