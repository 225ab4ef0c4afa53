// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/retrofit.hpp"

#include <algorithm>

#include "nlsat/error.hpp"

namespace nlsat {

CnfFormula sample_retrofit_formula(const RetrofitSpec& spec, Rng& rng) {
  if (spec.sizes.empty()) throw StructuralError("retrofit sampling needs at least one size");
  SampleSpec s;
  s.n = spec.sizes[rng.below(spec.sizes.size())];
  s.p_int = spec.p_int;
  s.p_neg = spec.p_neg;
  s.alpha_min = spec.alpha_min;
  s.alpha_max = spec.alpha_max;
  s.with_replacement = true;
  s.validate();
  auto range = admissible_clause_counts(s.n, s.alpha_min, s.alpha_max);
  if (range.empty()) {
    throw StructuralError("no integer m with " + s.alpha_min.to_string() + " <= m/" + std::to_string(s.n) +
                          " <= " + s.alpha_max.to_string());
  }
  std::int64_t m = range.lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(range.count())));
  std::vector<Clause> clauses;
  clauses.reserve(static_cast<std::size_t>(m));
  while (static_cast<std::int64_t>(clauses.size()) < m) {
    Clause c = sample_clause(s, rng);
    if (spec.resample_tautologies && normalize_clause(c).shape == ClauseShape::Tautology) continue;
    clauses.push_back(c);
  }
  return CnfFormula(s.n, std::move(clauses));
}

CnfFormula RuleTakerTheory::formula() const {
  std::vector<Clause> clauses = rules;
  for (const auto& f : facts) clauses.push_back(Clause::canonical({f}));
  return CnfFormula(n_vars, std::move(clauses));
}

const char* to_string(RetrofitReject r) {
  switch (r) {
    case RetrofitReject::None:
      return "accepted";
    case RetrofitReject::ContradictoryFacts:
      return "contradictory facts";
    case RetrofitReject::RulesUnsat:
      return "rules unsat";
    default:
      return "rules and facts unsat";
  }
}

RetrofitOutcome retrofit(const CnfFormula& raw, const SolverOptions& solver) {
  RetrofitOutcome out;
  RuleTakerTheory t;
  t.n_vars = raw.n_vars();
  for (const auto& c : raw.clauses()) {
    auto norm = normalize_clause(c);
    switch (norm.shape) {
      case ClauseShape::Tautology:
        break;
      case ClauseShape::Unit: {
        Literal l = norm.clause[0];
        if (std::find(t.facts.begin(), t.facts.end(), ~l) != t.facts.end()) {
          out.reason = RetrofitReject::ContradictoryFacts;
          return out;
        }
        if (std::find(t.facts.begin(), t.facts.end(), l) == t.facts.end()) t.facts.push_back(l);
        break;
      }
      default:
        t.rules.push_back(norm.clause);
    }
  }
  if (solve(CnfFormula(t.n_vars, t.rules), solver).label != SatLabel::Sat) {
    out.reason = RetrofitReject::RulesUnsat;
    return out;
  }
  if (solve(t.formula(), solver).label != SatLabel::Sat) {
    out.reason = RetrofitReject::TheoryUnsat;
    return out;
  }
  out.theory = std::move(t);
  return out;
}

ConjecturePools conjecture_pools(const RuleTakerTheory& t, const SolverOptions& solver) {
  ConjecturePools pools;
  CnfFormula f = t.formula();
  auto is_fact = [&](Literal l) { return std::find(t.facts.begin(), t.facts.end(), l) != t.facts.end(); };
  for (std::uint32_t v = 1; v <= t.n_vars; ++v) {
    for (bool neg : {false, true}) {
      Literal q{VarId{v}, neg};
      bool trivial = is_fact(q) || is_fact(~q);
      switch (check_entailment(f, q, solver)) {
        case Entailment::Entailed:
          (trivial ? pools.entailed_trivial : pools.entailed).push_back(q);
          break;
        case Entailment::Contradicted:
          (trivial ? pools.contradicted_trivial : pools.contradicted).push_back(q);
          break;
        default:
          break;
      }
    }
  }
  return pools;
}

SolveStats refutation_stats(const RuleTakerTheory& t, Literal q, bool label, const SolverOptions& solver) {
  CnfFormula f = t.formula();
  f.add_clause(Clause::canonical({label ? ~q : q}));
  return solve(f, solver).stats;
}

std::optional<RuleTakerInstance> make_instance(const RuleTakerTheory& t, const ConjecturePools& pools, bool label,
                                               Rng& rng, const SolverOptions& solver) {
  const auto& main = label ? pools.entailed : pools.contradicted;
  const auto& fallback = label ? pools.entailed_trivial : pools.contradicted_trivial;
  const auto& pool = main.empty() ? fallback : main;
  if (pool.empty()) return std::nullopt;
  RuleTakerInstance inst;
  inst.theory = t;
  inst.label = label;
  inst.conjecture = pool[rng.below(pool.size())];
  inst.stats = refutation_stats(t, inst.conjecture, label, solver);
  return inst;
}

std::optional<RuleTakerInstance> make_instance(const RuleTakerTheory& t, bool label, Rng& rng,
                                               const SolverOptions& solver) {
  return make_instance(t, conjecture_pools(t, solver), label, rng, solver);
}

namespace {

std::string rt_atom(const VarBinding& b, bool negated, VarId v) {
  return "the " + b.entity + " is " + (negated ? "not " : "") + b.word(v);
}

std::string rt_fact(const VarBinding& b, Literal l) {
  std::string s = rt_atom(b, l.negated, l.var) + ".";
  s[0] = 'T';
  return s;
}

std::string rt_rule(const VarBinding& b, const Clause& c) {
  if (c.width() < 2) throw StructuralError("unit clause has no rule rendering");
  std::string s = "If ";
  for (std::size_t i = 0; i + 1 < c.width(); ++i) {
    if (i > 0) s += " and ";
    s += rt_atom(b, !c[i].negated, c[i].var);
  }
  const Literal& head = c[c.width() - 1];
  return s + " then " + rt_atom(b, head.negated, head.var) + ".";
}

void budget(const std::string& s, const RenderOptions& opts) {
  std::size_t tokens = 1 + static_cast<std::size_t>(std::count(s.begin(), s.end(), ' '));
  if (tokens > opts.token_budget) throw StructuralError("sentence over the token budget: " + s);
}

}  // namespace

RuleTakerText render_ruletaker(const RuleTakerInstance& inst, const VarBinding& b, const RenderOptions& opts) {
  if (b.entity.empty()) throw StructuralError("binding has no entity");
  RuleTakerText out;
  out.theory.fragment = Fragment::RuleTaker;
  out.theory.binding = b;
  for (const auto& r : inst.theory.rules) {
    out.theory.sentences.push_back(rt_rule(b, r));
    budget(out.theory.sentences.back(), opts);
  }
  for (const auto& f : inst.theory.facts) out.theory.sentences.push_back(rt_fact(b, f));
  out.conjecture = rt_fact(b, inst.conjecture);
  return out;
}

namespace {

using detail::SentenceCursor;
using detail::Token;

class RuleTakerReader {
 public:
  RuleTakerReader(const Lexicon& attrs, const ParseOptions& opts)
      : opts_(opts), table_(opts.binding != nullptr ? &opts.binding->words : nullptr, attrs, opts.lenient) {
    if (opts.binding != nullptr) entity_ = opts.binding->entity;
  }

  /// "the E is [not] A"; returns the literal as stated.
  Literal atom(SentenceCursor& cur, bool sentence_start) {
    const Token* the = cur.peek();
    if (!(sentence_start ? cur.accept("The") : cur.accept("the"))) {
      cur.fail(sentence_start ? "expected 'The'" : "expected 'the'", the);
    }
    const Token& ent = cur.take("the entity");
    for (char ch : ent.text) {
      if (ch < 'a' || ch > 'z') cur.fail("entity must be a lowercase word", &ent);
    }
    if (entity_.empty()) entity_ = std::string(ent.text);
    if (ent.text != entity_) cur.fail("expected entity '" + entity_ + "'", &ent);
    cur.expect("is");
    bool negated = cur.accept("not");
    return {table_.var_for(cur.take("an attribute"), cur), negated};
  }

  void sentence(const std::string& text, std::size_t index, RuleTakerTheory& t) {
    SentenceCursor cur(text, index, opts_.lenient);
    if (cur.accept("If")) {
      std::vector<Literal> lits;
      do {
        lits.push_back(~atom(cur, false));
        if (lits.size() > 2) cur.fail("too many antecedents");
      } while (cur.accept("and"));
      cur.expect("then");
      lits.push_back(atom(cur, false));
      cur.finish();
      try {
        t.rules.push_back(Clause::canonical(lits));
      } catch (const StructuralError& e) {
        cur.fail(std::string("sentence does not denote a clause: ") + e.what());
      }
      if (!t.facts.empty() && !opts_.lenient) cur.fail("rules must precede facts");
    } else {
      t.facts.push_back(atom(cur, true));
      cur.finish();
    }
  }

  Literal conjecture(const std::string& text, std::size_t index) {
    SentenceCursor cur(text, index, opts_.lenient);
    Literal q = atom(cur, true);
    cur.finish();
    return q;
  }

  VarBinding binding() const {
    if (opts_.binding != nullptr) return *opts_.binding;
    VarBinding b;
    b.words = table_.words();
    b.entity = entity_;
    return b;
  }

 private:
  const ParseOptions& opts_;
  detail::WordTable table_;
  std::string entity_;
};

}  // namespace

RuleTakerParse parse_ruletaker(std::span<const std::string> sentences, const std::string& conjecture,
                               const Lexicon& attributes, const ParseOptions& opts) {
  RuleTakerReader reader(attributes, opts);
  RuleTakerParse out;
  for (std::size_t i = 0; i < sentences.size(); ++i) reader.sentence(sentences[i], i + 1, out.theory);
  out.conjecture = reader.conjecture(conjecture, sentences.size() + 1);
  out.binding = reader.binding();
  out.theory.n_vars = static_cast<std::uint32_t>(out.binding.words.size());
  return out;
}

}  // namespace nlsat
