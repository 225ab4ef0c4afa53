// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Single-entity rule theories built from with-replacement random 3-SAT:
// clauses that repeat a variable collapse into facts or 2-clause rules, the
// rules must stay satisfiable, and a conjecture is drawn from the literals the
// theory entails or contradicts.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlsat/fragments.hpp"
#include "nlsat/sampler.hpp"
#include "nlsat/solver.hpp"

namespace nlsat {

struct RetrofitSpec {
  /// n is drawn uniformly from this list.
  std::vector<std::uint32_t> sizes{5, 6, 7};
  double p_int = 1.0;
  double p_neg = 0.5;
  Rational alpha_min = Rational::from_int(3);
  Rational alpha_max = Rational::from_int(5);
  /// Redraw tautological clauses instead of keeping them.
  bool resample_tautologies = true;
};

/// Raw clauses drawn with replacement. Throws StructuralError on an empty
/// size list or an empty alpha band.
CnfFormula sample_retrofit_formula(const RetrofitSpec& spec, Rng& rng);

struct RuleTakerTheory {
  std::uint32_t n_vars = 0;
  /// Canonical 2- and 3-clauses.
  std::vector<Clause> rules;
  /// Distinct, non-complementary.
  std::vector<Literal> facts;

  /// Rules followed by one unit clause per fact.
  CnfFormula formula() const;

  friend bool operator==(const RuleTakerTheory&, const RuleTakerTheory&) = default;
};

enum class RetrofitReject { None, ContradictoryFacts, RulesUnsat, TheoryUnsat };

const char* to_string(RetrofitReject r);

struct RetrofitOutcome {
  std::optional<RuleTakerTheory> theory;
  RetrofitReject reason = RetrofitReject::None;
};

/// Triple repeats become facts, double repeats 2-clause rules, tautologies are
/// dropped. Rejects unless both the rules and rules ∧ facts are satisfiable.
RetrofitOutcome retrofit(const CnfFormula& raw, const SolverOptions& solver = {});

/// Literals over the theory's variables by entailment status. A literal is
/// trivial when it or its complement is a fact.
struct ConjecturePools {
  std::vector<Literal> entailed;
  std::vector<Literal> contradicted;
  std::vector<Literal> entailed_trivial;
  std::vector<Literal> contradicted_trivial;
};

ConjecturePools conjecture_pools(const RuleTakerTheory& t, const SolverOptions& solver = {});

struct RuleTakerInstance {
  RuleTakerTheory theory;
  Literal conjecture;
  /// true: entailed; false: contradicted.
  bool label = false;
  /// Solver stats of the refutation that proves the label.
  SolveStats stats;
};

/// Uniform draw from the pool of the requested label, falling back to the
/// trivial pool only when the non-trivial one is empty. nullopt when both are.
std::optional<RuleTakerInstance> make_instance(const RuleTakerTheory& t, const ConjecturePools& pools, bool label,
                                               Rng& rng, const SolverOptions& solver = {});
std::optional<RuleTakerInstance> make_instance(const RuleTakerTheory& t, bool label, Rng& rng,
                                               const SolverOptions& solver = {});

/// Stats of solve(theory ∧ ¬q) for label true, solve(theory ∧ q) for false.
SolveStats refutation_stats(const RuleTakerTheory& t, Literal q, bool label, const SolverOptions& solver = {});

struct RuleTakerText {
  NlTheory theory;
  std::string conjecture;
};

/// Rules, then facts. Binding words are attributes; binding.entity is the
/// subject ("lion").
RuleTakerText render_ruletaker(const RuleTakerInstance& inst, const VarBinding& b, const RenderOptions& opts = {});

struct RuleTakerParse {
  RuleTakerTheory theory;
  Literal conjecture;
  VarBinding binding;
};

/// Inverse of render_ruletaker. Without a binding hint the entity is taken
/// from the first sentence and variables are numbered by first appearance.
RuleTakerParse parse_ruletaker(std::span<const std::string> sentences, const std::string& conjecture,
                               const Lexicon& attributes, const ParseOptions& opts = {});

}  // namespace nlsat
