// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/sampler.hpp"

#include <array>

#include "nlsat/error.hpp"

namespace nlsat {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Hard:
      return "hard";
    case Strategy::Naive:
      return "naive";
    default:
      return "biased";
  }
}

Strategy parse_strategy(std::string_view name) {
  if (name == "hard") return Strategy::Hard;
  if (name == "naive") return Strategy::Naive;
  if (name == "biased") return Strategy::Biased;
  throw StructuralError("unknown strategy '" + std::string(name) + "' (expected hard, naive or biased)");
}

void SampleSpec::validate() const {
  if (n < 2) throw StructuralError("sample spec needs n >= 2, got " + std::to_string(n));
  if (!(p_int >= 0.0 && p_int <= 1.0)) throw StructuralError("p_int must lie in [0, 1]");
  if (!(p_neg >= 0.0 && p_neg <= 1.0)) throw StructuralError("p_neg must lie in [0, 1]");
  if (alpha_min < Rational::from_int(0)) throw StructuralError("alpha_min must be >= 0");
  if (alpha_max < alpha_min) {
    throw StructuralError("alpha_max " + alpha_max.to_string() + " is below alpha_min " + alpha_min.to_string());
  }
}

ClauseCountRange admissible_clause_counts(std::uint32_t n, const Rational& alpha_min, const Rational& alpha_max) {
  ClauseCountRange r;
  r.lo = std::max<std::int64_t>(0, alpha_min.ceil_times(n));
  r.hi = alpha_max.floor_times(n);
  return r;
}

Clause sample_clause(const SampleSpec& spec, Rng& rng) {
  const std::uint32_t k = rng.bernoulli(spec.p_int) ? 3 : 2;
  if (!spec.with_replacement && spec.n < k) {
    throw StructuralError("cannot draw " + std::to_string(k) + " distinct variables from n=" + std::to_string(spec.n));
  }
  std::array<Literal, 3> lits{};
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint32_t v;
    bool fresh;
    do {
      v = 1 + static_cast<std::uint32_t>(rng.below(spec.n));
      fresh = true;
      if (!spec.with_replacement) {
        for (std::uint32_t j = 0; j < i; ++j) fresh = fresh && lits[j].var.index != v;
      }
    } while (!fresh);
    lits[i].var = VarId{v};
  }
  for (std::uint32_t i = 0; i < k; ++i) lits[i].negated = rng.bernoulli(spec.p_neg);
  std::span<const Literal> view(lits.data(), k);
  return spec.with_replacement ? Clause::raw(view) : Clause::canonical(view);
}

CnfFormula sample_formula_with_m(const SampleSpec& spec, std::int64_t m, Rng& rng) {
  if (m < 0) throw StructuralError("negative clause count");
  std::vector<Clause> clauses;
  clauses.reserve(static_cast<std::size_t>(m));
  for (std::int64_t i = 0; i < m; ++i) clauses.push_back(sample_clause(spec, rng));
  return CnfFormula(spec.n, std::move(clauses));
}

CnfFormula sample_formula(const SampleSpec& spec, Rng& rng) {
  spec.validate();
  auto range = admissible_clause_counts(spec.n, spec.alpha_min, spec.alpha_max);
  if (range.empty()) {
    throw StructuralError("no integer m with " + spec.alpha_min.to_string() + " <= m/" + std::to_string(spec.n) +
                          " <= " + spec.alpha_max.to_string() + " (admissible band [" +
                          Rational(range.lo, spec.n).to_string() + ", " + Rational(range.hi, spec.n).to_string() +
                          "] is empty)");
  }
  std::int64_t m = range.lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(range.count())));
  return sample_formula_with_m(spec, m, rng);
}

}  // namespace nlsat
