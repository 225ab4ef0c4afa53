// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Random mixed 2/3-SAT generation: clause width 3 with probability p_int,
// variables drawn uniformly (unique or with replacement), each literal negated
// with probability p_neg, and m drawn uniformly over the integers admitted by
// an alpha band.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "nlsat/cnf.hpp"
#include "nlsat/rational.hpp"
#include "nlsat/rng.hpp"

namespace nlsat {

enum class Strategy { Hard, Naive, Biased };

const char* to_string(Strategy s);
/// Throws StructuralError on an unknown name.
Strategy parse_strategy(std::string_view name);

struct SampleSpec {
  std::uint32_t n = 10;
  double p_int = 1.0;
  double p_neg = 0.5;
  Rational alpha_min = Rational::from_int(0);
  Rational alpha_max = Rational::from_int(10);
  bool with_replacement = false;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Hard;

  /// Throws StructuralError naming the violated bound.
  void validate() const;
};

/// Integer clause counts admitted by an alpha band at n variables.
struct ClauseCountRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  bool empty() const { return hi < lo; }
  std::int64_t count() const { return empty() ? 0 : hi - lo + 1; }
};

ClauseCountRange admissible_clause_counts(std::uint32_t n, const Rational& alpha_min, const Rational& alpha_max);

/// One clause. Without replacement the clause is canonical; with replacement
/// it is raw and keeps the draw order.
Clause sample_clause(const SampleSpec& spec, Rng& rng);

/// Exactly m clauses drawn by sample_clause.
CnfFormula sample_formula_with_m(const SampleSpec& spec, std::int64_t m, Rng& rng);

/// m uniform over the admissible integers of [alpha_min, alpha_max], then m
/// clauses. Throws StructuralError when the band admits no integer m.
CnfFormula sample_formula(const SampleSpec& spec, Rng& rng);

}  // namespace nlsat
