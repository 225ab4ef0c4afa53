// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Reference checkers that share no code with the library under test.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nlsat/cnf.hpp"
#include "nlsat/fragments.hpp"

namespace nlsat::testing {

// Plain truth table: bit (v-1) of `bits` is the value of variable v.
inline bool clause_true(const Clause& c, std::uint64_t bits) {
  for (const Literal& l : c.literals()) {
    bool value = (bits >> (l.var.index - 1)) & 1u;
    if (value != l.negated) return true;
  }
  return false;
}

inline std::optional<std::uint64_t> truth_table_model(const CnfFormula& f) {
  const std::uint64_t rows = std::uint64_t{1} << f.n_vars();
  for (std::uint64_t bits = 0; bits < rows; ++bits) {
    bool all = true;
    for (const Clause& c : f.clauses()) {
      if (!clause_true(c, bits)) {
        all = false;
        break;
      }
    }
    if (all) return bits;
  }
  return std::nullopt;
}

inline bool truth_table_sat(const CnfFormula& f) { return truth_table_model(f).has_value(); }

/// theory |= q iff no row satisfies theory and not q.
inline bool truth_table_entails(const CnfFormula& f, Literal q) {
  const std::uint64_t rows = std::uint64_t{1} << f.n_vars();
  for (std::uint64_t bits = 0; bits < rows; ++bits) {
    bool q_true = ((bits >> (q.var.index - 1)) & 1u) != q.negated;
    if (q_true) continue;
    bool all = true;
    for (const Clause& c : f.clauses()) {
      if (!clause_true(c, bits)) {
        all = false;
        break;
      }
    }
    if (all) return false;
  }
  return true;
}

/// First-order model search over the finite domain of named constants: an
/// interpretation assigns each unary predicate its extension (a subset of the
/// domain). Universal clauses must hold for every individual, ground clauses
/// for their individual.
inline bool fo_satisfiable(const RclProblem& p) {
  const std::uint32_t np = p.n_predicates, nc = p.n_constants;
  // ext[pred] is a bitmask over individuals; iterate all |P|-tuples of subsets.
  const std::uint64_t per_pred = std::uint64_t{1} << nc;
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < np; ++i) total *= per_pred;
  std::vector<std::uint64_t> ext(np + 1);
  auto holds = [&](const Clause& c, std::uint32_t who) {
    for (const Literal& l : c.literals()) {
      bool member = (ext[l.var.index] >> who) & 1u;
      if (member != l.negated) return true;
    }
    return false;
  };
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    for (std::uint32_t pr = 1; pr <= np; ++pr) {
      ext[pr] = rest % per_pred;
      rest /= per_pred;
    }
    bool ok = true;
    for (const Clause& c : p.universal) {
      for (std::uint32_t who = 0; who < nc && ok; ++who) ok = holds(c, who);
      if (!ok) break;
    }
    for (std::size_t i = 0; ok && i < p.ground.size(); ++i) ok = holds(p.ground[i].clause, p.ground[i].constant);
    if (ok) return true;
  }
  return false;
}

/// Upper-tail chi-square critical value via the Wilson-Hilferty cube-root
/// approximation; z is the standard normal quantile.
inline double chi_square_critical(double dof, double z) {
  double a = 2.0 / (9.0 * dof);
  double t = 1.0 - a + z * std::sqrt(a);
  return dof * t * t * t;
}

inline double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double d = observed[i] - expected[i];
    s += d * d / expected[i];
  }
  return s;
}

/// Raw clause over variables 1..n of width k, uniformly random signs.
template <typename Rng>
Clause random_clause(std::uint32_t n, std::uint32_t k, Rng& rng) {
  std::vector<Literal> lits;
  while (lits.size() < k) {
    std::uint32_t v = 1 + static_cast<std::uint32_t>(rng.below(n));
    bool dup = false;
    for (const auto& l : lits) dup = dup || l.var.index == v;
    if (!dup) lits.push_back({VarId{v}, rng.bernoulli(0.5)});
  }
  return Clause::canonical(lits);
}

template <typename Rng>
CnfFormula random_formula(std::uint32_t n, std::size_t m, double p_int, Rng& rng) {
  CnfFormula f(n, {});
  for (std::size_t i = 0; i < m; ++i) {
    std::uint32_t k = n < 3 ? n : (rng.bernoulli(p_int) ? 3u : 2u);
    f.add_clause(random_clause(n, k, rng));
  }
  return f;
}

}  // namespace nlsat::testing
