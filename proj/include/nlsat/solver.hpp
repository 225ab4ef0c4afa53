// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Chronological-backtracking DPLL with unit propagation, an exhaustive
// truth-table oracle, and entailment via refutation.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nlsat/cnf.hpp"

namespace nlsat {

struct SolveStats {
  /// Free branching assignments (the false-first choice on a branch var).
  std::uint64_t decisions = 0;
  /// Clause falsifications that forced a backtrack.
  std::uint64_t conflicts = 0;
  /// Assignments forced by unit clauses, including input units.
  std::uint64_t propagations = 0;

  SolveStats& operator+=(const SolveStats& o) {
    decisions += o.decisions;
    conflicts += o.conflicts;
    propagations += o.propagations;
    return *this;
  }
  friend bool operator==(const SolveStats&, const SolveStats&) = default;
};

enum class SatLabel { Sat, Unsat };

inline const char* to_string(SatLabel l) { return l == SatLabel::Sat ? "sat" : "unsat"; }

struct SolveResult {
  SatLabel label = SatLabel::Unsat;
  /// Present iff label == Sat; total over 1..=n_vars.
  std::optional<Assignment> model;
  SolveStats stats;
};

struct SolverOptions {
  std::uint64_t max_decisions = 10'000'000;
  /// Solve variable-disjoint parts of the formula independently. The ground
  /// formulas of the relative-clause fragment split into one block per
  /// constant; without this, chronological backtracking re-explores every
  /// earlier block when a later one is refuted.
  bool split_components = true;
};

/// Human-readable description of the branching rule, stored in dataset
/// metadata.
inline constexpr const char* kBranchingRule =
    "dpll/chronological; branch on lowest-index unassigned variable of an open clause; false first";

struct PropagationResult {
  bool conflict = false;
  /// The input extended by every forced assignment (up to the conflict).
  Assignment assignment;
  std::uint64_t propagations = 0;
};

/// Unit propagation to fixpoint from a partial assignment.
PropagationResult unit_propagate(const CnfFormula& f, const Assignment& partial);

/// Decides f. Throws BudgetExhausted once `max_decisions` is exceeded.
/// Every returned model is checked against f before returning.
SolveResult solve(const CnfFormula& f, const SolverOptions& options = {});

inline constexpr std::uint32_t kBruteforceMaxVars = 24;

struct BruteforceResult {
  SatLabel label = SatLabel::Unsat;
  /// First model in lexicographic order over (v1, ..., vn), false < true.
  std::optional<Assignment> model;
};

/// Exhaustive truth-table search. Throws StructuralError above 24 variables.
BruteforceResult solve_bruteforce(const CnfFormula& f);

enum class Entailment { Entailed, Contradicted, Unknown };

const char* to_string(Entailment e);

/// Entailed iff theory ∧ ¬q is unsat; contradicted iff theory ∧ q is unsat.
/// Throws DegenerateTheory when the theory itself is unsat.
Entailment check_entailment(const CnfFormula& theory, Literal q, const SolverOptions& options = {});

/// Cross-validation through a user-supplied solver binary. The command is run
/// through the shell with the path of a DIMACS file appended; its output must
/// contain SATISFIABLE or UNSATISFIABLE.
SatLabel solve_external(const CnfFormula& f, const std::string& command);

}  // namespace nlsat
