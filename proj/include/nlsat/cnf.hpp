// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Propositional CNF over 1-based variables: literals, clauses of width 1..3,
// formulas, assignments, and the DIMACS interchange format.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlsat/rational.hpp"

namespace nlsat {

/// 1-based variable index. 0 is reserved as the DIMACS terminator.
struct VarId {
  std::uint32_t index = 0;

  friend constexpr auto operator<=>(VarId, VarId) = default;
};

struct Literal {
  VarId var;
  bool negated = false;

  static constexpr Literal pos(std::uint32_t v) { return {VarId{v}, false}; }
  static constexpr Literal neg(std::uint32_t v) { return {VarId{v}, true}; }
  /// Throws StructuralError on 0.
  static Literal from_dimacs(std::int64_t value);

  constexpr std::int64_t to_dimacs() const {
    return negated ? -static_cast<std::int64_t>(var.index) : static_cast<std::int64_t>(var.index);
  }
  constexpr Literal operator~() const { return {var, !negated}; }

  /// Order by (var index, polarity) with the positive literal first.
  friend constexpr auto operator<=>(Literal, Literal) = default;
};

/// Up to three literals. Canonical clauses are sorted with no repeated
/// variable; raw clauses keep draw order and may repeat variables.
class Clause {
 public:
  static constexpr std::size_t kMaxWidth = 3;

  Clause() = default;

  /// Sorts the literals. Throws StructuralError on an empty or over-wide
  /// list, a duplicated literal, or a complementary pair.
  static Clause canonical(std::span<const Literal> lits);
  static Clause canonical(std::initializer_list<Literal> lits) {
    return canonical(std::span<const Literal>(lits.begin(), lits.size()));
  }
  /// Keeps the literals as given; only the width is checked.
  static Clause raw(std::span<const Literal> lits);
  static Clause raw(std::initializer_list<Literal> lits) {
    return raw(std::span<const Literal>(lits.begin(), lits.size()));
  }

  std::span<const Literal> literals() const { return {lits_.data(), size_}; }
  std::size_t width() const { return size_; }
  bool is_raw() const { return raw_; }
  const Literal& operator[](std::size_t i) const { return lits_[i]; }

  bool satisfied_by(std::span<const std::int8_t> values) const;

  friend bool operator==(const Clause& a, const Clause& b);

 private:
  std::array<Literal, kMaxWidth> lits_{};
  std::uint8_t size_ = 0;
  bool raw_ = false;
};

enum class ClauseShape { Tautology, Unit, TwoClause, ThreeClause };

struct NormalizedClause {
  ClauseShape shape;
  /// Canonical clause; empty (width 0) for a tautology.
  Clause clause;
};

/// Collapses repeated literals and detects tautologies.
NormalizedClause normalize_clause(const Clause& c);

class CnfFormula {
 public:
  CnfFormula() = default;
  /// Throws StructuralError when a literal exceeds n_vars.
  CnfFormula(std::uint32_t n_vars, std::vector<Clause> clauses);

  std::uint32_t n_vars() const { return n_vars_; }
  std::size_t size() const { return clauses_.size(); }
  const std::vector<Clause>& clauses() const { return clauses_; }

  void add_clause(const Clause& c);

  /// m / n exactly. Throws StructuralError for n_vars == 0.
  Rational alpha() const;

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;

 private:
  std::uint32_t n_vars_ = 0;
  std::vector<Clause> clauses_;
};

/// Values over 1..=n, possibly partial.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::uint32_t n_vars) : values_(n_vars + 1, kUnassigned) {}

  std::uint32_t n_vars() const { return values_.empty() ? 0 : static_cast<std::uint32_t>(values_.size() - 1); }
  void set(VarId v, bool value) { values_.at(v.index) = value ? 1 : 0; }
  void clear(VarId v) { values_.at(v.index) = kUnassigned; }
  std::optional<bool> get(VarId v) const;
  bool is_total() const;
  std::vector<VarId> missing() const;
  /// Raw per-variable values (index 0 unused): 1 true, 0 false, -1 unassigned.
  std::span<const std::int8_t> raw() const { return values_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

  static constexpr std::int8_t kUnassigned = -1;

 private:
  std::vector<std::int8_t> values_;
};

/// True iff every clause has a satisfied literal. Throws StructuralError
/// naming the missing variables when the assignment is partial.
bool evaluate(const CnfFormula& f, const Assignment& a);

/// "p cnf n m" followed by one 0-terminated clause per line.
std::string to_dimacs(const CnfFormula& f);
/// Parses DIMACS CNF; `c` comment lines are skipped. Throws ParseError with
/// the offending line number.
CnfFormula from_dimacs(std::string_view text);

}  // namespace nlsat
