// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "nlsat/error.hpp"

namespace nlsat {

Literal Literal::from_dimacs(std::int64_t value) {
  if (value == 0) throw StructuralError("literal 0 is the DIMACS terminator");
  if (value > INT32_MAX || value < -static_cast<std::int64_t>(INT32_MAX)) {
    throw StructuralError("literal " + std::to_string(value) + " out of range");
  }
  return value > 0 ? pos(static_cast<std::uint32_t>(value)) : neg(static_cast<std::uint32_t>(-value));
}

// ---------------------------------------------------------------------------
// Clause
// ---------------------------------------------------------------------------

namespace {

void check_width(std::size_t n) {
  if (n == 0) throw StructuralError("empty clause");
  if (n > Clause::kMaxWidth) {
    throw StructuralError("clause of width " + std::to_string(n) + " exceeds the maximum of 3");
  }
}

}  // namespace

Clause Clause::canonical(std::span<const Literal> lits) {
  check_width(lits.size());
  Clause c;
  std::copy(lits.begin(), lits.end(), c.lits_.begin());
  c.size_ = static_cast<std::uint8_t>(lits.size());
  std::sort(c.lits_.begin(), c.lits_.begin() + c.size_);
  for (std::size_t i = 1; i < c.size_; ++i) {
    if (c.lits_[i].var == c.lits_[i - 1].var) {
      if (c.lits_[i].negated == c.lits_[i - 1].negated) {
        throw StructuralError("duplicate literal " + std::to_string(c.lits_[i].to_dimacs()));
      }
      throw StructuralError("tautological clause on variable " + std::to_string(c.lits_[i].var.index));
    }
  }
  for (std::size_t i = 0; i < c.size_; ++i) {
    if (c.lits_[i].var.index == 0) throw StructuralError("variable index 0 is reserved");
  }
  return c;
}

Clause Clause::raw(std::span<const Literal> lits) {
  check_width(lits.size());
  Clause c;
  std::copy(lits.begin(), lits.end(), c.lits_.begin());
  c.size_ = static_cast<std::uint8_t>(lits.size());
  c.raw_ = true;
  for (std::size_t i = 0; i < c.size_; ++i) {
    if (c.lits_[i].var.index == 0) throw StructuralError("variable index 0 is reserved");
  }
  return c;
}

bool Clause::satisfied_by(std::span<const std::int8_t> values) const {
  for (std::size_t i = 0; i < size_; ++i) {
    std::int8_t v = values[lits_[i].var.index];
    if (v != Assignment::kUnassigned && (v == 1) != lits_[i].negated) return true;
  }
  return false;
}

bool operator==(const Clause& a, const Clause& b) {
  return a.raw_ == b.raw_ && std::ranges::equal(a.literals(), b.literals());
}

NormalizedClause normalize_clause(const Clause& c) {
  if (c.width() == 0) throw StructuralError("empty clause");
  std::array<Literal, Clause::kMaxWidth> buf{};
  std::copy(c.literals().begin(), c.literals().end(), buf.begin());
  auto end = buf.begin() + static_cast<std::ptrdiff_t>(c.width());
  std::sort(buf.begin(), end);
  end = std::unique(buf.begin(), end);
  for (auto it = buf.begin(); it + 1 < end; ++it) {
    if (it->var == (it + 1)->var) return {ClauseShape::Tautology, Clause{}};
  }
  Clause out = Clause::canonical(std::span<const Literal>(buf.begin(), end));
  switch (out.width()) {
    case 1:
      return {ClauseShape::Unit, out};
    case 2:
      return {ClauseShape::TwoClause, out};
    default:
      return {ClauseShape::ThreeClause, out};
  }
}

// ---------------------------------------------------------------------------
// CnfFormula
// ---------------------------------------------------------------------------

CnfFormula::CnfFormula(std::uint32_t n_vars, std::vector<Clause> clauses) : n_vars_(n_vars) {
  clauses_.reserve(clauses.size());
  for (const auto& c : clauses) add_clause(c);
}

void CnfFormula::add_clause(const Clause& c) {
  for (const auto& lit : c.literals()) {
    if (lit.var.index > n_vars_) {
      throw StructuralError("literal " + std::to_string(lit.to_dimacs()) + " exceeds n=" +
                            std::to_string(n_vars_));
    }
  }
  clauses_.push_back(c);
}

Rational CnfFormula::alpha() const {
  if (n_vars_ == 0) throw StructuralError("alpha is undefined for a formula with zero variables");
  return Rational(static_cast<std::int64_t>(clauses_.size()), n_vars_);
}

// ---------------------------------------------------------------------------
// Assignment / evaluate
// ---------------------------------------------------------------------------

std::optional<bool> Assignment::get(VarId v) const {
  std::int8_t x = values_.at(v.index);
  if (x == kUnassigned) return std::nullopt;
  return x == 1;
}

bool Assignment::is_total() const {
  return std::all_of(values_.begin() + (values_.empty() ? 0 : 1), values_.end(),
                     [](std::int8_t x) { return x != kUnassigned; });
}

std::vector<VarId> Assignment::missing() const {
  std::vector<VarId> out;
  for (std::uint32_t v = 1; v < values_.size(); ++v) {
    if (values_[v] == kUnassigned) out.push_back(VarId{v});
  }
  return out;
}

bool evaluate(const CnfFormula& f, const Assignment& a) {
  if (a.n_vars() < f.n_vars()) {
    throw StructuralError("assignment covers " + std::to_string(a.n_vars()) + " variables, formula has " +
                          std::to_string(f.n_vars()));
  }
  std::vector<VarId> missing;
  for (std::uint32_t v = 1; v <= f.n_vars(); ++v) {
    if (!a.get(VarId{v})) missing.push_back(VarId{v});
  }
  if (!missing.empty()) {
    std::string msg = "partial assignment; missing variables:";
    for (auto v : missing) msg += " " + std::to_string(v.index);
    throw StructuralError(msg);
  }
  return std::all_of(f.clauses().begin(), f.clauses().end(),
                     [&](const Clause& c) { return c.satisfied_by(a.raw()); });
}

// ---------------------------------------------------------------------------
// DIMACS
// ---------------------------------------------------------------------------

std::string to_dimacs(const CnfFormula& f) {
  std::string out = "p cnf " + std::to_string(f.n_vars()) + " " + std::to_string(f.size()) + "\n";
  for (const auto& c : f.clauses()) {
    if (c.is_raw()) throw StructuralError("DIMACS export requires canonical clauses");
    for (const auto& lit : c.literals()) {
      out += std::to_string(lit.to_dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t to_int(std::string_view tok, std::size_t line_no) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, "line " + std::to_string(line_no) + ": expected an integer, got '" +
                                  std::string(tok) + "'");
  }
  return v;
}

}  // namespace

CnfFormula from_dimacs(std::string_view text) {
  std::optional<std::uint32_t> n_vars;
  std::int64_t declared_m = -1;
  std::vector<Clause> clauses;
  std::vector<Literal> pending;
  std::size_t pending_line = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    auto toks = split_ws(line);
    if (toks.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    if (toks[0] == "c") continue;
    if (toks[0] == "p") {
      if (n_vars) throw ParseError(line_no, "line " + std::to_string(line_no) + ": duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf") {
        throw ParseError(line_no, "line " + std::to_string(line_no) + ": malformed header, expected 'p cnf <n> <m>'");
      }
      std::int64_t n = to_int(toks[2], line_no);
      declared_m = to_int(toks[3], line_no);
      if (n < 0 || n > INT32_MAX || declared_m < 0) {
        throw ParseError(line_no, "line " + std::to_string(line_no) + ": malformed header counts");
      }
      n_vars = static_cast<std::uint32_t>(n);
      continue;
    }
    if (!n_vars) throw ParseError(line_no, "line " + std::to_string(line_no) + ": clause before 'p cnf' header");
    for (auto tok : toks) {
      std::int64_t v = to_int(tok, line_no);
      if (v == 0) {
        if (pending.empty()) throw ParseError(line_no, "line " + std::to_string(line_no) + ": empty clause");
        if (pending.size() > Clause::kMaxWidth) {
          throw ParseError(line_no, "line " + std::to_string(line_no) + ": clause wider than 3 literals");
        }
        bool canonical = std::is_sorted(pending.begin(), pending.end()) &&
                         std::adjacent_find(pending.begin(), pending.end(), [](Literal a, Literal b) {
                           return a.var == b.var;
                         }) == pending.end();
        clauses.push_back(canonical ? Clause::canonical(pending) : Clause::raw(pending));
        pending.clear();
        continue;
      }
      std::int64_t mag = v < 0 ? -v : v;
      if (mag > *n_vars) {
        throw ParseError(line_no, "line " + std::to_string(line_no) + ": literal " + std::to_string(mag) +
                                      " exceeds n=" + std::to_string(*n_vars));
      }
      if (pending.empty()) pending_line = line_no;
      pending.push_back(Literal::from_dimacs(v));
    }
  }
  if (!n_vars) throw ParseError(line_no, "missing 'p cnf' header");
  if (!pending.empty()) {
    throw ParseError(pending_line, "line " + std::to_string(pending_line) + ": clause missing 0 terminator");
  }
  if (static_cast<std::int64_t>(clauses.size()) != declared_m) {
    throw ParseError(line_no, "header declares " + std::to_string(declared_m) + " clauses, found " +
                                  std::to_string(clauses.size()));
  }
  return CnfFormula(*n_vars, std::move(clauses));
}

}  // namespace nlsat
