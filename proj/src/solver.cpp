// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/solver.hpp"

#include <unistd.h>

#include <array>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "nlsat/error.hpp"

namespace nlsat {

namespace {

constexpr std::uint32_t code(Literal l) { return 2 * l.var.index + (l.negated ? 1 : 0); }

//===----------------------------------------------------------------------===//
// DPLL engine over one set of clauses
//===----------------------------------------------------------------------===//

class Dpll {
 public:
  Dpll(std::uint32_t n_vars, std::vector<const Clause*> clauses, SolveStats& stats)
      : clauses_(std::move(clauses)),
        stats_(stats),
        value_(n_vars + 1, Assignment::kUnassigned),
        occurs_(2 * (n_vars + 1)),
        n_true_(clauses_.size(), 0) {
    for (std::uint32_t c = 0; c < clauses_.size(); ++c) {
      for (const auto& lit : clauses_[c]->literals()) occurs_[code(lit)].push_back(c);
    }
    trail_.reserve(n_vars);
  }

  /// Assigns without counting; used to seed unit_propagate.
  void preassign(Literal lit) {
    if (is_unassigned(lit.var)) assign(lit);
  }

  /// Input units, then propagation. False on a level-0 conflict.
  bool initial_propagate() {
    for (const Clause* c : clauses_) {
      if (c->width() != 1) continue;
      Literal lit = (*c)[0];
      if (is_false(lit)) return false;
      if (is_unassigned(lit.var)) {
        assign(lit);
        ++stats_.propagations;
      }
    }
    return propagate();
  }

  /// Runs the search; true iff satisfiable.
  bool search(std::uint64_t decision_budget) {
    if (!initial_propagate()) {
      ++stats_.conflicts;
      return false;
    }
    while (true) {
      if (satisfied_ == clauses_.size()) return true;
      std::uint32_t v = pick_branch_var();
      if (++stats_.decisions > decision_budget) {
        throw BudgetExhausted("budget exhausted: more than " + std::to_string(decision_budget) + " decisions");
      }
      levels_.push_back({trail_.size(), v, false});
      assign(Literal::neg(v));
      bool ok = propagate();
      while (!ok) {
        ++stats_.conflicts;
        while (!levels_.empty() && levels_.back().flipped) {
          undo_to(levels_.back().trail_start);
          levels_.pop_back();
        }
        if (levels_.empty()) return false;
        Level& top = levels_.back();
        undo_to(top.trail_start);
        top.flipped = true;
        assign(Literal::pos(top.var));
        ok = propagate();
      }
    }
  }

  /// Propagation from the current trail; false on conflict.
  bool propagate() {
    while (qhead_ < trail_.size()) {
      Literal now_false = ~trail_[qhead_++];
      for (std::uint32_t c : occurs_[code(now_false)]) {
        if (n_true_[c] > 0) continue;
        const Clause& clause = *clauses_[c];
        Literal unit{};
        int open = 0;
        for (const auto& lit : clause.literals()) {
          if (is_unassigned(lit.var)) {
            unit = lit;
            ++open;
          }
        }
        if (open == 0) return false;
        if (open == 1) {
          assign(unit);
          ++stats_.propagations;
        }
      }
    }
    return true;
  }

  const std::vector<std::int8_t>& values() const { return value_; }

 private:
  struct Level {
    std::size_t trail_start;
    std::uint32_t var;
    bool flipped;
  };

  bool is_unassigned(VarId v) const { return value_[v.index] == Assignment::kUnassigned; }
  bool is_false(Literal l) const {
    std::int8_t v = value_[l.var.index];
    return v != Assignment::kUnassigned && (v == 1) == l.negated;
  }

  void assign(Literal lit) {
    value_[lit.var.index] = lit.negated ? 0 : 1;
    trail_.push_back(lit);
    for (std::uint32_t c : occurs_[code(lit)]) {
      if (n_true_[c]++ == 0) ++satisfied_;
    }
  }

  void undo_to(std::size_t trail_size) {
    while (trail_.size() > trail_size) {
      Literal lit = trail_.back();
      trail_.pop_back();
      value_[lit.var.index] = Assignment::kUnassigned;
      for (std::uint32_t c : occurs_[code(lit)]) {
        if (--n_true_[c] == 0) --satisfied_;
      }
    }
    qhead_ = trail_size;
  }

  std::uint32_t pick_branch_var() const {
    for (std::uint32_t v = 1; v < value_.size(); ++v) {
      if (value_[v] != Assignment::kUnassigned) continue;
      for (std::uint32_t c : occurs_[2 * v]) {
        if (n_true_[c] == 0) return v;
      }
      for (std::uint32_t c : occurs_[2 * v + 1]) {
        if (n_true_[c] == 0) return v;
      }
    }
    // An open clause with no conflict always has two unassigned literals.
    throw std::logic_error("no branch variable while clauses remain open");
  }

  std::vector<const Clause*> clauses_;
  SolveStats& stats_;
  std::vector<std::int8_t> value_;
  std::vector<std::vector<std::uint32_t>> occurs_;
  std::vector<std::uint32_t> n_true_;
  std::size_t satisfied_ = 0;
  std::vector<Literal> trail_;
  std::size_t qhead_ = 0;
  std::vector<Level> levels_;
};

/// Groups clause pointers into variable-disjoint components, ordered by their
/// lowest variable.
std::vector<std::vector<const Clause*>> components(const CnfFormula& f) {
  std::vector<std::uint32_t> parent(f.n_vars() + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& c : f.clauses()) {
    std::uint32_t root = find(c[0].var.index);
    for (std::size_t i = 1; i < c.width(); ++i) {
      std::uint32_t r = find(c[i].var.index);
      if (r == root) continue;
      if (r < root) std::swap(r, root);
      parent[r] = root;
    }
  }
  std::vector<std::int64_t> slot(f.n_vars() + 1, -1);
  std::vector<std::vector<const Clause*>> out;
  // Roots are the minimum variable of each set, so scanning roots in
  // variable order yields components ordered by lowest variable.
  for (std::uint32_t v = 1; v <= f.n_vars(); ++v) {
    if (find(v) == v) slot[v] = -2;
  }
  for (std::uint32_t v = 1; v <= f.n_vars(); ++v) {
    if (slot[v] == -2) {
      slot[v] = static_cast<std::int64_t>(out.size());
      out.emplace_back();
    }
  }
  for (const auto& c : f.clauses()) out[static_cast<std::size_t>(slot[find(c[0].var.index)])].push_back(&c);
  std::erase_if(out, [](const auto& comp) { return comp.empty(); });
  return out;
}

}  // namespace

//===----------------------------------------------------------------------===//
// Public API
//===----------------------------------------------------------------------===//

PropagationResult unit_propagate(const CnfFormula& f, const Assignment& partial) {
  if (partial.n_vars() < f.n_vars()) throw StructuralError("partial assignment smaller than the formula");
  std::vector<const Clause*> ptrs;
  ptrs.reserve(f.size());
  for (const auto& c : f.clauses()) ptrs.push_back(&c);
  SolveStats stats;
  Dpll engine(f.n_vars(), std::move(ptrs), stats);
  for (std::uint32_t v = 1; v <= f.n_vars(); ++v) {
    if (auto x = partial.get(VarId{v})) engine.preassign(Literal{VarId{v}, !*x});
  }
  PropagationResult out;
  out.conflict = !engine.initial_propagate();
  out.assignment = Assignment(f.n_vars());
  for (std::uint32_t v = 1; v <= f.n_vars(); ++v) {
    std::int8_t x = engine.values()[v];
    if (x != Assignment::kUnassigned) out.assignment.set(VarId{v}, x == 1);
  }
  out.propagations = stats.propagations;
  return out;
}

SolveResult solve(const CnfFormula& f, const SolverOptions& options) {
  SolveResult result;
  std::vector<std::vector<const Clause*>> parts;
  if (options.split_components) {
    parts = components(f);
  } else {
    parts.emplace_back();
    for (const auto& c : f.clauses()) parts.back().push_back(&c);
  }

  Assignment model(f.n_vars());
  for (std::uint32_t v = 1; v <= f.n_vars(); ++v) model.set(VarId{v}, false);

  for (auto& part : parts) {
    SolveStats local;
    Dpll engine(f.n_vars(), std::move(part), local);
    std::uint64_t budget = options.max_decisions - std::min(options.max_decisions, result.stats.decisions);
    bool sat = false;
    try {
      sat = engine.search(budget);
    } catch (const BudgetExhausted&) {
      throw BudgetExhausted("budget exhausted: more than " + std::to_string(options.max_decisions) +
                            " decisions");
    }
    result.stats += local;
    if (!sat) {
      result.label = SatLabel::Unsat;
      return result;
    }
    for (std::uint32_t v = 1; v <= f.n_vars(); ++v) {
      std::int8_t x = engine.values()[v];
      if (x != Assignment::kUnassigned) model.set(VarId{v}, x == 1);
    }
  }

  if (!evaluate(f, model)) throw std::logic_error("solver produced a model that does not satisfy the formula");
  result.label = SatLabel::Sat;
  result.model = std::move(model);
  return result;
}

BruteforceResult solve_bruteforce(const CnfFormula& f) {
  const std::uint32_t n = f.n_vars();
  if (n > kBruteforceMaxVars) {
    throw StructuralError("brute force refuses " + std::to_string(n) + " variables (limit " +
                          std::to_string(kBruteforceMaxVars) + ")");
  }
  // Assignment index bit (n - i) holds v_i, so increasing index is
  // lexicographic order with v1 most significant. The low six bits vary
  // inside one 64-bit word; higher bits are constant per word.
  static constexpr std::array<std::uint64_t, 6> kPattern = {
      0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
      0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  const std::uint64_t valid = n >= 6 ? ~0ULL : ((1ULL << (1U << n)) - 1);
  const std::uint64_t blocks = n >= 6 ? (1ULL << (n - 6)) : 1;

  for (std::uint64_t b = 0; b < blocks; ++b) {
    std::uint64_t acc = valid;
    for (const auto& c : f.clauses()) {
      std::uint64_t w = 0;
      for (const auto& lit : c.literals()) {
        std::uint32_t bit = n - lit.var.index;
        std::uint64_t x = bit < 6 ? kPattern[bit] : (((b >> (bit - 6)) & 1) ? ~0ULL : 0ULL);
        w |= lit.negated ? ~x : x;
      }
      acc &= w;
      if (acc == 0) break;
    }
    if (acc != 0) {
      std::uint64_t idx = b * 64 + static_cast<std::uint64_t>(std::countr_zero(acc));
      Assignment model(n);
      for (std::uint32_t v = 1; v <= n; ++v) model.set(VarId{v}, ((idx >> (n - v)) & 1) != 0);
      return {SatLabel::Sat, std::move(model)};
    }
  }
  return {SatLabel::Unsat, std::nullopt};
}

const char* to_string(Entailment e) {
  switch (e) {
    case Entailment::Entailed:
      return "entailed";
    case Entailment::Contradicted:
      return "contradicted";
    default:
      return "unknown";
  }
}

Entailment check_entailment(const CnfFormula& theory, Literal q, const SolverOptions& options) {
  if (q.var.index == 0 || q.var.index > theory.n_vars()) {
    throw StructuralError("conjecture variable " + std::to_string(q.var.index) + " outside the theory");
  }
  if (solve(theory, options).label == SatLabel::Unsat) {
    throw DegenerateTheory("degenerate theory: the theory is unsatisfiable");
  }
  CnfFormula with_negation = theory;
  with_negation.add_clause(Clause::canonical({~q}));
  if (solve(with_negation, options).label == SatLabel::Unsat) return Entailment::Entailed;
  CnfFormula with_query = theory;
  with_query.add_clause(Clause::canonical({q}));
  if (solve(with_query, options).label == SatLabel::Unsat) return Entailment::Contradicted;
  return Entailment::Unknown;
}

SatLabel solve_external(const CnfFormula& f, const std::string& command) {
  std::string path = (std::filesystem::temp_directory_path() / "nlsat-XXXXXX.cnf").string();
  int fd = mkstemps(path.data(), 4);
  if (fd < 0) throw Error("cannot create temporary DIMACS file");
  std::string text = to_dimacs(f);
  bool written = ::write(fd, text.data(), text.size()) == static_cast<ssize_t>(text.size());
  ::close(fd);
  struct Remove {
    std::string p;
    ~Remove() { std::filesystem::remove(p); }
  } cleanup{path};
  if (!written) throw Error("cannot write temporary DIMACS file");

  std::string full = command + " '" + path + "' 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(full.c_str(), "r"), pclose);
  if (!pipe) throw Error("cannot run external solver: " + command);
  std::string output;
  std::array<char, 4096> buf{};
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe.get())) output.append(buf.data(), got);

  if (output.find("UNSATISFIABLE") != std::string::npos) return SatLabel::Unsat;
  if (output.find("SATISFIABLE") != std::string::npos) return SatLabel::Sat;
  throw Error("external solver output has no SATISFIABLE/UNSATISFIABLE verdict");
}

}  // namespace nlsat
