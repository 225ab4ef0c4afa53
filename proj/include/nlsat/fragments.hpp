// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// English renderings of CNF formulas and their inverse parsers.
//
// GRL (grounded rules over count nouns): a clause l1 ∨ l2 ∨ l3 is read as
// (¬l1 ∧ ¬l2) → l3 and rendered "If A1 and A2 then C." An antecedent for +v
// is "no <noun>", for ¬v it is "<noun>"; the consequent for +v is "<noun>",
// for ¬v "not <noun>". The consequent is always the last literal in
// canonical order.
//
// RCL (relative clauses over occupations and person names): universally
// quantified 3-clauses over predicates, plus 3-clauses attached to one
// constant. Grounding numbers (predicate p, constant c) as c·|P| + p, so the
// ground variables of constant 0 come first.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlsat/cnf.hpp"
#include "nlsat/lexicon.hpp"
#include "nlsat/rng.hpp"

namespace nlsat {

enum class Fragment { Grl, Rcl, RuleTaker };

const char* to_string(Fragment f);
Fragment parse_fragment(std::string_view name);

struct VarBinding {
  /// words[v - 1] names variable v (a predicate for RCL, an attribute for
  /// rule theories).
  std::vector<std::string> words;
  /// constants[c] names constant c (RCL only).
  std::vector<std::string> constants;
  /// Subject of every sentence of a rule theory ("lion").
  std::string entity;

  /// Throws StructuralError when v has no word.
  const std::string& word(VarId v) const;
  const std::string& constant(std::uint32_t c) const;
  std::optional<VarId> var_of(std::string_view word) const;
  std::optional<std::uint32_t> constant_of(std::string_view name) const;

  friend bool operator==(const VarBinding&, const VarBinding&) = default;
};

/// Sentences in clause order plus the binding that produced them.
struct NlTheory {
  Fragment fragment = Fragment::Grl;
  std::vector<std::string> sentences;
  VarBinding binding;

  /// Sentences joined by single spaces.
  std::string text() const;
};

/// Splits "A. B. C." into {"A.", "B.", "C."}. Throws ParseError when text
/// remains after the last period.
std::vector<std::string> split_sentences(std::string_view text);

/// Uniform injective choice of n words (partial Fisher-Yates over the list).
/// Throws StructuralError naming the shortfall when the list is too short.
std::vector<std::string> choose_words(std::uint32_t n, const Lexicon& lex, Rng& rng);

VarBinding bind_vocabulary(std::uint32_t n_vars, const Lexicon& lex, Rng& rng);

struct RenderOptions {
  /// No sentence may exceed this many whitespace-separated tokens.
  std::size_t token_budget = 30;
  /// Probability of writing a negative-consequent universal as "No X who ...".
  double no_rewrite_prob = 0.25;
};

/// Throws StructuralError for unit clauses and binding gaps.
NlTheory render_grl(const CnfFormula& f, const VarBinding& b, const RenderOptions& opts = {});

struct GroundClause {
  std::uint32_t constant = 0;
  Clause clause;

  friend bool operator==(const GroundClause&, const GroundClause&) = default;
};

struct RclProblem {
  std::uint32_t n_predicates = 0;
  std::uint32_t n_constants = 0;
  std::vector<Clause> universal;
  std::vector<GroundClause> ground;

  std::uint32_t ground_vars() const { return n_predicates * n_constants; }

  friend bool operator==(const RclProblem&, const RclProblem&) = default;
};

/// Bijection (predicate, constant) <-> ground variable.
class GroundVarMap {
 public:
  GroundVarMap(std::uint32_t n_predicates, std::uint32_t n_constants);

  std::uint32_t n_predicates() const { return n_predicates_; }
  std::uint32_t n_constants() const { return n_constants_; }
  VarId ground(VarId predicate, std::uint32_t constant) const {
    return VarId{constant * n_predicates_ + predicate.index};
  }
  std::pair<VarId, std::uint32_t> lift(VarId g) const {
    return {VarId{(g.index - 1) % n_predicates_ + 1}, (g.index - 1) / n_predicates_};
  }

 private:
  std::uint32_t n_predicates_;
  std::uint32_t n_constants_;
};

/// Each universal clause becomes one clause per constant (universal-major
/// order), then each ground clause becomes one clause at its constant.
/// Throws StructuralError without constants.
std::pair<CnfFormula, GroundVarMap> ground_rcl(const RclProblem& p);

/// Predicates from `nouns`, constants from `names`.
VarBinding bind_vocabulary(const RclProblem& p, const Lexicon& nouns, const Lexicon& names, Rng& rng);

/// `rng` drives the "No ..." rewrite; without one the rewrite never fires.
/// Universal sentences come first, then ground sentences, each in list order.
NlTheory render_rcl(const RclProblem& p, const VarBinding& b, const Lexicon& nouns, Rng* rng,
                    const RenderOptions& opts = {});

struct RclShape {
  std::uint32_t n_predicates = 0;
  std::uint32_t n_constants = 0;

  std::uint32_t ground_vars() const { return n_predicates * n_constants; }
};

/// |P| uniform in [5, 8], |C| = max(2, round(target/|P|)), then |C| moved by
/// one step at a time until |P|·|C| lies in [lo, hi] (when possible).
RclShape choose_rcl_shape(std::uint32_t target, std::uint32_t lo, std::uint32_t hi, Rng& rng);
RclShape rcl_shape_for(std::uint32_t target, std::uint32_t n_predicates, std::uint32_t lo, std::uint32_t hi);

/// Every ground size choose_rcl_shape can return for targets in [lo, hi].
std::vector<std::uint32_t> rcl_reachable_sizes(std::uint32_t lo, std::uint32_t hi);

/// Splits `total_clauses` grounded clauses into m_u universal and m_g ground:
/// m_u = floor((M - round(f·M)) / |C|), m_g = M - m_u·|C|.
std::pair<std::int64_t, std::int64_t> rcl_apportion(std::int64_t total_clauses, std::uint32_t n_constants,
                                                    double ground_fraction);

/// Width-3 clauses with unique predicates, each literal negated with p_neg;
/// ground clauses pick their constant uniformly.
RclProblem sample_rcl_problem(const RclShape& shape, std::int64_t total_clauses, double ground_fraction, double p_neg,
                              Rng& rng);

struct ParseOptions {
  /// Accept surface variants the renderer never writes ("not"/"no" swaps,
  /// plurals, "Everything"/"that").
  bool lenient = false;
  /// Fixes variable and constant numbering. Without it, numbers are given in
  /// order of first appearance.
  const VarBinding* binding = nullptr;
};

struct GrlParse {
  CnfFormula formula;
  VarBinding binding;
};

/// Throws ParseError (1-based sentence index, character span within the
/// sentence) on grammar violations and unknown words.
GrlParse parse_grl(std::span<const std::string> sentences, const Lexicon& lex, const ParseOptions& opts = {});

struct RclParse {
  RclProblem problem;
  VarBinding binding;
};

RclParse parse_rcl(std::span<const std::string> sentences, const Lexicon& nouns, const Lexicon& names,
                   const ParseOptions& opts = {});

namespace detail {

struct Token {
  std::string_view text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Word-level cursor over one sentence; the final period is checked and
/// stripped by the constructor.
class SentenceCursor {
 public:
  SentenceCursor(std::string_view sentence, std::size_t index, bool lenient);

  bool done() const { return pos_ >= tokens_.size(); }
  const Token* peek(std::size_t ahead = 0) const;
  bool accept(std::string_view word);
  bool accept_any(std::initializer_list<std::string_view> words, std::string_view* which = nullptr);
  const Token& expect(std::string_view word);
  const Token& take(std::string_view what);
  void finish();
  [[noreturn]] void fail(const std::string& message, const Token* at = nullptr) const;
  std::size_t index() const { return index_; }

 private:
  std::string_view sentence_;
  std::size_t index_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

/// Resolves words to variables, honouring a binding hint.
class WordTable {
 public:
  WordTable(const std::vector<std::string>* fixed, const Lexicon& lex, bool lenient);

  /// Canonical (singular) form of a lexicon word; fails on unknown words.
  std::string canonical(const Token& t, const SentenceCursor& cur) const;
  VarId var_for(const Token& t, const SentenceCursor& cur);
  std::vector<std::string> words() const { return words_; }

 private:
  const std::vector<std::string>* fixed_;
  const Lexicon& lex_;
  bool lenient_;
  std::vector<std::string> words_;
};

}  // namespace detail

}  // namespace nlsat
