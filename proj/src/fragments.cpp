// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/fragments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "nlsat/error.hpp"
#include "nlsat/sampler.hpp"

namespace nlsat {

const char* to_string(Fragment f) {
  switch (f) {
    case Fragment::Grl:
      return "grl";
    case Fragment::Rcl:
      return "rcl";
    default:
      return "ruletaker";
  }
}

Fragment parse_fragment(std::string_view name) {
  if (name == "grl") return Fragment::Grl;
  if (name == "rcl") return Fragment::Rcl;
  if (name == "ruletaker") return Fragment::RuleTaker;
  throw StructuralError("unknown fragment '" + std::string(name) + "' (expected grl, rcl or ruletaker)");
}

const std::string& VarBinding::word(VarId v) const {
  if (v.index == 0 || v.index > words.size()) {
    throw StructuralError("binding has no word for variable " + std::to_string(v.index));
  }
  return words[v.index - 1];
}

const std::string& VarBinding::constant(std::uint32_t c) const {
  if (c >= constants.size()) throw StructuralError("binding has no name for constant " + std::to_string(c));
  return constants[c];
}

std::optional<VarId> VarBinding::var_of(std::string_view w) const {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == w) return VarId{static_cast<std::uint32_t>(i + 1)};
  }
  return std::nullopt;
}

std::optional<std::uint32_t> VarBinding::constant_of(std::string_view name) const {
  for (std::size_t i = 0; i < constants.size(); ++i) {
    if (constants[i] == name) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

std::string NlTheory::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size() && text[start] == ' ') ++start;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] != '.') continue;
    out.emplace_back(text.substr(start, i + 1 - start));
    start = i + 1;
    while (start < text.size() && (text[start] == ' ' || text[start] == '\n')) ++start;
    i = start - 1;
  }
  if (start < text.size()) {
    throw ParseError(out.size() + 1, "sentence " + std::to_string(out.size() + 1) + ": missing final period", 0,
                     text.size() - start);
  }
  return out;
}

std::vector<std::string> choose_words(std::uint32_t n, const Lexicon& lex, Rng& rng) {
  const auto& words = lex.words();
  if (n > words.size()) {
    throw StructuralError("lexicon has " + std::to_string(words.size()) + " words but " + std::to_string(n) +
                          " are needed (short by " + std::to_string(n - words.size()) + ")");
  }
  std::vector<std::size_t> idx(words.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
    out.push_back(words[idx[i]]);
  }
  return out;
}

VarBinding bind_vocabulary(std::uint32_t n_vars, const Lexicon& lex, Rng& rng) {
  VarBinding b;
  b.words = choose_words(n_vars, lex, rng);
  return b;
}

namespace {

void check_budget(const std::string& sentence, const RenderOptions& opts) {
  std::size_t tokens = 1 + static_cast<std::size_t>(std::count(sentence.begin(), sentence.end(), ' '));
  if (tokens > opts.token_budget) {
    throw StructuralError("sentence has " + std::to_string(tokens) + " tokens, over the budget of " +
                          std::to_string(opts.token_budget) + ": " + sentence);
  }
}

std::string grl_sentence(const Clause& c, const VarBinding& b) {
  if (c.width() < 2) throw StructuralError("unit clause has no rule rendering");
  std::string s = "If ";
  for (std::size_t i = 0; i + 1 < c.width(); ++i) {
    if (i > 0) s += " and ";
    // Antecedent is the negation of the literal.
    if (!c[i].negated) s += "no ";
    s += b.word(c[i].var);
  }
  const Literal& head = c[c.width() - 1];
  s += " then ";
  if (head.negated) s += "not ";
  s += b.word(head.var);
  s += '.';
  return s;
}

std::string a_noun(const Lexicon& lex, const std::string& noun) { return lex.article(noun) + " " + noun; }

std::string copula(bool negated, const Lexicon& lex, const std::string& noun) {
  return (negated ? "is not " : "is ") + a_noun(lex, noun);
}

bool has_negative(const Clause& c) {
  return std::any_of(c.literals().begin(), c.literals().end(), [](const Literal& l) { return l.negated; });
}

/// Restrictor (first negative literal), then the other two in order.
std::array<Literal, 3> universal_layout(const Clause& c) {
  std::size_t r = 0;
  while (!c[r].negated) ++r;
  std::array<Literal, 3> out{c[r], {}, {}};
  std::size_t k = 1;
  for (std::size_t i = 0; i < 3; ++i) {
    if (i != r) out[k++] = c[i];
  }
  return out;
}

bool can_rewrite_no(const Clause& c) { return has_negative(c) && universal_layout(c)[2].negated; }

std::string rcl_universal_sentence(const Clause& c, const VarBinding& b, const Lexicon& lex, bool no_form) {
  if (c.width() != 3) throw StructuralError("relative clause rules need 3 literals");
  if (!has_negative(c)) {
    return "Everyone who is not " + a_noun(lex, b.word(c[0].var)) + " and not " + a_noun(lex, b.word(c[1].var)) +
           " is " + a_noun(lex, b.word(c[2].var)) + ".";
  }
  auto lay = universal_layout(c);
  // The who-atom states the negation of the second literal.
  std::string who = "who " + copula(!lay[1].negated, lex, b.word(lay[1].var));
  if (no_form) {
    return "No " + b.word(lay[0].var) + " " + who + " is " + a_noun(lex, b.word(lay[2].var)) + ".";
  }
  return "Every " + b.word(lay[0].var) + " " + who + " " + copula(lay[2].negated, lex, b.word(lay[2].var)) + ".";
}

std::string rcl_ground_sentence(const GroundClause& g, const VarBinding& b, const Lexicon& lex) {
  if (g.clause.width() != 3) throw StructuralError("relative clause facts need 3 literals");
  std::string s = b.constant(g.constant) + " is ";
  for (std::size_t i = 0; i < 3; ++i) {
    if (i > 0) s += " or ";
    if (g.clause[i].negated) s += "not ";
    s += a_noun(lex, b.word(g.clause[i].var));
  }
  return s + ".";
}

}  // namespace

NlTheory render_grl(const CnfFormula& f, const VarBinding& b, const RenderOptions& opts) {
  NlTheory t;
  t.fragment = Fragment::Grl;
  t.binding = b;
  for (const auto& c : f.clauses()) {
    if (c.is_raw()) throw StructuralError("rule rendering needs canonical clauses");
    t.sentences.push_back(grl_sentence(c, b));
    check_budget(t.sentences.back(), opts);
  }
  return t;
}

GroundVarMap::GroundVarMap(std::uint32_t n_predicates, std::uint32_t n_constants)
    : n_predicates_(n_predicates), n_constants_(n_constants) {
  if (n_predicates == 0 || n_constants == 0) throw StructuralError("grounding needs predicates and constants");
}

std::pair<CnfFormula, GroundVarMap> ground_rcl(const RclProblem& p) {
  if (p.n_constants == 0) throw StructuralError("cannot ground over an empty constant list");
  GroundVarMap map(p.n_predicates, p.n_constants);
  auto at = [&](const Clause& c, std::uint32_t constant) {
    std::array<Literal, 3> lits{};
    for (std::size_t i = 0; i < c.width(); ++i) lits[i] = {map.ground(c[i].var, constant), c[i].negated};
    return Clause::canonical(std::span<const Literal>(lits.data(), c.width()));
  };
  std::vector<Clause> clauses;
  clauses.reserve(p.universal.size() * p.n_constants + p.ground.size());
  for (const auto& u : p.universal) {
    for (std::uint32_t c = 0; c < p.n_constants; ++c) clauses.push_back(at(u, c));
  }
  for (const auto& g : p.ground) {
    if (g.constant >= p.n_constants) throw StructuralError("ground clause names constant " + std::to_string(g.constant));
    clauses.push_back(at(g.clause, g.constant));
  }
  return {CnfFormula(p.ground_vars(), std::move(clauses)), map};
}

VarBinding bind_vocabulary(const RclProblem& p, const Lexicon& nouns, const Lexicon& names, Rng& rng) {
  VarBinding b;
  b.words = choose_words(p.n_predicates, nouns, rng);
  b.constants = choose_words(p.n_constants, names, rng);
  return b;
}

NlTheory render_rcl(const RclProblem& p, const VarBinding& b, const Lexicon& nouns, Rng* rng,
                    const RenderOptions& opts) {
  NlTheory t;
  t.fragment = Fragment::Rcl;
  t.binding = b;
  for (const auto& u : p.universal) {
    bool no_form = false;
    if (rng != nullptr) {
      // Draw for every clause so the stream does not depend on signs.
      bool coin = rng->bernoulli(opts.no_rewrite_prob);
      no_form = coin && u.width() == 3 && can_rewrite_no(u);
    }
    t.sentences.push_back(rcl_universal_sentence(u, b, nouns, no_form));
    check_budget(t.sentences.back(), opts);
  }
  for (const auto& g : p.ground) {
    t.sentences.push_back(rcl_ground_sentence(g, b, nouns));
    check_budget(t.sentences.back(), opts);
  }
  return t;
}

RclShape rcl_shape_for(std::uint32_t target, std::uint32_t n_predicates, std::uint32_t lo, std::uint32_t hi) {
  RclShape s;
  s.n_predicates = n_predicates;
  s.n_constants = std::max<std::uint32_t>(2, (2 * target + n_predicates) / (2 * n_predicates));
  while (s.ground_vars() > hi && s.n_constants > 2) --s.n_constants;
  while (s.ground_vars() < lo && (s.n_constants + 1) * n_predicates <= hi) ++s.n_constants;
  return s;
}

RclShape choose_rcl_shape(std::uint32_t target, std::uint32_t lo, std::uint32_t hi, Rng& rng) {
  auto p = 5 + static_cast<std::uint32_t>(rng.below(4));
  return rcl_shape_for(target, p, lo, hi);
}

std::vector<std::uint32_t> rcl_reachable_sizes(std::uint32_t lo, std::uint32_t hi) {
  std::set<std::uint32_t> sizes;
  for (std::uint32_t g = lo; g <= hi; ++g) {
    for (std::uint32_t p = 5; p <= 8; ++p) sizes.insert(rcl_shape_for(g, p, lo, hi).ground_vars());
  }
  return {sizes.begin(), sizes.end()};
}

std::pair<std::int64_t, std::int64_t> rcl_apportion(std::int64_t total_clauses, std::uint32_t n_constants,
                                                    double ground_fraction) {
  if (total_clauses < 0) throw StructuralError("negative clause count");
  if (n_constants == 0) throw StructuralError("no constants");
  auto ground = static_cast<std::int64_t>(std::llround(ground_fraction * static_cast<double>(total_clauses)));
  std::int64_t m_u = (total_clauses - ground) / n_constants;
  return {m_u, total_clauses - m_u * n_constants};
}

RclProblem sample_rcl_problem(const RclShape& shape, std::int64_t total_clauses, double ground_fraction, double p_neg,
                              Rng& rng) {
  RclProblem p;
  p.n_predicates = shape.n_predicates;
  p.n_constants = shape.n_constants;
  auto [m_u, m_g] = rcl_apportion(total_clauses, shape.n_constants, ground_fraction);
  SampleSpec spec;
  spec.n = shape.n_predicates;
  spec.p_int = 1.0;
  spec.p_neg = p_neg;
  for (std::int64_t i = 0; i < m_u; ++i) p.universal.push_back(sample_clause(spec, rng));
  for (std::int64_t i = 0; i < m_g; ++i) {
    GroundClause g;
    g.constant = static_cast<std::uint32_t>(rng.below(shape.n_constants));
    g.clause = sample_clause(spec, rng);
    p.ground.push_back(g);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

SentenceCursor::SentenceCursor(std::string_view sentence, std::size_t index, bool lenient)
    : sentence_(sentence), index_(index) {
  if (sentence.empty() || sentence.back() != '.') {
    throw ParseError(index, "sentence " + std::to_string(index) + ": must end with a period", 0, sentence.size());
  }
  std::string_view body = sentence.substr(0, sentence.size() - 1);
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == ' ' || (lenient && (body[i] == '\t' || body[i] == '\n'))) {
      if (!lenient && (i == 0 || body[i - 1] == ' ')) {
        throw ParseError(index, "sentence " + std::to_string(index) + ": unexpected space", i, i + 1);
      }
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < body.size() && body[j] != ' ' && body[j] != '\t' && body[j] != '\n') ++j;
    for (std::size_t k = i; k < j; ++k) {
      char ch = body[k];
      if (!((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z'))) {
        throw ParseError(index, "sentence " + std::to_string(index) + ": unexpected character '" + std::string(1, ch) + "'",
                         k, k + 1);
      }
    }
    tokens_.push_back({body.substr(i, j - i), i, j});
    i = j;
  }
  if (!lenient && !body.empty() && body.back() == ' ') {
    throw ParseError(index, "sentence " + std::to_string(index) + ": unexpected space", body.size() - 1, body.size());
  }
  if (tokens_.empty()) throw ParseError(index, "sentence " + std::to_string(index) + ": empty sentence", 0, sentence.size());
}

const Token* SentenceCursor::peek(std::size_t ahead) const {
  return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
}

bool SentenceCursor::accept(std::string_view word) {
  if (!done() && tokens_[pos_].text == word) {
    ++pos_;
    return true;
  }
  return false;
}

bool SentenceCursor::accept_any(std::initializer_list<std::string_view> words, std::string_view* which) {
  for (auto w : words) {
    if (accept(w)) {
      if (which != nullptr) *which = w;
      return true;
    }
  }
  return false;
}

const Token& SentenceCursor::expect(std::string_view word) {
  if (done()) fail("expected '" + std::string(word) + "' before the end of the sentence");
  if (tokens_[pos_].text != word) {
    fail("expected '" + std::string(word) + "', found '" + std::string(tokens_[pos_].text) + "'", &tokens_[pos_]);
  }
  return tokens_[pos_++];
}

const Token& SentenceCursor::take(std::string_view what) {
  if (done()) fail("expected " + std::string(what) + " before the end of the sentence");
  return tokens_[pos_++];
}

void SentenceCursor::finish() {
  if (!done()) fail("unexpected '" + std::string(tokens_[pos_].text) + "'", &tokens_[pos_]);
}

void SentenceCursor::fail(const std::string& message, const Token* at) const {
  std::size_t b = at != nullptr ? at->begin : sentence_.size() - 1;
  std::size_t e = at != nullptr ? at->end : sentence_.size();
  throw ParseError(index_, "sentence " + std::to_string(index_) + ": " + message, b, e);
}

WordTable::WordTable(const std::vector<std::string>* fixed, const Lexicon& lex, bool lenient)
    : fixed_(fixed), lex_(lex), lenient_(lenient) {}

std::string WordTable::canonical(const Token& t, const SentenceCursor& cur) const {
  if (lex_.contains(t.text)) return std::string(t.text);
  if (lenient_) {
    if (auto s = lex_.singular_of(t.text)) return *s;
  }
  cur.fail("unknown word '" + std::string(t.text) + "'", &t);
}

VarId WordTable::var_for(const Token& t, const SentenceCursor& cur) {
  std::string w = canonical(t, cur);
  const auto& list = fixed_ != nullptr ? *fixed_ : words_;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i] == w) return VarId{static_cast<std::uint32_t>(i + 1)};
  }
  if (fixed_ != nullptr) cur.fail("word '" + w + "' is not bound to a variable", &t);
  words_.push_back(w);
  return VarId{static_cast<std::uint32_t>(words_.size())};
}

}  // namespace detail

namespace {

using detail::SentenceCursor;
using detail::Token;
using detail::WordTable;

Clause make_clause(std::span<const Literal> lits, const SentenceCursor& cur) {
  try {
    return Clause::canonical(lits);
  } catch (const StructuralError& e) {
    cur.fail(std::string("sentence does not denote a clause: ") + e.what());
  }
}

void check_strict_render(const std::string& sentence, const std::vector<std::string>& candidates,
                         const SentenceCursor& cur) {
  if (std::find(candidates.begin(), candidates.end(), sentence) == candidates.end()) {
    cur.fail("not in canonical form; expected \"" + candidates.front() + "\"");
  }
}

}  // namespace

GrlParse parse_grl(std::span<const std::string> sentences, const Lexicon& lex, const ParseOptions& opts) {
  WordTable table(opts.binding != nullptr ? &opts.binding->words : nullptr, lex, opts.lenient);
  std::vector<Clause> clauses;
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    SentenceCursor cur(sentences[si], si + 1, opts.lenient);
    if (!cur.accept("If") && !(opts.lenient && cur.accept("if"))) cur.fail("expected 'If'", cur.peek());
    std::vector<Literal> lits;
    do {
      bool marked = cur.accept("no") || (opts.lenient && cur.accept("not"));
      const Token& noun = cur.take("a noun");
      // "no X" in an antecedent stands for the positive literal X.
      lits.push_back({table.var_for(noun, cur), !marked});
      if (lits.size() > 2) cur.fail("too many antecedents", &noun);
    } while (cur.accept("and"));
    cur.expect("then");
    bool negated = cur.accept("not") || (opts.lenient && cur.accept("no"));
    const Token& head = cur.take("a noun");
    lits.push_back({table.var_for(head, cur), negated});
    cur.finish();
    Clause c = make_clause(lits, cur);
    if (!opts.lenient && opts.binding != nullptr) check_strict_render(sentences[si], {grl_sentence(c, *opts.binding)}, cur);
    clauses.push_back(c);
  }
  GrlParse out;
  if (opts.binding != nullptr) {
    out.binding = *opts.binding;
  } else {
    out.binding.words = table.words();
  }
  out.formula = CnfFormula(static_cast<std::uint32_t>(out.binding.words.size()), std::move(clauses));
  return out;
}

namespace {

class RclReader {
 public:
  RclReader(const Lexicon& nouns, const Lexicon& names, const ParseOptions& opts)
      : nouns_(nouns),
        names_(names),
        opts_(opts),
        table_(opts.binding != nullptr ? &opts.binding->words : nullptr, nouns, opts.lenient) {}

  /// "a X" / "an X" with the article checked against the lexicon.
  VarId article_noun(SentenceCursor& cur) {
    const Token* art = cur.peek();
    std::string_view used;
    if (!cur.accept_any({"a", "an"}, &used)) cur.fail("expected 'a' or 'an'", art);
    const Token& noun = cur.take("a noun");
    std::string canon = table_.canonical(noun, cur);
    if (nouns_.article(canon) != used) {
      cur.fail("article mismatch: '" + std::string(used) + " " + std::string(noun.text) + "'", art);
    }
    return table_.var_for(noun, cur);
  }

  /// "is [not] a X"; returns the literal as stated.
  Literal copula(SentenceCursor& cur) {
    cur.expect("is");
    bool negated = cur.accept("not");
    return {article_noun(cur), negated};
  }

  bool who(SentenceCursor& cur) { return cur.accept("who") || (opts_.lenient && cur.accept("that")); }

  std::uint32_t constant_for(const Token& t, const SentenceCursor& cur) {
    if (!names_.contains(t.text)) cur.fail("unknown name '" + std::string(t.text) + "'", &t);
    std::string n(t.text);
    const auto& list = opts_.binding != nullptr ? opts_.binding->constants : constants_;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] == n) return static_cast<std::uint32_t>(i);
    }
    if (opts_.binding != nullptr) cur.fail("name '" + n + "' is not bound to a constant", &t);
    constants_.push_back(n);
    return static_cast<std::uint32_t>(constants_.size() - 1);
  }

  void sentence(const std::string& text, std::size_t index) {
    SentenceCursor cur(text, index, opts_.lenient);
    std::vector<Literal> lits;
    bool universal = true;
    std::uint32_t constant = 0;
    if (cur.accept("Every")) {
      lits.push_back({table_.var_for(cur.take("a noun"), cur), true});
      if (!who(cur)) cur.fail("expected 'who'", cur.peek());
      lits.push_back(~copula(cur));
      lits.push_back(copula(cur));
    } else if (cur.accept("No")) {
      lits.push_back({table_.var_for(cur.take("a noun"), cur), true});
      if (!who(cur)) cur.fail("expected 'who'", cur.peek());
      lits.push_back(~copula(cur));
      Literal head = copula(cur);
      if (head.negated) cur.fail("'No ...' sentences take a positive consequent");
      lits.push_back(~head);
    } else if (cur.accept("Everyone") || (opts_.lenient && cur.accept("Everything"))) {
      if (!who(cur)) cur.fail("expected 'who'", cur.peek());
      cur.expect("is");
      cur.expect("not");
      lits.push_back(Literal{article_noun(cur), false});
      cur.expect("and");
      cur.expect("not");
      lits.push_back(Literal{article_noun(cur), false});
      cur.expect("is");
      lits.push_back(Literal{article_noun(cur), false});
    } else {
      universal = false;
      constant = constant_for(cur.take("a name"), cur);
      cur.expect("is");
      for (int i = 0; i < 3; ++i) {
        if (i > 0) cur.expect("or");
        bool negated = cur.accept("not");
        lits.push_back({article_noun(cur), negated});
      }
    }
    cur.finish();
    Clause c = make_clause(lits, cur);
    if (!opts_.lenient && opts_.binding != nullptr) {
      if (universal) {
        std::vector<std::string> forms{rcl_universal_sentence(c, *opts_.binding, nouns_, false)};
        if (has_negative(c) && can_rewrite_no(c)) forms.push_back(rcl_universal_sentence(c, *opts_.binding, nouns_, true));
        check_strict_render(text, forms, cur);
      } else {
        check_strict_render(text, {rcl_ground_sentence({constant, c}, *opts_.binding, nouns_)}, cur);
      }
    }
    if (universal) {
      problem_.universal.push_back(c);
    } else {
      problem_.ground.push_back({constant, c});
    }
  }

  RclParse result() {
    RclParse out;
    if (opts_.binding != nullptr) {
      out.binding = *opts_.binding;
    } else {
      out.binding.words = table_.words();
      out.binding.constants = constants_;
    }
    out.problem = std::move(problem_);
    out.problem.n_predicates = static_cast<std::uint32_t>(out.binding.words.size());
    out.problem.n_constants = static_cast<std::uint32_t>(out.binding.constants.size());
    return out;
  }

 private:
  const Lexicon& nouns_;
  const Lexicon& names_;
  const ParseOptions& opts_;
  WordTable table_;
  std::vector<std::string> constants_;
  RclProblem problem_;
};

}  // namespace

RclParse parse_rcl(std::span<const std::string> sentences, const Lexicon& nouns, const Lexicon& names,
                   const ParseOptions& opts) {
  RclReader reader(nouns, names, opts);
  for (std::size_t i = 0; i < sentences.size(); ++i) reader.sentence(sentences[i], i + 1);
  return reader.result();
}

}  // namespace nlsat
