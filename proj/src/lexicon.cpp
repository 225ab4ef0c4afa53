// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/lexicon.hpp"

#include <fstream>
#include <sstream>

#include "nlsat/error.hpp"

namespace nlsat {

namespace lexicon_data {
extern const char* const kFood;
extern const char* const kOccupations;
extern const char* const kNames;
extern const char* const kAttributes;
}  // namespace lexicon_data

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string english_plural(std::string_view noun) {
  std::string w(noun);
  auto ends = [&](std::string_view suf) { return w.size() >= suf.size() && w.compare(w.size() - suf.size(), suf.size(), suf) == 0; };
  if (w == "potato" || w == "tomato" || w == "mango") return w + "es";
  if (ends("man")) return w.substr(0, w.size() - 3) + "men";
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh")) return w + "es";
  if (w.size() >= 2 && w.back() == 'y' && !is_vowel(w[w.size() - 2])) return w.substr(0, w.size() - 1) + "ies";
  return w + "s";
}

Lexicon Lexicon::parse(std::string_view text, WordKind kind, std::string_view source) {
  Lexicon lex;
  lex.kind_ = kind;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    std::string_view word = line;
    std::string_view override_article;
    if (auto bar = line.find('|'); bar != std::string_view::npos) {
      word = trim(line.substr(0, bar));
      override_article = trim(line.substr(bar + 1));
      if (kind != WordKind::CountNoun) throw StructuralError(where + "article override on a non-noun");
      if (override_article != "a" && override_article != "an") {
        throw StructuralError(where + "article override must be 'a' or 'an'");
      }
    }
    if (word.empty()) throw StructuralError(where + "empty word");
    for (std::size_t i = 0; i < word.size(); ++i) {
      bool ok = is_lower(word[i]) || (kind == WordKind::ProperNoun && i == 0 && word[i] >= 'A' && word[i] <= 'Z');
      if (!ok) throw StructuralError(where + "'" + std::string(word) + "' is not a plain alphabetic word");
    }
    if (kind == WordKind::ProperNoun && is_lower(word[0])) {
      throw StructuralError(where + "name '" + std::string(word) + "' must be capitalized");
    }
    if (lex.index_.count(word) != 0) throw StructuralError(where + "duplicate word '" + std::string(word) + "'");
    lex.index_.emplace(std::string(word), lex.words_.size());
    lex.words_.emplace_back(word);
    if (!override_article.empty()) lex.article_overrides_.emplace(std::string(word), std::string(override_article));
  }
  if (kind == WordKind::CountNoun) {
    for (const auto& w : lex.words_) lex.singulars_.emplace(english_plural(w), w);
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path, WordKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), kind, path.string());
}

const Lexicon& Lexicon::builtin_food() {
  static const Lexicon lex = parse(lexicon_data::kFood, WordKind::CountNoun, "food.txt");
  return lex;
}

const Lexicon& Lexicon::builtin_occupations() {
  static const Lexicon lex = parse(lexicon_data::kOccupations, WordKind::CountNoun, "occupations.txt");
  return lex;
}

const Lexicon& Lexicon::builtin_names() {
  static const Lexicon lex = parse(lexicon_data::kNames, WordKind::ProperNoun, "names.txt");
  return lex;
}

const Lexicon& Lexicon::builtin_attributes() {
  static const Lexicon lex = parse(lexicon_data::kAttributes, WordKind::Attribute, "attributes.txt");
  return lex;
}

std::string Lexicon::article(std::string_view noun) const {
  if (auto it = article_overrides_.find(noun); it != article_overrides_.end()) return it->second;
  return !noun.empty() && is_vowel(noun.front()) ? "an" : "a";
}

std::string Lexicon::plural(std::string_view noun) const { return english_plural(noun); }

std::optional<std::string> Lexicon::singular_of(std::string_view plural) const {
  if (auto it = singulars_.find(plural); it != singulars_.end()) return it->second;
  return std::nullopt;
}

}  // namespace nlsat
