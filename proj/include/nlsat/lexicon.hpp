// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Word lists used to name variables and constants.
//
// File format: one word per line, `#` starts a comment line, blank lines are
// ignored, and a count noun may carry an article override suffix `|a` or
// `|an`. Count nouns and attributes are lowercase alphabetic; names are a
// capital letter followed by lowercase letters.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlsat {

enum class WordKind { CountNoun, ProperNoun, Attribute };

class Lexicon {
 public:
  Lexicon() = default;
  /// Throws StructuralError on duplicates, bad characters, or overrides on
  /// anything but count nouns. `source` names the input in messages.
  static Lexicon parse(std::string_view text, WordKind kind, std::string_view source = "lexicon");
  static Lexicon load(const std::filesystem::path& path, WordKind kind);

  static const Lexicon& builtin_food();
  static const Lexicon& builtin_occupations();
  static const Lexicon& builtin_names();
  static const Lexicon& builtin_attributes();

  WordKind kind() const { return kind_; }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view w) const { return index_.count(std::string(w)) != 0; }

  /// "a" or "an": the override if present, else "an" before a vowel letter.
  std::string article(std::string_view noun) const;
  std::string plural(std::string_view noun) const;
  /// Singular form for a plural of a lexicon noun.
  std::optional<std::string> singular_of(std::string_view plural) const;

 private:
  WordKind kind_ = WordKind::CountNoun;
  std::vector<std::string> words_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::string, std::less<>> article_overrides_;
  std::map<std::string, std::string, std::less<>> singulars_;
};

/// Regular English plural with the exceptions the shipped lists need.
std::string english_plural(std::string_view noun);

}  // namespace nlsat
