// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace nlsat {

/// Exact non-negative ratio, always stored in lowest terms with den > 0.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den);

  static Rational from_int(std::int64_t v) { return Rational(v, 1); }
  /// Accepts "p/q", an integer, or a terminating decimal such as "4.25".
  static Rational parse(std::string_view text);
  /// Largest p/q <= v with the given denominator.
  static Rational floor_of(double v, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Smallest integer k with k/scale >= this, i.e. ceil(this * scale).
  std::int64_t ceil_times(std::int64_t scale) const;
  /// floor(this * scale).
  std::int64_t floor_times(std::int64_t scale) const;

  /// "17/4", or "4" when the denominator is 1.
  std::string to_string() const;
  /// Terminating decimals as "4.25" or "4.0"; anything else as to_string().
  std::string to_exact_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, std::int64_t k) { return Rational(a.num_ * k, a.den_); }
  friend Rational operator/(const Rational& a, std::int64_t k) { return Rational(a.num_, a.den_ * k); }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace nlsat
