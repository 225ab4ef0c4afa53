// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/rational.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "nlsat/error.hpp"

namespace nlsat {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw StructuralError("not a rational number: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw StructuralError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g == 0) g = 1;
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) throw StructuralError("not a rational number: '" + std::string(text) + "'");
    bool negative = !whole.empty() && whole.front() == '-';
    std::int64_t int_part = whole.empty() || whole == "-" ? 0 : parse_int(whole, text);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t frac_part = parse_int(frac, text);
    if (frac_part < 0) throw StructuralError("not a rational number: '" + std::string(text) + "'");
    std::int64_t mag = (int_part < 0 ? -int_part : int_part) * den + frac_part;
    return Rational(negative ? -mag : mag, den);
  }
  return Rational(parse_int(text, text), 1);
}

Rational Rational::floor_of(double v, std::int64_t den) {
  return Rational(static_cast<std::int64_t>(std::floor(v * static_cast<double>(den))), den);
}

std::int64_t Rational::ceil_times(std::int64_t scale) const {
  return -floor_div(-num_ * scale, den_);
}

std::int64_t Rational::floor_times(std::int64_t scale) const {
  return floor_div(num_ * scale, den_);
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::to_exact_string() const {
  std::int64_t d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) d /= 2, ++twos;
  while (d % 5 == 0) d /= 5, ++fives;
  if (d != 1) return to_string();
  // den = 2^a 5^b divides 10^k for k = max(a, b).
  int digits = std::max(twos, fives);
  if (digits == 0) return std::to_string(num_) + ".0";
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  std::int64_t scaled = num_ * (scale / den_);
  std::int64_t mag = scaled < 0 ? -scaled : scaled;
  std::string frac = std::to_string(mag % scale);
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  std::string out = (scaled < 0 ? "-" : "") + std::to_string(mag / scale);
  return out + "." + frac;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return a.num_ * b.den_ <=> b.num_ * a.den_;
}

}  // namespace nlsat
