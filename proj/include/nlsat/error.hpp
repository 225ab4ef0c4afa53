// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlsat {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a structural invariant (empty clause, var out of range,
/// empty alpha band, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Text input (DIMACS, English fragment, calibration file, JSONL) failed to
/// parse. `location` is a line number for line-oriented formats and a
/// 1-based sentence index for fragment text.
class ParseError : public Error {
 public:
  ParseError(std::size_t location, std::string message, std::size_t span_begin = 0,
             std::size_t span_end = 0)
      : Error(std::move(message)),
        location_(location),
        span_begin_(span_begin),
        span_end_(span_end) {}

  std::size_t location() const { return location_; }
  std::size_t span_begin() const { return span_begin_; }
  std::size_t span_end() const { return span_end_; }

 private:
  std::size_t location_;
  std::size_t span_begin_;
  std::size_t span_end_;
};

/// The solver hit its decision cap before reaching an answer.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// Entailment was queried against an unsatisfiable theory.
class DegenerateTheory : public Error {
 public:
  using Error::Error;
};

/// Calibration could not locate a critical region.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling stopped making progress.
class GenerationStalled : public Error {
 public:
  using Error::Error;
};

}  // namespace nlsat
