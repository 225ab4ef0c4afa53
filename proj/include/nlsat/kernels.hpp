// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

// Data-parallel inner loops. Each kernel has a serial reference version kept
// for testing and benchmarking; both must produce identical results because
// every iteration draws from its own derived RNG stream.

#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>

#include "nlsat/solver.hpp"

namespace nlsat::kernels {

/// Independent random-formula trials at one (n, p_int, p_neg, alpha) point.
struct TrialBatch {
  std::uint32_t n = 0;
  double p_int = 1.0;
  double p_neg = 0.5;
  /// Used when fixed_m < 0; see estimate_psat for the rounding rule.
  double alpha = 0.0;
  std::int64_t fixed_m = -1;
  std::uint64_t stream_seed = 0;
  unsigned retry_cap = 8;
  SolverOptions solver;
};

/// Solves trial `t` of the batch; true iff sat.
bool run_trial(const TrialBatch& batch, std::uint64_t t);

std::uint64_t count_sat_serial(const TrialBatch& batch, std::uint64_t trials);
std::uint64_t count_sat_omp(const TrialBatch& batch, std::uint64_t trials, int jobs);

/// Calls body(i) for i in [0, count). The serial version is the reference;
/// the OpenMP version uses dynamic scheduling. The first exception thrown by
/// any iteration is rethrown after the loop.
void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body);
void for_each_index_omp(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

inline void for_each_index(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1) {
    for_each_index_serial(count, body);
  } else {
    for_each_index_omp(count, jobs, body);
  }
}

/// Worker count used when the caller does not choose one.
int default_jobs();

}  // namespace nlsat::kernels
