// Copyright 2026 The nlsat Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlsat/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <thread>

#include "nlsat/error.hpp"
#include "nlsat/rng.hpp"
#include "nlsat/sampler.hpp"

namespace nlsat::kernels {

bool run_trial(const TrialBatch& batch, std::uint64_t t) {
  SampleSpec spec;
  spec.n = batch.n;
  spec.p_int = batch.p_int;
  spec.p_neg = batch.p_neg;
  for (unsigned attempt = 0; attempt <= batch.retry_cap; ++attempt) {
    Rng rng(derive_seed(batch.stream_seed, {t, attempt}));
    std::int64_t m = batch.fixed_m;
    if (m < 0) {
      double scaled = batch.alpha * static_cast<double>(batch.n);
      double base = std::floor(scaled);
      m = static_cast<std::int64_t>(base);
      if (rng.bernoulli(scaled - base)) ++m;
    }
    CnfFormula f = sample_formula_with_m(spec, m, rng);
    try {
      return solve(f, batch.solver).label == SatLabel::Sat;
    } catch (const BudgetExhausted&) {
      // retry with a fresh formula
    }
  }
  throw BudgetExhausted("budget exhausted on " + std::to_string(batch.retry_cap + 1) +
                        " consecutive formulas for trial " + std::to_string(t));
}

std::uint64_t count_sat_serial(const TrialBatch& batch, std::uint64_t trials) {
  std::uint64_t sat = 0;
  for (std::uint64_t t = 0; t < trials; ++t) sat += run_trial(batch, t) ? 1 : 0;
  return sat;
}

std::uint64_t count_sat_omp(const TrialBatch& batch, std::uint64_t trials, int jobs) {
  std::uint64_t sat = 0;
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs) reduction(+ : sat)
  for (std::int64_t t = 0; t < count; ++t) {
    try {
      sat += run_trial(batch, static_cast<std::uint64_t>(t)) ? 1 : 0;
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return sat;
}

void for_each_index_serial(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

void for_each_index_omp(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 4) num_threads(jobs)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

int default_jobs() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace nlsat::kernels
