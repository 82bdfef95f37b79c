/*
 *   Copyright 2026 The elmasm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "elmasm/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace elmasm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr int kFactorTasks = 64;

struct Csr {
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> cols;
  std::vector<double> values;
};

Csr to_csr(const GlobalCoo& coo) {
  Csr csr;
  csr.row_ptr.assign(static_cast<std::size_t>(coo.dof_count) + 1, 0);
  for (auto r : coo.row_idx) ++csr.row_ptr[r + 1];
  std::partial_sum(csr.row_ptr.begin(), csr.row_ptr.end(), csr.row_ptr.begin());
  std::vector<std::int64_t> fill(csr.row_ptr.begin(), csr.row_ptr.end() - 1);
  csr.cols.resize(coo.nnz());
  csr.values.resize(coo.nnz());
  for (std::size_t s = 0; s < coo.nnz(); ++s) {
    const auto at = fill[coo.row_idx[s]]++;
    csr.cols[at] = coo.col_idx[s];
    csr.values[at] = coo.values[s];
  }
  return csr;
}

double norm2(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

int effective_solver_threads(const PipelineConfig& config) {
  const int n = std::min(config.construct_threads, config.max_solver_threads);
  if (n < 1) throw std::invalid_argument("pipeline: effective solver thread count must be >= 1");
  return n;
}

FactorResult emulate_factor(const GlobalCoo& coo, int threads, std::int64_t factor_work) {
  if (threads < 1) throw std::invalid_argument("emulate_factor: threads must be >= 1");
  if (factor_work < 0) throw std::invalid_argument("emulate_factor: factor_work must be >= 0");
  FactorResult result;
  result.work_units = static_cast<std::uint64_t>(kFactorTasks) * factor_work * factor_work;
  const double seed = 1.0 + static_cast<double>(coo.nnz() % 97) * 1e-3;
  double sink = 0.0;
  int observed = 0;
  const auto start = Clock::now();
#pragma omp parallel num_threads(threads) reduction(+ : sink)
  {
#pragma omp single
    observed = omp_get_num_threads();
    std::vector<double> buffer(static_cast<std::size_t>(factor_work));
#pragma omp for schedule(static)
    for (int task = 0; task < kFactorTasks; ++task) {
      for (std::int64_t i = 0; i < factor_work; ++i) buffer[i] = seed + 1e-6 * static_cast<double>(task + i);
      for (std::int64_t sweep = 0; sweep < factor_work; ++sweep) {
        const double a = 0.999999 - 1e-9 * static_cast<double>(sweep);
        for (std::int64_t i = 0; i < factor_work; ++i) buffer[i] = buffer[i] * a + 1e-7;
      }
      for (double v : buffer) sink += v;
    }
  }
  result.seconds = seconds_since(start);
  result.threads = observed;
  // Keep the sweeps observable to the optimiser.
  if (!std::isfinite(sink)) throw std::runtime_error("emulate_factor: non-finite work result");
  return result;
}

SolveResult emulate_solve(const GlobalCoo& coo, int threads, int sweeps) {
  if (threads < 1) throw std::invalid_argument("emulate_solve: threads must be >= 1");
  if (sweeps < 1) throw std::invalid_argument("emulate_solve: sweeps must be >= 1");
  const Csr csr = to_csr(coo);
  const auto n = static_cast<std::int64_t>(coo.dof_count);
  std::vector<double> x(n, n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 0.0);
  std::vector<double> y(n, 0.0);
  SolveResult result;
  int observed = 0;
  const auto start = Clock::now();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
#pragma omp parallel num_threads(threads)
    {
#pragma omp single nowait
      observed = omp_get_num_threads();
#pragma omp for schedule(static)
      for (std::int64_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (auto k = csr.row_ptr[r]; k < csr.row_ptr[r + 1]; ++k) acc += csr.values[k] * x[csr.cols[k]];
        y[r] = acc;
      }
    }
    // Serial norm keeps the result independent of the worker count.
    result.norm = norm2(y);
    if (result.norm > 0.0) {
      for (std::int64_t r = 0; r < n; ++r) x[r] = y[r] / result.norm;
    }
  }
  result.seconds = seconds_since(start);
  result.threads = observed;
  return result;
}

TimestepRecord run_timestep(const ProblemConfig& config, const PipelineConfig& pipeline, SyncStrategy strategy,
                            LoopVariant variant, TransformMode mode, GlobalCoo* keep_matrix) {
  const int solver_threads = effective_solver_threads(pipeline);
  TimestepRecord record;
  const auto start = Clock::now();

  auto assembled = assemble(config, variant, mode, strategy, pipeline.construct_threads);
  record.construct = assembled.times;
  record.construct_seconds = assembled.times.wall;
  record.construct_threads = assembled.times.threads;

  const auto factor = emulate_factor(assembled.coo, solver_threads, pipeline.factor_work);
  record.factor_seconds = factor.seconds;
  record.factor_work_units = factor.work_units;

  const auto solve = emulate_solve(assembled.coo, solver_threads, pipeline.solve_sweeps);
  record.solve_seconds = solve.seconds;
  record.solve_norm = solve.norm;
  record.solver_threads = std::max(factor.threads, solve.threads);

  record.total_seconds = seconds_since(start);
  record.checksum = canonical_form(assembled.coo).checksum;
  if (keep_matrix != nullptr) *keep_matrix = std::move(assembled.coo);
  return record;
}

}  // namespace elmasm
