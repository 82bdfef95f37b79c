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

#pragma once

#include <cstdint>

#include "elmasm/assembly.hpp"

namespace elmasm {

struct PipelineConfig {
  int construct_threads = 1;
  int max_solver_threads = 64;
  int solve_sweeps = 10;
  std::int64_t factor_work = 512;
};

/// min(construct_threads, max_solver_threads); throws if that is < 1.
int effective_solver_threads(const PipelineConfig& config);

struct FactorResult {
  double seconds = 0.0;
  std::uint64_t work_units = 0;  // fused multiply-add count, fixed by factor_work
  int threads = 0;               // workers observed
};

/// Compute-bound stand-in for the LU factorization: a fixed set of tasks,
/// each sweeping a private buffer of `factor_work` doubles factor_work times.
FactorResult emulate_factor(const GlobalCoo& coo, int threads, std::int64_t factor_work);

struct SolveResult {
  double seconds = 0.0;
  double norm = 0.0;  // |A x| of the final sweep
  int threads = 0;
};

/// Memory-bound stand-in for the iterative solve: `sweeps` sparse products
/// y = A x with x renormalised after every sweep, rows split over workers.
SolveResult emulate_solve(const GlobalCoo& coo, int threads, int sweeps);

struct TimestepRecord {
  int construct_threads = 0;
  int solver_threads = 0;
  PhaseTimes construct;
  double construct_seconds = 0.0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
  std::uint64_t factor_work_units = 0;
  double solve_norm = 0.0;
  Checksum checksum;
};

TimestepRecord run_timestep(const ProblemConfig& config, const PipelineConfig& pipeline, SyncStrategy strategy,
                            LoopVariant variant, TransformMode mode, GlobalCoo* keep_matrix = nullptr);

}  // namespace elmasm
