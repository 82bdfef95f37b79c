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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elmasm/assembly.hpp"
#include "elmasm/pipeline.hpp"

namespace elmasm {

enum class Phase { Compute, Transform, Scatter, Factor, Solve, Total };

std::string_view to_string(Phase phase);
Phase parse_phase(std::string_view name);

/// One timed measurement. Field order is the CSV column order.
struct BenchRecord {
  std::string run_id;
  std::string preset;
  Phase phase = Phase::Total;
  SyncStrategy strategy = SyncStrategy::CriticalAll;
  LoopVariant variant = LoopVariant::Orig;
  TransformMode mode = TransformMode::SeparateNests;
  int construct_threads = 1;
  int solver_threads = 1;
  int mesh_nx = 1;
  int mesh_ny = 1;
  int repetitions = 1;
  double median_ms = 0.0;
  double min_ms = 0.0;
  std::string checksum;

  bool operator==(const BenchRecord&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "run_id,preset,phase,strategy,variant,mode,construct_threads,solver_threads,mesh_nx,mesh_ny,repetitions,"
    "median_ms,min_ms,checksum";

struct SweepSpec {
  std::vector<int> threads;
  std::vector<SyncStrategy> strategies;
  std::vector<LoopVariant> variants;
  std::vector<TransformMode> modes;
  int repeats = 5;
};

/// Fixed mesh; one `total` record per combination and thread count.
std::vector<BenchRecord> run_strong_scaling(const ProblemConfig& config, const SweepSpec& spec);

/// mesh_nx scaled by the thread count; compute/transform/scatter/total records.
std::vector<BenchRecord> run_weak_scaling(const ProblemConfig& config, const SweepSpec& spec);

/// Records for every phase of one timestep.
std::vector<BenchRecord> timestep_records(const ProblemConfig& config, const TimestepRecord& record,
                                          SyncStrategy strategy, LoopVariant variant, TransformMode mode);

std::string format_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_csv(std::string_view text);
std::string format_json(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_json(std::string_view text);

/// Both refuse an empty record list without touching the filesystem.
void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
void emit_json(const std::vector<BenchRecord>& records, const std::filesystem::path& path);

enum class FigureKind { StrongScaling, WeakScaling };

/// Gnuplot script with a time-vs-threads and a speedup-vs-threads panel,
/// one series per combination, reading `csv_path`.
std::string format_plot_script(const std::vector<BenchRecord>& records, FigureKind kind,
                               const std::filesystem::path& csv_path);
void emit_plot_script(const std::vector<BenchRecord>& records, FigureKind kind,
                      const std::filesystem::path& csv_path, const std::filesystem::path& script_path);

struct EquivalenceEntry {
  std::string combination;
  double max_relative = 0.0;
  bool same_indices = false;
  bool passed = false;
};

struct EquivalenceReport {
  double tolerance = 1e-12;
  std::vector<EquivalenceEntry> entries;

  bool passed() const;
  const EquivalenceEntry* first_failure() const;
};

struct EquivalenceOptions {
  std::vector<int> threads;  // empty: {1, 2, hardware concurrency}
  double tolerance = 1e-12;
  std::optional<LoopVariant> corrupt_variant;  // fault-injection hook
};

/// Every strategy x variant x mode x thread count against the serial
/// ORIG / SEPARATE_NESTS / CRITICAL_ALL reference.
EquivalenceReport run_equivalence_suite(const ProblemConfig& config, const EquivalenceOptions& options = {});

/// {1, 2, hardware concurrency}, sorted and deduplicated.
std::vector<int> default_thread_counts();

}  // namespace elmasm
