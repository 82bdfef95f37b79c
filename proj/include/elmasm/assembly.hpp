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

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elmasm/config.hpp"
#include "elmasm/kernel.hpp"
#include "elmasm/mesh.hpp"
#include "elmasm/transform.hpp"

namespace elmasm {

/// Discipline for concurrent additions into the shared global values.
enum class SyncStrategy { CriticalAll, Atomic, BufferedCritical, AlignedCritical, Colored };

inline constexpr std::array kAllStrategies = {SyncStrategy::CriticalAll, SyncStrategy::Atomic,
                                              SyncStrategy::BufferedCritical, SyncStrategy::AlignedCritical,
                                              SyncStrategy::Colored};

std::string_view to_string(SyncStrategy strategy);
SyncStrategy parse_strategy(std::string_view name);

/// Preallocated global coordinate matrix plus the per-element slot map.
///
/// Slots are allocated per vertex pair that shares an element, vertex_dofs^2
/// each, in (row vertex, column vertex) order; inside a pair block slots run
/// column-major. So for a fixed element column every local vertex contributes
/// one contiguous run of vertex_dofs slots.
struct GlobalCoo {
  std::vector<std::int32_t> row_idx;
  std::vector<std::int32_t> col_idx;
  std::vector<double> values;

  int dof_count = 0;
  int elm_side = 0;
  int vertex_dofs = 0;
  int element_count = 0;

  // slot_map[e * side^2 + c * side + r], column-major like ElementMatrix.
  std::vector<std::uint32_t> slot_map;
  // element_dof_map[e * side + r]
  std::vector<std::int32_t> element_dof_map;

  std::size_t nnz() const { return values.size(); }

  std::span<const std::uint32_t> slots(int element_id) const {
    const auto n = static_cast<std::size_t>(elm_side) * elm_side;
    return {slot_map.data() + n * element_id, n};
  }
  std::span<const std::int32_t> dofs(int element_id) const {
    return {element_dof_map.data() + static_cast<std::size_t>(elm_side) * element_id,
            static_cast<std::size_t>(elm_side)};
  }
};

GlobalCoo build_slot_map(const Mesh& mesh, const DerivedDims& dims);

/// Validation-mode recorder of (slot, worker) writes within one parallel
/// phase; counts slots written by more than one worker.
class OverlapDetector {
 public:
  explicit OverlapDetector(std::size_t slot_count);

  void begin_phase();
  void record(std::uint32_t slot, int worker);
  std::uint64_t conflicts() const { return conflicts_.load(); }

 private:
  std::vector<std::atomic<int>> owner_;
  std::atomic<std::uint64_t> conflicts_{0};
};

/// Per-worker scatter state: flush buffer for BufferedCritical and the
/// optional overlap detector used with Colored.
struct ScatterContext {
  int worker_id = 0;
  std::size_t buffer_capacity = 1;
  std::vector<std::pair<std::uint32_t, double>> buffer;
  std::size_t flushes = 0;
  OverlapDetector* detector = nullptr;

  ScatterContext(int worker, std::size_t capacity) : worker_id(worker), buffer_capacity(capacity) {
    buffer.reserve(capacity);
  }
};

/// values[slot(e, r, c)] += elm(r, c) under the given strategy.
void scatter_element(const ElementMatrix& elm, int element_id, GlobalCoo& coo, SyncStrategy strategy,
                     ScatterContext& ctx);

/// Drains a BufferedCritical buffer. No-op for the other strategies.
void flush_scatter(GlobalCoo& coo, ScatterContext& ctx);

struct PhaseTimes {
  // Busy seconds summed over workers and divided by the worker count.
  double compute = 0.0;
  double transform = 0.0;
  double scatter = 0.0;
  double wall = 0.0;  // whole assembly, wall clock
  int threads = 0;    // workers observed inside the parallel region
};

struct AssembleOptions {
  bool validate_coloring = false;
  // Test hook: adds `perturbation` to one block entry when this variant runs.
  std::optional<LoopVariant> perturb_variant;
  double perturbation = 1e-6;
  // Replace the 2x2 coloring (used to provoke overlap detection).
  std::optional<Coloring> coloring_override;
};

struct AssemblyResult {
  Mesh mesh;
  GlobalCoo coo;
  PhaseTimes times;
  std::uint64_t overlap_conflicts = 0;
};

AssemblyResult assemble(const ProblemConfig& config, LoopVariant variant, TransformMode mode,
                        SyncStrategy strategy, int n_threads, const AssembleOptions& options = {});

struct Triplet {
  std::int32_t row;
  std::int32_t col;
  double value;
};

struct Checksum {
  double magnitude = 0.0;  // sum |values|, rounded to 12 significant digits
  std::uint64_t index_hash = 0;

  std::string to_string() const;
  bool operator==(const Checksum&) const = default;
};

struct CanonicalForm {
  std::vector<Triplet> triplets;  // sorted by (row, col)
  Checksum checksum;
};

CanonicalForm canonical_form(const GlobalCoo& coo);

struct Deviation {
  bool same_indices = false;
  // max |candidate - reference| / max |reference|
  double max_relative = 0.0;
};

Deviation compare(const CanonicalForm& candidate, const CanonicalForm& reference);

void write_matrix_market(const CanonicalForm& form, int dof_count, const std::filesystem::path& path);

}  // namespace elmasm
