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

#include "elmasm/assembly.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>
#include <stdexcept>

namespace elmasm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
         });
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double round_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
  return std::strtod(buf, nullptr);
}

void scatter_critical_all(const ElementMatrix& elm, int element_id, GlobalCoo& coo) {
  const auto slots = coo.slots(element_id);
  const auto dofs = coo.dofs(element_id);
  const int side = coo.elm_side;
  const double* src = elm.data().data();
#pragma omp critical(elmasm_global_values)
  {
    std::size_t q = 0;
    for (int c = 0; c < side; ++c) {
      for (int r = 0; r < side; ++r, ++q) {
        const auto s = slots[q];
        coo.row_idx[s] = dofs[r];
        coo.col_idx[s] = dofs[c];
        coo.values[s] += src[q];
      }
    }
  }
}

void scatter_atomic(const ElementMatrix& elm, int element_id, GlobalCoo& coo) {
  const auto slots = coo.slots(element_id);
  const double* src = elm.data().data();
  double* values = coo.values.data();
  const std::size_t n = slots.size();
  for (std::size_t q = 0; q < n; ++q) {
#pragma omp atomic update
    values[slots[q]] += src[q];
  }
}

void scatter_buffered(const ElementMatrix& elm, int element_id, GlobalCoo& coo, ScatterContext& ctx) {
  const auto slots = coo.slots(element_id);
  const double* src = elm.data().data();
  const std::size_t n = slots.size();
  for (std::size_t q = 0; q < n; ++q) {
    ctx.buffer.emplace_back(slots[q], src[q]);
    if (ctx.buffer.size() >= ctx.buffer_capacity) flush_scatter(coo, ctx);
  }
}

// One region per element; inside it only contiguous run additions.
void scatter_aligned(const ElementMatrix& elm, int element_id, GlobalCoo& coo) {
  const auto slots = coo.slots(element_id);
  const int side = coo.elm_side;
  const int run = coo.vertex_dofs;
  const int runs_per_column = side / run;
  double* values = coo.values.data();
#pragma omp critical(elmasm_global_values)
  {
    for (int c = 0; c < side; ++c) {
      const double* column = elm.column(c);
      const std::size_t base = static_cast<std::size_t>(c) * side;
      for (int v = 0; v < runs_per_column; ++v) {
        double* dst = values + slots[base + static_cast<std::size_t>(v) * run];
        const double* src = column + static_cast<std::size_t>(v) * run;
#pragma omp simd
        for (int t = 0; t < run; ++t) dst[t] += src[t];
      }
    }
  }
}

void scatter_colored(const ElementMatrix& elm, int element_id, GlobalCoo& coo, ScatterContext& ctx) {
  const auto slots = coo.slots(element_id);
  const double* src = elm.data().data();
  double* values = coo.values.data();
  const std::size_t n = slots.size();
  if (ctx.detector != nullptr) {
    for (std::size_t q = 0; q < n; ++q) {
      ctx.detector->record(slots[q], ctx.worker_id);
      values[slots[q]] += src[q];
    }
    return;
  }
  for (std::size_t q = 0; q < n; ++q) values[slots[q]] += src[q];
}

}  // namespace

std::string_view to_string(SyncStrategy strategy) {
  switch (strategy) {
    case SyncStrategy::CriticalAll: return "CRITICAL_ALL";
    case SyncStrategy::Atomic: return "ATOMIC";
    case SyncStrategy::BufferedCritical: return "BUFFERED_CRITICAL";
    case SyncStrategy::AlignedCritical: return "ALIGNED_CRITICAL";
    case SyncStrategy::Colored: return "COLORED";
  }
  return "?";
}

SyncStrategy parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies) {
    if (iequals(name, to_string(s))) return s;
  }
  throw std::invalid_argument("unknown synchronization strategy '" + std::string(name) + "'");
}

GlobalCoo build_slot_map(const Mesh& mesh, const DerivedDims& dims) {
  const int vdofs = dims.vertex_dofs;
  const int side = dims.elm_side;
  const int n_el = mesh.element_count();

  std::vector<std::uint64_t> pairs;
  pairs.reserve(static_cast<std::size_t>(n_el) * 16);
  for (const auto& verts : mesh.element_vertices) {
    for (int a : verts) {
      for (int b : verts) pairs.push_back((static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  const std::uint64_t block = static_cast<std::uint64_t>(vdofs) * vdofs;
  const std::uint64_t nnz = block * pairs.size();
  if (nnz >= std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("build_slot_map: matrix exceeds 2^32 slots");
  }

  GlobalCoo coo;
  coo.dof_count = mesh.vertex_count() * vdofs;
  coo.elm_side = side;
  coo.vertex_dofs = vdofs;
  coo.element_count = n_el;
  coo.row_idx.resize(nnz);
  coo.col_idx.resize(nnz);
  coo.values.assign(nnz, 0.0);

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto va = static_cast<std::int32_t>(pairs[p] >> 32);
    const auto vb = static_cast<std::int32_t>(pairs[p] & 0xffffffffU);
    std::size_t s = p * block;
    for (int co = 0; co < vdofs; ++co) {
      for (int ro = 0; ro < vdofs; ++ro, ++s) {
        coo.row_idx[s] = va * vdofs + ro;
        coo.col_idx[s] = vb * vdofs + co;
      }
    }
  }

  const auto per_element = static_cast<std::size_t>(side) * side;
  coo.slot_map.resize(per_element * n_el);
  coo.element_dof_map.resize(static_cast<std::size_t>(side) * n_el);
  for (int e = 0; e < n_el; ++e) {
    const auto& verts = mesh.element_vertices[e];
    std::uint32_t base[4][4];
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const auto key = (static_cast<std::uint64_t>(verts[i]) << 32) | static_cast<std::uint32_t>(verts[j]);
        const auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
        base[i][j] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(it - pairs.begin()) * block);
      }
    }
    std::uint32_t* out = coo.slot_map.data() + per_element * e;
    for (int c = 0; c < side; ++c) {
      const int vc = c / vdofs;
      const int co = c % vdofs;
      for (int vr = 0; vr < 4; ++vr) {
        const std::uint32_t start = base[vr][vc] + static_cast<std::uint32_t>(co * vdofs);
        for (int ro = 0; ro < vdofs; ++ro) *out++ = start + static_cast<std::uint32_t>(ro);
      }
    }
    const auto dofs = element_dofs(mesh, dims, e);
    std::copy(dofs.begin(), dofs.end(), coo.element_dof_map.begin() + static_cast<std::ptrdiff_t>(side) * e);
  }
  return coo;
}

OverlapDetector::OverlapDetector(std::size_t slot_count) : owner_(slot_count) { begin_phase(); }

void OverlapDetector::begin_phase() {
  for (auto& o : owner_) o.store(-1, std::memory_order_relaxed);
}

void OverlapDetector::record(std::uint32_t slot, int worker) {
  int expected = -1;
  if (!owner_[slot].compare_exchange_strong(expected, worker, std::memory_order_relaxed) && expected != worker) {
    conflicts_.fetch_add(1, std::memory_order_relaxed);
  }
}

void scatter_element(const ElementMatrix& elm, int element_id, GlobalCoo& coo, SyncStrategy strategy,
                     ScatterContext& ctx) {
  if (element_id < 0 || element_id >= coo.element_count || elm.side() != coo.elm_side) {
    throw std::invalid_argument("scatter_element: element matrix does not match the slot map");
  }
  switch (strategy) {
    case SyncStrategy::CriticalAll: scatter_critical_all(elm, element_id, coo); break;
    case SyncStrategy::Atomic: scatter_atomic(elm, element_id, coo); break;
    case SyncStrategy::BufferedCritical: scatter_buffered(elm, element_id, coo, ctx); break;
    case SyncStrategy::AlignedCritical: scatter_aligned(elm, element_id, coo); break;
    case SyncStrategy::Colored: scatter_colored(elm, element_id, coo, ctx); break;
  }
}

void flush_scatter(GlobalCoo& coo, ScatterContext& ctx) {
  if (ctx.buffer.empty()) return;
  double* values = coo.values.data();
#pragma omp critical(elmasm_global_values)
  {
    for (const auto& [slot, value] : ctx.buffer) values[slot] += value;
  }
  ctx.buffer.clear();
  ++ctx.flushes;
}

AssemblyResult assemble(const ProblemConfig& config, LoopVariant variant, TransformMode mode,
                        SyncStrategy strategy, int n_threads, const AssembleOptions& options) {
  if (n_threads < 1) throw std::invalid_argument("assemble: n_threads must be >= 1");
  const auto start = Clock::now();
  const ElementKernel kernel(config);
  const DerivedDims& dims = kernel.dims();

  AssemblyResult result;
  result.mesh = build_mesh(config);
  result.coo = build_slot_map(result.mesh, dims);
  GlobalCoo& coo = result.coo;

  Coloring schedule;
  if (strategy == SyncStrategy::Colored) {
    schedule = options.coloring_override ? *options.coloring_override : color_mesh(result.mesh);
  } else {
    std::vector<int> all(result.mesh.element_count());
    for (int e = 0; e < result.mesh.element_count(); ++e) all[e] = e;
    schedule.batches.push_back(std::move(all));
  }

  std::unique_ptr<OverlapDetector> detector;
  if (options.validate_coloring && strategy == SyncStrategy::Colored) {
    detector = std::make_unique<OverlapDetector>(coo.nnz());
  }

  struct WorkerTimes {
    double compute = 0.0;
    double transform = 0.0;
    double scatter = 0.0;
  };
  std::vector<WorkerTimes> worker_times(n_threads);
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  int observed_threads = 0;
  const bool chunked = mode == TransformMode::MergedChunked;
  const auto capacity = static_cast<std::size_t>(config.buffer_capacity);

#pragma omp parallel num_threads(n_threads) default(none)                                                    \
    shared(kernel, dims, coo, schedule, detector, worker_times, failure, failed, observed_threads, chunked, capacity, \
               variant, mode, strategy, options)
  {
    const int tid = omp_get_thread_num();
#pragma omp single
    observed_threads = omp_get_num_threads();

    WorkerTimes local;
    ScatterContext ctx(tid, strategy == SyncStrategy::BufferedCritical ? capacity : 1);
    ctx.detector = detector.get();
    ElementBlockSet blocks;
    ElementMatrix elm;
    try {
      blocks = chunked ? kernel.make_slice() : kernel.make_blocks();
      elm = ElementMatrix(dims.block_dim, kernel.config().n_tor);
    } catch (...) {
#pragma omp critical(elmasm_failure)
      if (!failure) failure = std::current_exception();
      failed = true;
    }
    const bool perturb = options.perturb_variant && *options.perturb_variant == variant;

    for (const auto& batch : schedule.batches) {
      if (detector) {
#pragma omp barrier
#pragma omp single
        detector->begin_phase();
      }
      const auto n_batch = static_cast<std::int64_t>(batch.size());
#pragma omp for schedule(dynamic, 1)
      for (std::int64_t idx = 0; idx < n_batch; ++idx) {
        if (failed) continue;
        const int e = batch[idx];
        try {
          elm.zero();
          if (chunked) {
            for (int kl = 0; kl < dims.block_dim; kl += dims.slice_width) {
              auto t0 = Clock::now();
              kernel.compute(e, variant, blocks, kl);
              if (perturb && kl == 0) blocks.at(0, 0, 0, 0) += options.perturbation;
              local.compute += seconds_since(t0);
              t0 = Clock::now();
              transform_block(blocks, mode, dims.n_harm, elm, kl);
              local.transform += seconds_since(t0);
            }
          } else {
            auto t0 = Clock::now();
            kernel.compute(e, variant, blocks);
            if (perturb) blocks.at(0, 0, 0, 0) += options.perturbation;
            local.compute += seconds_since(t0);
            t0 = Clock::now();
            transform_block(blocks, mode, dims.n_harm, elm);
            local.transform += seconds_since(t0);
          }
          const auto t0 = Clock::now();
          scatter_element(elm, e, coo, strategy, ctx);
          local.scatter += seconds_since(t0);
        } catch (...) {
#pragma omp critical(elmasm_failure)
          if (!failure) failure = std::current_exception();
          failed = true;
        }
      }
    }
    const auto t0 = Clock::now();
    flush_scatter(coo, ctx);
    local.scatter += seconds_since(t0);
    worker_times[tid] = local;
  }
  if (failure) std::rethrow_exception(failure);

  PhaseTimes& times = result.times;
  times.threads = observed_threads;
  for (const auto& w : worker_times) {
    times.compute += w.compute;
    times.transform += w.transform;
    times.scatter += w.scatter;
  }
  times.compute /= n_threads;
  times.transform /= n_threads;
  times.scatter /= n_threads;
  times.wall = seconds_since(start);
  result.overlap_conflicts = detector ? detector->conflicts() : 0;
  return result;
}

std::string Checksum::to_string() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.11e:%016llx", magnitude, static_cast<unsigned long long>(index_hash));
  return buf;
}

CanonicalForm canonical_form(const GlobalCoo& coo) {
  CanonicalForm form;
  const std::size_t n = coo.nnz();
  form.triplets.resize(n);
  for (std::size_t s = 0; s < n; ++s) form.triplets[s] = {coo.row_idx[s], coo.col_idx[s], coo.values[s]};
  std::sort(form.triplets.begin(), form.triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  double magnitude = 0.0;
  std::uint64_t hash = 0;
  for (const auto& t : form.triplets) {
    magnitude += std::abs(t.value);
    hash += mix64((static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.row)) << 32) |
                  static_cast<std::uint32_t>(t.col));
  }
  form.checksum = {round_significant(magnitude, 12), hash};
  return form;
}

Deviation compare(const CanonicalForm& candidate, const CanonicalForm& reference) {
  Deviation d;
  const auto& a = candidate.triplets;
  const auto& b = reference.triplets;
  d.same_indices = a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const Triplet& x, const Triplet& y) {
                     return x.row == y.row && x.col == y.col;
                   });
  if (!d.same_indices) {
    d.max_relative = std::numeric_limits<double>::infinity();
    return d;
  }
  double scale = 0.0;
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i].value));
    diff = std::max(diff, std::abs(a[i].value - b[i].value));
  }
  d.max_relative = scale > 0.0 ? diff / scale : diff;
  return d;
}

void write_matrix_market(const CanonicalForm& form, int dof_count, const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.string().c_str(), "w"), &std::fclose);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::fprintf(file.get(), "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(file.get(), "%d %d %zu\n", dof_count, dof_count, form.triplets.size());
  for (const auto& t : form.triplets) std::fprintf(file.get(), "%d %d %.17g\n", t.row + 1, t.col + 1, t.value);
  if (std::ferror(file.get())) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace elmasm
