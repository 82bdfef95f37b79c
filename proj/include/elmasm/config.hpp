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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace elmasm {

/// Raised for any configuration that violates a ProblemConfig invariant.
/// The message names the violated invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Storage order of the per-plane element blocks. The plane index is always
/// the fastest-varying one so every (ij, kl) fiber is contiguous.
enum class BlockLayout {
  PlaneRowCol,  // (mp, ij, kl), kl slowest
  PlaneColRow,  // (mp, kl, ij), last two roles swapped
};

struct ProblemConfig {
  std::string preset = "custom";

  int n_gauss = 4;
  int n_vertex_max = 4;
  int n_order = 3;  // basis order, n_order + 1 dofs per vertex per variable
  int n_plane = 8;
  int n_tor = 5;
  int n_var = 2;

  int mesh_nx = 8;
  int mesh_ny = 8;

  int flop_knob = 2;
  std::int64_t buffer_capacity = 4096;
  int chunk_count = 16;
  int max_solver_threads = 64;

  BlockLayout layout = BlockLayout::PlaneRowCol;
  // Route every kernel contribution through an out-of-line correction call.
  bool call_correction = false;
};

struct DerivedDims {
  int block_dim = 0;    // n_vertex_max * n_var * (n_order + 1)
  int n_harm = 0;       // ceil(n_tor / 2)
  int elm_side = 0;     // block_dim * n_tor
  int vertex_dofs = 0;  // n_var * (n_order + 1) * n_tor
  int slice_width = 0;  // block_dim / chunk_count
  std::int64_t block_bytes = 0;
  std::int64_t elm_bytes = 0;
  std::int64_t slice_bytes = 0;
};

constexpr bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const ProblemConfig& config);

/// Pure; throws ConfigError for invalid configs.
DerivedDims derive_dims(const ProblemConfig& config);

/// FFT flops per byte moved for one n_plane-point transform of 8-byte reals.
double arithmetic_intensity(std::int64_t n_plane);

/// Named presets: "paper" and "desk".
ProblemConfig preset(std::string_view name);

/// Applies one key=value setting. Keys match the ProblemConfig field names.
void apply_setting(ProblemConfig& config, std::string_view key, std::string_view value);

/// Reads a flat key=value file ('#' starts a comment) on top of `base`.
ProblemConfig load_config_file(const std::filesystem::path& path, ProblemConfig base);

std::string_view to_string(BlockLayout layout);

}  // namespace elmasm
