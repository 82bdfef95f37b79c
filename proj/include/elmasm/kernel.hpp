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
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "elmasm/aligned.hpp"
#include "elmasm/config.hpp"
#include "elmasm/quadrature.hpp"

namespace elmasm {

/// Loop orderings of the compute nest. All produce the same blocks.
enum class LoopVariant { Orig, Mp1, Mp2, Mp3, Msmt };

inline constexpr std::array kAllVariants = {LoopVariant::Orig, LoopVariant::Mp1, LoopVariant::Mp2,
                                            LoopVariant::Mp3, LoopVariant::Msmt};

std::string_view to_string(LoopVariant variant);
LoopVariant parse_variant(std::string_view name);

// Blocks p, n, k, kn.
inline constexpr int kBlockCount = 4;
inline constexpr std::array<double, kBlockCount> kBlockPhase = {
    0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4};

// Added to the block phase so neighbouring elements produce different matrices.
inline constexpr double kElementPhaseStep = 0.1;

inline double element_phase(int element_id) { return kElementPhaseStep * element_id; }

/// The four dense per-plane temporaries of one element, or a kl-slice of
/// them. Storage is 64-byte aligned and contiguous in the plane index.
class ElementBlockSet {
 public:
  ElementBlockSet() = default;
  ElementBlockSet(int n_plane, int block_dim, int kl_width, BlockLayout layout);

  int n_plane() const { return n_plane_; }
  int block_dim() const { return block_dim_; }
  int kl_width() const { return kl_width_; }
  BlockLayout layout() const { return layout_; }

  std::size_t block_size() const { return block_size_; }

  std::size_t offset(int mp, int ij, int kl) const {
    const auto fiber = layout_ == BlockLayout::PlaneRowCol
                           ? static_cast<std::size_t>(ij) + static_cast<std::size_t>(block_dim_) * kl
                           : static_cast<std::size_t>(kl) + static_cast<std::size_t>(kl_width_) * ij;
    return static_cast<std::size_t>(mp) + static_cast<std::size_t>(n_plane_) * fiber;
  }

  double& at(int block, int mp, int ij, int kl) { return data_[block * block_size_ + offset(mp, ij, kl)]; }
  double at(int block, int mp, int ij, int kl) const {
    return data_[block * block_size_ + offset(mp, ij, kl)];
  }

  /// n_plane contiguous values of block `block` at (ij, kl).
  const double* fiber(int block, int ij, int kl) const {
    return data_.data() + block * block_size_ + offset(0, ij, kl);
  }
  double* fiber(int block, int ij, int kl) { return data_.data() + block * block_size_ + offset(0, ij, kl); }

  std::span<double> block(int b) { return {data_.data() + b * block_size_, block_size_}; }
  std::span<const double> block(int b) const { return {data_.data() + b * block_size_, block_size_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void zero();

 private:
  int n_plane_ = 0;
  int block_dim_ = 0;
  int kl_width_ = 0;
  BlockLayout layout_ = BlockLayout::PlaneRowCol;
  std::size_t block_size_ = 0;
  aligned_vector<double> data_;
};

/// sum_{p=1..P} sin(p*phi_mp + xi_ms + phase) * cos(p*xi_mt) / p,
/// phi_mp = 2*pi*mp/n_plane. Indices are zero-based.
double factor_a(int mp, int ms, int mt, const GaussRule& rule, int n_plane, int flop_knob, double phase);

/// Identity for finite values above the floor. Compiled out of line so the
/// call itself stays in the loop when enabled.
double correct_negative(double value);

/// Analytic floating-point operation count of one element block set.
std::uint64_t compute_flop_count(const ProblemConfig& config, LoopVariant variant);

/// Immutable per-configuration state of the compute nest. Safe to share
/// between workers; every call writes only the caller-owned block set.
class ElementKernel {
 public:
  explicit ElementKernel(const ProblemConfig& config);

  const ProblemConfig& config() const { return config_; }
  const DerivedDims& dims() const { return dims_; }
  const GaussRule& rule() const { return rule_; }

  int element_count() const { return config_.mesh_nx * config_.mesh_ny; }

  /// Fills `out` with the blocks for columns [kl_begin, kl_begin + out.kl_width()).
  void compute(int element_id, LoopVariant variant, ElementBlockSet& out, int kl_begin = 0) const;

  /// Block set shaped for the full element.
  ElementBlockSet make_blocks() const;
  /// Block set shaped for one kl-slice.
  ElementBlockSet make_slice() const;

  // B(ij) / C(kl) at gauss point (ms, mt).
  double basis_product(int local_index, int ms, int mt) const {
    return phi_[ms * n_basis_ + basis_j_[local_index]] * phi_[mt * n_basis_ + basis_i_[local_index]];
  }

 private:
  void check(int element_id, const ElementBlockSet& out, int kl_begin) const;

  void run_orig(int element_id, ElementBlockSet& out, int kl_begin) const;
  void run_mp1(int element_id, ElementBlockSet& out, int kl_begin) const;
  void run_mp2(int element_id, ElementBlockSet& out, int kl_begin) const;
  void run_mp3(int element_id, ElementBlockSet& out, int kl_begin) const;
  void run_msmt(int element_id, ElementBlockSet& out, int kl_begin) const;

  double weighted_a(int block, int element_id, int mp, int ms, int mt) const;
  double contribution(double rhs, double c) const {
    const double v = rhs * c;
    return config_.call_correction ? correct_negative(v) : v;
  }

  ProblemConfig config_;
  DerivedDims dims_;
  GaussRule rule_;
  int n_basis_ = 0;
  std::vector<double> phi_;   // phi_[g * n_basis + j] = b_j(node_g)
  std::vector<int> basis_i_;  // local index -> clamped vertex basis index
  std::vector<int> basis_j_;  // local index -> basis index
};

}  // namespace elmasm
