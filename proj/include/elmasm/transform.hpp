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
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "elmasm/aligned.hpp"
#include "elmasm/kernel.hpp"

namespace elmasm {

enum class TransformMode { SeparateNests, MergedTransposed, MergedChunked };

inline constexpr std::array kAllModes = {TransformMode::SeparateNests, TransformMode::MergedTransposed,
                                         TransformMode::MergedChunked};

std::string_view to_string(TransformMode mode);
TransformMode parse_mode(std::string_view name);

/// s[q] = sum_t x[t] cos(2 pi q t / n), by direct summation.
std::vector<double> dft_naive(std::span<const double> x);

/// Radix-2 decimation-in-time transform producing the same real cosine
/// spectrum as dft_naive. Holds its twiddles and scratch, so one plan per
/// worker.
class CosineFft {
 public:
  explicit CosineFft(int n);

  int size() const { return n_; }
  void operator()(std::span<const double> x, std::span<double> spectrum);

 private:
  int n_;
  std::vector<int> bit_reverse_;
  std::vector<std::complex<double>> twiddle_;
  std::vector<std::complex<double>> work_;
};

/// Length must be a power of two in [4, 64].
std::vector<double> fft_small(std::span<const double> x);

/// Dense element matrix of side block_dim * n_tor, stored column-major.
/// Row (ij, k) -> ij * n_tor + k with harmonic k in [0, n_harm).
class ElementMatrix {
 public:
  ElementMatrix() = default;
  ElementMatrix(int block_dim, int n_tor);

  int side() const { return side_; }
  int block_dim() const { return block_dim_; }
  int n_tor() const { return n_tor_; }

  double& at(int row, int col) { return data_[static_cast<std::size_t>(col) * side_ + row]; }
  double at(int row, int col) const { return data_[static_cast<std::size_t>(col) * side_ + row]; }

  double* column(int col) { return data_.data() + static_cast<std::size_t>(col) * side_; }
  const double* column(int col) const { return data_.data() + static_cast<std::size_t>(col) * side_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void zero();

 private:
  int block_dim_ = 0;
  int n_tor_ = 0;
  int side_ = 0;
  aligned_vector<double> data_;
};

/// Accumulates the harmonic couplings of every fiber of `blocks` into `out`.
/// `kl_begin` places a kl-slice block set at its global column offset.
void transform_block(const ElementBlockSet& blocks, TransformMode mode, int n_harm, ElementMatrix& out,
                     int kl_begin = 0);

}  // namespace elmasm
