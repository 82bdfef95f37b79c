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

#include "elmasm/transform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "elmasm/config.hpp"

namespace elmasm {

namespace {

constexpr int kMaxSpectrum = 64;

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
         });
}

// Harmonic (k, m) takes spectrum entry k + m + 2 (one-based k, m).
inline void couple(const double* tmp, int n_harm, int n_tor, int ij, int kl, ElementMatrix& out) {
  for (int k = 0; k < n_harm; ++k) {
    for (int m = 0; m < n_harm; ++m) out.at(ij * n_tor + k, kl * n_tor + m) += tmp[k + m + 2];
  }
}

// Column-major friendly order: m outer, k inner writes one contiguous run.
inline void couple_transposed(const double* tmp, int n_harm, int n_tor, int ij, int kl, ElementMatrix& out) {
  for (int m = 0; m < n_harm; ++m) {
    double* col = out.column(kl * n_tor + m) + ij * n_tor;
    for (int k = 0; k < n_harm; ++k) col[k] += tmp[k + m + 2];
  }
}

}  // namespace

std::string_view to_string(TransformMode mode) {
  switch (mode) {
    case TransformMode::SeparateNests: return "SEPARATE_NESTS";
    case TransformMode::MergedTransposed: return "MERGED_TRANSPOSED";
    case TransformMode::MergedChunked: return "MERGED_CHUNKED";
  }
  return "?";
}

TransformMode parse_mode(std::string_view name) {
  for (auto m : kAllModes) {
    if (iequals(name, to_string(m))) return m;
  }
  throw std::invalid_argument("unknown transform mode '" + std::string(name) + "'");
}

std::vector<double> dft_naive(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("dft_naive: empty input");
  const auto n = x.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // Reduce q*t mod n first so the angle stays in [0, 2 pi).
      const auto r = (q * t) % n;
      acc += x[t] * std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
    }
    s[q] = acc;
  }
  return s;
}

CosineFft::CosineFft(int n) : n_(n) {
  if (!is_power_of_two(n) || n < 4 || n > kMaxSpectrum) {
    throw std::invalid_argument("fft_small: length must be a power of two in [4, 64], got " + std::to_string(n));
  }
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  bit_reverse_.resize(n);
  for (int i = 0; i < n; ++i) {
    int r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1) << (bits - 1 - b);
    bit_reverse_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (int k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * k / n;
    twiddle_[k] = {std::cos(angle), std::sin(angle)};
  }
  work_.resize(n);
}

void CosineFft::operator()(std::span<const double> x, std::span<double> spectrum) {
  if (static_cast<int>(x.size()) != n_ || static_cast<int>(spectrum.size()) != n_) {
    throw std::invalid_argument("fft_small: length mismatch with plan");
  }
  for (int i = 0; i < n_; ++i) work_[bit_reverse_[i]] = {x[i], 0.0};
  for (int len = 2; len <= n_; len <<= 1) {
    const int half = len / 2;
    const int stride = n_ / len;
    for (int start = 0; start < n_; start += len) {
      for (int j = 0; j < half; ++j) {
        const auto t = twiddle_[j * stride] * work_[start + j + half];
        const auto u = work_[start + j];
        work_[start + j] = u + t;
        work_[start + j + half] = u - t;
      }
    }
  }
  for (int q = 0; q < n_; ++q) spectrum[q] = work_[q].real();
}

std::vector<double> fft_small(std::span<const double> x) {
  CosineFft plan(static_cast<int>(x.size()));
  std::vector<double> s(x.size());
  plan(x, s);
  return s;
}

ElementMatrix::ElementMatrix(int block_dim, int n_tor)
    : block_dim_(block_dim),
      n_tor_(n_tor),
      side_(block_dim * n_tor),
      data_(static_cast<std::size_t>(side_) * side_, 0.0) {}

void ElementMatrix::zero() { std::fill(data_.begin(), data_.end(), 0.0); }

void transform_block(const ElementBlockSet& blocks, TransformMode mode, int n_harm, ElementMatrix& out,
                     int kl_begin) {
  const int np = blocks.n_plane();
  const int bd = blocks.block_dim();
  const int width = blocks.kl_width();
  if (out.block_dim() != bd || kl_begin < 0 || kl_begin + width > bd || n_harm < 1 ||
      n_harm > out.n_tor() || 2 * n_harm >= np) {
    throw std::invalid_argument("transform_block: dimension mismatch between blocks and element matrix");
  }
  const int n_tor = out.n_tor();
  CosineFft fft(np);
  alignas(kCacheLine) double tmp[kMaxSpectrum];
  const std::span<double> spectrum(tmp, np);

  if (mode == TransformMode::SeparateNests) {
    for (int b = 0; b < kBlockCount; ++b) {
      for (int ij = 0; ij < bd; ++ij) {
        for (int kl = 0; kl < width; ++kl) {
          fft({blocks.fiber(b, ij, kl), static_cast<std::size_t>(np)}, spectrum);
          couple(tmp, n_harm, n_tor, ij, kl_begin + kl, out);
        }
      }
    }
    return;
  }

  // Merged nests: all four blocks per fiber, kl outer, transposed scatter.
  for (int kl = 0; kl < width; ++kl) {
    for (int ij = 0; ij < bd; ++ij) {
      for (int b = 0; b < kBlockCount; ++b) {
        fft({blocks.fiber(b, ij, kl), static_cast<std::size_t>(np)}, spectrum);
        couple_transposed(tmp, n_harm, n_tor, ij, kl_begin + kl, out);
      }
    }
  }
}

}  // namespace elmasm
