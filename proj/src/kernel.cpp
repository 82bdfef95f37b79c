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

#include "elmasm/kernel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace elmasm {

namespace {

constexpr int kMaxPlane = 64;
constexpr int kMaxGaussPoints = 16 * 16;

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(LoopVariant variant) {
  switch (variant) {
    case LoopVariant::Orig: return "ORIG";
    case LoopVariant::Mp1: return "MP1";
    case LoopVariant::Mp2: return "MP2";
    case LoopVariant::Mp3: return "MP3";
    case LoopVariant::Msmt: return "MSMT";
  }
  return "?";
}

LoopVariant parse_variant(std::string_view name) {
  for (auto v : kAllVariants) {
    if (iequals(name, to_string(v))) return v;
  }
  throw std::invalid_argument("unknown loop variant '" + std::string(name) + "'");
}

ElementBlockSet::ElementBlockSet(int n_plane, int block_dim, int kl_width, BlockLayout layout)
    : n_plane_(n_plane),
      block_dim_(block_dim),
      kl_width_(kl_width),
      layout_(layout),
      block_size_(static_cast<std::size_t>(n_plane) * block_dim * kl_width),
      data_(block_size_ * kBlockCount, 0.0) {}

void ElementBlockSet::zero() { std::fill(data_.begin(), data_.end(), 0.0); }

double factor_a(int mp, int ms, int mt, const GaussRule& rule, int n_plane, int flop_knob, double phase) {
  if (mp < 0 || mp >= n_plane || ms < 0 || ms >= rule.size() || mt < 0 || mt >= rule.size()) {
    throw std::out_of_range("factor_a: index out of range");
  }
  const double phi = 2.0 * std::numbers::pi * mp / n_plane;
  const double xi_s = rule.nodes[ms];
  const double xi_t = rule.nodes[mt];
  double sum = 0.0;
  for (int p = 1; p <= flop_knob; ++p) {
    sum += std::sin(p * phi + xi_s + phase) * std::cos(p * xi_t) / p;
  }
  return sum;
}

std::uint64_t compute_flop_count(const ProblemConfig& config, LoopVariant variant) {
  const auto dims = derive_dims(config);
  const std::uint64_t gauss = static_cast<std::uint64_t>(config.n_gauss) * config.n_gauss;
  const std::uint64_t planes = config.n_plane;
  const std::uint64_t bd = dims.block_dim;
  const std::uint64_t a_cost = 6 * static_cast<std::uint64_t>(config.flop_knob) + 2;
  const std::uint64_t a_evals = variant == LoopVariant::Mp1 ? gauss * planes * bd : gauss * planes;
  // rhs = wA * B once per (g, mp, ij); multiply + add per entry; B and C products.
  const std::uint64_t entries = gauss * planes * (bd + 2 * bd * bd);
  const std::uint64_t basis = gauss * (bd + bd * bd);
  return kBlockCount * (a_evals * a_cost + entries) + basis;
}

ElementKernel::ElementKernel(const ProblemConfig& config)
    : config_(config), dims_(derive_dims(config)), rule_(gauss_rule(config.n_gauss)) {
  n_basis_ = config_.n_order + 1;
  phi_.resize(static_cast<std::size_t>(rule_.size()) * n_basis_);
  for (int g = 0; g < rule_.size(); ++g) {
    for (int j = 0; j < n_basis_; ++j) phi_[g * n_basis_ + j] = basis_value(config_.n_order, j, rule_.nodes[g]);
  }
  basis_i_.resize(dims_.block_dim);
  basis_j_.resize(dims_.block_dim);
  const int per_vertex = config_.n_var * n_basis_;
  for (int ij = 0; ij < dims_.block_dim; ++ij) {
    basis_i_[ij] = std::min(ij / per_vertex, config_.n_order);
    basis_j_[ij] = ij % n_basis_;
  }
}

ElementBlockSet ElementKernel::make_blocks() const {
  return ElementBlockSet(config_.n_plane, dims_.block_dim, dims_.block_dim, config_.layout);
}

ElementBlockSet ElementKernel::make_slice() const {
  return ElementBlockSet(config_.n_plane, dims_.block_dim, dims_.slice_width, config_.layout);
}

void ElementKernel::check(int element_id, const ElementBlockSet& out, int kl_begin) const {
  if (element_id < 0 || element_id >= element_count()) {
    throw std::out_of_range("compute_element_block: invalid element id " + std::to_string(element_id));
  }
  if (out.n_plane() != config_.n_plane || out.block_dim() != dims_.block_dim || out.kl_width() < 1 ||
      kl_begin < 0 || kl_begin + out.kl_width() > dims_.block_dim) {
    throw std::invalid_argument("compute_element_block: block set shape does not match the configuration");
  }
}

double ElementKernel::weighted_a(int block, int element_id, int mp, int ms, int mt) const {
  const double w = rule_.weights[ms] * rule_.weights[mt];
  return w * factor_a(mp, ms, mt, rule_, config_.n_plane, config_.flop_knob,
                      kBlockPhase[block] + element_phase(element_id));
}

void ElementKernel::compute(int element_id, LoopVariant variant, ElementBlockSet& out, int kl_begin) const {
  check(element_id, out, kl_begin);
  switch (variant) {
    case LoopVariant::Orig: run_orig(element_id, out, kl_begin); break;
    case LoopVariant::Mp1: run_mp1(element_id, out, kl_begin); break;
    case LoopVariant::Mp2: run_mp2(element_id, out, kl_begin); break;
    case LoopVariant::Mp3: run_mp3(element_id, out, kl_begin); break;
    case LoopVariant::Msmt: run_msmt(element_id, out, kl_begin); break;
  }
}

// ms, mt, mp, ij, kl: the plane loop sits outside the index loops, so every
// store strides by n_plane.
void ElementKernel::run_orig(int element_id, ElementBlockSet& out, int kl_begin) const {
  out.zero();
  const int ng = config_.n_gauss;
  const int bd = dims_.block_dim;
  const int width = out.kl_width();
  for (int ms = 0; ms < ng; ++ms) {
    for (int mt = 0; mt < ng; ++mt) {
      for (int mp = 0; mp < config_.n_plane; ++mp) {
        double wa[kBlockCount];
        for (int b = 0; b < kBlockCount; ++b) wa[b] = weighted_a(b, element_id, mp, ms, mt);
        for (int ij = 0; ij < bd; ++ij) {
          const double bval = basis_product(ij, ms, mt);
          double rhs[kBlockCount];
          for (int b = 0; b < kBlockCount; ++b) rhs[b] = wa[b] * bval;
          for (int kl = 0; kl < width; ++kl) {
            const double cval = basis_product(kl_begin + kl, ms, mt);
            for (int b = 0; b < kBlockCount; ++b) out.at(b, mp, ij, kl) += contribution(rhs[b], cval);
          }
        }
      }
    }
  }
}

// Plane loop innermost; A is re-evaluated for every ij row.
void ElementKernel::run_mp1(int element_id, ElementBlockSet& out, int kl_begin) const {
  out.zero();
  const int ng = config_.n_gauss;
  const int np = config_.n_plane;
  const int bd = dims_.block_dim;
  const int width = out.kl_width();
  alignas(kCacheLine) double rhs[kBlockCount][kMaxPlane];
  for (int ms = 0; ms < ng; ++ms) {
    for (int mt = 0; mt < ng; ++mt) {
      for (int ij = 0; ij < bd; ++ij) {
        const double bval = basis_product(ij, ms, mt);
        for (int b = 0; b < kBlockCount; ++b) {
          for (int mp = 0; mp < np; ++mp) rhs[b][mp] = weighted_a(b, element_id, mp, ms, mt) * bval;
        }
        for (int kl = 0; kl < width; ++kl) {
          const double cval = basis_product(kl_begin + kl, ms, mt);
          for (int b = 0; b < kBlockCount; ++b) {
            double* fiber = out.fiber(b, ij, kl);
            const double* r = rhs[b];
#pragma omp simd
            for (int mp = 0; mp < np; ++mp) fiber[mp] += contribution(r[mp], cval);
          }
        }
      }
    }
  }
}

// Plane loop split into segments; A hoisted into an n_plane temporary.
void ElementKernel::run_mp2(int element_id, ElementBlockSet& out, int kl_begin) const {
  out.zero();
  const int ng = config_.n_gauss;
  const int np = config_.n_plane;
  const int bd = dims_.block_dim;
  const int width = out.kl_width();
  alignas(kCacheLine) double wa[kBlockCount][kMaxPlane];
  alignas(kCacheLine) double rhs[kBlockCount][kMaxPlane];
  for (int ms = 0; ms < ng; ++ms) {
    for (int mt = 0; mt < ng; ++mt) {
      for (int b = 0; b < kBlockCount; ++b) {
        for (int mp = 0; mp < np; ++mp) wa[b][mp] = weighted_a(b, element_id, mp, ms, mt);
      }
      for (int ij = 0; ij < bd; ++ij) {
        const double bval = basis_product(ij, ms, mt);
        for (int b = 0; b < kBlockCount; ++b) {
#pragma omp simd
          for (int mp = 0; mp < np; ++mp) rhs[b][mp] = wa[b][mp] * bval;
        }
        for (int kl = 0; kl < width; ++kl) {
          const double cval = basis_product(kl_begin + kl, ms, mt);
          for (int b = 0; b < kBlockCount; ++b) {
            double* fiber = out.fiber(b, ij, kl);
            const double* r = rhs[b];
#pragma omp simd
            for (int mp = 0; mp < np; ++mp) fiber[mp] += contribution(r[mp], cval);
          }
        }
      }
    }
  }
}

// Original nesting with the plane loop marked as the SIMD loop.
void ElementKernel::run_mp3(int element_id, ElementBlockSet& out, int kl_begin) const {
  out.zero();
  const int ng = config_.n_gauss;
  const int np = config_.n_plane;
  const int bd = dims_.block_dim;
  const int width = out.kl_width();
  for (int ms = 0; ms < ng; ++ms) {
    for (int mt = 0; mt < ng; ++mt) {
#pragma omp simd
      for (int mp = 0; mp < np; ++mp) {
        double wa[kBlockCount];
        for (int b = 0; b < kBlockCount; ++b) wa[b] = weighted_a(b, element_id, mp, ms, mt);
        for (int ij = 0; ij < bd; ++ij) {
          const double bval = basis_product(ij, ms, mt);
          double rhs[kBlockCount];
          for (int b = 0; b < kBlockCount; ++b) rhs[b] = wa[b] * bval;
          for (int kl = 0; kl < width; ++kl) {
            const double cval = basis_product(kl_begin + kl, ms, mt);
            for (int b = 0; b < kBlockCount; ++b) out.at(b, mp, ij, kl) += contribution(rhs[b], cval);
          }
        }
      }
    }
  }
}

// Gauss points collapsed into one lane vector per entry. Lanes are summed
// in (ms, mt) order so the result matches the other variants bit for bit.
void ElementKernel::run_msmt(int element_id, ElementBlockSet& out, int kl_begin) const {
  const int ng = config_.n_gauss;
  const int npts = ng * ng;
  const int np = config_.n_plane;
  const int bd = dims_.block_dim;
  const int width = out.kl_width();

  std::vector<double> wa(static_cast<std::size_t>(kBlockCount) * npts * np);
  for (int b = 0; b < kBlockCount; ++b) {
    for (int g = 0; g < npts; ++g) {
      for (int mp = 0; mp < np; ++mp) wa[(b * npts + g) * np + mp] = weighted_a(b, element_id, mp, g / ng, g % ng);
    }
  }
  alignas(kCacheLine) double bg[kMaxGaussPoints];
  alignas(kCacheLine) double cg[kMaxGaussPoints];
  alignas(kCacheLine) double lanes[kMaxGaussPoints];
  for (int ij = 0; ij < bd; ++ij) {
    for (int g = 0; g < npts; ++g) bg[g] = basis_product(ij, g / ng, g % ng);
    for (int kl = 0; kl < width; ++kl) {
      for (int g = 0; g < npts; ++g) cg[g] = basis_product(kl_begin + kl, g / ng, g % ng);
      for (int b = 0; b < kBlockCount; ++b) {
        const double* wab = wa.data() + static_cast<std::size_t>(b) * npts * np;
        double* fiber = out.fiber(b, ij, kl);
        for (int mp = 0; mp < np; ++mp) {
#pragma omp simd
          for (int g = 0; g < npts; ++g) lanes[g] = contribution(wab[g * np + mp] * bg[g], cg[g]);
          double sum = 0.0;
          for (int g = 0; g < npts; ++g) sum += lanes[g];
          fiber[mp] = sum;
        }
      }
    }
  }
}

}  // namespace elmasm
