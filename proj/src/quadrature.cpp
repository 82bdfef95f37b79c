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

#include "elmasm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace elmasm {

GaussRule gauss_rule(int n) {
  if (n < 1 || n > 16) {
    throw std::out_of_range("gauss_rule: n must be in [1, 16], got " + std::to_string(n));
  }
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  // Newton iteration on P_n over [-1, 1]; roots are symmetric so only half are solved.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    // z is the i-th largest root; map [-1, 1] -> [0, 1].
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.weights[n - 1 - i] = 0.5 * w;
    rule.weights[i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

double basis_value(int order, int index, double x) {
  if (order < 0 || index < 0 || index > order) {
    throw std::out_of_range("basis_value: index must satisfy 0 <= index <= order");
  }
  if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("basis_value: x must lie in [0, 1]");
  double binom = 1.0;
  for (int k = 1; k <= index; ++k) binom = binom * (order - index + k) / k;
  double value = binom;
  for (int k = 0; k < index; ++k) value *= x;
  for (int k = 0; k < order - index; ++k) value *= 1.0 - x;
  return value;
}

}  // namespace elmasm
