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

#include <vector>

namespace elmasm {

/// Gauss-Legendre rule on [0, 1]. Nodes strictly increasing, weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Exact for polynomials of degree <= 2n - 1. Valid for 1 <= n <= 16.
GaussRule gauss_rule(int n);

/// Bernstein polynomial b_{index,order}(x) on [0, 1].
double basis_value(int order, int index, double x);

}  // namespace elmasm
