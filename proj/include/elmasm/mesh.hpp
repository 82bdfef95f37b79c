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
#include <vector>

#include "elmasm/config.hpp"

namespace elmasm {

/// Structured quad mesh. Vertices and elements are numbered row-major;
/// element vertices run counter-clockwise from the lower-left corner.
struct Mesh {
  int nx = 0;
  int ny = 0;
  std::vector<std::array<int, 4>> element_vertices;

  int element_count() const { return nx * ny; }
  int vertex_count() const { return (nx + 1) * (ny + 1); }

  /// Number of elements incident to each vertex.
  std::vector<int> vertex_incidence() const;

  /// True when the two elements share at least one vertex.
  bool conflict(int a, int b) const;
};

Mesh build_mesh(int nx, int ny);
Mesh build_mesh(const ProblemConfig& config);

/// Global dof of every local element row, local row r = ij * n_tor + k with
/// the vertex-major ij numbering of the kernel.
std::vector<int> element_dofs(const Mesh& mesh, const DerivedDims& dims, int element_id);

/// Batches of elements with pairwise disjoint vertex sets.
struct Coloring {
  std::vector<std::vector<int>> batches;
};

/// 2x2 parity coloring; empty batches are dropped.
Coloring color_mesh(const Mesh& mesh);

}  // namespace elmasm
