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

#include "elmasm/mesh.hpp"

#include <stdexcept>

namespace elmasm {

Mesh build_mesh(int nx, int ny) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_mesh: mesh extents must be >= 1");
  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.element_vertices.reserve(static_cast<std::size_t>(nx) * ny);
  const int row = nx + 1;
  for (int ey = 0; ey < ny; ++ey) {
    for (int ex = 0; ex < nx; ++ex) {
      const int v0 = ey * row + ex;
      mesh.element_vertices.push_back({v0, v0 + 1, v0 + row + 1, v0 + row});
    }
  }
  return mesh;
}

Mesh build_mesh(const ProblemConfig& config) { return build_mesh(config.mesh_nx, config.mesh_ny); }

std::vector<int> Mesh::vertex_incidence() const {
  std::vector<int> count(vertex_count(), 0);
  for (const auto& verts : element_vertices) {
    for (int v : verts) ++count[v];
  }
  return count;
}

bool Mesh::conflict(int a, int b) const {
  for (int va : element_vertices[a]) {
    for (int vb : element_vertices[b]) {
      if (va == vb) return true;
    }
  }
  return false;
}

std::vector<int> element_dofs(const Mesh& mesh, const DerivedDims& dims, int element_id) {
  if (element_id < 0 || element_id >= mesh.element_count()) {
    throw std::out_of_range("element_dofs: invalid element id");
  }
  std::vector<int> dofs(dims.elm_side);
  const auto& verts = mesh.element_vertices[element_id];
  for (int r = 0; r < dims.elm_side; ++r) {
    const int local_vertex = r / dims.vertex_dofs;
    dofs[r] = verts[local_vertex] * dims.vertex_dofs + r % dims.vertex_dofs;
  }
  return dofs;
}

Coloring color_mesh(const Mesh& mesh) {
  std::vector<std::vector<int>> parity(4);
  for (int ey = 0; ey < mesh.ny; ++ey) {
    for (int ex = 0; ex < mesh.nx; ++ex) parity[(ex % 2) + 2 * (ey % 2)].push_back(ey * mesh.nx + ex);
  }
  Coloring coloring;
  for (auto& batch : parity) {
    if (!batch.empty()) coloring.batches.push_back(std::move(batch));
  }
  return coloring;
}

}  // namespace elmasm
