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

#include "elmasm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

namespace elmasm {

namespace {

void require(bool ok, const char* invariant) {
  if (!ok) throw ConfigError(std::string("invalid configuration: ") + invariant);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t parse_integer(std::string_view key, std::string_view value) {
  std::int64_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid configuration: value for '" + std::string(key) +
                      "' is not an integer: '" + std::string(value) + "'");
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  const auto v = parse_integer(key, value);
  if (v < INT32_MIN || v > INT32_MAX) {
    throw ConfigError("invalid configuration: value for '" + std::string(key) + "' out of range");
  }
  return static_cast<int>(v);
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw ConfigError("invalid configuration: value for '" + std::string(key) + "' is not a boolean");
}

}  // namespace

void validate(const ProblemConfig& c) {
  require(c.n_gauss >= 1 && c.n_gauss <= 16, "1 <= n_gauss <= 16");
  require(c.n_vertex_max == 4, "n_vertex_max == 4 (structured quad mesh)");
  require(c.n_order >= 0, "n_order + 1 >= 1");
  require(is_power_of_two(c.n_plane) && c.n_plane >= 4, "n_plane is a power of two and >= 4");
  require(c.n_plane <= 64, "n_plane <= 64 (small transform range)");
  require(c.n_tor >= 1, "n_tor >= 1");
  require(c.n_var >= 1, "n_var >= 1");
  const int n_harm = (c.n_tor + 1) / 2;
  require(2 * n_harm < c.n_plane, "2 * ceil(n_tor / 2) < n_plane (harmonic sum index within spectrum)");
  require(c.mesh_nx >= 1 && c.mesh_ny >= 1, "mesh_nx >= 1 and mesh_ny >= 1");
  require(c.flop_knob >= 0, "flop_knob >= 0");
  require(c.buffer_capacity >= 1, "buffer_capacity >= 1");
  require(c.max_solver_threads >= 1, "max_solver_threads >= 1");
  const int block_dim = c.n_vertex_max * c.n_var * (c.n_order + 1);
  require(c.chunk_count >= 1 && block_dim % c.chunk_count == 0, "chunk_count divides block_dim");
}

DerivedDims derive_dims(const ProblemConfig& c) {
  validate(c);
  DerivedDims d;
  d.block_dim = c.n_vertex_max * c.n_var * (c.n_order + 1);
  d.n_harm = (c.n_tor + 1) / 2;
  d.elm_side = d.block_dim * c.n_tor;
  d.vertex_dofs = c.n_var * (c.n_order + 1) * c.n_tor;
  d.slice_width = d.block_dim / c.chunk_count;
  const auto bd = static_cast<std::int64_t>(d.block_dim);
  const auto side = static_cast<std::int64_t>(d.elm_side);
  d.block_bytes = static_cast<std::int64_t>(c.n_plane) * bd * bd * 8;
  d.elm_bytes = side * side * 8;
  d.slice_bytes = d.block_bytes / c.chunk_count;
  return d;
}

double arithmetic_intensity(std::int64_t n_plane) {
  if (!is_power_of_two(n_plane) || n_plane < 2) {
    throw std::invalid_argument("arithmetic_intensity: n_plane must be a power of two >= 2");
  }
  int log2n = 0;
  while ((std::int64_t{1} << log2n) < n_plane) ++log2n;
  return static_cast<double>(n_plane * log2n) / static_cast<double>(n_plane * 8);
}

ProblemConfig preset(std::string_view name) {
  ProblemConfig c;
  if (name == "desk") {
    c.preset = "desk";
    return c;  // the defaults are the desk preset
  }
  if (name == "paper") {
    c.preset = "paper";
    c.n_gauss = 4;
    c.n_vertex_max = 4;
    c.n_order = 3;
    c.n_plane = 32;
    c.n_tor = 17;
    c.n_var = 7;
    c.mesh_nx = 2;
    c.mesh_ny = 2;
    c.buffer_capacity = 1 << 20;
    c.flop_knob = 8;
    c.chunk_count = 16;
    return c;
  }
  throw ConfigError("invalid configuration: unknown preset '" + std::string(name) + "'");
}

void apply_setting(ProblemConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "preset") {
    const auto base = preset(value);
    c = base;
  } else if (key == "n_gauss") {
    c.n_gauss = parse_int(key, value);
  } else if (key == "n_vertex_max") {
    c.n_vertex_max = parse_int(key, value);
  } else if (key == "n_order") {
    c.n_order = parse_int(key, value);
  } else if (key == "n_plane") {
    c.n_plane = parse_int(key, value);
  } else if (key == "n_tor") {
    c.n_tor = parse_int(key, value);
  } else if (key == "n_var") {
    c.n_var = parse_int(key, value);
  } else if (key == "mesh_nx") {
    c.mesh_nx = parse_int(key, value);
  } else if (key == "mesh_ny") {
    c.mesh_ny = parse_int(key, value);
  } else if (key == "flop_knob") {
    c.flop_knob = parse_int(key, value);
  } else if (key == "buffer_capacity") {
    c.buffer_capacity = parse_integer(key, value);
  } else if (key == "chunk_count") {
    c.chunk_count = parse_int(key, value);
  } else if (key == "max_solver_threads") {
    c.max_solver_threads = parse_int(key, value);
  } else if (key == "layout") {
    if (value == "plane_row_col") {
      c.layout = BlockLayout::PlaneRowCol;
    } else if (value == "plane_col_row") {
      c.layout = BlockLayout::PlaneColRow;
    } else {
      throw ConfigError("invalid configuration: layout must be plane_row_col or plane_col_row");
    }
  } else if (key == "call_correction") {
    c.call_correction = parse_bool(key, value);
  } else {
    throw ConfigError("invalid configuration: unknown key '" + std::string(key) + "'");
  }
}

ProblemConfig load_config_file(const std::filesystem::path& path, ProblemConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("invalid configuration: cannot read config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("invalid configuration: " + path.string() + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
  }
  return base;
}

std::string_view to_string(BlockLayout layout) {
  return layout == BlockLayout::PlaneRowCol ? "plane_row_col" : "plane_col_row";
}

}  // namespace elmasm
