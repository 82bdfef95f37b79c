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

#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "elmasm/assembly.hpp"
#include "elmasm/bench.hpp"
#include "elmasm/config.hpp"
#include "elmasm/elmasm.h"
#include "elmasm/pipeline.hpp"

struct elmasm_config {
  elmasm::ProblemConfig config;
};

struct elmasm_matrix {
  elmasm::GlobalCoo coo;
  elmasm::PhaseTimes times;
  mutable std::optional<elmasm::CanonicalForm> canonical;

  const elmasm::CanonicalForm& form() const {
    if (!canonical) canonical = elmasm::canonical_form(coo);
    return *canonical;
  }
};

struct elmasm_records {
  std::vector<elmasm::BenchRecord> records;
};

struct elmasm_report {
  elmasm::EquivalenceReport report;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
elmasm_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return ELMASM_OK;
  } catch (const elmasm::ConfigError& e) {
    g_last_error = e.what();
    return ELMASM_ERR_INVALID_CONFIG;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return ELMASM_ERR_INVALID_ARGUMENT;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return ELMASM_ERR_INVALID_ARGUMENT;
  } catch (const std::length_error& e) {
    g_last_error = e.what();
    return ELMASM_ERR_INVALID_CONFIG;
  } catch (const std::runtime_error& e) {
    g_last_error = e.what();
    return ELMASM_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ELMASM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ELMASM_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

elmasm::SyncStrategy to_cpp(elmasm_strategy s) {
  require(s >= ELMASM_CRITICAL_ALL && s <= ELMASM_COLORED, "invalid strategy value");
  return static_cast<elmasm::SyncStrategy>(s);
}
elmasm::LoopVariant to_cpp(elmasm_variant v) {
  require(v >= ELMASM_ORIG && v <= ELMASM_MSMT, "invalid variant value");
  return static_cast<elmasm::LoopVariant>(v);
}
elmasm::TransformMode to_cpp(elmasm_mode m) {
  require(m >= ELMASM_SEPARATE_NESTS && m <= ELMASM_MERGED_CHUNKED, "invalid mode value");
  return static_cast<elmasm::TransformMode>(m);
}

elmasm_phase_times to_c(const elmasm::PhaseTimes& t) {
  return {t.compute * 1e3, t.transform * 1e3, t.scatter * 1e3, t.wall * 1e3, t.threads};
}

elmasm_checksum to_c(const elmasm::Checksum& c) { return {c.magnitude, c.index_hash}; }

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot read ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

elmasm::SweepSpec to_cpp(const elmasm_sweep& s) {
  require(s.thread_count == 0 || s.threads != nullptr, "sweep: null thread list");
  require(s.strategy_count == 0 || s.strategies != nullptr, "sweep: null strategy list");
  require(s.variant_count == 0 || s.variants != nullptr, "sweep: null variant list");
  require(s.mode_count == 0 || s.modes != nullptr, "sweep: null mode list");
  elmasm::SweepSpec spec;
  spec.threads.assign(s.threads, s.threads + s.thread_count);
  for (size_t i = 0; i < s.strategy_count; ++i) spec.strategies.push_back(to_cpp(s.strategies[i]));
  for (size_t i = 0; i < s.variant_count; ++i) spec.variants.push_back(to_cpp(s.variants[i]));
  for (size_t i = 0; i < s.mode_count; ++i) spec.modes.push_back(to_cpp(s.modes[i]));
  spec.repeats = s.repeats;
  return spec;
}

}  // namespace

extern "C" {

const char* elmasm_last_error(void) { return g_last_error.c_str(); }

const char* elmasm_version(void) { return "0.1.0"; }

const char* elmasm_strategy_name(elmasm_strategy strategy) {
  if (strategy < ELMASM_CRITICAL_ALL || strategy > ELMASM_COLORED) return "?";
  return elmasm::to_string(static_cast<elmasm::SyncStrategy>(strategy)).data();
}

const char* elmasm_variant_name(elmasm_variant variant) {
  if (variant < ELMASM_ORIG || variant > ELMASM_MSMT) return "?";
  return elmasm::to_string(static_cast<elmasm::LoopVariant>(variant)).data();
}

const char* elmasm_mode_name(elmasm_mode mode) {
  if (mode < ELMASM_SEPARATE_NESTS || mode > ELMASM_MERGED_CHUNKED) return "?";
  return elmasm::to_string(static_cast<elmasm::TransformMode>(mode)).data();
}

elmasm_status elmasm_parse_strategy(const char* name, elmasm_strategy* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = static_cast<elmasm_strategy>(elmasm::parse_strategy(name));
  });
}

elmasm_status elmasm_parse_variant(const char* name, elmasm_variant* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = static_cast<elmasm_variant>(elmasm::parse_variant(name));
  });
}

elmasm_status elmasm_parse_mode(const char* name, elmasm_mode* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = static_cast<elmasm_mode>(elmasm::parse_mode(name));
  });
}

elmasm_status elmasm_config_create(const char* preset, elmasm_config** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new elmasm_config{elmasm::preset(preset != nullptr ? preset : "desk")};
  });
}

elmasm_status elmasm_config_clone(const elmasm_config* config, elmasm_config** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = new elmasm_config{config->config};
  });
}

void elmasm_config_destroy(elmasm_config* config) { delete config; }

elmasm_status elmasm_config_set(elmasm_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    elmasm::apply_setting(config->config, key, value);
  });
}

elmasm_status elmasm_config_get_int(const elmasm_config* config, const char* key, int64_t* out) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && out != nullptr, "null argument");
    const auto& c = config->config;
    const std::string k(key);
    if (k == "n_gauss") *out = c.n_gauss;
    else if (k == "n_vertex_max") *out = c.n_vertex_max;
    else if (k == "n_order") *out = c.n_order;
    else if (k == "n_plane") *out = c.n_plane;
    else if (k == "n_tor") *out = c.n_tor;
    else if (k == "n_var") *out = c.n_var;
    else if (k == "mesh_nx") *out = c.mesh_nx;
    else if (k == "mesh_ny") *out = c.mesh_ny;
    else if (k == "flop_knob") *out = c.flop_knob;
    else if (k == "buffer_capacity") *out = c.buffer_capacity;
    else if (k == "chunk_count") *out = c.chunk_count;
    else if (k == "max_solver_threads") *out = c.max_solver_threads;
    else if (k == "layout") *out = c.layout == elmasm::BlockLayout::PlaneRowCol ? 0 : 1;
    else if (k == "call_correction") *out = c.call_correction ? 1 : 0;
    else throw std::invalid_argument("unknown config key '" + k + "'");
  });
}

elmasm_status elmasm_config_load_file(elmasm_config* config, const char* path) {
  return guarded([&] {
    require(config != nullptr && path != nullptr, "null argument");
    config->config = elmasm::load_config_file(path, config->config);
  });
}

elmasm_status elmasm_config_validate(const elmasm_config* config) {
  return guarded([&] {
    require(config != nullptr, "null config");
    elmasm::validate(config->config);
  });
}

elmasm_status elmasm_derive_sizes(const elmasm_config* config, elmasm_sizes* out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    const auto d = elmasm::derive_dims(config->config);
    *out = {d.block_dim, d.n_harm, d.elm_side, d.block_bytes, d.elm_bytes, d.slice_bytes,
            config->config.chunk_count};
  });
}

elmasm_status elmasm_arithmetic_intensity(int64_t n_plane, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = elmasm::arithmetic_intensity(n_plane);
  });
}

elmasm_status elmasm_assemble(const elmasm_config* config, elmasm_variant variant, elmasm_mode mode,
                              elmasm_strategy strategy, int32_t threads, elmasm_matrix** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    auto result = elmasm::assemble(config->config, to_cpp(variant), to_cpp(mode), to_cpp(strategy), threads);
    *out = new elmasm_matrix{std::move(result.coo), result.times, std::nullopt};
  });
}

void elmasm_matrix_destroy(elmasm_matrix* matrix) { delete matrix; }

elmasm_status elmasm_matrix_info(const elmasm_matrix* matrix, int64_t* dof_count, int64_t* nnz) {
  return guarded([&] {
    require(matrix != nullptr, "null matrix");
    if (dof_count != nullptr) *dof_count = matrix->coo.dof_count;
    if (nnz != nullptr) *nnz = static_cast<int64_t>(matrix->coo.nnz());
  });
}

elmasm_status elmasm_matrix_times(const elmasm_matrix* matrix, elmasm_phase_times* out) {
  return guarded([&] {
    require(matrix != nullptr && out != nullptr, "null argument");
    *out = to_c(matrix->times);
  });
}

elmasm_status elmasm_matrix_checksum(const elmasm_matrix* matrix, elmasm_checksum* out) {
  return guarded([&] {
    require(matrix != nullptr && out != nullptr, "null argument");
    *out = to_c(matrix->form().checksum);
  });
}

elmasm_status elmasm_checksum_format(const elmasm_checksum* checksum, char* buf, size_t size) {
  return guarded([&] {
    require(checksum != nullptr && buf != nullptr && size > 0, "null argument");
    const auto text = elmasm::Checksum{checksum->magnitude, checksum->index_hash}.to_string();
    std::snprintf(buf, size, "%s", text.c_str());
  });
}

elmasm_status elmasm_matrix_compare(const elmasm_matrix* candidate, const elmasm_matrix* reference,
                                    int32_t* same_indices, double* max_relative) {
  return guarded([&] {
    require(candidate != nullptr && reference != nullptr, "null matrix");
    const auto d = elmasm::compare(candidate->form(), reference->form());
    if (same_indices != nullptr) *same_indices = d.same_indices ? 1 : 0;
    if (max_relative != nullptr) *max_relative = d.max_relative;
  });
}

elmasm_status elmasm_matrix_write_market(const elmasm_matrix* matrix, const char* path) {
  return guarded([&] {
    require(matrix != nullptr && path != nullptr, "null argument");
    elmasm::write_matrix_market(matrix->form(), matrix->coo.dof_count, path);
  });
}

elmasm_status elmasm_pipeline_defaults(const elmasm_config* config, elmasm_pipeline_config* out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    const elmasm::PipelineConfig p;
    *out = {p.construct_threads, config->config.max_solver_threads, p.solve_sweeps, p.factor_work};
  });
}

elmasm_status elmasm_run_timestep(const elmasm_config* config, const elmasm_pipeline_config* pipeline,
                                  elmasm_strategy strategy, elmasm_variant variant, elmasm_mode mode,
                                  elmasm_timestep* out, elmasm_records* records, elmasm_matrix** matrix) {
  return guarded([&] {
    require(config != nullptr && pipeline != nullptr && out != nullptr, "null argument");
    elmasm::PipelineConfig p;
    p.construct_threads = pipeline->construct_threads;
    p.max_solver_threads = pipeline->max_solver_threads;
    p.solve_sweeps = pipeline->solve_sweeps;
    p.factor_work = pipeline->factor_work;
    elmasm::GlobalCoo coo;
    const auto s = to_cpp(strategy);
    const auto v = to_cpp(variant);
    const auto m = to_cpp(mode);
    const auto ts = elmasm::run_timestep(config->config, p, s, v, m, matrix != nullptr ? &coo : nullptr);
    out->construct_threads = ts.construct_threads;
    out->solver_threads = ts.solver_threads;
    out->construct = to_c(ts.construct);
    out->factor_ms = ts.factor_seconds * 1e3;
    out->solve_ms = ts.solve_seconds * 1e3;
    out->total_ms = ts.total_seconds * 1e3;
    out->factor_work_units = ts.factor_work_units;
    out->solve_norm = ts.solve_norm;
    out->checksum = to_c(ts.checksum);
    if (records != nullptr) {
      auto recs = elmasm::timestep_records(config->config, ts, s, v, m);
      records->records.insert(records->records.end(), recs.begin(), recs.end());
    }
    if (matrix != nullptr) *matrix = new elmasm_matrix{std::move(coo), ts.construct, std::nullopt};
  });
}

elmasm_status elmasm_records_create(elmasm_records** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new elmasm_records{};
  });
}

void elmasm_records_destroy(elmasm_records* records) { delete records; }

size_t elmasm_records_size(const elmasm_records* records) { return records != nullptr ? records->records.size() : 0; }

elmasm_status elmasm_run_strong_scaling(const elmasm_config* config, const elmasm_sweep* sweep,
                                        elmasm_records* records) {
  return guarded([&] {
    require(config != nullptr && sweep != nullptr && records != nullptr, "null argument");
    auto recs = elmasm::run_strong_scaling(config->config, to_cpp(*sweep));
    records->records.insert(records->records.end(), recs.begin(), recs.end());
  });
}

elmasm_status elmasm_run_weak_scaling(const elmasm_config* config, const elmasm_sweep* sweep,
                                      elmasm_records* records) {
  return guarded([&] {
    require(config != nullptr && sweep != nullptr && records != nullptr, "null argument");
    auto recs = elmasm::run_weak_scaling(config->config, to_cpp(*sweep));
    records->records.insert(records->records.end(), recs.begin(), recs.end());
  });
}

elmasm_status elmasm_records_get(const elmasm_records* records, size_t index, elmasm_record_view* out) {
  return guarded([&] {
    require(records != nullptr && out != nullptr, "null argument");
    if (index >= records->records.size()) throw std::out_of_range("record index out of range");
    const auto& r = records->records[index];
    *out = {r.run_id.c_str(),
            r.preset.c_str(),
            elmasm::to_string(r.phase).data(),
            static_cast<elmasm_strategy>(r.strategy),
            static_cast<elmasm_variant>(r.variant),
            static_cast<elmasm_mode>(r.mode),
            r.construct_threads,
            r.solver_threads,
            r.mesh_nx,
            r.mesh_ny,
            r.repetitions,
            r.median_ms,
            r.min_ms,
            r.checksum.c_str()};
  });
}

elmasm_status elmasm_records_write_csv(const elmasm_records* records, const char* path) {
  return guarded([&] {
    require(records != nullptr && path != nullptr, "null argument");
    elmasm::emit_csv(records->records, path);
  });
}

elmasm_status elmasm_records_write_json(const elmasm_records* records, const char* path) {
  return guarded([&] {
    require(records != nullptr && path != nullptr, "null argument");
    elmasm::emit_json(records->records, path);
  });
}

elmasm_status elmasm_records_read_csv(const char* path, elmasm_records** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto recs = elmasm::parse_csv(read_file(path));
    *out = new elmasm_records{std::move(recs)};
  });
}

elmasm_status elmasm_records_read_json(const char* path, elmasm_records** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto recs = elmasm::parse_json(read_file(path));
    *out = new elmasm_records{std::move(recs)};
  });
}

elmasm_status elmasm_records_write_plot(const elmasm_records* records, elmasm_figure figure, const char* csv_path,
                                        const char* script_path) {
  return guarded([&] {
    require(records != nullptr && csv_path != nullptr && script_path != nullptr, "null argument");
    require(figure == ELMASM_FIGURE_STRONG || figure == ELMASM_FIGURE_WEAK, "invalid figure kind");
    elmasm::emit_plot_script(records->records,
                             figure == ELMASM_FIGURE_STRONG ? elmasm::FigureKind::StrongScaling
                                                            : elmasm::FigureKind::WeakScaling,
                             csv_path, script_path);
  });
}

elmasm_status elmasm_run_equivalence(const elmasm_config* config, const elmasm_equivalence_options* options,
                                     elmasm_report** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    elmasm::EquivalenceOptions opts;
    if (options != nullptr) {
      require(options->thread_count == 0 || options->threads != nullptr, "null thread list");
      opts.threads.assign(options->threads, options->threads + options->thread_count);
      if (options->tolerance > 0.0) opts.tolerance = options->tolerance;
      if (options->corrupt_variant >= 0) opts.corrupt_variant = to_cpp(static_cast<elmasm_variant>(options->corrupt_variant));
    }
    *out = new elmasm_report{elmasm::run_equivalence_suite(config->config, opts)};
  });
}

void elmasm_report_destroy(elmasm_report* report) { delete report; }

size_t elmasm_report_size(const elmasm_report* report) { return report != nullptr ? report->report.entries.size() : 0; }

int32_t elmasm_report_passed(const elmasm_report* report) {
  return report != nullptr && report->report.passed() ? 1 : 0;
}

elmasm_status elmasm_report_entry(const elmasm_report* report, size_t index, const char** combination,
                                  double* max_relative, int32_t* same_indices, int32_t* passed) {
  return guarded([&] {
    require(report != nullptr, "null report");
    if (index >= report->report.entries.size()) throw std::out_of_range("report index out of range");
    const auto& e = report->report.entries[index];
    if (combination != nullptr) *combination = e.combination.c_str();
    if (max_relative != nullptr) *max_relative = e.max_relative;
    if (same_indices != nullptr) *same_indices = e.same_indices ? 1 : 0;
    if (passed != nullptr) *passed = e.passed ? 1 : 0;
  });
}

}  // extern "C"
