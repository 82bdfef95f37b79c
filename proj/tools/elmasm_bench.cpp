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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "elmasm/elmasm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string preset = "desk";
  std::string config_file;
  std::vector<std::string> settings;
  std::vector<int> threads;
  std::vector<std::string> strategies{"all"};
  std::vector<std::string> variants{"all"};
  std::vector<std::string> modes{"all"};
  int max_solver_threads = -1;
  int flop_knob = -1;
  std::vector<int> mesh;
  int repeats = 5;
  std::string out;
  std::string format = "csv";
  std::string emit_plot;
  std::string dump_matrix;
  std::string inject_fault;
  bool verbose = false;
};

struct Failure {
  int code;
};

int exit_code_for(elmasm_status status) {
  switch (status) {
    case ELMASM_OK:
      return kExitOk;
    case ELMASM_ERR_INVALID_ARGUMENT:
    case ELMASM_ERR_INVALID_CONFIG:
      return kExitConfig;
    case ELMASM_ERR_VERIFICATION:
      return kExitVerification;
    default:
      return kExitRuntime;
  }
}

void check(elmasm_status status, const char* what) {
  if (status == ELMASM_OK) return;
  std::fprintf(stderr, "elmasm-bench: %s: %s\n", what, elmasm_last_error());
  throw Failure{exit_code_for(status)};
}

template <typename T>
class Handle {
 public:
  using Deleter = void (*)(T*);
  explicit Handle(Deleter d) : deleter_(d) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr_(std::exchange(other.ptr_, nullptr)), deleter_(other.deleter_) {}
  ~Handle() {
    if (ptr_ != nullptr) deleter_(ptr_);
  }
  T** out() { return &ptr_; }
  T* get() const { return ptr_; }

 private:
  T* ptr_ = nullptr;
  Deleter deleter_;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--preset", o.preset, "Problem preset")->check(CLI::IsMember({"paper", "desk"}));
  cmd->add_option("--config", o.config_file, "key=value config file applied on top of the preset");
  cmd->add_option("--set", o.settings, "Extra key=value override (repeatable)");
  cmd->add_option("--max-solver-threads", o.max_solver_threads, "Solver thread cap")->check(CLI::PositiveNumber);
  cmd->add_option("--flop-knob", o.flop_knob, "Synthetic work per kernel contribution")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mesh", o.mesh, "Mesh extents NX NY")->expected(2);
}

void add_sweep(CLI::App* cmd, Options& o) {
  cmd->add_option("--threads", o.threads, "Thread counts, comma separated")->delimiter(',');
  cmd->add_option("--strategy", o.strategies, "Strategies, comma separated or 'all'")->delimiter(',');
  cmd->add_option("--variant", o.variants, "Loop variants, comma separated or 'all'")->delimiter(',');
  cmd->add_option("--mode", o.modes, "Transform modes, comma separated or 'all'")->delimiter(',');
  cmd->add_option("--repeats", o.repeats, "Timed repetitions per point")->check(CLI::Range(3, 1000));
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "Record output file");
  cmd->add_option("--format", o.format, "Record file format")->check(CLI::IsMember({"csv", "json"}));
}

Handle<elmasm_config> make_config(const Options& o) {
  Handle<elmasm_config> config(elmasm_config_destroy);
  check(elmasm_config_create(o.preset.c_str(), config.out()), "preset");
  if (!o.config_file.empty()) check(elmasm_config_load_file(config.get(), o.config_file.c_str()), "config file");
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "elmasm-bench: --set expects key=value, got '%s'\n", s.c_str());
      throw Failure{kExitConfig};
    }
    check(elmasm_config_set(config.get(), s.substr(0, eq).c_str(), s.substr(eq + 1).c_str()), "--set");
  }
  if (o.flop_knob >= 0) check(elmasm_config_set(config.get(), "flop_knob", std::to_string(o.flop_knob).c_str()), "--flop-knob");
  if (o.max_solver_threads > 0)
    check(elmasm_config_set(config.get(), "max_solver_threads", std::to_string(o.max_solver_threads).c_str()),
          "--max-solver-threads");
  if (o.mesh.size() == 2) {
    check(elmasm_config_set(config.get(), "mesh_nx", std::to_string(o.mesh[0]).c_str()), "--mesh");
    check(elmasm_config_set(config.get(), "mesh_ny", std::to_string(o.mesh[1]).c_str()), "--mesh");
  }
  check(elmasm_config_validate(config.get()), "configuration");
  return config;
}

template <typename E>
std::vector<E> expand(const std::vector<std::string>& names, E last, elmasm_status (*parse)(const char*, E*),
                      const char* what) {
  std::vector<E> out;
  for (const auto& n : names) {
    if (n == "all") {
      for (int i = 0; i <= static_cast<int>(last); ++i) out.push_back(static_cast<E>(i));
      continue;
    }
    E value{};
    check(parse(n.c_str(), &value), what);
    out.push_back(value);
  }
  return out;
}

void write_records(const Options& o, const elmasm_records* records, elmasm_figure figure, bool plot) {
  std::string csv_for_plot;
  if (!o.out.empty()) {
    if (o.format == "json") {
      check(elmasm_records_write_json(records, o.out.c_str()), "write json");
      if (plot && !o.emit_plot.empty()) {
        csv_for_plot = std::filesystem::path(o.out).replace_extension(".csv").string();
        check(elmasm_records_write_csv(records, csv_for_plot.c_str()), "write csv");
      }
    } else {
      check(elmasm_records_write_csv(records, o.out.c_str()), "write csv");
      csv_for_plot = o.out;
    }
  }
  if (plot && !o.emit_plot.empty()) {
    if (csv_for_plot.empty()) {
      csv_for_plot = std::filesystem::path(o.emit_plot).replace_extension(".csv").string();
      check(elmasm_records_write_csv(records, csv_for_plot.c_str()), "write csv");
    }
    check(elmasm_records_write_plot(records, figure, csv_for_plot.c_str(), o.emit_plot.c_str()), "write plot");
  }
}

void print_records(const elmasm_records* records) {
  std::printf("%-11s %-9s %-17s %-5s %-16s %4s %4s %7s %10s %10s  %s\n", "run", "phase", "strategy", "var", "mode",
              "thr", "slv", "mesh", "median_ms", "min_ms", "checksum");
  for (size_t i = 0; i < elmasm_records_size(records); ++i) {
    elmasm_record_view r{};
    check(elmasm_records_get(records, i, &r), "record");
    char mesh[32];
    std::snprintf(mesh, sizeof mesh, "%dx%d", r.mesh_nx, r.mesh_ny);
    std::printf("%-11s %-9s %-17s %-5s %-16s %4d %4d %7s %10.3f %10.3f  %s\n", r.run_id, r.phase,
                elmasm_strategy_name(r.strategy), elmasm_variant_name(r.variant), elmasm_mode_name(r.mode),
                r.construct_threads, r.solver_threads, mesh, r.median_ms, r.min_ms, r.checksum);
  }
}

int run_scaling(const Options& o, bool weak) {
  auto config = make_config(o);
  const auto strategies = expand(o.strategies, ELMASM_COLORED, elmasm_parse_strategy, "--strategy");
  const auto variants = expand(o.variants, ELMASM_MSMT, elmasm_parse_variant, "--variant");
  const auto modes = expand(o.modes, ELMASM_MERGED_CHUNKED, elmasm_parse_mode, "--mode");
  std::vector<int32_t> threads(o.threads.begin(), o.threads.end());
  if (threads.empty()) threads = {1, 2};
  elmasm_sweep sweep{threads.data(), threads.size(), strategies.data(), strategies.size(),
                     variants.data(), variants.size(), modes.data(),      modes.size(),
                     o.repeats};
  Handle<elmasm_records> records(elmasm_records_destroy);
  check(elmasm_records_create(records.out()), "records");
  if (weak) {
    check(elmasm_run_weak_scaling(config.get(), &sweep, records.get()), "weak scaling");
  } else {
    check(elmasm_run_strong_scaling(config.get(), &sweep, records.get()), "strong scaling");
  }
  print_records(records.get());
  write_records(o, records.get(), weak ? ELMASM_FIGURE_WEAK : ELMASM_FIGURE_STRONG, true);
  return kExitOk;
}

int run_verify(const Options& o) {
  auto config = make_config(o);
  std::vector<int32_t> threads(o.threads.begin(), o.threads.end());
  elmasm_equivalence_options opts{threads.empty() ? nullptr : threads.data(), threads.size(), 0.0, -1};
  if (!o.inject_fault.empty()) {
    elmasm_variant v{};
    check(elmasm_parse_variant(o.inject_fault.c_str(), &v), "--inject-fault");
    opts.corrupt_variant = v;
  }
  Handle<elmasm_report> report(elmasm_report_destroy);
  check(elmasm_run_equivalence(config.get(), &opts, report.out()), "equivalence suite");
  size_t failures = 0;
  double worst = 0.0;
  for (size_t i = 0; i < elmasm_report_size(report.get()); ++i) {
    const char* name = nullptr;
    double dev = 0.0;
    int32_t same = 0;
    int32_t ok = 0;
    check(elmasm_report_entry(report.get(), i, &name, &dev, &same, &ok), "report");
    if (dev > worst) worst = dev;
    if (!ok) ++failures;
    if (o.verbose || !ok) {
      std::printf("%s %s max_rel=%.3e indices=%s\n", ok ? "ok  " : "FAIL", name, dev, same ? "same" : "differ");
    }
  }
  std::printf("%zu combinations, %zu failed, worst relative deviation %.3e\n", elmasm_report_size(report.get()),
              failures, worst);
  return elmasm_report_passed(report.get()) ? kExitOk : kExitVerification;
}

int run_timestep(const Options& o) {
  auto config = make_config(o);
  elmasm_pipeline_config pipeline{};
  check(elmasm_pipeline_defaults(config.get(), &pipeline), "pipeline");
  if (!o.threads.empty()) pipeline.construct_threads = o.threads.front();
  const auto strategies = expand(o.strategies, ELMASM_COLORED, elmasm_parse_strategy, "--strategy");
  const auto variants = expand(o.variants, ELMASM_MSMT, elmasm_parse_variant, "--variant");
  const auto modes = expand(o.modes, ELMASM_MERGED_CHUNKED, elmasm_parse_mode, "--mode");
  if (strategies.size() != 1 || variants.size() != 1 || modes.size() != 1) {
    std::fprintf(stderr, "elmasm-bench: timestep needs exactly one strategy, variant and mode\n");
    return kExitConfig;
  }
  Handle<elmasm_records> records(elmasm_records_destroy);
  check(elmasm_records_create(records.out()), "records");
  Handle<elmasm_matrix> matrix(elmasm_matrix_destroy);
  elmasm_timestep ts{};
  check(elmasm_run_timestep(config.get(), &pipeline, strategies[0], variants[0], modes[0], &ts, records.get(),
                            o.dump_matrix.empty() ? nullptr : matrix.out()),
        "timestep");
  char sum[64];
  check(elmasm_checksum_format(&ts.checksum, sum, sizeof sum), "checksum");
  std::printf("construct  %4d threads  %10.3f ms (compute %.3f, transform %.3f, scatter %.3f)\n",
              ts.construct_threads, ts.construct.wall_ms, ts.construct.compute_ms, ts.construct.transform_ms,
              ts.construct.scatter_ms);
  std::printf("factor     %4d threads  %10.3f ms (%llu work units)\n", ts.solver_threads, ts.factor_ms,
              static_cast<unsigned long long>(ts.factor_work_units));
  std::printf("solve      %4d threads  %10.3f ms (norm %.6e)\n", ts.solver_threads, ts.solve_ms, ts.solve_norm);
  std::printf("total                   %10.3f ms\n", ts.total_ms);
  std::printf("checksum   %s\n", sum);
  write_records(o, records.get(), ELMASM_FIGURE_STRONG, false);
  if (!o.dump_matrix.empty()) check(elmasm_matrix_write_market(matrix.get(), o.dump_matrix.c_str()), "dump matrix");
  return kExitOk;
}

int run_sizes(const Options& o) {
  auto config = make_config(o);
  elmasm_sizes s{};
  check(elmasm_derive_sizes(config.get(), &s), "sizes");
  int64_t n_plane = 0;
  check(elmasm_config_get_int(config.get(), "n_plane", &n_plane), "n_plane");
  double ai = 0.0;
  check(elmasm_arithmetic_intensity(n_plane, &ai), "arithmetic intensity");
  std::printf("preset               %s\n", o.preset.c_str());
  std::printf("block_dim            %lld\n", static_cast<long long>(s.block_dim));
  std::printf("n_harm               %lld\n", static_cast<long long>(s.n_harm));
  std::printf("elm_side             %lld\n", static_cast<long long>(s.elm_side));
  std::printf("block_bytes          %lld\n", static_cast<long long>(s.block_bytes));
  std::printf("block_set_bytes      %lld\n", static_cast<long long>(4 * s.block_bytes));
  std::printf("elm_bytes            %lld\n", static_cast<long long>(s.elm_bytes));
  std::printf("slice_bytes          %lld\n", static_cast<long long>(s.slice_bytes));
  std::printf("chunk_count          %lld\n", static_cast<long long>(s.chunk_count));
  std::printf("arithmetic_intensity %.6g\n", ai);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Element-matrix assembly benchmark harness"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "Check every strategy/variant/mode against the serial reference");
  add_common(verify, o);
  verify->add_option("--threads", o.threads, "Thread counts, comma separated")->delimiter(',');
  verify->add_flag("-v,--verbose", o.verbose, "Print every combination");
  verify->add_option("--inject-fault", o.inject_fault)->group("");

  auto* strong = app.add_subcommand("strong", "Strong scaling sweep on a fixed mesh");
  add_common(strong, o);
  add_sweep(strong, o);
  add_output(strong, o);
  strong->add_option("--emit-plot", o.emit_plot, "Write a gnuplot script for the sweep");

  auto* weak = app.add_subcommand("weak", "Weak scaling sweep, mesh_nx scaled with the thread count");
  add_common(weak, o);
  add_sweep(weak, o);
  add_output(weak, o);
  weak->add_option("--emit-plot", o.emit_plot, "Write a gnuplot script for the sweep");

  auto* timestep = app.add_subcommand("timestep", "One construct/factor/solve step");
  add_common(timestep, o);
  timestep->add_option("--threads", o.threads, "Construction threads")->delimiter(',');
  timestep->add_option("--strategy", o.strategies, "Strategy")->delimiter(',');
  timestep->add_option("--variant", o.variants, "Loop variant")->delimiter(',');
  timestep->add_option("--mode", o.modes, "Transform mode")->delimiter(',');
  add_output(timestep, o);
  timestep->add_option("--dump-matrix", o.dump_matrix, "Write the assembled matrix in MatrixMarket format");

  auto* sizes = app.add_subcommand("sizes", "Print derived sizes and byte accounting");
  add_common(sizes, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  // The timestep defaults are the reference combination rather than "all".
  if (timestep->parsed()) {
    if (timestep->count("--strategy") == 0) o.strategies = {"CRITICAL_ALL"};
    if (timestep->count("--variant") == 0) o.variants = {"ORIG"};
    if (timestep->count("--mode") == 0) o.modes = {"SEPARATE_NESTS"};
  }

  try {
    if (verify->parsed()) return run_verify(o);
    if (strong->parsed()) return run_scaling(o, false);
    if (weak->parsed()) return run_scaling(o, true);
    if (timestep->parsed()) return run_timestep(o);
    return run_sizes(o);
  } catch (const Failure& f) {
    return f.code;
  }
}
