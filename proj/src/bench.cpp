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

#include "elmasm/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"

namespace elmasm {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

constexpr std::array kAllPhases = {Phase::Compute, Phase::Transform, Phase::Scatter,
                                   Phase::Factor,  Phase::Solve,     Phase::Total};

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bench record: bad number '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bench record: bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::string run_label(std::string_view kind, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*s-%04d", static_cast<int>(kind.size()), kind.data(), index);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Measurement {
  std::vector<double> compute, transform, scatter, total;  // ms
  std::string checksum;
};

Measurement measure(const ProblemConfig& config, SyncStrategy s, LoopVariant v, TransformMode m, int threads,
                    int repeats) {
  Measurement out;
  for (int r = 0; r < repeats; ++r) {
    auto result = assemble(config, v, m, s, threads);
    out.compute.push_back(result.times.compute * 1e3);
    out.transform.push_back(result.times.transform * 1e3);
    out.scatter.push_back(result.times.scatter * 1e3);
    out.total.push_back(result.times.wall * 1e3);
    if (r == repeats - 1) out.checksum = canonical_form(result.coo).checksum.to_string();
  }
  return out;
}

void check_spec(const SweepSpec& spec) {
  if (spec.threads.empty()) throw std::invalid_argument("sweep: thread list must not be empty");
  if (std::any_of(spec.threads.begin(), spec.threads.end(), [](int t) { return t < 1; })) {
    throw std::invalid_argument("sweep: thread counts must be >= 1");
  }
  if (spec.strategies.empty() || spec.variants.empty() || spec.modes.empty()) {
    throw std::invalid_argument("sweep: strategy, variant and mode lists must not be empty");
  }
  if (spec.repeats < 3) throw std::invalid_argument("sweep: repeats must be >= 3");
}

BenchRecord make_record(const ProblemConfig& config, std::string run_id, Phase phase, SyncStrategy s,
                        LoopVariant v, TransformMode m, int threads, int repeats, const std::vector<double>& ms,
                        const std::string& checksum) {
  BenchRecord rec;
  rec.run_id = std::move(run_id);
  rec.preset = config.preset;
  rec.phase = phase;
  rec.strategy = s;
  rec.variant = v;
  rec.mode = m;
  rec.construct_threads = threads;
  rec.solver_threads = std::min(threads, config.max_solver_threads);
  rec.mesh_nx = config.mesh_nx;
  rec.mesh_ny = config.mesh_ny;
  rec.repetitions = repeats;
  rec.median_ms = median(ms);
  rec.min_ms = *std::min_element(ms.begin(), ms.end());
  rec.checksum = checksum;
  return rec;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string gnuplot_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Compute: return "compute";
    case Phase::Transform: return "transform";
    case Phase::Scatter: return "scatter";
    case Phase::Factor: return "factor";
    case Phase::Solve: return "solve";
    case Phase::Total: return "total";
  }
  return "?";
}

Phase parse_phase(std::string_view name) {
  for (auto p : kAllPhases) {
    if (iequals(name, to_string(p))) return p;
  }
  throw std::invalid_argument("unknown phase '" + std::string(name) + "'");
}

std::vector<BenchRecord> run_strong_scaling(const ProblemConfig& config, const SweepSpec& spec) {
  check_spec(spec);
  validate(config);
  std::vector<BenchRecord> records;
  int index = 0;
  for (auto s : spec.strategies) {
    for (auto v : spec.variants) {
      for (auto m : spec.modes) {
        for (int t : spec.threads) {
          const auto meas = measure(config, s, v, m, t, spec.repeats);
          records.push_back(make_record(config, run_label("strong", index++), Phase::Total, s, v, m, t,
                                        spec.repeats, meas.total, meas.checksum));
        }
      }
    }
  }
  return records;
}

std::vector<BenchRecord> run_weak_scaling(const ProblemConfig& config, const SweepSpec& spec) {
  check_spec(spec);
  validate(config);
  std::vector<BenchRecord> records;
  int index = 0;
  for (auto s : spec.strategies) {
    for (auto v : spec.variants) {
      for (auto m : spec.modes) {
        for (int t : spec.threads) {
          ProblemConfig scaled = config;
          scaled.mesh_nx = config.mesh_nx * t;
          const auto meas = measure(scaled, s, v, m, t, spec.repeats);
          const auto id = run_label("weak", index++);
          records.push_back(make_record(scaled, id, Phase::Compute, s, v, m, t, spec.repeats, meas.compute, meas.checksum));
          records.push_back(
              make_record(scaled, id, Phase::Transform, s, v, m, t, spec.repeats, meas.transform, meas.checksum));
          records.push_back(make_record(scaled, id, Phase::Scatter, s, v, m, t, spec.repeats, meas.scatter, meas.checksum));
          records.push_back(make_record(scaled, id, Phase::Total, s, v, m, t, spec.repeats, meas.total, meas.checksum));
        }
      }
    }
  }
  return records;
}

std::vector<BenchRecord> timestep_records(const ProblemConfig& config, const TimestepRecord& ts,
                                          SyncStrategy strategy, LoopVariant variant, TransformMode mode) {
  const std::pair<Phase, double> phases[] = {
      {Phase::Compute, ts.construct.compute}, {Phase::Transform, ts.construct.transform},
      {Phase::Scatter, ts.construct.scatter}, {Phase::Factor, ts.factor_seconds},
      {Phase::Solve, ts.solve_seconds},       {Phase::Total, ts.total_seconds},
  };
  std::vector<BenchRecord> records;
  for (const auto& [phase, seconds] : phases) {
    auto rec = make_record(config, "timestep-0000", phase, strategy, variant, mode, ts.construct_threads, 1,
                           {seconds * 1e3}, ts.checksum.to_string());
    rec.solver_threads = ts.solver_threads;
    records.push_back(std::move(rec));
  }
  return records;
}

std::string format_csv(const std::vector<BenchRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.run_id + ',' + r.preset + ',' + std::string(to_string(r.phase)) + ',' +
           std::string(to_string(r.strategy)) + ',' + std::string(to_string(r.variant)) + ',' +
           std::string(to_string(r.mode)) + ',' + std::to_string(r.construct_threads) + ',' +
           std::to_string(r.solver_threads) + ',' + std::to_string(r.mesh_nx) + ',' + std::to_string(r.mesh_ny) +
           ',' + std::to_string(r.repetitions) + ',' + format_double(r.median_ms) + ',' +
           format_double(r.min_ms) + ',' + r.checksum + '\n';
  }
  return out;
}

std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("csv: missing or wrong header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 14) throw std::invalid_argument("csv: expected 14 fields, got " + std::to_string(f.size()));
    BenchRecord r;
    r.run_id = f[0];
    r.preset = f[1];
    r.phase = parse_phase(f[2]);
    r.strategy = parse_strategy(f[3]);
    r.variant = parse_variant(f[4]);
    r.mode = parse_mode(f[5]);
    r.construct_threads = parse_int(f[6]);
    r.solver_threads = parse_int(f[7]);
    r.mesh_nx = parse_int(f[8]);
    r.mesh_ny = parse_int(f[9]);
    r.repetitions = parse_int(f[10]);
    r.median_ms = parse_double(f[11]);
    r.min_ms = parse_double(f[12]);
    r.checksum = f[13];
    records.push_back(std::move(r));
  }
  return records;
}

std::string format_json(const std::vector<BenchRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["run_id"] = r.run_id;
    o["preset"] = r.preset;
    o["phase"] = to_string(r.phase);
    o["strategy"] = to_string(r.strategy);
    o["variant"] = to_string(r.variant);
    o["mode"] = to_string(r.mode);
    o["construct_threads"] = r.construct_threads;
    o["solver_threads"] = r.solver_threads;
    o["mesh_nx"] = r.mesh_nx;
    o["mesh_ny"] = r.mesh_ny;
    o["repetitions"] = r.repetitions;
    o["median_ms"] = r.median_ms;
    o["min_ms"] = r.min_ms;
    o["checksum"] = r.checksum;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<BenchRecord> parse_json(std::string_view text) try {
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw std::invalid_argument("json: expected an array of records");
  std::vector<BenchRecord> records;
  for (const auto& o : arr) {
    BenchRecord r;
    r.run_id = o.at("run_id").get<std::string>();
    r.preset = o.at("preset").get<std::string>();
    r.phase = parse_phase(o.at("phase").get<std::string>());
    r.strategy = parse_strategy(o.at("strategy").get<std::string>());
    r.variant = parse_variant(o.at("variant").get<std::string>());
    r.mode = parse_mode(o.at("mode").get<std::string>());
    r.construct_threads = o.at("construct_threads").get<int>();
    r.solver_threads = o.at("solver_threads").get<int>();
    r.mesh_nx = o.at("mesh_nx").get<int>();
    r.mesh_ny = o.at("mesh_ny").get<int>();
    r.repetitions = o.at("repetitions").get<int>();
    r.median_ms = o.at("median_ms").get<double>();
    r.min_ms = o.at("min_ms").get<double>();
    r.checksum = o.at("checksum").get<std::string>();
    records.push_back(std::move(r));
  }
  return records;
} catch (const nlohmann::json::exception& e) {
  throw std::invalid_argument(std::string("json: ") + e.what());
}

void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  write_text(path, format_csv(records));
}

void emit_json(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("emit_json: no records");
  write_text(path, format_json(records));
}

std::string format_plot_script(const std::vector<BenchRecord>& records, FigureKind kind,
                               const std::filesystem::path& csv_path) {
  using Key = std::tuple<SyncStrategy, LoopVariant, TransformMode>;
  std::map<Key, std::map<int, double>> series;
  std::set<SyncStrategy> strategies;
  std::set<LoopVariant> variants;
  std::set<TransformMode> modes;
  for (const auto& r : records) {
    if (r.phase != Phase::Total) continue;
    series[{r.strategy, r.variant, r.mode}][r.construct_threads] = r.median_ms;
    strategies.insert(r.strategy);
    variants.insert(r.variant);
    modes.insert(r.mode);
  }
  if (series.empty()) throw std::invalid_argument("plot script: records contain no 'total' phase rows");

  const auto title_of = [&](const Key& k) {
    std::string t;
    const auto add = [&t](std::string_view part) {
      if (!t.empty()) t += '/';
      t += part;
    };
    if (strategies.size() > 1) add(to_string(std::get<0>(k)));
    if (variants.size() > 1) add(to_string(std::get<1>(k)));
    if (modes.size() > 1) add(to_string(std::get<2>(k)));
    if (t.empty()) t = std::string(to_string(std::get<0>(k)));
    return t;
  };
  const std::string csv = gnuplot_quote(csv_path.generic_string());
  const bool strong = kind == FigureKind::StrongScaling;
  const auto plot_lines = [&](bool speedup) {
    std::string out = "plot ";
    bool first = true;
    for (const auto& [key, points] : series) {
      const double baseline = points.begin()->second;
      if (!first) out += ", \\\n     ";
      first = false;
      out += csv + " using ((strcol(3) eq 'total' && strcol(4) eq '" + std::string(to_string(std::get<0>(key))) +
             "' && strcol(5) eq '" + std::string(to_string(std::get<1>(key))) + "' && strcol(6) eq '" +
             std::string(to_string(std::get<2>(key))) + "') ? $7 : 1/0):";
      out += speedup ? "(" + format_double(baseline) + "/$12)" : std::string("12");
      out += " with linespoints title " + gnuplot_quote(title_of(key));
    }
    return out + "\n";
  };

  std::string s;
  s += "# " + std::string(strong ? "Strong" : "Weak") + " scaling of the element matrix construction.\n";
  s += "# Data: " + csv_path.generic_string() + "\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 1200,480\n";
  s += "set output " + gnuplot_quote(csv_path.stem().generic_string() + ".png") + "\n";
  s += std::string("set multiplot layout 1,2 title ") + (strong ? "'Strong scaling'" : "'Weak scaling'") + "\n";
  s += "set xlabel 'threads'\n";
  s += "set logscale x 2\n";
  s += "set key top left\n";
  s += "set grid\n";
  s += "set ylabel 'time [ms]'\n";
  s += plot_lines(false);
  s += std::string("set ylabel ") + (strong ? "'speedup'" : "'efficiency'") + "\n";
  s += plot_lines(true);
  s += "unset multiplot\n";
  return s;
}

void emit_plot_script(const std::vector<BenchRecord>& records, FigureKind kind,
                      const std::filesystem::path& csv_path, const std::filesystem::path& script_path) {
  write_text(script_path, format_plot_script(records, kind, csv_path));
}

bool EquivalenceReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

const EquivalenceEntry* EquivalenceReport::first_failure() const {
  for (const auto& e : entries) {
    if (!e.passed) return &e;
  }
  return nullptr;
}

std::vector<int> default_thread_counts() {
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<int> t = {1, 2, hw};
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

EquivalenceReport run_equivalence_suite(const ProblemConfig& config, const EquivalenceOptions& options) {
  const auto threads = options.threads.empty() ? default_thread_counts() : options.threads;
  EquivalenceReport report;
  report.tolerance = options.tolerance;
  const auto reference = canonical_form(
      assemble(config, LoopVariant::Orig, TransformMode::SeparateNests, SyncStrategy::CriticalAll, 1).coo);

  AssembleOptions hooks;
  hooks.perturb_variant = options.corrupt_variant;
  for (auto s : kAllStrategies) {
    for (auto v : kAllVariants) {
      for (auto m : kAllModes) {
        for (int t : threads) {
          const auto form = canonical_form(assemble(config, v, m, s, t, hooks).coo);
          const auto dev = compare(form, reference);
          EquivalenceEntry entry;
          entry.combination = std::string(to_string(s)) + "/" + std::string(to_string(v)) + "/" +
                              std::string(to_string(m)) + "/t" + std::to_string(t);
          entry.max_relative = dev.max_relative;
          entry.same_indices = dev.same_indices;
          entry.passed = dev.same_indices && dev.max_relative <= options.tolerance;
          report.entries.push_back(std::move(entry));
        }
      }
    }
  }
  return report;
}

}  // namespace elmasm
