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

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "elmasm/elmasm.h"

namespace {

struct Config {
  elmasm_config* ptr = nullptr;
  explicit Config(const char* preset) { EXPECT_EQ(elmasm_config_create(preset, &ptr), ELMASM_OK); }
  ~Config() { elmasm_config_destroy(ptr); }
};

void set(elmasm_config* c, const char* key, const char* value) {
  ASSERT_EQ(elmasm_config_set(c, key, value), ELMASM_OK) << elmasm_last_error();
}

}  // namespace

TEST(CApi, NamesRoundTrip) {
  for (int s = ELMASM_CRITICAL_ALL; s <= ELMASM_COLORED; ++s) {
    elmasm_strategy out{};
    ASSERT_EQ(elmasm_parse_strategy(elmasm_strategy_name(static_cast<elmasm_strategy>(s)), &out), ELMASM_OK);
    EXPECT_EQ(out, s);
  }
  for (int v = ELMASM_ORIG; v <= ELMASM_MSMT; ++v) {
    elmasm_variant out{};
    ASSERT_EQ(elmasm_parse_variant(elmasm_variant_name(static_cast<elmasm_variant>(v)), &out), ELMASM_OK);
    EXPECT_EQ(out, v);
  }
  for (int m = ELMASM_SEPARATE_NESTS; m <= ELMASM_MERGED_CHUNKED; ++m) {
    elmasm_mode out{};
    ASSERT_EQ(elmasm_parse_mode(elmasm_mode_name(static_cast<elmasm_mode>(m)), &out), ELMASM_OK);
    EXPECT_EQ(out, m);
  }
  elmasm_variant v{};
  EXPECT_EQ(elmasm_parse_variant("MP9", &v), ELMASM_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(elmasm_last_error()).find("MP9"), std::string::npos);
  EXPECT_STREQ(elmasm_strategy_name(static_cast<elmasm_strategy>(42)), "?");
  EXPECT_EQ(elmasm_parse_mode(nullptr, nullptr), ELMASM_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SizesAndIntensity) {
  Config paper("paper");
  elmasm_sizes s{};
  ASSERT_EQ(elmasm_derive_sizes(paper.ptr, &s), ELMASM_OK);
  EXPECT_EQ(s.block_dim, 112);
  EXPECT_EQ(s.block_bytes, 3211264);
  EXPECT_EQ(s.elm_bytes, 29001728);
  EXPECT_EQ(s.slice_bytes, 200704);
  EXPECT_EQ(s.chunk_count, 16);
  double ai = 0.0;
  ASSERT_EQ(elmasm_arithmetic_intensity(32, &ai), ELMASM_OK);
  EXPECT_EQ(ai, 0.625);
  EXPECT_EQ(elmasm_arithmetic_intensity(12, &ai), ELMASM_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ConfigErrors) {
  elmasm_config* c = nullptr;
  EXPECT_EQ(elmasm_config_create("laptop", &c), ELMASM_ERR_INVALID_CONFIG);
  EXPECT_EQ(c, nullptr);
  Config desk("desk");
  EXPECT_EQ(elmasm_config_set(desk.ptr, "n_plane", "12"), ELMASM_OK);
  EXPECT_EQ(elmasm_config_validate(desk.ptr), ELMASM_ERR_INVALID_CONFIG);
  EXPECT_NE(std::string(elmasm_last_error()).find("power of two"), std::string::npos);
  elmasm_sizes s{};
  EXPECT_EQ(elmasm_derive_sizes(desk.ptr, &s), ELMASM_ERR_INVALID_CONFIG);
  EXPECT_EQ(elmasm_config_set(desk.ptr, "bogus", "1"), ELMASM_ERR_INVALID_CONFIG);
  int64_t v = 0;
  EXPECT_EQ(elmasm_config_get_int(desk.ptr, "bogus", &v), ELMASM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(elmasm_config_load_file(desk.ptr, "/nonexistent/elmasm.cfg"), ELMASM_ERR_INVALID_CONFIG);
  set(desk.ptr, "n_plane", "16");
  EXPECT_EQ(elmasm_config_validate(desk.ptr), ELMASM_OK);
  EXPECT_STREQ(elmasm_last_error(), "");

  elmasm_config* copy = nullptr;
  ASSERT_EQ(elmasm_config_clone(desk.ptr, &copy), ELMASM_OK);
  set(copy, "n_plane", "32");
  ASSERT_EQ(elmasm_config_get_int(desk.ptr, "n_plane", &v), ELMASM_OK);
  EXPECT_EQ(v, 16);
  ASSERT_EQ(elmasm_config_get_int(copy, "n_plane", &v), ELMASM_OK);
  EXPECT_EQ(v, 32);
  elmasm_config_destroy(copy);
}

TEST(CApi, AssembleCompareAndExport) {
  Config c("desk");
  set(c.ptr, "mesh_nx", "2");
  set(c.ptr, "mesh_ny", "2");
  elmasm_matrix* ref = nullptr;
  elmasm_matrix* cand = nullptr;
  ASSERT_EQ(elmasm_assemble(c.ptr, ELMASM_ORIG, ELMASM_SEPARATE_NESTS, ELMASM_CRITICAL_ALL, 1, &ref), ELMASM_OK);
  ASSERT_EQ(elmasm_assemble(c.ptr, ELMASM_MSMT, ELMASM_MERGED_CHUNKED, ELMASM_COLORED, 2, &cand), ELMASM_OK);
  int64_t dofs = 0;
  int64_t nnz = 0;
  ASSERT_EQ(elmasm_matrix_info(cand, &dofs, &nnz), ELMASM_OK);
  EXPECT_EQ(dofs, 9 * 2 * 4 * 5);
  EXPECT_GT(nnz, 0);
  int32_t same = 0;
  double dev = 1.0;
  ASSERT_EQ(elmasm_matrix_compare(cand, ref, &same, &dev), ELMASM_OK);
  EXPECT_EQ(same, 1);
  EXPECT_LE(dev, 1e-12);
  elmasm_checksum a{}, b{};
  ASSERT_EQ(elmasm_matrix_checksum(ref, &a), ELMASM_OK);
  ASSERT_EQ(elmasm_matrix_checksum(cand, &b), ELMASM_OK);
  EXPECT_EQ(a.index_hash, b.index_hash);
  char text[64];
  ASSERT_EQ(elmasm_checksum_format(&a, text, sizeof text), ELMASM_OK);
  EXPECT_NE(std::strchr(text, ':'), nullptr);
  elmasm_phase_times t{};
  ASSERT_EQ(elmasm_matrix_times(cand, &t), ELMASM_OK);
  EXPECT_EQ(t.threads, 2);
  EXPECT_GT(t.wall_ms, 0.0);

  const auto path = (std::filesystem::temp_directory_path() / "elmasm_capi.mtx").string();
  ASSERT_EQ(elmasm_matrix_write_market(cand, path.c_str()), ELMASM_OK);
  EXPECT_GT(std::filesystem::file_size(path), 0u);
  std::filesystem::remove(path);
  EXPECT_EQ(elmasm_matrix_write_market(cand, "/nonexistent/x.mtx"), ELMASM_ERR_IO);

  elmasm_matrix* bad = nullptr;
  EXPECT_EQ(elmasm_assemble(c.ptr, ELMASM_ORIG, ELMASM_SEPARATE_NESTS, ELMASM_ATOMIC, 0, &bad),
            ELMASM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(elmasm_assemble(c.ptr, static_cast<elmasm_variant>(9), ELMASM_SEPARATE_NESTS, ELMASM_ATOMIC, 1, &bad),
            ELMASM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(bad, nullptr);
  elmasm_matrix_destroy(ref);
  elmasm_matrix_destroy(cand);
}

TEST(CApi, TimestepCap) {
  Config c("desk");
  set(c.ptr, "mesh_nx", "2");
  set(c.ptr, "mesh_ny", "2");
  set(c.ptr, "max_solver_threads", "3");
  elmasm_pipeline_config p{};
  ASSERT_EQ(elmasm_pipeline_defaults(c.ptr, &p), ELMASM_OK);
  EXPECT_EQ(p.max_solver_threads, 3);
  p.construct_threads = 5;
  p.factor_work = 16;
  elmasm_records* recs = nullptr;
  ASSERT_EQ(elmasm_records_create(&recs), ELMASM_OK);
  elmasm_matrix* m = nullptr;
  elmasm_timestep ts{};
  ASSERT_EQ(elmasm_run_timestep(c.ptr, &p, ELMASM_ATOMIC, ELMASM_MP2, ELMASM_MERGED_TRANSPOSED, &ts, recs, &m),
            ELMASM_OK);
  EXPECT_EQ(ts.construct_threads, 5);
  EXPECT_EQ(ts.solver_threads, 3);
  EXPECT_EQ(ts.construct.threads, 5);
  EXPECT_EQ(elmasm_records_size(recs), 6u);
  elmasm_checksum sum{};
  ASSERT_EQ(elmasm_matrix_checksum(m, &sum), ELMASM_OK);
  EXPECT_EQ(sum.index_hash, ts.checksum.index_hash);
  EXPECT_EQ(sum.magnitude, ts.checksum.magnitude);
  elmasm_matrix_destroy(m);
  elmasm_records_destroy(recs);
}

TEST(CApi, RecordsRoundTrip) {
  Config c("desk");
  set(c.ptr, "mesh_nx", "2");
  set(c.ptr, "mesh_ny", "1");
  const int32_t threads[] = {1, 2};
  const elmasm_strategy strategies[] = {ELMASM_ATOMIC, ELMASM_ALIGNED_CRITICAL};
  const elmasm_variant variants[] = {ELMASM_MP2};
  const elmasm_mode modes[] = {ELMASM_SEPARATE_NESTS};
  const elmasm_sweep sweep{threads, 2, strategies, 2, variants, 1, modes, 1, 3};
  elmasm_records* recs = nullptr;
  ASSERT_EQ(elmasm_records_create(&recs), ELMASM_OK);
  const auto dir = std::filesystem::temp_directory_path() / "elmasm_capi";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "r.csv").string();
  const auto json = (dir / "r.json").string();
  EXPECT_EQ(elmasm_records_write_csv(recs, csv.c_str()), ELMASM_ERR_INVALID_ARGUMENT);
  EXPECT_FALSE(std::filesystem::exists(csv));

  ASSERT_EQ(elmasm_run_strong_scaling(c.ptr, &sweep, recs), ELMASM_OK) << elmasm_last_error();
  ASSERT_EQ(elmasm_run_weak_scaling(c.ptr, &sweep, recs), ELMASM_OK) << elmasm_last_error();
  ASSERT_EQ(elmasm_records_size(recs), 4u + 16u);
  elmasm_record_view first{};
  ASSERT_EQ(elmasm_records_get(recs, 0, &first), ELMASM_OK);
  EXPECT_STREQ(first.phase, "total");
  EXPECT_STREQ(first.preset, "desk");
  EXPECT_EQ(first.strategy, ELMASM_ATOMIC);
  EXPECT_EQ(elmasm_records_get(recs, 999, &first), ELMASM_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(elmasm_records_write_csv(recs, csv.c_str()), ELMASM_OK);
  ASSERT_EQ(elmasm_records_write_json(recs, json.c_str()), ELMASM_OK);
  ASSERT_EQ(elmasm_records_write_plot(recs, ELMASM_FIGURE_STRONG, csv.c_str(), (dir / "r.gp").string().c_str()),
            ELMASM_OK);
  for (const auto& path : {csv, json}) {
    elmasm_records* back = nullptr;
    const auto status = path == csv ? elmasm_records_read_csv(path.c_str(), &back)
                                    : elmasm_records_read_json(path.c_str(), &back);
    ASSERT_EQ(status, ELMASM_OK) << elmasm_last_error();
    ASSERT_EQ(elmasm_records_size(back), elmasm_records_size(recs));
    for (size_t i = 0; i < elmasm_records_size(recs); ++i) {
      elmasm_record_view x{}, y{};
      elmasm_records_get(recs, i, &x);
      elmasm_records_get(back, i, &y);
      EXPECT_STREQ(x.run_id, y.run_id);
      EXPECT_STREQ(x.phase, y.phase);
      EXPECT_STREQ(x.checksum, y.checksum);
      EXPECT_EQ(x.median_ms, y.median_ms);
      EXPECT_EQ(x.min_ms, y.min_ms);
      EXPECT_EQ(x.mesh_nx, y.mesh_nx);
      EXPECT_EQ(x.mode, y.mode);
    }
    elmasm_records_destroy(back);
  }
  elmasm_records* none = nullptr;
  EXPECT_EQ(elmasm_records_read_csv((dir / "missing.csv").string().c_str(), &none), ELMASM_ERR_IO);
  EXPECT_EQ(elmasm_records_read_json(csv.c_str(), &none), ELMASM_ERR_INVALID_ARGUMENT);

  elmasm_sweep bad = sweep;
  bad.repeats = 1;
  EXPECT_EQ(elmasm_run_strong_scaling(c.ptr, &bad, recs), ELMASM_ERR_INVALID_ARGUMENT);
  elmasm_records_destroy(recs);
  std::filesystem::remove_all(dir);
}

TEST(CApi, EquivalenceReport) {
  Config c("desk");
  set(c.ptr, "mesh_nx", "2");
  set(c.ptr, "mesh_ny", "1");
  const int32_t threads[] = {1};
  elmasm_equivalence_options opts{threads, 1, 0.0, -1};
  elmasm_report* report = nullptr;
  ASSERT_EQ(elmasm_run_equivalence(c.ptr, &opts, &report), ELMASM_OK);
  EXPECT_EQ(elmasm_report_size(report), 75u);
  EXPECT_EQ(elmasm_report_passed(report), 1);
  elmasm_report_destroy(report);

  opts.corrupt_variant = ELMASM_MP1;
  ASSERT_EQ(elmasm_run_equivalence(c.ptr, &opts, &report), ELMASM_OK);
  EXPECT_EQ(elmasm_report_passed(report), 0);
  int failures = 0;
  for (size_t i = 0; i < elmasm_report_size(report); ++i) {
    const char* name = nullptr;
    double dev = 0.0;
    int32_t same = 0, ok = 0;
    ASSERT_EQ(elmasm_report_entry(report, i, &name, &dev, &same, &ok), ELMASM_OK);
    if (!ok) {
      ++failures;
      EXPECT_NE(std::strstr(name, "/MP1/"), nullptr);
    }
  }
  EXPECT_EQ(failures, 15);
  elmasm_report_destroy(report);
}
