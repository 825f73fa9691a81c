// Copyright 2026 The puretherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "puretherm/app/config.hpp"
#include "puretherm/app/io.hpp"
#include "puretherm/app/manifest.hpp"
#include "puretherm/errors.hpp"

using namespace puretherm;
using namespace puretherm::app;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("puretherm-unit-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

const char* kMinimal = R"(
# comment line
[chain]
sites = 8
Delta = 0.55
[evolution]
t_prep = 0, 4.5
; another comment
[run]
seed = 11
)";

bool message_contains(const std::string& text, const std::string& needle) {
  try {
    parse_config_string(text);
  } catch (const ValidationError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("config parse and canonical round trip") {
  const RunConfig c = parse_config_string(kMinimal);
  CHECK(c.chain.sites == 8);
  REQUIRE(c.t_prep.size() == 2);
  CHECK(c.t_prep[1] == 4.5);
  CHECK(*c.seed == 11u);
  CHECK(c.probe_site() == 5);
  CHECK(c.drive_site() == 5);
  CHECK(config_violations(c).empty());

  const std::string text = serialize_config(c);
  const RunConfig back = parse_config_string(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
}

TEST_CASE("config rejects bad input and lists every violation") {
  CHECK(message_contains("[chain]\nsitez = 8\n", "unknown key [chain] sitez"));
  CHECK(message_contains("[chain]\nsites = eight\n", "sites"));

  RunConfig c = parse_config_string(kMinimal);
  c.chain.sites = 7;
  c.dt = 0.5;
  c.kpm_moments = 1;
  c.seed.reset();
  const auto v = config_violations(c);
  CHECK(v.size() == 4);
  CHECK_THROWS_AS(validate_config(c), ValidationError);

  // Hydro-only runs do not need a seed.
  RunConfig h;
  h.seed.reset();
  CHECK(config_violations(h, ConfigScope::hydro).empty());
}

TEST_CASE("derived seeds") {
  CHECK(derive_seed(7, "kpm") == derive_seed(7, "kpm"));
  CHECK(derive_seed(7, "kpm") != derive_seed(8, "kpm"));
  CHECK(derive_seed(7, "kpm") != derive_seed(7, "eth"));
}

TEST_CASE("csv round trip keeps metadata and full precision") {
  TempDir tmp;
  CsvTable t;
  t.columns = {"x", "y"};
  t.add_meta("stage", "unit");
  t.add_row({0.1, 1.0 / 3.0});
  t.add_row({-2e-300, 6.02214076e23});
  CHECK_THROWS(t.add_row({1.0}));
  write_csv(tmp.path / "a.csv", t);
  const CsvTable r = read_csv(tmp.path / "a.csv");
  CHECK(r.columns == t.columns);
  CHECK(r.rows == t.rows);
  CHECK(r.meta_value("stage") == "unit");
  CHECK_FALSE(r.meta_value("missing").has_value());
  CHECK(r.column("y")[0] == 1.0 / 3.0);
  CHECK_THROWS(r.column("z"));
  CHECK(std::stod(format_double(0.1)) == 0.1);
}

TEST_CASE("json and state containers") {
  TempDir tmp;
  write_json(tmp.path / "a.json", json{{"k", 1.5}});
  CHECK(read_json(tmp.path / "a.json")["k"] == 1.5);

  StoredState s{6, 12.25, {{1.0, -0.5}, {0.0, 2.0}, {1e-17, 3.0}}};
  write_state(tmp.path / "psi.bin", s);
  const StoredState r = read_state(tmp.path / "psi.bin");
  CHECK(r.sites == 6);
  CHECK(r.time == 12.25);
  CHECK(r.amps == s.amps);
  std::ofstream(tmp.path / "junk.bin") << "not a state";
  CHECK_THROWS(read_state(tmp.path / "junk.bin"));
  CHECK_THROWS(read_state(tmp.path / "absent.bin"));
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  TempDir tmp;
  std::ofstream(tmp.path / "abc", std::ios::binary) << "abc";
  CHECK(sha256_file(tmp.path / "abc") == sha256_hex("abc"));
}

TEST_CASE("config hash ignores output path and threads") {
  RunConfig a = parse_config_string(kMinimal);
  RunConfig b = a;
  b.out = "elsewhere";
  b.threads = 4;
  CHECK(config_hash(a) == config_hash(b));
  b.chain.Delta = 0.6;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("stage writer commits atomically") {
  TempDir tmp;
  const RunConfig cfg = parse_config_string(kMinimal);
  {
    StageWriter w(tmp.path, "alpha");
    std::ofstream(w.file("x.txt")) << "x";
    w.commit(cfg, 0.1);
  }
  {
    StageWriter w(tmp.path, "beta");
    std::ofstream(w.file("y.txt")) << "y";
    // dropped without commit
  }
  CHECK(fs::exists(tmp.path / "alpha" / "x.txt"));
  CHECK_FALSE(fs::exists(tmp.path / "beta"));
  CHECK_FALSE(fs::exists(tmp.path / ".staging-beta"));

  const json m = load_manifest(tmp.path);
  CHECK(m["config_sha256"] == config_hash(cfg));
  CHECK(m["seed"] == 11);
  REQUIRE(m["stages"].size() == 1);
  CHECK(m["stages"][0]["artifacts"][0]["sha256"] == sha256_hex("x"));

  {
    StageWriter w(tmp.path, "gamma");
    w.file("never-written.txt");
    CHECK_THROWS(w.commit(cfg, 0.0));
  }
  RunConfig other = cfg;
  other.chain.h = 2.0;
  StageWriter w(tmp.path, "delta");
  std::ofstream(w.file("z.txt")) << "z";
  CHECK_THROWS_AS(w.commit(other, 0.0), ValidationError);
}
