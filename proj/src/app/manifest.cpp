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

#include "puretherm/app/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "puretherm/errors.hpp"

namespace puretherm::app {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw ResourceError("sha256: digest initialisation failed");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

void write_atomic(const fs::path& path, const json& j) {
  const fs::path tmp = path.string() + ".tmp";
  write_json(tmp, j);
  fs::rename(tmp, path);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("sha256: cannot read '" + path.string() + "'");
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string config_hash(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.out = "-";
  c.threads = 1;
  return sha256_hex(serialize_config(c));
}

StageWriter::StageWriter(fs::path out_dir, std::string stage)
    : out_(std::move(out_dir)), stage_(std::move(stage)), staging_(out_ / (".staging-" + stage_)) {
  std::error_code ec;
  fs::remove_all(staging_, ec);
  fs::create_directories(staging_, ec);
  if (ec) throw ResourceError("cannot create '" + staging_.string() + "': " + ec.message());
}

StageWriter::~StageWriter() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

fs::path StageWriter::file(const std::string& name) {
  names_.push_back(name);
  return staging_ / name;
}

json load_manifest(const fs::path& out_dir) {
  const fs::path p = out_dir / "manifest.json";
  if (!fs::exists(p)) return json();
  return read_json(p);
}

void StageWriter::commit(const RunConfig& cfg, double wall_seconds) {
  const fs::path dest = out_ / stage_;
  fs::create_directories(dest);
  json artifacts = json::array();
  for (const auto& name : names_) {
    const fs::path src = staging_ / name;
    if (!fs::exists(src)) throw std::logic_error("stage '" + stage_ + "' declared but did not write " + name);
    const fs::path dst = dest / name;
    fs::create_directories(dst.parent_path());
    fs::rename(src, dst);
    artifacts.push_back({{"path", (fs::path(stage_) / name).generic_string()},
                         {"sha256", sha256_file(dst)},
                         {"bytes", fs::file_size(dst)}});
  }
  std::error_code ec;
  fs::remove_all(staging_, ec);

  json manifest = load_manifest(out_);
  if (manifest.is_null()) {
    manifest = {{"tool", "puretherm"},
                {"version", kToolVersion},
                {"config_sha256", config_hash(cfg)},
                {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                {"stages", json::array()}};
  } else if (manifest.value("config_sha256", "") != config_hash(cfg)) {
    throw ValidationError("output directory '" + out_.string() + "' belongs to a run with a different config");
  }
  manifest["stages"].push_back({{"stage", stage_}, {"artifacts", artifacts}});
  write_atomic(out_ / "manifest.json", manifest);

  // Wall-times live outside the manifest so that reruns hash identically.
  const fs::path tp = out_ / "timings.json";
  json timings = fs::exists(tp) ? read_json(tp) : json::array();
  timings.push_back({{"stage", stage_}, {"wall_seconds", wall_seconds}});
  write_atomic(tp, timings);
  committed_ = true;
}

}  // namespace puretherm::app
