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

/**
 * @file manifest.hpp
 * @brief Content hashes and the append-only run manifest. Each stage writes
 *        into a private staging directory that is promoted and recorded only
 *        when the stage succeeds.
 */
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "puretherm/app/config.hpp"
#include "puretherm/app/io.hpp"

namespace puretherm::app {

inline constexpr const char* kToolVersion = "1.0.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

/// Hash of the canonical config with run-local fields (output path, thread count) blanked.
std::string config_hash(const RunConfig& cfg);

class StageWriter {
 public:
  StageWriter(fs::path out_dir, std::string stage);
  ~StageWriter();
  StageWriter(const StageWriter&) = delete;
  StageWriter& operator=(const StageWriter&) = delete;

  /// Path for an artifact inside the stage (staged until commit).
  fs::path file(const std::string& name);
  /// Promotes staged files to out_dir/stage and appends the manifest record.
  void commit(const RunConfig& cfg, double wall_seconds);

  const std::string& stage() const noexcept { return stage_; }

 private:
  fs::path out_;
  std::string stage_;
  fs::path staging_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

json load_manifest(const fs::path& out_dir);

}  // namespace puretherm::app
