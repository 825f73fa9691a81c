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
 * @file io.hpp
 * @brief Artifact formats: CSV with '#' metadata comments and a header row,
 *        JSON sidecars, and a small binary container for state vectors.
 */
#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace puretherm::app {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
  void add_row(std::vector<double> row);
  std::vector<double> column(const std::string& name) const;
  std::optional<std::string> meta_value(const std::string& key) const;
};

/// Shortest round-trip decimal form.
std::string format_double(double v);

void write_csv(const fs::path& path, const CsvTable& table);
CsvTable read_csv(const fs::path& path);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

struct StoredState {
  int sites = 0;
  double time = 0.0;
  std::vector<std::complex<double>> amps;
};

void write_state(const fs::path& path, const StoredState& state);
StoredState read_state(const fs::path& path);

}  // namespace puretherm::app
