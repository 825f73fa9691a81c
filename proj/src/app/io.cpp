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

#include "puretherm/app/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "puretherm/errors.hpp"

namespace puretherm::app {

namespace {

constexpr char kStateMagic[8] = {'P', 'T', 'S', 'T', 'A', 'T', 'E', '1'};

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ResourceError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ValidationError("cannot read '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("CsvTable: row width does not match the header");
  rows.push_back(std::move(row));
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) {
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& r : rows) out.push_back(r[c]);
      return out;
    }
  throw ValidationError("csv: no column '" + name + "'");
}

std::optional<std::string> CsvTable::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  auto out = open_out(path);
  for (const auto& [k, v] : table.meta) out << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  if (!out) throw ResourceError("failed writing '" + path.string() + "'");
}

CsvTable read_csv(const fs::path& path) {
  auto in = open_in(path);
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon != std::string::npos && line.size() > 2) t.add_meta(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!header) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      header = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (r.ec != std::errc()) throw ValidationError("csv: bad number '" + cell + "' in " + path.string());
      row.push_back(v);
    }
    if (row.size() != t.columns.size()) throw ValidationError("csv: ragged row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ValidationError("csv: missing header in " + path.string());
  return t;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("json: " + path.string() + ": " + e.what());
  }
}

void write_state(const fs::path& path, const StoredState& state) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  const std::uint32_t sites = static_cast<std::uint32_t>(state.sites);
  const std::uint32_t reserved = 0;
  const std::uint64_t dim = state.amps.size();
  out.write(kStateMagic, sizeof kStateMagic);
  out.write(reinterpret_cast<const char*>(&sites), sizeof sites);
  out.write(reinterpret_cast<const char*>(&reserved), sizeof reserved);
  out.write(reinterpret_cast<const char*>(&state.time), sizeof state.time);
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(state.amps.data()),
            static_cast<std::streamsize>(dim * sizeof(std::complex<double>)));
  if (!out) throw ResourceError("failed writing '" + path.string() + "'");
}

StoredState read_state(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  char magic[8];
  std::uint32_t sites = 0, reserved = 0;
  std::uint64_t dim = 0;
  StoredState s;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&sites), sizeof sites);
  in.read(reinterpret_cast<char*>(&reserved), sizeof reserved);
  in.read(reinterpret_cast<char*>(&s.time), sizeof s.time);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  if (!in || std::memcmp(magic, kStateMagic, sizeof magic) != 0)
    throw ValidationError("state file '" + path.string() + "' is not a puretherm state");
  if (dim > (1ULL << 28)) throw ValidationError("state file '" + path.string() + "' has an implausible size");
  s.sites = static_cast<int>(sites);
  s.amps.resize(dim);
  in.read(reinterpret_cast<char*>(s.amps.data()), static_cast<std::streamsize>(dim * sizeof(std::complex<double>)));
  if (!in) throw ValidationError("state file '" + path.string() + "' is truncated");
  return s;
}

}  // namespace puretherm::app
