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
 * @file config.hpp
 * @brief Run configuration: INI-style sections of typed keys, validation that
 *        reports every violation at once, and a canonical serialiser.
 *
 * Grammar: `[section]` headers, `key = value` lines, `;` or `#` comments.
 * Lists are comma separated. Unknown keys are rejected.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "puretherm/hydro.hpp"
#include "puretherm/operators.hpp"

namespace puretherm::app {

struct RunConfig {
  ChainParams chain{14};
  DriveParams drive{2.0, 8.0, 0, 0.0};  // site 0 means the probe site
  int probe_center = 0;   // 0 means default_probe_site(L)

  // preparation and relaxation
  double dt = 0.01;
  std::vector<double> t_prep;        // explicit preparation times
  std::vector<double> beta_targets;  // or target temperatures (drive until E_bar is reached)
  double max_prep_time = 400.0;
  double t_relax = 100.0;            // t0 - t_prep
  double average_window = 20.0;
  int record_stride = 10;

  // correlations and spectra
  double tau_star = 10.0;
  double omega_max = 30.0;
  double d_omega = 0.01;
  double fit_omega_max = 2.0;

  // kpm
  int kpm_moments = 100;
  int kpm_vectors = 20;
  int ldos_moments = 250;

  // eth
  bool eth_enabled = true;
  double eth_delta_eps = 0.02;
  double eth_d_omega = 0.2;
  double eth_central_fraction = 0.1;

  // decoherence
  std::vector<double> couplings{0.2};
  double decohere_t_max = 200.0;

  // metrology
  double delta_T = 0.2;
  double repetitions = 500.0;

  // hydro
  HydroParams hydro;
  std::vector<double> hydro_sweep_L{1e2, 2e2, 5e2, 1e3, 2e3};

  // run
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out = "out";

  bool operator==(const RunConfig&) const = default;

  int probe_site() const;
  int drive_site() const;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);

/// `hydro` checks only what the closed-form hydro stage needs (no seed, no chain).
enum class ConfigScope { full, hydro };

/// Lists every violated constraint; empty when valid.
std::vector<std::string> config_violations(const RunConfig& cfg, ConfigScope scope = ConfigScope::full);
/// Throws ValidationError joining all violations.
void validate_config(const RunConfig& cfg, ConfigScope scope = ConfigScope::full);

/// Canonical text: fixed section and key order, doubles in round-trip form.
std::string serialize_config(const RunConfig& cfg);

/// Deterministic per-job seed derived from the master seed and a label.
std::uint64_t derive_seed(std::uint64_t master, const std::string& label);

}  // namespace puretherm::app
