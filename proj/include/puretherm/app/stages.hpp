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
 * @file stages.hpp
 * @brief Pipeline stages. Each stage reads the outputs of earlier stages from
 *        the run directory, writes its own artifacts and appends a manifest
 *        record. Order: kpm, prepare, evolve, correlate, spectra, eth,
 *        decohere, fisher, hydro.
 */
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "puretherm/app/config.hpp"
#include "puretherm/app/io.hpp"
#include "puretherm/kpm.hpp"
#include "puretherm/operators.hpp"

namespace puretherm::app {

/// Hamiltonian, probe observable and drive operator for a config.
struct Model {
  std::shared_ptr<const BasisSector> sector;
  SparseOperator H;
  SparseOperator A;
  SparseOperator drive_op;
  ProbeProfile probe;
};

Model build_model(const RunConfig& cfg);

/// Rebuilds the trace-DOS and probe curves saved by the kpm stage.
struct SavedKpm {
  std::unique_ptr<MicrocanonicalCurve> dos;
  std::unique_ptr<MicrocanonicalCurve> observable;
};
SavedKpm load_kpm(const fs::path& out_dir);

void run_kpm(const RunConfig& cfg);
void run_prepare(const RunConfig& cfg);
void run_evolve(const RunConfig& cfg);
void run_correlate(const RunConfig& cfg);
void run_spectra(const RunConfig& cfg);
void run_eth(const RunConfig& cfg);
void run_decohere(const RunConfig& cfg);
void run_fisher(const RunConfig& cfg);

struct HydroRequest {
  bool sweep_L = true;
};
void run_hydro(const RunConfig& cfg, const HydroRequest& req = {});

/// All stages in order. Hydro is included.
void run_pipeline(const RunConfig& cfg);

/// Names of the stages in pipeline order.
const std::vector<std::string>& stage_names();

}  // namespace puretherm::app
