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

// Command-line driver. Exit codes: 0 success, 2 validation, 3 numerical, 4 resource.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <new>

#include "puretherm/app/config.hpp"
#include "puretherm/app/manifest.hpp"
#include "puretherm/app/stages.hpp"
#include "puretherm/blas_runtime.hpp"
#include "puretherm/errors.hpp"
#include "puretherm/simd/kernels.hpp"

namespace {

using namespace puretherm;
using namespace puretherm::app;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "Run configuration file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Master seed (overrides [run] seed)");
  sub->add_option("--out", f.out, "Output directory (overrides [run] out)");
  sub->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed) cfg.seed = f.seed;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.threads) cfg.threads = *f.threads;
  return cfg;
}

int run_guarded(const std::function<void()>& fn) {
  try {
    fn();
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return 4;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: out of memory\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  ensure_reliable_blas(argv);
  CLI::App app{"puretherm: thermometry of pure many-body states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("puretherm ") + kToolVersion);

  std::map<std::string, CommonFlags> flags;
  std::function<void()> action;

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"kpm", "Chebyshev moments, density of states and beta(E)"},
      {"prepare", "Drive the ground state to finite energy"},
      {"evolve", "Relax prepared states and time-average the probe"},
      {"correlate", "Two-point correlation functions of relaxed states"},
      {"spectra", "Noise and response spectra, FDT temperature"},
      {"eth", "Exact-diagonalisation matrix-element statistics"},
      {"decohere", "Exact and cumulant qubit decoherence"},
      {"fisher", "Quantum Fisher information versus temperature"},
      {"pipeline", "Run every stage in order"},
  };
  const std::map<std::string, std::function<void(const RunConfig&)>> runners = {
      {"kpm", run_kpm},           {"prepare", run_prepare}, {"evolve", run_evolve},
      {"correlate", run_correlate}, {"spectra", run_spectra}, {"eth", run_eth},
      {"decohere", run_decohere}, {"fisher", run_fisher},   {"pipeline", run_pipeline},
  };
  for (const auto& [name, help] : stages) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags[name]);
    sub->callback([&, name = name] {
      action = [&, name] { runners.at(name)(resolve(flags[name])); };
    });
  }

  auto* hydro = app.add_subcommand("hydro", "Closed-form diffusive hydrodynamics");
  add_common(hydro, flags["hydro"]);
  std::optional<int> d;
  std::optional<double> D, chi0, ell, L, g, T;
  bool sweep = false;
  hydro->add_option("--d", d, "Spatial dimension (1, 2 or 3)");
  hydro->add_option("--D", D, "Diffusion coefficient");
  hydro->add_option("--chi0", chi0, "Long-wavelength susceptibility");
  hydro->add_option("--ell", ell, "Probe width");
  hydro->add_option("--L", L, "Linear system size");
  hydro->add_option("--g", g, "Coupling");
  hydro->add_option("--T", T, "Temperature");
  hydro->add_flag("--sweep-L", sweep, "Tabulate gamma over the configured L sweep");
  hydro->callback([&] {
    action = [&] {
      RunConfig cfg = resolve(flags["hydro"]);
      if (d) cfg.hydro.d = *d;
      if (D) cfg.hydro.D = *D;
      if (chi0) cfg.hydro.chi0 = *chi0;
      if (ell) cfg.hydro.ell = *ell;
      if (L) cfg.hydro.L = *L;
      if (g) cfg.hydro.g = *g;
      if (T) cfg.hydro.T = *T;
      run_hydro(cfg, HydroRequest{sweep});
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  std::cerr << "simd: " << simd::isa_name(simd::active().isa) << '\n';
  return run_guarded(action);
}
