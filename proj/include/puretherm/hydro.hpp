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
 * @file hydro.hpp
 * @brief Diffusive hydrodynamics of a conserved density probed through a
 *        Gaussian profile: response function, decoherence rates in d = 1, 2, 3,
 *        noise tails and the dephasing crossover at the Thouless time.
 *
 * Probe weight |u_k|^2 = exp(-ell^2 k^2); chi_k = chi0. Classical noise
 * S(tau) = (T / L^d) sum_k chi0 |u_k|^2 exp(-D k^2 tau).
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace puretherm {

struct HydroParams {
  int d = 1;
  double D = 1.0;     // diffusion coefficient
  double chi0 = 1.0;  // long-wavelength susceptibility
  double ell = 1.0;   // probe width
  double L = 1000.0;  // linear size
  double g = 0.2;
  double T = 1.0;

  /// Throws ValidationError on non-positive parameters or d outside {1, 2, 3}.
  void validate() const;
  /// Set when ell > L / 10.
  std::optional<std::string> warning() const;

  bool operator==(const HydroParams&) const = default;
};

/// Weight below which modes are dropped from finite-L sums.
inline constexpr double kModeCutoff = 1e-8;

/// Nonzero lattice modes k = 2 pi n / L grouped by |n|^2 with exact multiplicities.
struct ModeShells {
  std::vector<double> k2;
  std::vector<double> multiplicity;
};
ModeShells mode_shells(const HydroParams& p);

/// Finite-L mode sum of chi''(omega).
double diffusive_response(const HydroParams& p, double omega);
/// L -> infinity limit by radial quadrature.
double diffusive_response_continuum(const HydroParams& p, double omega);

/// g^2 int d^3k |u_k|^2 / (8 pi^3 k^2) by quadrature.
double renormalized_coupling_sq(const HydroParams& p);
/// Closed form g^2 sqrt(pi) / (4 pi^2 ell).
double renormalized_coupling_sq_closed(const HydroParams& p);
/// gamma = 2 gbar^2 chi0 T / D.
double gamma_3d(const HydroParams& p);
/// 1D: (2 g^2 T / pi D) int_{2 pi / L}^inf chi0 |u_k|^2 / k^2 dk;
/// 2D: (g^2 T chi0 / pi D) E1((2 pi ell / L)^2) / 2.
double gamma_low_dim(const HydroParams& p);
/// g^2 S~(0) with S~(0) = 2 int_0^inf S(tau) d tau from the finite-L mode sum.
double gamma_mode_sum(const HydroParams& p);

/// Finite-L mode-sum noise S(tau).
double noise_tail(const HydroParams& p, double tau);
/// T chi0 (4 pi (ell^2 + D tau))^{-d/2}.
double noise_tail_continuum(const HydroParams& p, double tau);
/// L^{-d} sum chi0 |u_k|^2: the susceptibility sum rule of the mode sum.
double mode_sum_susceptibility(const HydroParams& p);

enum class Regime { ballistic, diffusive, exponential };
const char* regime_name(Regime r);

struct CrossoverPoint {
  double t = 0.0;
  double gamma = 0.0;       // Gamma(t)
  double local_slope = 0.0; // d ln Gamma / d ln t
  Regime regime = Regime::ballistic;
};

/// Slowest-mode time 1 / (D k_min^2) = L^2 / (4 pi^2 D).
double thouless_time(const HydroParams& p);

/// Gamma(t) = 2 g^2 int_0^t (t - tau) S(tau) d tau from the finite-L mode sum.
/// Throws ValidationError unless the grid spans the Thouless time.
std::vector<CrossoverPoint> dephasing_crossover(const HydroParams& p, const std::vector<double>& t_grid);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace puretherm
