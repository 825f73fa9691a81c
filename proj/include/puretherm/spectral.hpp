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
 * @file spectral.hpp
 * @brief Noise and dissipative-response spectra of a stationary correlation
 *        function, FDT temperature fit, zero-frequency noise and susceptibility.
 *
 * Fourier convention: X(tau) = int d omega e^{-i omega tau} X~(omega) / 2 pi, so with
 * C(-tau) = conj C(tau)
 *   S~(omega)    =  2 int_0^tau* Re C(tau) cos(omega tau) d tau
 *   chi~''(omega) = -2 int_0^tau* Im C(tau) sin(omega tau) d tau
 * and chi~''/S~ = tanh(beta omega / 2) > 0 for omega > 0 at positive temperature.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "puretherm/propagator.hpp"

namespace puretherm {

struct SpectralData {
  std::vector<double> omega;
  std::vector<double> noise;     // S~(omega)
  std::vector<double> response;  // chi~''(omega)
  double tau_star = 10.0;

  /// Correlation samples on [0, tau_star] the spectra were built from, when known.
  std::vector<double> source_tau;
  std::vector<cplx> source_values;

  /// Linear interpolation; zero outside the grid.
  double noise_at(double w) const;
  double response_at(double w) const;
  double ratio_at(std::size_t i) const { return response[i] / noise[i]; }
};

struct FourierOptions {
  double tau_star = 10.0;
  double omega_max = 30.0;
  double d_omega = 0.01;
  /// Correlation sampling coarser than this is refused (aliasing guard).
  double max_tau_step = 0.1;
};

/// Rectangular cutoff at tau_star, Simpson quadrature in tau, symmetric omega grid.
SpectralData fourier_noise_response(const CorrelationSeries& C, const FourierOptions& opts = {});

struct BetaFit {
  double beta = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double omega_max_used = 0.0;
  std::size_t samples = 0;
  /// Set when S~ came too close to zero and the range was shrunk.
  std::optional<std::string> flag;
};

/// Least-squares line through (omega, chi~''/S~) on |omega| <= omega_max; beta = 2 slope.
BetaFit fit_beta_fdt(const SpectralData& spec, double omega_max = 2.0);

/// S~(0) = 2 int_0^tau* Re C. Uses the source samples when present, else the grid.
double zero_frequency_noise(const SpectralData& spec);

/// chi_A = int d omega chi~''(omega) / (pi omega) over the grid.
double thermodynamic_susceptibility(const SpectralData& spec);
/// Same quantity from the time domain: -2 int_0^tau* Im C(tau) d tau.
double thermodynamic_susceptibility_time(const SpectralData& spec);

}  // namespace puretherm
