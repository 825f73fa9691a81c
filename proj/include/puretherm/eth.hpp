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
 * @file eth.hpp
 * @brief Exact-diagonalisation statistics of observable matrix elements:
 *        diagonal concentration, variance scaling with dimension, and the
 *        off-diagonal spectral function |f(E, omega)|^2.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "puretherm/operators.hpp"

namespace puretherm {

struct EigenSystem {
  std::size_t dim = 0;
  std::vector<double> energies;  // ascending
  std::vector<double> vectors;   // column-major, column n is |E_n>

  const double* vector(std::size_t n) const { return vectors.data() + n * dim; }
  double e_min() const { return energies.front(); }
  double e_max() const { return energies.back(); }
  /// (E_n - E_min) / (E_max - E_min)
  double normalized(double e) const { return (e - e_min()) / (e_max() - e_min()); }
};

inline constexpr std::size_t kMaxEigenDim = 50000;

EigenSystem exact_eigensystem(const SparseOperator& H, std::size_t max_dim = kMaxEigenDim);

/// max_n ||H v_n - E_n v_n||
double eigen_residual(const EigenSystem& eig, const SparseOperator& H);
/// max |<v_m|v_n> - delta_mn| over a strided sample of columns (all when stride = 1).
double orthonormality_error(const EigenSystem& eig, std::size_t stride = 1);

/// A_nn
std::vector<double> diagonal_elements(const EigenSystem& eig, const SparseOperator& A);
/// Dense A_mn, column-major. Refuses dim above `max_dim`.
std::vector<double> matrix_elements(const EigenSystem& eig, const SparseOperator& A, std::size_t max_dim = 8000);

/// Mean of A_nn over eigenstates with |eps_n - eps(E)| <= width / 2.
double window_average(const EigenSystem& eig, const std::vector<double>& ann, double energy, double width = 0.02);

struct EnergyWindow {
  double eps_center = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

struct DiagonalStats {
  std::vector<EnergyWindow> windows;  // disjoint windows of width delta_eps
  std::vector<double> running_mean;   // per eigenstate, centred window
  double central_variance = 0.0;      // of A_nn - running mean, central slice
  double central_raw_variance = 0.0;  // of A_nn itself, central slice
  std::size_t central_count = 0;
  std::size_t empty_windows = 0;
};

/// Central slice = the middle `central_fraction` of eigenstates by index.
DiagonalStats diagonal_statistics(const EigenSystem& eig, const std::vector<double>& ann, double delta_eps = 0.02,
                                  double central_fraction = 0.1);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual_rms = 0.0;
};

/// Least squares of log y on log x.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct SpectralFunctionBin {
  double omega = 0.0;
  std::size_t count = 0;
  double mean = 0.0;       // signed mean of A_mn
  double mean_abs = 0.0;   // mean |A_mn|
  double variance = 0.0;   // var A_mn
  double f2 = 0.0;         // mean of A_mn^2 Omega(E_mn)
  bool low_statistics = false;
};

struct SpectralFunctionGrid {
  double beta_target = 0.0;
  double e_low = 0.0;
  double e_high = 0.0;
  double d_omega = 0.2;
  std::vector<SpectralFunctionBin> bins;
  std::optional<std::string> flag;
};

struct OffDiagonalOptions {
  double d_omega = 0.2;
  double omega_max = 6.0;
  /// Accept pairs with |beta(E_mn) - beta_target| <= tolerance * beta_target.
  double beta_tolerance = 0.1;
  std::size_t min_count = 10;
};

/// `beta_of_energy` and `density_of_energy` come from the DOS (KPM or exact);
/// `amn` is the dense matrix from matrix_elements.
SpectralFunctionGrid offdiagonal_spectral_function(const EigenSystem& eig, const std::vector<double>& amn,
                                                   double beta_target,
                                                   const std::function<double(double)>& beta_of_energy,
                                                   const std::function<double(double)>& density_of_energy,
                                                   const OffDiagonalOptions& opts = {});

/// First absolute moment of A_mn in omega bins over pairs with E_mn in [e_low, e_high].
SpectralFunctionGrid offdiagonal_magnitude_profile(const EigenSystem& eig, const std::vector<double>& amn, double e_low,
                                                   double e_high, const OffDiagonalOptions& opts = {});

/// Fraction of neighbouring level gaps below `gap`.
double degenerate_gap_fraction(const EigenSystem& eig, double gap = 1e-10);

}  // namespace puretherm
