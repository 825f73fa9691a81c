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
 * @file decoherence.hpp
 * @brief Qubit dephasing by a many-body bath in a pure state: exact decoherence
 *        function from two propagated branches, second-order cumulant
 *        approximants, reduced qubit state, entropy and Ramsey signal.
 *
 * Convention: v(t) = <psi(t)|psi'(t)> = exp(-Gamma(t)/2 - i Phi(t)) to second order.
 */
#pragma once

#include <span>
#include <vector>

#include "puretherm/operators.hpp"
#include "puretherm/spectral.hpp"

namespace puretherm {

enum class TraceSource { exact, cumulant };

struct DecoherenceTrace {
  std::vector<double> t;  // measured from t0
  std::vector<cplx> v;
  double g = 0.0;
  TraceSource source = TraceSource::exact;
};

struct DecoherenceOptions {
  double dt = 0.01;
  int record_stride = 10;
  bool renormalize = true;
};

/// Propagates psi_t0 under H and under H + g A (A diagonal) for t in [0, t_max].
DecoherenceTrace exact_decoherence(const SparseOperator& H, const SparseOperator& A, double g,
                                   std::span<const cplx> psi_t0, double t_max, const DecoherenceOptions& opts = {});

struct CumulantTrace {
  std::vector<double> t;
  std::vector<double> gamma;
  std::vector<double> phi;
  double g = 0.0;

  DecoherenceTrace as_trace() const;
};

/// Gamma(t) = 4 g^2 int d omega / 2 pi S~ sin^2(omega t / 2) / omega^2 (flat tail beyond the grid),
/// Phi(t) = g t mean_A + g^2 int d omega / 2 pi chi~'' (sin omega t - omega t) / omega^2.
CumulantTrace cumulant_gamma_phi(const SpectralData& spec, double mean_A, double g, const std::vector<double>& t);

struct AsymptoticRates {
  double gamma = 0.0;    // g^2 S~(0)
  double phi_dot = 0.0;  // g mean_A - g^2 chi_A / 2
};

AsymptoticRates asymptotic_rates(const SpectralData& spec, double mean_A, double g);

struct RateFit {
  double rate = 0.0;  // -d ln|v|^2 / dt
  double intercept = 0.0;
  std::size_t samples = 0;
  double t_first = 0.0;
  double t_last = 0.0;
};

/// Least squares on ln|v|^2 over samples with lo <= |v|^2 <= hi.
RateFit fit_exponential_rate(const DecoherenceTrace& trace, double lo = 0.1, double hi = 0.9);

/// Reduced qubit state: populations 1/2, off-diagonal v / 2.
struct QubitState {
  cplx v;
  double bloch_x() const noexcept { return v.real(); }
  double bloch_y() const noexcept { return -v.imag(); }
  /// Eigenvalues (1 +- |v|) / 2.
  double lambda_plus() const noexcept { return 0.5 * (1.0 + std::abs(v)); }
  double lambda_minus() const noexcept { return 0.5 * (1.0 - std::abs(v)); }
};

/// Von Neumann entropy in nats; throws NumericalError when |v| > 1 + 1e-9.
double qubit_entropy(cplx v);
/// P_up = (1 + Re[e^{i theta} v]) / 2.
double ramsey_signal(cplx v, double theta);
/// Recovers v from signals on the uniform grid theta_k = 2 pi k / N.
cplx ramsey_reconstruct(const std::vector<double>& p_up);

}  // namespace puretherm
