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
 * @file kpm.hpp
 * @brief Kernel polynomial method: Chebyshev moments of the rescaled
 *        Hamiltonian, Jackson-damped reconstruction of the density of states,
 *        microcanonical averages, local density of states and beta(E).
 */
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "puretherm/linalg.hpp"
#include "puretherm/operators.hpp"

namespace puretherm {

/// H~ = (H - b_shift) / a_scale.
struct Rescale {
  double a_scale = 1.0;
  double b_shift = 0.0;
  double margin = 0.01;

  double to_unit(double e) const noexcept { return (e - b_shift) / a_scale; }
  double to_energy(double x) const noexcept { return a_scale * x + b_shift; }
  /// Physical spectral edges (the unit interval shrunk by the margin).
  double e_min() const noexcept { return to_energy(-(1.0 - margin)); }
  double e_max() const noexcept { return to_energy(1.0 - margin); }
};

Rescale rescale_from_bounds(const SpectralBounds& bounds, double margin = 0.01);
Rescale rescale_spectrum(const SparseOperator& H, double margin = 0.01);

enum class MomentKind { trace, observable, state };

/// g_m for m = 0..M-1.
std::vector<double> jackson_kernel(int moments);

struct KpmExpansion {
  MomentKind kind = MomentKind::trace;
  int moments = 100;
  int random_vectors = 0;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  Rescale rescale;
  std::vector<double> mu;
  std::vector<double> kernel;
};

struct KpmOptions {
  int moments = 100;
  int random_vectors = 20;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Stochastic trace Tr T_m(H~) with Gaussian vectors. The estimate is scaled by
/// dim / mu_0-hat so the zeroth moment is exact.
KpmExpansion chebyshev_moments_trace(const SparseOperator& H, const Rescale& rs, const KpmOptions& opts);
/// Stochastic Tr A T_m(H~), scaled by the same dim / mu_0-hat as the trace with equal seed.
KpmExpansion chebyshev_moments_observable(const SparseOperator& H, const SparseOperator& A, const Rescale& rs,
                                          const KpmOptions& opts);
/// <psi|T_m(H~)|psi>, deterministic.
KpmExpansion chebyshev_moments_state(const SparseOperator& H, std::span<const cplx> psi, const Rescale& rs,
                                     int moments = 250);

/// Jackson-damped reconstruction, evaluable at any interior energy and sampled
/// on a Chebyshev-angle grid.
class MicrocanonicalCurve {
 public:
  MicrocanonicalCurve(const KpmExpansion& expansion, std::size_t grid_points = 2001);

  /// Xi(E) in physical units (Jacobian 1/a included). Throws for E on or outside the rescaled edge.
  double evaluate(double e) const;
  /// Exact integral of the damped expansion over [e1, e2].
  double integral(double e1, double e2) const;
  /// Integral over the full rescaled interval, i.e. g_0 mu_0.
  double total() const noexcept { return coeff_.empty() ? 0.0 : coeff_.front(); }

  const std::vector<double>& energy() const noexcept { return energy_; }
  const std::vector<double>& value() const noexcept { return value_; }
  const KpmExpansion& expansion() const noexcept { return exp_; }
  const Rescale& rescale() const noexcept { return exp_.rescale; }

 private:
  double antiderivative(double theta) const;
  KpmExpansion exp_;
  std::vector<double> coeff_;  // g_m mu_m (factor 2 for m >= 1 applied at use)
  std::vector<double> energy_;
  std::vector<double> value_;
};

/// Reliable interior: |rescaled E| <= this.
inline constexpr double kKpmInterior = 0.98;

/// beta = d ln Omega / dE by central difference with dE = (E_max - E_min) / 2000.
double microcanonical_beta(const MicrocanonicalCurve& dos, double e);
/// ln Omega(E); the additive ln dE constant of the entropy is not included.
double microcanonical_entropy(const MicrocanonicalCurve& dos, double e);
double microcanonical_average(const MicrocanonicalCurve& a_curve, const MicrocanonicalCurve& dos, double e);
/// Energy below the DOS maximum where beta(E) = beta (> 0) by bisection.
double energy_for_beta(const MicrocanonicalCurve& dos, double beta);

}  // namespace puretherm
