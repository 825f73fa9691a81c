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
 * @file metrology.hpp
 * @brief Thermometry with a dephasing qubit: quantum Fisher information and its
 *        parallel/perpendicular split, SLD measurement angle, optimal
 *        interrogation time and the repetition error budget.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace puretherm {

struct QfiParts {
  double total = 0.0;
  double parallel = 0.0;
  double perpendicular = 0.0;
};

/// F_par = (d|v|)^2 / (1 - |v|^2), F_perp = |v|^2 (d phi)^2; |v| capped at 1 - 1e-9.
QfiParts qfi_decomposition(double abs_v, double phi, double d_abs_v, double d_phi);

struct SldAngle {
  double angle = 0.0;  // in (-pi/2, pi/2]
  bool undefined = false;
};

/// tan angle = |v| (1 - |v|)^2 d phi / d|v|.
SldAngle sld_angle(double abs_v, double d_abs_v, double d_phi);

struct OptimalTime {
  double t_star = 0.0;
  double value = 0.0;
  std::size_t index = 0;
  bool on_boundary = false;
};

/// Grid argmax (first of equal maxima) refined by a parabola through its neighbours.
OptimalTime optimal_time(const std::vector<double>& t, const std::vector<double>& f);

struct ErrorBudget {
  double relative_error = 0.0;  // Delta T / T
  bool unbounded = false;
};

/// Delta T / T = 1 / sqrt(M T^2 F).
ErrorBudget error_budget(double t2_fisher, double repetitions);

/// Weak-coupling rates on a temperature grid, cubic-spline interpolated (linear
/// for two points):
/// |v|(T, t) = exp(-gamma(T) t / 2), phi(T, t) = phi_dot(T) t.
class ThermometryCurve {
 public:
  ThermometryCurve(std::vector<double> temperatures, std::vector<double> gamma, std::vector<double> phi_dot);
  ~ThermometryCurve();
  ThermometryCurve(ThermometryCurve&&) noexcept;
  ThermometryCurve& operator=(ThermometryCurve&&) noexcept;

  double gamma(double T) const;
  double phi_dot(double T) const;
  double d_gamma(double T) const;    // spline derivative
  double d_phi_dot(double T) const;
  /// First-order forward differences with step dT.
  double d_gamma_fd(double T, double dT = 0.2) const;
  double d_phi_dot_fd(double T, double dT = 0.2) const;

  double t_min() const { return temps_.front(); }
  double t_max() const { return temps_.back(); }
  const std::vector<double>& temperatures() const { return temps_; }

  /// QFI parts at (T, t) from spline derivatives.
  QfiParts fisher(double T, double t) const;

 private:
  struct Splines;
  std::vector<double> temps_;
  std::unique_ptr<Splines> s_;
};

struct FisherOptimum {
  double temperature = 0.0;
  double t_star = 0.0;
  QfiParts at_t_star;
  double t2_f_parallel = 0.0;
  bool on_boundary = false;
};

/// Maximises F_Q over the time grid at temperature T.
FisherOptimum optimize_fisher(const ThermometryCurve& curve, double T, const std::vector<double>& t_grid);

/// Maximiser of (gamma' t)^2 / (4 (e^{gamma t} - 1)) is x = gamma t solving 2 (1 - e^{-x}) = x.
double exponential_model_optimum();

struct EstimatorStats {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t trials = 0;
};

/// Monte Carlo of maximum-likelihood temperature estimation from `shots`
/// Bernoulli Ramsey outcomes with P_up = (1 + |v|(T)) / 2 (theta = -arg v).
/// `contrast` must be monotone on [t_lo, t_hi].
EstimatorStats simulate_ramsey_estimator(const std::function<double(double)>& contrast, double T_true, double t_lo,
                                         double t_hi, std::size_t shots, std::size_t trials, std::uint64_t seed);

}  // namespace puretherm
