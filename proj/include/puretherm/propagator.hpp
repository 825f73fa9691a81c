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
 * @file propagator.hpp
 * @brief Fixed-step RK4 integration of i d/dt psi = H(t) psi, energy moments,
 *        two-point correlation functions and time averages.
 */
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "puretherm/hilbert.hpp"
#include "puretherm/operators.hpp"

namespace puretherm {

/// y = H(t) x
using ApplyFn = std::function<void(double t, std::span<const cplx> x, std::span<cplx> y)>;

/// H + sum_k c_k O_k + sum_k a_k sin(omega_k t) P_k with diagonal O_k, P_k.
class Generator {
 public:
  explicit Generator(const SparseOperator& H);

  Generator& add_static(const SparseOperator& diag_op, double coeff);
  Generator& add_drive(const SparseOperator& diag_op, const DriveParams& drive);

  void apply(double t, std::span<const cplx> x, std::span<cplx> y) const;
  ApplyFn as_function() const;
  const SparseOperator& base() const noexcept { return *H_; }

 private:
  struct Term {
    const SparseOperator* op;
    double coeff;
    std::optional<DriveParams> drive;
  };
  const SparseOperator* H_;
  std::vector<Term> terms_;
};

struct EvolutionConfig {
  double dt = 0.01;
  /// Unset: renormalise only when the run is longer than kLongRun.
  std::optional<bool> renormalize;
  double t_start = 0.0;
  double t_end = 0.0;
  int record_stride = 1;

  static constexpr double kLongRun = 100.0;
  static constexpr double kMaxDt = 0.05;

  bool renormalizes() const noexcept { return renormalize.value_or(t_end - t_start > kLongRun); }
  /// Throws ValidationError on dt <= 0, dt > kMaxDt, t_end < t_start, stride < 1.
  void validate() const;
  long steps() const;
};

struct Rk4Workspace {
  std::vector<cplx> k, stage, acc;
  explicit Rk4Workspace(std::size_t n = 0) : k(n), stage(n), acc(n) {}
  void resize(std::size_t n) {
    k.resize(n);
    stage.resize(n);
    acc.resize(n);
  }
};

/// One classic RK4 step of d psi/dt = -i H(t) psi; stages at t, t+dt/2, t+dt/2, t+dt.
/// Throws NumericalError if the result is not finite.
void rk4_step(const ApplyFn& apply_H, std::span<cplx> psi, double t, double dt, Rk4Workspace& ws);

struct Trajectory {
  std::vector<double> t;
  std::vector<double> observable;  // Re <A>
  std::vector<double> energy;      // <H> of the static Hamiltonian
  std::vector<double> norm;
};

struct EnergyMoments {
  double mean = 0.0;
  double variance = 0.0;
  double ground = 0.0;
};

/// E = <H>, VarE = <H^2> - E^2 via one extra matvec.
EnergyMoments energy_moments(const SparseOperator& H, std::span<const cplx> psi, double ground_energy = 0.0);

/// Evolves `psi` in place from cfg.t_start to cfg.t_end, recording every
/// record_stride steps (including both endpoints). `observable` may be null.
Trajectory evolve(const Generator& gen, std::span<cplx> psi, const EvolutionConfig& cfg,
                  const SparseOperator* observable);

struct PreparedState {
  std::vector<cplx> psi;
  double t_prep = 0.0;
  double ground_energy = 0.0;
  EnergyMoments moments;
  Trajectory trajectory;
};

/// Drives the ground state with H + a sin(omega t) sigma^z_{j0} up to drive.t_prep.
/// With `stop_energy`, stops instead at the first step where <H> >= *stop_energy
/// (t_prep is then the stopping time; throws if not reached before drive.t_prep).
PreparedState prepare_driven_state(const SparseOperator& H, const StateVector& ground, double ground_energy,
                                   const DriveParams& drive, double dt, const SparseOperator* observable,
                                   int record_stride = 10, std::optional<double> stop_energy = std::nullopt);

struct CorrelationSeries {
  std::vector<double> tau;
  std::vector<cplx> values;
  /// Absolute time of the first operator insertion.
  double t_reference = 0.0;
  /// Mean of <A(t_reference + tau)> over the window.
  double mean_A = 0.0;
  double dt = 0.0;

  /// Grid over [-tau_max, tau_max] with C(-tau) = conj(C(tau)).
  CorrelationSeries symmetric() const;
};

/// Connected C(tau) = <psi(t+tau)|A|phi(t+tau)> - <A(t+tau)><A(t)> with
/// phi(t) = A psi(t), both propagated under H for tau in [0, tau_max].
/// `psi` is the state at time t_reference (not modified).
CorrelationSeries two_point_correlation(const SparseOperator& H, std::span<const cplx> psi, const SparseOperator& A,
                                        double tau_max, double dt, int record_stride = 1,
                                        double t_reference = 0.0);

struct TimeAverage {
  double mean = 0.0;
  std::size_t samples = 0;
  /// Set when the window is shorter than 20/J.
  std::optional<std::string> warning;
};

/// Evolves a copy of psi under H to t2 and averages <A> over samples in [t1, t2]
/// (times measured from psi's time).
TimeAverage time_average_observable(const SparseOperator& H, std::span<const cplx> psi, const SparseOperator& A,
                                    double t1, double t2, double dt = 0.01, int record_stride = 10);

}  // namespace puretherm
