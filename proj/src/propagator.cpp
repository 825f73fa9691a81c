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

#include "puretherm/propagator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "puretherm/errors.hpp"
#include "puretherm/simd/kernels.hpp"

namespace puretherm {

Generator::Generator(const SparseOperator& H) : H_(&H) {}

Generator& Generator::add_static(const SparseOperator& diag_op, double coeff) {
  if (!diag_op.is_diagonal()) throw ValidationError("Generator: only diagonal perturbations are supported");
  if (diag_op.dim() != H_->dim()) throw ValidationError("Generator: dimension mismatch");
  terms_.push_back({&diag_op, coeff, std::nullopt});
  return *this;
}

Generator& Generator::add_drive(const SparseOperator& diag_op, const DriveParams& drive) {
  if (!diag_op.is_diagonal()) throw ValidationError("Generator: only diagonal drives are supported");
  if (diag_op.dim() != H_->dim()) throw ValidationError("Generator: dimension mismatch");
  terms_.push_back({&diag_op, drive.amplitude, drive});
  return *this;
}

void Generator::apply(double t, std::span<const cplx> x, std::span<cplx> y) const {
  const auto& k = simd::active();
  k.csr_apply(H_->csr(), 1.0, x.data(), 0.0, y.data());
  for (const Term& term : terms_) {
    const double c = term.drive ? drive_coefficient(t, *term.drive) : term.coeff;
    if (c != 0.0) k.diag_axpy(x.size(), cplx(c, 0.0), term.op->diag().data(), x.data(), y.data());
  }
}

ApplyFn Generator::as_function() const {
  return [this](double t, std::span<const cplx> x, std::span<cplx> y) { apply(t, x, y); };
}

void EvolutionConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("EvolutionConfig: dt must be positive");
  if (dt > kMaxDt) throw ValidationError("EvolutionConfig: dt exceeds the accuracy guard 0.05/J");
  if (t_end < t_start) throw ValidationError("EvolutionConfig: t_end < t_start");
  if (record_stride < 1) throw ValidationError("EvolutionConfig: record_stride must be >= 1");
}

long EvolutionConfig::steps() const { return std::lround((t_end - t_start) / dt); }

void rk4_step(const ApplyFn& apply_H, std::span<cplx> psi, double t, double dt, Rk4Workspace& ws) {
  const auto& k = simd::active();
  const std::size_t n = psi.size();
  if (ws.k.size() != n) ws.resize(n);
  const cplx half(0.0, -0.5 * dt);
  const cplx full(0.0, -dt);
  const cplx sixth(0.0, -dt / 6.0);
  const cplx third(0.0, -dt / 3.0);

  apply_H(t, psi, ws.k);  // k1
  k.waxpy(n, sixth, ws.k.data(), psi.data(), ws.acc.data());
  k.waxpy(n, half, ws.k.data(), psi.data(), ws.stage.data());

  apply_H(t + 0.5 * dt, ws.stage, ws.k);  // k2
  k.axpy(n, third, ws.k.data(), ws.acc.data());
  k.waxpy(n, half, ws.k.data(), psi.data(), ws.stage.data());

  apply_H(t + 0.5 * dt, ws.stage, ws.k);  // k3
  k.axpy(n, third, ws.k.data(), ws.acc.data());
  k.waxpy(n, full, ws.k.data(), psi.data(), ws.stage.data());

  apply_H(t + dt, ws.stage, ws.k);  // k4
  k.waxpy(n, sixth, ws.k.data(), ws.acc.data(), psi.data());

  const double nrm = k.norm2(n, psi.data());
  if (!std::isfinite(nrm))
    throw NumericalError("rk4_step: non-finite state at t=" + std::to_string(t) + " dt=" + std::to_string(dt));
}

EnergyMoments energy_moments(const SparseOperator& H, std::span<const cplx> psi, double ground_energy) {
  const auto& k = simd::active();
  std::vector<cplx> hpsi(psi.size());
  H.apply(psi, hpsi);
  const double nn = k.norm2(psi.size(), psi.data());
  const double e = k.dotc(psi.size(), psi.data(), hpsi.data()).real() / nn;
  const double e2 = k.norm2(psi.size(), hpsi.data()) / nn;
  return {e, std::max(0.0, e2 - e * e), ground_energy};
}

namespace {

void record(Trajectory& tr, double t, const SparseOperator& H, std::span<const cplx> psi, const SparseOperator* A) {
  const double nn = simd::active().norm2(psi.size(), psi.data());
  tr.t.push_back(t);
  tr.norm.push_back(std::sqrt(nn));
  tr.energy.push_back(H.expectation(psi) / nn);
  tr.observable.push_back(A ? A->expectation(psi) / nn : 0.0);
}

}  // namespace

Trajectory evolve(const Generator& gen, std::span<cplx> psi, const EvolutionConfig& cfg,
                  const SparseOperator* observable) {
  cfg.validate();
  const auto& k = simd::active();
  const long steps = cfg.steps();
  const bool renorm = cfg.renormalizes();
  const ApplyFn fn = gen.as_function();
  Rk4Workspace ws(psi.size());
  Trajectory tr;
  record(tr, cfg.t_start, gen.base(), psi, observable);
  for (long s = 0; s < steps; ++s) {
    rk4_step(fn, psi, cfg.t_start + static_cast<double>(s) * cfg.dt, cfg.dt, ws);
    if (renorm) k.scale(psi.size(), 1.0 / std::sqrt(k.norm2(psi.size(), psi.data())), psi.data());
    if ((s + 1) % cfg.record_stride == 0 || s + 1 == steps)
      record(tr, cfg.t_start + static_cast<double>(s + 1) * cfg.dt, gen.base(), psi, observable);
  }
  return tr;
}

PreparedState prepare_driven_state(const SparseOperator& H, const StateVector& ground, double ground_energy,
                                   const DriveParams& drive, double dt, const SparseOperator* observable,
                                   int record_stride, std::optional<double> stop_energy) {
  if (drive.site % 2 == 0) throw ValidationError("drive site must be odd");
  if (drive.t_prep < 0.0) throw ValidationError("t_prep must be non-negative");
  const SparseOperator drive_op = build_sigma_z(drive.site, H.sector_ptr());
  Generator gen(H);
  gen.add_drive(drive_op, drive);

  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.t_end = drive.t_prep;
  cfg.record_stride = record_stride;
  cfg.validate();

  PreparedState out;
  out.psi.assign(ground.amps().begin(), ground.amps().end());
  out.ground_energy = ground_energy;
  const auto& k = simd::active();
  const std::span<cplx> psi(out.psi);
  const long steps = cfg.steps();
  const bool renorm = cfg.renormalizes();
  const ApplyFn fn = gen.as_function();
  Rk4Workspace ws(psi.size());

  record(out.trajectory, 0.0, H, psi, observable);
  long s = 0;
  bool stopped = stop_energy && out.trajectory.energy.back() >= *stop_energy;
  for (; s < steps && !stopped; ++s) {
    rk4_step(fn, psi, static_cast<double>(s) * dt, dt, ws);
    if (renorm) k.scale(psi.size(), 1.0 / std::sqrt(k.norm2(psi.size(), psi.data())), psi.data());
    const bool at_record = (s + 1) % record_stride == 0 || s + 1 == steps;
    if (stop_energy) {
      const double e = H.expectation(psi) / k.norm2(psi.size(), psi.data());
      if (e >= *stop_energy) stopped = true;
    }
    if (at_record || stopped) record(out.trajectory, static_cast<double>(s + 1) * dt, H, psi, observable);
  }
  if (stop_energy && !stopped)
    throw NumericalError("prepare_driven_state: target energy " + std::to_string(*stop_energy) +
                         " not reached within t_prep=" + std::to_string(drive.t_prep));
  out.t_prep = static_cast<double>(s) * dt;
  out.moments = energy_moments(H, psi, ground_energy);
  return out;
}

CorrelationSeries CorrelationSeries::symmetric() const {
  CorrelationSeries s = *this;
  s.tau.clear();
  s.values.clear();
  for (std::size_t i = tau.size(); i-- > 1;) {
    s.tau.push_back(-tau[i]);
    s.values.push_back(std::conj(values[i]));
  }
  s.tau.insert(s.tau.end(), tau.begin(), tau.end());
  s.values.insert(s.values.end(), values.begin(), values.end());
  return s;
}

CorrelationSeries two_point_correlation(const SparseOperator& H, std::span<const cplx> psi_in, const SparseOperator& A,
                                        double tau_max, double dt, int record_stride, double t_reference) {
  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.t_end = tau_max;
  cfg.record_stride = record_stride;
  cfg.validate();

  const auto& k = simd::active();
  const std::size_t n = psi_in.size();
  std::vector<cplx> psi(psi_in.begin(), psi_in.end());
  k.scale(n, 1.0 / std::sqrt(k.norm2(n, psi.data())), psi.data());
  std::vector<cplx> phi(n);
  A.apply(psi, phi);
  std::vector<cplx> aphi(n);

  const Generator gen(H);
  const ApplyFn fn = gen.as_function();
  Rk4Workspace ws_psi(n), ws_phi(n);

  CorrelationSeries out;
  out.t_reference = t_reference;
  out.dt = dt * record_stride;
  const double a0 = A.expectation(psi);
  double sum_a = 0.0;

  auto sample = [&](double tau) {
    const double a_t = A.expectation(psi);
    A.apply(phi, aphi);
    const cplx raw = k.dotc(n, psi.data(), aphi.data());
    out.tau.push_back(tau);
    out.values.push_back(raw - a_t * a0);
    sum_a += a_t;
  };

  sample(0.0);
  const long steps = cfg.steps();
  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    rk4_step(fn, psi, t, dt, ws_psi);
    rk4_step(fn, phi, t, dt, ws_phi);
    if ((s + 1) % record_stride == 0) sample(static_cast<double>(s + 1) * dt);
  }
  out.mean_A = sum_a / static_cast<double>(out.tau.size());
  return out;
}

TimeAverage time_average_observable(const SparseOperator& H, std::span<const cplx> psi_in, const SparseOperator& A,
                                    double t1, double t2, double dt, int record_stride) {
  if (t2 <= t1 || t1 < 0.0) throw ValidationError("time_average_observable: need 0 <= t1 < t2");
  std::vector<cplx> psi(psi_in.begin(), psi_in.end());
  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t2;
  cfg.record_stride = record_stride;
  const Trajectory tr = evolve(Generator(H), psi, cfg, &A);

  TimeAverage avg;
  double s = 0.0;
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    if (tr.t[i] >= t1 - 1e-9) {
      s += tr.observable[i];
      ++avg.samples;
    }
  avg.mean = s / static_cast<double>(avg.samples);
  if (t2 - t1 < 20.0) avg.warning = "averaging window shorter than 20/J";
  return avg;
}

}  // namespace puretherm
