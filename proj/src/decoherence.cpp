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

#include "puretherm/decoherence.hpp"

#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "puretherm/errors.hpp"
#include "puretherm/propagator.hpp"

namespace puretherm {

namespace {

constexpr double kPi = std::numbers::pi;

// Simpson's rule of f on [0, b] with an even number of panels of width <= h_max.
template <typename F>
double simpson(F&& f, double b, double h_max) {
  auto n = static_cast<long>(std::ceil(b / h_max));
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double h = b / static_cast<double>(n);
  double s = f(0.0) + f(b);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(static_cast<double>(i) * h);
  return s * h / 3.0;
}

// int_a^inf sin^2 x / x^2 dx
double sinc2_tail(double a) {
  if (a <= 0.0) return 0.5 * kPi;
  const double s = std::sin(a);
  return s * s / a + 0.5 * kPi - gsl_sf_Si(2.0 * a);
}

}  // namespace

DecoherenceTrace exact_decoherence(const SparseOperator& H, const SparseOperator& A, double g,
                                   std::span<const cplx> psi_t0, double t_max, const DecoherenceOptions& opts) {
  if (psi_t0.size() != H.dim()) throw ValidationError("exact_decoherence: state dimension mismatch");
  if (!(t_max >= 0.0)) throw ValidationError("exact_decoherence: t_max must be non-negative");
  if (opts.record_stride < 1) throw ValidationError("exact_decoherence: record_stride must be >= 1");

  EvolutionConfig cfg;
  cfg.dt = opts.dt;
  cfg.t_end = t_max;
  cfg.validate();
  const long steps = cfg.steps();

  Generator plain(H);
  Generator perturbed(H);
  perturbed.add_static(A, g);
  const auto f0 = plain.as_function();
  const auto f1 = perturbed.as_function();

  std::vector<cplx> a(psi_t0.begin(), psi_t0.end());
  std::vector<cplx> b = a;
  Rk4Workspace wa(a.size()), wb(b.size());
  const auto& k = simd::active();

  DecoherenceTrace tr;
  tr.g = g;
  tr.source = TraceSource::exact;
  const double h = t_max / static_cast<double>(std::max<long>(steps, 1));
  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.v.push_back(k.dotc(a.size(), a.data(), b.data()));
  };
  record(0.0);
  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * h;
    rk4_step(f0, a, t, h, wa);
    rk4_step(f1, b, t, h, wb);
    if (opts.renormalize) {
      k.scale(a.size(), 1.0 / std::sqrt(k.norm2(a.size(), a.data())), a.data());
      k.scale(b.size(), 1.0 / std::sqrt(k.norm2(b.size(), b.data())), b.data());
    }
    if ((s + 1) % opts.record_stride == 0 || s + 1 == steps) record(static_cast<double>(s + 1) * h);
  }
  return tr;
}

DecoherenceTrace CumulantTrace::as_trace() const {
  DecoherenceTrace tr;
  tr.t = t;
  tr.g = g;
  tr.source = TraceSource::cumulant;
  tr.v.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) tr.v.push_back(std::exp(cplx(-0.5 * gamma[i], -phi[i])));
  return tr;
}

CumulantTrace cumulant_gamma_phi(const SpectralData& spec, double mean_A, double g, const std::vector<double>& t) {
  if (spec.omega.size() < 3) throw ValidationError("cumulant_gamma_phi: spectral grid too small");
  const double w_max = std::min(std::abs(spec.omega.front()), std::abs(spec.omega.back()));
  const double d_grid = spec.omega[1] - spec.omega[0];
  const double s_edge = 0.5 * (spec.noise.front() + spec.noise.back());

  CumulantTrace out;
  out.g = g;
  out.t = t;
  out.gamma.resize(t.size());
  out.phi.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ti = t[i];
    if (ti == 0.0) continue;
    // Resolve the kernel oscillation (period 2 pi / t) with >= 16 points.
    const double h = std::min(d_grid, kPi / (8.0 * std::abs(ti)));
    const auto kernel_g = [&](double w) {
      if (std::abs(w) * std::abs(ti) < 1e-6) return spec.noise_at(w) * ti * ti / 4.0;
      const double s = std::sin(0.5 * w * ti);
      return spec.noise_at(w) * s * s / (w * w);
    };
    const auto kernel_p = [&](double w) {
      const double x = w * ti;
      if (std::abs(x) < 1e-4) return -spec.response_at(w) * w * ti * ti * ti / 6.0;
      return spec.response_at(w) * (std::sin(x) - x) / (w * w);
    };
    // Both integrands are even in omega: integrate [0, w_max] twice.
    double gam = 2.0 * simpson(kernel_g, w_max, h);
    gam += 2.0 * s_edge * 0.5 * std::abs(ti) * sinc2_tail(0.5 * w_max * std::abs(ti));
    out.gamma[i] = 4.0 * g * g * gam / (2.0 * kPi);
    const double ph = 2.0 * simpson(kernel_p, w_max, h);
    out.phi[i] = g * ti * mean_A + g * g * ph / (2.0 * kPi);
  }
  return out;
}

AsymptoticRates asymptotic_rates(const SpectralData& spec, double mean_A, double g) {
  AsymptoticRates r;
  r.gamma = g * g * zero_frequency_noise(spec);
  r.phi_dot = g * mean_A - 0.5 * g * g * thermodynamic_susceptibility(spec);
  return r;
}

RateFit fit_exponential_rate(const DecoherenceTrace& trace, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  RateFit fit;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    const double p = std::norm(trace.v[i]);
    if (p < lo || p > hi) continue;
    const double x = trace.t[i], y = std::log(p);
    if (fit.samples == 0) fit.t_first = x;
    fit.t_last = x;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.samples;
  }
  if (fit.samples < 3) throw NumericalError("fit_exponential_rate: fewer than three samples in the |v|^2 window");
  const double n = static_cast<double>(fit.samples);
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.rate = -slope;
  fit.intercept = (sy - slope * sx) / n;
  return fit;
}

double qubit_entropy(cplx v) {
  const double r = std::abs(v);
  if (!(r <= 1.0 + 1e-9))
    throw NumericalError("qubit_entropy: |v| = " + std::to_string(r) + " violates |v| <= 1");
  const QubitState q{v};
  double s = 0.0;
  for (double l : {q.lambda_plus(), q.lambda_minus()}) {
    const double c = std::clamp(l, 0.0, 1.0);
    if (c > 0.0) s -= c * std::log(c);
  }
  return s;
}

double ramsey_signal(cplx v, double theta) {
  return 0.5 * (1.0 + (std::exp(cplx(0.0, theta)) * v).real());
}

cplx ramsey_reconstruct(const std::vector<double>& p_up) {
  if (p_up.size() < 3) throw ValidationError("ramsey_reconstruct: need at least three phase samples");
  const double n = static_cast<double>(p_up.size());
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < p_up.size(); ++k) {
    const double th = 2.0 * kPi * static_cast<double>(k) / n;
    const double c = 2.0 * p_up[k] - 1.0;  // Re v cos th - Im v sin th
    re += c * std::cos(th);
    im -= c * std::sin(th);
  }
  return {2.0 * re / n, 2.0 * im / n};
}

}  // namespace puretherm
