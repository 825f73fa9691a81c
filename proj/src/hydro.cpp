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

#include "puretherm/hydro.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>

#include "puretherm/errors.hpp"

namespace puretherm {

namespace {

constexpr double kPi = std::numbers::pi;

double weight(const HydroParams& p, double k2) { return std::exp(-p.ell * p.ell * k2); }

double volume(const HydroParams& p) { return std::pow(p.L, p.d); }

// Surface of the unit sphere over (2 pi)^d.
double radial_measure(int d) {
  switch (d) {
    case 1: return 2.0 / (2.0 * kPi);
    case 2: return 2.0 * kPi / (4.0 * kPi * kPi);
    default: return 4.0 * kPi / (8.0 * kPi * kPi * kPi);
  }
}

// GSL adaptive integration of f over [a, inf).
double integrate_to_infinity(const std::function<double(double)>& f, double a, double rel = 1e-11) {
  gsl_set_error_handler_off();
  struct Ctx {
    const std::function<double(double)>* f;
  } ctx{&f};
  gsl_function F;
  F.function = [](double x, void* c) { return (*static_cast<Ctx*>(c)->f)(x); };
  F.params = &ctx;
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(2000), &gsl_integration_workspace_free);
  double result = 0.0, err = 0.0;
  const int status = gsl_integration_qagiu(&F, a, 0.0, rel, 2000, ws.get(), &result, &err);
  if (status != GSL_SUCCESS && std::abs(err) > 1e-6 * std::abs(result))
    throw NumericalError(std::string("hydro quadrature failed: ") + gsl_strerror(status));
  return result;
}

}  // namespace

void HydroParams::validate() const {
  if (d < 1 || d > 3) throw ValidationError("hydro: dimension must be 1, 2 or 3");
  if (!(D > 0.0) || !(chi0 > 0.0) || !(ell > 0.0) || !(L > 0.0) || !(g > 0.0) || !(T > 0.0))
    throw ValidationError("hydro: D, chi0, ell, L, g and T must be positive");
}

std::optional<std::string> HydroParams::warning() const {
  if (ell > L / 10.0) return "probe width ell exceeds L / 10; mode sums are far from the continuum";
  return std::nullopt;
}

ModeShells mode_shells(const HydroParams& p) {
  p.validate();
  const double k_unit = 2.0 * kPi / p.L;
  // exp(-ell^2 k^2) >= cutoff  <=>  |n| <= n_max
  const double k_max = std::sqrt(-std::log(kModeCutoff)) / p.ell;
  const auto n_max = static_cast<long>(std::floor(k_max / k_unit));
  const auto m_max = static_cast<std::size_t>(n_max * n_max);
  if (m_max > 50'000'000) throw ResourceError("hydro: mode lattice too large (L / ell too big)");

  // r_1(m): number of integers n with n^2 = m; r_d by convolution.
  std::vector<double> r1(m_max + 1, 0.0);
  r1[0] = 1.0;
  for (long n = 1; n <= n_max; ++n) r1[static_cast<std::size_t>(n * n)] = 2.0;
  std::vector<double> rd = r1;
  for (int dim = 2; dim <= p.d; ++dim) {
    std::vector<double> next(m_max + 1, 0.0);
    for (std::size_t m = 0; m <= m_max; ++m) {
      if (rd[m] == 0.0) continue;
      for (long n = 0; n <= n_max; ++n) {
        const std::size_t s = m + static_cast<std::size_t>(n * n);
        if (s > m_max) break;
        next[s] += rd[m] * r1[static_cast<std::size_t>(n * n)];
      }
    }
    rd.swap(next);
  }
  ModeShells shells;
  for (std::size_t m = 1; m <= m_max; ++m)
    if (rd[m] > 0.0) {
      shells.k2.push_back(k_unit * k_unit * static_cast<double>(m));
      shells.multiplicity.push_back(rd[m]);
    }
  return shells;
}

double diffusive_response(const HydroParams& p, double omega) {
  if (omega == 0.0) return 0.0;
  const auto shells = mode_shells(p);
  double s = 0.0;
  for (std::size_t i = 0; i < shells.k2.size(); ++i) {
    const double r = p.D * shells.k2[i];
    s += shells.multiplicity[i] * weight(p, shells.k2[i]) * r * omega / (omega * omega + r * r);
  }
  return p.chi0 * s / volume(p);
}

double diffusive_response_continuum(const HydroParams& p, double omega) {
  p.validate();
  if (omega == 0.0) return 0.0;
  const double w = std::abs(omega);
  // Substitute k = q sqrt(w / D) so the Lorentzian peak sits at q = 1.
  const double ks = std::sqrt(w / p.D);
  const auto f = [&](double q) {
    const double k = q * ks;
    const double r = p.D * k * k;
    return std::pow(k, p.d - 1) * weight(p, k * k) * r * w / (w * w + r * r) * ks;
  };
  const double v = p.chi0 * radial_measure(p.d) * integrate_to_infinity(f, 0.0);
  return omega > 0.0 ? v : -v;
}

double renormalized_coupling_sq(const HydroParams& p) {
  p.validate();
  const auto f = [&](double k) { return 4.0 * kPi * weight(p, k * k); };
  return p.g * p.g * integrate_to_infinity(f, 0.0, 1e-13) / (8.0 * kPi * kPi * kPi);
}

double renormalized_coupling_sq_closed(const HydroParams& p) {
  return p.g * p.g * std::sqrt(kPi) / (4.0 * kPi * kPi * p.ell);
}

double gamma_3d(const HydroParams& p) {
  if (p.d != 3) throw ValidationError("gamma_3d: requires d = 3");
  return 2.0 * renormalized_coupling_sq(p) * p.chi0 * p.T / p.D;
}

double gamma_low_dim(const HydroParams& p) {
  p.validate();
  if (p.d == 3) throw ValidationError("gamma_low_dim: requires d = 1 or 2");
  if (p.L < 10.0 * p.ell) throw ValidationError("gamma_low_dim: L < 10 ell is outside the asymptotic regime");
  const double k_min = 2.0 * kPi / p.L;
  if (p.d == 1) {
    const auto f = [&](double k) { return p.chi0 * weight(p, k * k) / (k * k); };
    return 2.0 * p.g * p.g * p.T / (kPi * p.D) * integrate_to_infinity(f, k_min);
  }
  return p.g * p.g * p.T * p.chi0 / (kPi * p.D) * 0.5 * gsl_sf_expint_E1(p.ell * p.ell * k_min * k_min);
}

double gamma_mode_sum(const HydroParams& p) {
  const auto shells = mode_shells(p);
  double s = 0.0;
  for (std::size_t i = 0; i < shells.k2.size(); ++i)
    s += shells.multiplicity[i] * weight(p, shells.k2[i]) / (p.D * shells.k2[i]);
  const double s0 = 2.0 * p.T * p.chi0 * s / volume(p);
  return p.g * p.g * s0;
}

double noise_tail(const HydroParams& p, double tau) {
  if (tau < 0.0) throw ValidationError("noise_tail: tau must be non-negative");
  const auto shells = mode_shells(p);
  double s = 0.0;
  for (std::size_t i = 0; i < shells.k2.size(); ++i)
    s += shells.multiplicity[i] * weight(p, shells.k2[i]) * std::exp(-p.D * shells.k2[i] * tau);
  return p.T * p.chi0 * s / volume(p);
}

double noise_tail_continuum(const HydroParams& p, double tau) {
  p.validate();
  if (tau < 0.0) throw ValidationError("noise_tail_continuum: tau must be non-negative");
  return p.T * p.chi0 * std::pow(4.0 * kPi * (p.ell * p.ell + p.D * tau), -0.5 * p.d);
}

double mode_sum_susceptibility(const HydroParams& p) {
  const auto shells = mode_shells(p);
  double s = 0.0;
  for (std::size_t i = 0; i < shells.k2.size(); ++i) s += shells.multiplicity[i] * weight(p, shells.k2[i]);
  return p.chi0 * s / volume(p);
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::ballistic: return "ballistic";
    case Regime::diffusive: return "diffusive";
    case Regime::exponential: return "exponential";
  }
  return "unknown";
}

double thouless_time(const HydroParams& p) {
  p.validate();
  const double k_min = 2.0 * kPi / p.L;
  return 1.0 / (p.D * k_min * k_min);
}

std::vector<CrossoverPoint> dephasing_crossover(const HydroParams& p, const std::vector<double>& t_grid) {
  const double t_th = thouless_time(p);
  if (t_grid.empty() || t_grid.front() >= t_th || t_grid.back() <= t_th)
    throw ValidationError("dephasing_crossover: time grid must span the Thouless time " + std::to_string(t_th));
  const auto shells = mode_shells(p);
  const double pref = 2.0 * p.g * p.g * p.T * p.chi0 / volume(p);
  const double t_ballistic = p.ell * p.ell / p.D;
  std::vector<CrossoverPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ValidationError("dephasing_crossover: times must be positive");
    double gam = 0.0, dgam = 0.0;
    for (std::size_t i = 0; i < shells.k2.size(); ++i) {
      const double r = p.D * shells.k2[i];
      const double x = r * t;
      const double w = shells.multiplicity[i] * weight(p, shells.k2[i]);
      // int_0^t (t - tau) e^{-r tau} d tau and its t-derivative; series for small r t.
      double prim, dprim;
      if (x < 1e-4) {
        prim = t * t * (0.5 - x / 6.0 + x * x / 24.0);
        dprim = t * (1.0 - 0.5 * x + x * x / 6.0);
      } else {
        prim = t / r - (-std::expm1(-x)) / (r * r);
        dprim = -std::expm1(-x) / r;
      }
      gam += w * prim;
      dgam += w * dprim;
    }
    CrossoverPoint c;
    c.t = t;
    c.gamma = pref * gam;
    c.local_slope = t * dgam / gam;
    c.regime = t < t_ballistic ? Regime::ballistic : (t < t_th ? Regime::diffusive : Regime::exponential);
    out.push_back(c);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace puretherm
