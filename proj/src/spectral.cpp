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

#include "puretherm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "puretherm/errors.hpp"

namespace puretherm {

namespace {

double interp(const std::vector<double>& x, const std::vector<double>& y, double v) {
  if (x.empty() || v < x.front() || v > x.back()) return 0.0;
  const auto it = std::upper_bound(x.begin(), x.end(), v);
  if (it == x.end()) return y.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  if (i == 0) return y.front();
  const double f = (v - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + f * (y[i] - y[i - 1]);
}

// Composite Simpson on a uniform grid; an odd interval count closes with the
// 3/8 rule on the last three intervals, and two intervals or fewer fall back
// to the trapezoid.
double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n < 4) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < n; ++i) s += f[i];
    return s * h;
  }
  const std::size_t intervals = n - 1;
  const std::size_t even = intervals % 2 == 0 ? intervals : intervals - 3;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) s += f[i] + 4.0 * f[i + 1] + f[i + 2];
  s *= h / 3.0;
  if (even != intervals) s += 3.0 * h / 8.0 * (f[even] + 3.0 * f[even + 1] + 3.0 * f[even + 2] + f[even + 3]);
  return s;
}

}  // namespace

double SpectralData::noise_at(double w) const { return interp(omega, noise, w); }
double SpectralData::response_at(double w) const { return interp(omega, response, w); }

SpectralData fourier_noise_response(const CorrelationSeries& C, const FourierOptions& opts) {
  if (C.tau.size() < 2) throw ValidationError("fourier_noise_response: need at least two correlation samples");
  if (!(opts.tau_star > 0.0) || !(opts.d_omega > 0.0) || !(opts.omega_max > 0.0))
    throw ValidationError("fourier_noise_response: tau_star, d_omega and omega_max must be positive");
  const double h = C.tau[1] - C.tau[0];
  if (h > opts.max_tau_step + 1e-12)
    throw ValidationError("fourier_noise_response: correlation step " + std::to_string(h) +
                          " is coarser than the aliasing guard " + std::to_string(opts.max_tau_step));
  if (std::abs(C.tau.front()) > 1e-12) throw ValidationError("fourier_noise_response: tau grid must start at 0");
  if (C.tau.back() < opts.tau_star - 1e-9)
    throw ValidationError("fourier_noise_response: tau grid does not cover [0, tau_star]");

  SpectralData out;
  out.tau_star = opts.tau_star;
  for (std::size_t i = 0; i < C.tau.size() && C.tau[i] <= opts.tau_star + 1e-9; ++i) {
    out.source_tau.push_back(C.tau[i]);
    out.source_values.push_back(C.values[i]);
  }

  const auto half = static_cast<long>(std::llround(opts.omega_max / opts.d_omega));
  const std::size_t m = out.source_tau.size();
  std::vector<double> w_re(m), w_im(m);
  for (long k = -half; k <= half; ++k) {
    const double w = static_cast<double>(k) * opts.d_omega;
    for (std::size_t i = 0; i < m; ++i) {
      const double tau = out.source_tau[i];
      w_re[i] = out.source_values[i].real() * std::cos(w * tau);
      w_im[i] = out.source_values[i].imag() * std::sin(w * tau);
    }
    out.omega.push_back(w);
    out.noise.push_back(2.0 * simpson(w_re, h));
    out.response.push_back(-2.0 * simpson(w_im, h));
  }
  return out;
}

BetaFit fit_beta_fdt(const SpectralData& spec, double omega_max) {
  if (!(omega_max > 0.0)) throw ValidationError("fit_beta_fdt: omega_max must be positive");
  double s_max = 0.0;
  for (double s : spec.noise) s_max = std::max(s_max, std::abs(s));
  const double floor = 1e-3 * s_max;

  BetaFit fit;
  fit.omega_max_used = omega_max;
  // Shrink the range until S~ stays clear of zero on it.
  for (std::size_t i = 0; i < spec.omega.size(); ++i)
    if (std::abs(spec.omega[i]) <= fit.omega_max_used && spec.noise[i] <= floor)
      fit.omega_max_used = std::min(fit.omega_max_used, std::abs(spec.omega[i]) - 1e-12);
  if (fit.omega_max_used < omega_max)
    fit.flag = "noise spectrum near zero; fit range shrunk to |omega| <= " + std::to_string(fit.omega_max_used);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < spec.omega.size(); ++i) {
    const double w = spec.omega[i];
    if (std::abs(w) > fit.omega_max_used) continue;
    const double r = spec.ratio_at(i);
    sx += w;
    sy += r;
    sxx += w * w;
    sxy += w * r;
    ++n;
  }
  if (n < 3) throw NumericalError("fit_beta_fdt: fewer than three usable frequencies");
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  fit.slope = (dn * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / dn;
  fit.beta = 2.0 * fit.slope;
  fit.samples = n;
  return fit;
}

double zero_frequency_noise(const SpectralData& spec) {
  if (spec.source_tau.size() >= 2) {
    std::vector<double> re(spec.source_values.size());
    for (std::size_t i = 0; i < re.size(); ++i) re[i] = spec.source_values[i].real();
    return 2.0 * simpson(re, spec.source_tau[1] - spec.source_tau[0]);
  }
  return spec.noise_at(0.0);
}

double thermodynamic_susceptibility(const SpectralData& spec) {
  const std::size_t n = spec.omega.size();
  if (n < 3) return 0.0;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = spec.omega[i];
    if (std::abs(w) > 1e-14) {
      f[i] = spec.response[i] / w;
    } else if (i >= 2 && i + 2 < n) {
      // removable singularity: chi''/omega is even, so Richardson-extrapolate
      // the symmetric difference quotients at h and 2h.
      const double q1 = (spec.response[i + 1] - spec.response[i - 1]) / (spec.omega[i + 1] - spec.omega[i - 1]);
      const double q2 = (spec.response[i + 2] - spec.response[i - 2]) / (spec.omega[i + 2] - spec.omega[i - 2]);
      f[i] = (4.0 * q1 - q2) / 3.0;
    } else {
      const std::size_t lo = i == 0 ? i : i - 1;
      const std::size_t hi = i + 1 == n ? i : i + 1;
      f[i] = (spec.response[hi] - spec.response[lo]) / (spec.omega[hi] - spec.omega[lo]);
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += 0.5 * (f[i] + f[i + 1]) * (spec.omega[i + 1] - spec.omega[i]);
  return s / std::numbers::pi;
}

double thermodynamic_susceptibility_time(const SpectralData& spec) {
  if (spec.source_tau.size() < 2) throw ValidationError("thermodynamic_susceptibility_time: no correlation samples");
  std::vector<double> im(spec.source_values.size());
  for (std::size_t i = 0; i < im.size(); ++i) im[i] = spec.source_values[i].imag();
  return -2.0 * simpson(im, spec.source_tau[1] - spec.source_tau[0]);
}

}  // namespace puretherm
