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

#include "puretherm/metrology.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "puretherm/errors.hpp"

namespace puretherm {

QfiParts qfi_decomposition(double abs_v, double /*phi*/, double d_abs_v, double d_phi) {
  if (!(abs_v >= 0.0)) throw ValidationError("qfi_decomposition: |v| must be non-negative");
  const double r = std::min(abs_v, 1.0 - 1e-9);
  QfiParts q;
  q.parallel = d_abs_v * d_abs_v / (1.0 - r * r);
  q.perpendicular = r * r * d_phi * d_phi;
  q.total = q.parallel + q.perpendicular;
  return q;
}

SldAngle sld_angle(double abs_v, double d_abs_v, double d_phi) {
  SldAngle s;
  if (d_abs_v == 0.0) {
    s.undefined = d_phi == 0.0;
    s.angle = std::numbers::pi / 2.0;
    return s;
  }
  const double one_minus = 1.0 - abs_v;
  s.angle = std::atan(abs_v * one_minus * one_minus * d_phi / d_abs_v);
  return s;
}

OptimalTime optimal_time(const std::vector<double>& t, const std::vector<double>& f) {
  if (t.size() != f.size() || t.empty()) throw ValidationError("optimal_time: need matching non-empty samples");
  OptimalTime o;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i] > f[o.index]) o.index = i;
  o.t_star = t[o.index];
  o.value = f[o.index];
  o.on_boundary = o.index == 0 || o.index + 1 == f.size();
  if (o.on_boundary) return o;
  const double x0 = t[o.index - 1], x1 = t[o.index], x2 = t[o.index + 1];
  const double y0 = f[o.index - 1], y1 = f[o.index], y2 = f[o.index + 1];
  const double den = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
  if (a < 0.0) {
    const double xv = -b / (2.0 * a);
    if (xv > x0 && xv < x2) {
      o.t_star = xv;
      o.value = y1 + (a * (xv - x1) + (2.0 * a * x1 + b)) * (xv - x1);
      o.value = std::max(o.value, y1);
    }
  }
  return o;
}

ErrorBudget error_budget(double t2_fisher, double repetitions) {
  if (!(repetitions >= 1.0)) throw ValidationError("error_budget: need at least one repetition");
  ErrorBudget e;
  if (!(t2_fisher > 0.0)) {
    e.unbounded = true;
    e.relative_error = std::numeric_limits<double>::infinity();
    return e;
  }
  e.relative_error = 1.0 / std::sqrt(repetitions * t2_fisher);
  return e;
}

struct ThermometryCurve::Splines {
  gsl_interp_accel* acc = nullptr;
  gsl_spline* gamma = nullptr;
  gsl_spline* phi = nullptr;
  ~Splines() {
    if (gamma) gsl_spline_free(gamma);
    if (phi) gsl_spline_free(phi);
    if (acc) gsl_interp_accel_free(acc);
  }
};

ThermometryCurve::ThermometryCurve(std::vector<double> temperatures, std::vector<double> gamma,
                                   std::vector<double> phi_dot)
    : temps_(std::move(temperatures)), s_(std::make_unique<Splines>()) {
  const std::size_t n = temps_.size();
  if (n < 2 || gamma.size() != n || phi_dot.size() != n)
    throw ValidationError("ThermometryCurve: need at least two matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(temps_[i] > temps_[i - 1])) throw ValidationError("ThermometryCurve: temperatures must increase strictly");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(gamma[i]) || !std::isfinite(phi_dot[i]))
      throw NumericalError("ThermometryCurve: non-finite rate");
  gsl_set_error_handler_off();
  s_->acc = gsl_interp_accel_alloc();
  const gsl_interp_type* kind = n >= 3 ? gsl_interp_cspline : gsl_interp_linear;
  s_->gamma = gsl_spline_alloc(kind, n);
  s_->phi = gsl_spline_alloc(kind, n);
  gsl_spline_init(s_->gamma, temps_.data(), gamma.data(), n);
  gsl_spline_init(s_->phi, temps_.data(), phi_dot.data(), n);
}

ThermometryCurve::~ThermometryCurve() = default;
ThermometryCurve::ThermometryCurve(ThermometryCurve&&) noexcept = default;
ThermometryCurve& ThermometryCurve::operator=(ThermometryCurve&&) noexcept = default;

namespace {
void check_range(const std::vector<double>& t, double T) {
  if (T < t.front() || T > t.back()) throw ValidationError("ThermometryCurve: temperature outside the grid");
}
}  // namespace

double ThermometryCurve::gamma(double T) const {
  check_range(temps_, T);
  return gsl_spline_eval(s_->gamma, T, s_->acc);
}
double ThermometryCurve::phi_dot(double T) const {
  check_range(temps_, T);
  return gsl_spline_eval(s_->phi, T, s_->acc);
}
double ThermometryCurve::d_gamma(double T) const {
  check_range(temps_, T);
  return gsl_spline_eval_deriv(s_->gamma, T, s_->acc);
}
double ThermometryCurve::d_phi_dot(double T) const {
  check_range(temps_, T);
  return gsl_spline_eval_deriv(s_->phi, T, s_->acc);
}
double ThermometryCurve::d_gamma_fd(double T, double dT) const {
  const double hi = std::min(T + dT, temps_.back());
  const double lo = hi - dT;
  return (gamma(hi) - gamma(lo)) / dT;
}
double ThermometryCurve::d_phi_dot_fd(double T, double dT) const {
  const double hi = std::min(T + dT, temps_.back());
  const double lo = hi - dT;
  return (phi_dot(hi) - phi_dot(lo)) / dT;
}

QfiParts ThermometryCurve::fisher(double T, double t) const {
  const double r = std::exp(-0.5 * gamma(T) * t);
  const double dr = -0.5 * d_gamma(T) * t * r;
  const double dphi = d_phi_dot(T) * t;
  return qfi_decomposition(r, phi_dot(T) * t, dr, dphi);
}

FisherOptimum optimize_fisher(const ThermometryCurve& curve, double T, const std::vector<double>& t_grid) {
  std::vector<double> fq(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) fq[i] = curve.fisher(T, t_grid[i]).total;
  const auto o = optimal_time(t_grid, fq);
  FisherOptimum out;
  out.temperature = T;
  out.t_star = o.t_star;
  out.on_boundary = o.on_boundary;
  out.at_t_star = curve.fisher(T, o.t_star);
  out.t2_f_parallel = T * T * out.at_t_star.parallel;
  return out;
}

double exponential_model_optimum() {
  // Root of 2 (1 - e^{-x}) - x on (1, 2) by bisection.
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (2.0 * (1.0 - std::exp(-mid)) - mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

EstimatorStats simulate_ramsey_estimator(const std::function<double(double)>& contrast, double T_true, double t_lo,
                                         double t_hi, std::size_t shots, std::size_t trials, std::uint64_t seed) {
  if (shots == 0 || trials < 2) throw ValidationError("simulate_ramsey_estimator: need shots and >= 2 trials");
  if (!(t_lo < T_true && T_true < t_hi)) throw ValidationError("simulate_ramsey_estimator: T_true outside bracket");
  const double c_lo = contrast(t_lo), c_hi = contrast(t_hi);
  const bool decreasing = c_hi < c_lo;
  std::mt19937_64 gen(seed);
  std::binomial_distribution<std::size_t> draw(shots, 0.5 * (1.0 + contrast(T_true)));
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const double p_hat = static_cast<double>(draw(gen)) / static_cast<double>(shots);
    const double c_hat = 2.0 * p_hat - 1.0;
    // Invert the monotone contrast; clamp to the bracket when out of range.
    double lo = t_lo, hi = t_hi;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      const bool above = contrast(mid) > c_hat;
      if (above == decreasing)
        lo = mid;
      else
        hi = mid;
    }
    const double T_hat = 0.5 * (lo + hi);
    s1 += T_hat;
    s2 += T_hat * T_hat;
  }
  EstimatorStats st;
  st.trials = trials;
  const double n = static_cast<double>(trials);
  st.mean = s1 / n;
  st.variance = (s2 - s1 * s1 / n) / (n - 1.0);
  return st;
}

}  // namespace puretherm
