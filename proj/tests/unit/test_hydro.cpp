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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "puretherm/errors.hpp"
#include "puretherm/hydro.hpp"

using namespace puretherm;

namespace {

constexpr double kPi = std::numbers::pi;

HydroParams params(int d, double L = 1000.0) {
  HydroParams p;
  p.d = d;
  p.D = 1.0;
  p.chi0 = 1.0;
  p.ell = 1.0;
  p.L = L;
  p.g = 0.2;
  p.T = 5.0;
  return p;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return v;
}

// int_a^inf exp(-ell^2 k^2) / k^2 dk
double tail_integral(double a, double ell) {
  return std::exp(-ell * ell * a * a) / a - ell * std::sqrt(kPi) * std::erfc(ell * a);
}

}  // namespace

TEST_CASE("lattice shell multiplicities") {
  auto p = params(2, 2.0 * kPi);  // k = n
  p.ell = 0.2;
  const auto s2 = mode_shells(p);
  CHECK(s2.k2[0] == doctest::Approx(1.0));
  CHECK(s2.multiplicity[0] == 4);  // (+-1, 0), (0, +-1)
  CHECK(s2.multiplicity[1] == 4);  // (+-1, +-1)
  CHECK(s2.k2[2] == doctest::Approx(4.0));
  p.d = 3;
  const auto s3 = mode_shells(p);
  CHECK(s3.multiplicity[0] == 6);
  CHECK(s3.multiplicity[1] == 12);
  CHECK(s3.multiplicity[2] == 8);
  p.d = 1;
  p.L = 1e10;
  CHECK_THROWS_AS(mode_shells(p), ResourceError);
}

TEST_CASE("response is odd and has the continuum low-frequency exponents") {
  const auto p1 = params(1);
  CHECK(diffusive_response(p1, 0.0) == 0.0);
  CHECK(diffusive_response_continuum(p1, 0.0) == 0.0);
  CHECK(diffusive_response_continuum(p1, -0.01) == doctest::Approx(-diffusive_response_continuum(p1, 0.01)));
  const auto w = logspace(1e-6, 1e-4, 9);
  std::vector<double> c1, c3;
  const auto p3 = params(3);
  for (double x : w) {
    c1.push_back(diffusive_response_continuum(p1, x));
    c3.push_back(diffusive_response_continuum(p3, x));
  }
  CHECK(loglog_slope(w, c1) == doctest::Approx(0.5).epsilon(0.02 / 0.5));
  CHECK(loglog_slope(w, c3) == doctest::Approx(1.0).epsilon(0.01));
  // d = 1: chi'' -> chi0 sqrt(omega / D) / (2 sqrt 2) at small omega
  CHECK(c1.front() == doctest::Approx(std::sqrt(w.front()) / (2.0 * std::sqrt(2.0))).epsilon(1e-2));
  // Mode sum tracks the continuum well above the lowest mode frequency.
  const double om = 0.05;
  CHECK(diffusive_response(p1, om) == doctest::Approx(diffusive_response_continuum(p1, om)).epsilon(1e-2));
}

TEST_CASE("three-dimensional rate") {
  for (double ell : {0.5, 1.0, 3.0}) {
    auto p = params(3);
    p.ell = ell;
    CHECK(renormalized_coupling_sq(p) == doctest::Approx(renormalized_coupling_sq_closed(p)).epsilon(1e-8));
    const double g1 = gamma_3d(p);
    CHECK(g1 * p.D / (2.0 * p.chi0 * p.T) == doctest::Approx(renormalized_coupling_sq(p)).epsilon(1e-14));
    p.T *= 2.0;
    CHECK(gamma_3d(p) == doctest::Approx(2.0 * g1).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gamma_3d(params(1)), ValidationError);
}

TEST_CASE("one-dimensional rate grows linearly with size") {
  auto p = params(1, 1000.0);
  const double pref = 2.0 * p.g * p.g * p.T / (kPi * p.D);
  CHECK(gamma_low_dim(p) == doctest::Approx(pref * tail_integral(2.0 * kPi / p.L, p.ell)).epsilon(1e-9));
  double last = 0.0;
  for (double L : {1e3, 1e4, 1e5}) {
    p.L = L;
    const double g1 = gamma_low_dim(p);
    p.L = 2.0 * L;
    const double ratio = gamma_low_dim(p) / g1;
    CHECK(ratio > 2.0);
    if (last > 0.0) CHECK(ratio < last);
    last = ratio;
  }
  CHECK(last == doctest::Approx(2.0).epsilon(1e-4));
  p.L = 1000.0;
  const double g1 = gamma_low_dim(p);
  p.T *= 3.0;
  CHECK(gamma_low_dim(p) == doctest::Approx(3.0 * g1).epsilon(1e-14));
  p.L = 5.0;
  CHECK_THROWS_AS(gamma_low_dim(p), ValidationError);
}

TEST_CASE("two-dimensional rate grows logarithmically") {
  auto p = params(2);
  const double step = p.g * p.g * p.T * p.chi0 / (kPi * p.D);
  for (double L : {1e4, 1e6}) {
    p.L = L;
    const double hi = gamma_low_dim(p);
    p.L = L / std::exp(1.0);
    CHECK(hi - gamma_low_dim(p) == doctest::Approx(step).epsilon(1e-4));
  }
}

TEST_CASE("noise tails") {
  for (int d : {1, 2, 3}) {
    auto p = params(d);
    const double s1 = noise_tail_continuum(p, 0.0);
    p.ell = 2.0;
    CHECK(s1 / noise_tail_continuum(p, 0.0) == doctest::Approx(std::pow(2.0, d)));
  }
  auto p = params(1, 1e4);
  const double tT = thouless_time(p);
  CHECK(tT == doctest::Approx(p.L * p.L / (4.0 * kPi * kPi * p.D)));
  // Before the knee the mode sum follows the continuum; the k = 0 mode it
  // omits contributes T chi0 / L.
  for (double tau : {0.0, 10.0, 1e3}) {
    const double gap = p.T * p.chi0 / p.L;
    CHECK(noise_tail(p, tau) + gap == doctest::Approx(noise_tail_continuum(p, tau)).epsilon(1e-6));
  }
  const auto taus = logspace(1e2, 1e4, 9);
  std::vector<double> s;
  for (double t : taus) s.push_back(noise_tail_continuum(p, t));
  CHECK(loglog_slope(taus, s) == doctest::Approx(-0.5).epsilon(0.02 / 0.5));
  s.clear();
  for (double t : taus) s.push_back(noise_tail(p, t));
  CHECK(loglog_slope(taus, s) == doctest::Approx(-0.5).epsilon(0.02 / 0.5));
  // After the knee the finite system decays faster than the continuum.
  CHECK(noise_tail(p, 3.0 * tT) < 0.5 * noise_tail_continuum(p, 3.0 * tT));
  CHECK_THROWS_AS(noise_tail(p, -1.0), ValidationError);
}

TEST_CASE("susceptibility sum rule of the mode sum") {
  auto p = params(1, 300.0);
  // Poisson summation: (1/L) sum_n exp(-ell^2 k_n^2) = 1 / (2 sqrt(pi) ell) up to exp(-L^2 / 4 ell^2).
  CHECK(mode_sum_susceptibility(p) + p.chi0 / p.L ==
        doctest::Approx(p.chi0 / (2.0 * std::sqrt(kPi) * p.ell)).epsilon(1e-7));
}

TEST_CASE("zero-frequency noise from time and frequency domains") {
  const auto p = params(1, 100.0);
  // 2 int_0^inf S(tau) d tau on a log grid (substitute tau = e^u).
  const double tT = thouless_time(p);
  const double a = 1e-8, b = 200.0 * tT;
  const int n = 20000;
  const double du = std::log(b / a) / n;
  double s = a * noise_tail(p, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double tau = a * std::exp(i * du);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * noise_tail(p, tau) * tau * du;
  }
  CHECK(p.g * p.g * 2.0 * s == doctest::Approx(gamma_mode_sum(p)).epsilon(1e-2));
}

TEST_CASE("dephasing crossover") {
  auto p = params(1, 1000.0);
  const double tT = thouless_time(p);
  auto grid = logspace(1e-4, 100.0 * tT, 200);
  const auto pts = dephasing_crossover(p, grid);
  REQUIRE(pts.size() == grid.size());
  // Ballistic start: S ~ const, so Gamma ~ t^2.
  CHECK(pts.front().local_slope == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(pts.front().regime == Regime::ballistic);
  // Diffusive window well between ell^2 / D and t_T.
  for (const auto& c : pts)
    if (c.t > 1e3 && c.t < 1e-1 * tT) CHECK(c.local_slope == doctest::Approx(1.5).epsilon(0.1 / 1.5));
  // Exponential regime: slope 1 and rate g^2 S~(0) from the same mode sum.
  const auto& last = pts.back();
  CHECK(last.regime == Regime::exponential);
  CHECK(last.local_slope == doctest::Approx(1.0).epsilon(0.05));
  const double rate = last.local_slope * last.gamma / last.t;
  CHECK(rate == doctest::Approx(gamma_mode_sum(p)).epsilon(1e-2));
  CHECK_THROWS_AS(dephasing_crossover(p, logspace(1.0, 0.5 * tT, 10)), ValidationError);
  CHECK(std::string(regime_name(Regime::diffusive)) == "diffusive");
}

TEST_CASE("parameter validation") {
  auto p = params(4);
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = params(1);
  p.D = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = params(1, 5.0);
  CHECK(p.warning().has_value());
  CHECK_FALSE(params(1).warning().has_value());
}
