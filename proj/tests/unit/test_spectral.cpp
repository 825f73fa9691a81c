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
#include <functional>
#include <numbers>

#include "puretherm/errors.hpp"
#include "puretherm/spectral.hpp"

using namespace puretherm;

namespace {

constexpr double kPi = std::numbers::pi;

CorrelationSeries sample(const std::function<cplx(double)>& c, double tau_max = 10.0, double dt = 0.01) {
  CorrelationSeries s;
  s.dt = dt;
  const auto n = static_cast<long>(std::llround(tau_max / dt));
  for (long i = 0; i <= n; ++i) {
    s.tau.push_back(i * dt);
    s.values.push_back(c(i * dt));
  }
  return s;
}

// C(tau) = (1/2 pi) int d omega e^{-i omega tau} [S(omega) + X(omega)] by
// Simpson's rule, with S even and X odd.
cplx synthesize(const std::function<double(double)>& S, const std::function<double(double)>& X, double tau) {
  const double W = 40.0;
  const int n = 16000;
  const double h = 2.0 * W / n;
  double re = 0.0, im = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = -W + k * h;
    const double wt = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    re += wt * std::cos(w * tau) * S(w);
    im -= wt * std::sin(w * tau) * X(w);
  }
  return cplx(re, im) * (h / 3.0) / (2.0 * kPi);
}

}  // namespace

TEST_CASE("exponential correlation gives a Lorentzian") {
  const auto spec = fourier_noise_response(sample([](double t) { return cplx(std::exp(-t), 0.0); }));
  const double tau_star = 10.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.omega.size(); ++i) {
    const double w = spec.omega[i];
    if (std::abs(w) > 2.0) continue;
    worst = std::max(worst, std::abs(spec.noise[i] - 2.0 / (1.0 + w * w)));
    // With the cutoff term the agreement is limited only by quadrature.
    const double cut = 2.0 / (1.0 + w * w) *
                       (1.0 - std::exp(-tau_star) * (std::cos(w * tau_star) - w * std::sin(w * tau_star)));
    CHECK(std::abs(spec.noise[i] - cut) < 2e-5);
    CHECK(spec.response[i] == 0.0);
  }
  CHECK(worst < 1e-3);
  CHECK(zero_frequency_noise(spec) == doctest::Approx(2.0 * (1.0 - std::exp(-tau_star))).epsilon(1e-5));
}

TEST_CASE("zero correlation") {
  const auto spec = fourier_noise_response(sample([](double) { return cplx{}; }));
  CHECK(zero_frequency_noise(spec) == 0.0);
  CHECK(thermodynamic_susceptibility(spec) == 0.0);
}

TEST_CASE("FDT fit recovers a synthetic temperature") {
  for (double beta : {0.2, 0.5}) {
    CAPTURE(beta);
    auto X = [](double w) { return w * std::exp(-w * w / 4.0); };
    auto S = [&](double w) {
      const double x = 0.5 * beta * w;
      return std::abs(x) < 1e-12 ? 2.0 / beta * std::exp(-w * w / 4.0) : X(w) / std::tanh(x);
    };
    const auto C = sample([&](double t) { return synthesize(S, X, t); });
    const auto spec = fourier_noise_response(C);
    const BetaFit fit = fit_beta_fdt(spec, 2.0);
    CHECK_FALSE(fit.flag.has_value());
    // tanh(beta w / 2) is not exactly linear; the least-squares slope of tanh
    // over |w| <= 2 is the reference.
    double sxx = 0, sxy = 0;
    for (double w = -2.0; w <= 2.0 + 1e-9; w += 0.01) {
      sxx += w * w;
      sxy += w * std::tanh(0.5 * beta * w);
    }
    const double expected = 2.0 * sxy / sxx;
    CHECK(fit.beta == doctest::Approx(expected).epsilon(1e-3));
    if (beta < 0.3) CHECK(fit.beta == doctest::Approx(beta).epsilon(0.01));
    CHECK(std::abs(fit.intercept) < 1e-8);
  }
}

TEST_CASE("real even correlation has zero temperature slope") {
  const auto spec = fourier_noise_response(sample([](double t) { return cplx(std::exp(-t * t), 0.0); }));
  for (double r : spec.response) CHECK(r == 0.0);
  CHECK(fit_beta_fdt(spec).beta == 0.0);
}

TEST_CASE("susceptibility of a Gaussian response") {
  SpectralData spec;
  for (long k = -3000; k <= 3000; ++k) {
    const double w = k * 0.01;
    spec.omega.push_back(w);
    spec.response.push_back(w * std::exp(-w * w));
    spec.noise.push_back(1.0);
  }
  CHECK(thermodynamic_susceptibility(spec) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-8));
  std::fill(spec.response.begin(), spec.response.end(), 0.0);
  CHECK(thermodynamic_susceptibility(spec) == 0.0);
}

TEST_CASE("time and frequency routes to the susceptibility agree") {
  // Im C for chi'' = omega exp(-omega^2): -(tau / 4 sqrt(pi)) exp(-tau^2 / 4)
  const auto C = sample([](double t) {
    return cplx(std::exp(-t * t / 4.0), -t / (4.0 * std::sqrt(kPi)) * std::exp(-t * t / 4.0));
  });
  const auto spec = fourier_noise_response(C);
  const double time_route = thermodynamic_susceptibility_time(spec);
  CHECK(time_route == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-6));
  CHECK(std::abs(thermodynamic_susceptibility(spec) - time_route) < 1e-6);
  // chi'' is recovered pointwise.
  for (double w : {0.5, 1.0, 2.0}) CHECK(spec.response_at(w) == doctest::Approx(w * std::exp(-w * w)).epsilon(1e-6));
}

TEST_CASE("fit range shrinks where the noise vanishes") {
  SpectralData spec;
  for (long k = -300; k <= 300; ++k) {
    const double w = k * 0.01;
    spec.omega.push_back(w);
    spec.noise.push_back(std::max(0.0, 1.0 - w * w));
    spec.response.push_back(std::tanh(0.1 * w) * spec.noise.back());
  }
  const BetaFit fit = fit_beta_fdt(spec, 2.0);
  REQUIRE(fit.flag.has_value());
  CHECK(fit.omega_max_used < 1.0);
  CHECK(fit.beta == doctest::Approx(0.2).epsilon(0.01));
}

TEST_CASE("input guards") {
  CHECK_THROWS_AS(fourier_noise_response(sample([](double) { return cplx(1.0); }, 10.0, 0.2)), ValidationError);
  CHECK_THROWS_AS(fourier_noise_response(sample([](double) { return cplx(1.0); }, 5.0)), ValidationError);
  auto shifted = sample([](double) { return cplx(1.0); });
  for (double& t : shifted.tau) t += 1.0;
  CHECK_THROWS_AS(fourier_noise_response(shifted), ValidationError);
}

TEST_CASE("interpolation is zero outside the grid") {
  SpectralData spec;
  spec.omega = {-1.0, 0.0, 1.0};
  spec.noise = {1.0, 3.0, 5.0};
  spec.response = {0.0, 0.0, 0.0};
  CHECK(spec.noise_at(0.5) == doctest::Approx(4.0));
  CHECK(spec.noise_at(1.5) == 0.0);
}
