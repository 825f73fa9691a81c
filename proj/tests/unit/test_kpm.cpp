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

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "puretherm/errors.hpp"
#include "puretherm/eth.hpp"
#include "puretherm/kpm.hpp"

using namespace puretherm;

namespace {

constexpr double kPi = std::numbers::pi;

SparseOperator chain(int L) { return build_static_hamiltonian(ChainParams{L}, BasisSector::half_filled(L)); }

// T_m(x) = cos(m arccos x)
double cheb(int m, double x) { return std::cos(m * std::acos(std::clamp(x, -1.0, 1.0))); }

KpmExpansion exact_trace_expansion(const std::vector<double>& energies, const Rescale& rs, int M) {
  KpmExpansion e;
  e.kind = MomentKind::trace;
  e.moments = M;
  e.dim = energies.size();
  e.rescale = rs;
  e.kernel = jackson_kernel(M);
  e.mu.assign(M, 0.0);
  for (double E : energies)
    for (int m = 0; m < M; ++m) e.mu[m] += cheb(m, rs.to_unit(E));
  return e;
}

}  // namespace

TEST_CASE("rescaling arithmetic") {
  const Rescale rs = rescale_from_bounds({-3.0, 5.0});
  CHECK(rs.a_scale == doctest::Approx(8.0 / (2.0 * 0.99)));
  CHECK(rs.b_shift == doctest::Approx(1.0));
  CHECK(rs.to_unit(5.0) == doctest::Approx(0.99));
  CHECK(rs.to_unit(-3.0) == doctest::Approx(-0.99));
  CHECK(rs.e_min() == doctest::Approx(-3.0));
  CHECK(rs.e_max() == doctest::Approx(5.0));

  // An operator already inside [-0.99, 0.99] maps to itself.
  auto s = BasisSector::make(8, 4);
  std::vector<double> d(s->dim());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = -0.99 + 1.98 * i / (d.size() - 1);
  const Rescale id = rescale_spectrum(SparseOperator::diagonal(s, d));
  CHECK(id.a_scale == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(id.b_shift) < 1e-9);
}

TEST_CASE("rescaled L=8 spectrum lies inside (-1, 1)") {
  const auto H = chain(8);
  const Rescale rs = rescale_spectrum(H);
  const auto e = exact_eigensystem(H);
  for (double E : e.energies) CHECK(std::abs(rs.to_unit(E)) < 1.0);
  CHECK(std::abs(rs.to_unit(e.energies.front())) == doctest::Approx(0.99).epsilon(1e-8));
}

TEST_CASE("Jackson kernel identities") {
  for (int M : {10, 100, 250}) {
    const auto g = jackson_kernel(M);
    REQUIRE(g.size() == static_cast<std::size_t>(M));
    CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(std::cos(kPi / (M + 1))).epsilon(1e-14));
    for (int m = 1; m < M; ++m) CHECK(g[m] < g[m - 1]);
    CHECK(g[M - 1] > 0.0);
    if (M >= 100) CHECK(g[M - 1] < 0.01);
  }
}

TEST_CASE("stochastic trace moments") {
  const auto H = chain(8);
  const Rescale rs = rescale_spectrum(H);
  KpmOptions o;
  o.moments = 50;
  o.random_vectors = 20;
  o.seed = 42;
  const auto e = chebyshev_moments_trace(H, rs, o);
  CHECK(e.mu[0] == doctest::Approx(static_cast<double>(H.dim())).epsilon(1e-14));

  // Exact Tr H~ and the Gaussian-vector standard error sqrt(2 Tr H~^2 / R).
  const auto eig = exact_eigensystem(H);
  double tr1 = 0.0, tr2 = 0.0;
  for (double E : eig.energies) {
    tr1 += rs.to_unit(E);
    tr2 += std::pow(rs.to_unit(E), 2);
  }
  const double sigma = std::sqrt(2.0 * tr2 / o.random_vectors);
  CHECK(std::abs(e.mu[1] - tr1) < 4.0 * sigma);
}

TEST_CASE("moment determinism and thread independence") {
  const auto H = chain(10);
  const Rescale rs = rescale_spectrum(H);
  KpmOptions o;
  o.moments = 60;
  o.random_vectors = 6;
  o.seed = 7;
  const auto a = chebyshev_moments_trace(H, rs, o);
  const auto b = chebyshev_moments_trace(H, rs, o);
  o.threads = 3;
  const auto c = chebyshev_moments_trace(H, rs, o);
  CHECK(a.mu == b.mu);
  CHECK(a.mu == c.mu);
  o.seed = 8;
  CHECK(chebyshev_moments_trace(H, rs, o).mu != a.mu);
}

TEST_CASE("state moments match the spectral decomposition") {
  const auto H = chain(10);
  const Rescale rs = rescale_spectrum(H);
  const auto eig = exact_eigensystem(H);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<cplx> psi(H.dim());
  double nrm = 0.0;
  for (auto& x : psi) {
    x = {nd(rng), nd(rng)};
    nrm += std::norm(x);
  }
  for (auto& x : psi) x /= std::sqrt(nrm);
  const auto e = chebyshev_moments_state(H, psi, rs, 120);
  for (int m : {0, 1, 2, 17, 119}) {
    double ref = 0.0;
    for (std::size_t n = 0; n < eig.dim; ++n) {
      cplx ov{};
      for (std::size_t i = 0; i < eig.dim; ++i) ov += eig.vector(n)[i] * psi[i];
      ref += std::norm(ov) * cheb(m, rs.to_unit(eig.energies[n]));
    }
    CHECK(e.mu[m] == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("eigenstate LDOS is one Jackson-broadened peak") {
  const auto H = chain(10);
  const Rescale rs = rescale_spectrum(H);
  const auto eig = exact_eigensystem(H);
  const std::size_t n = eig.dim / 2;
  std::vector<cplx> psi(eig.vector(n), eig.vector(n) + eig.dim);
  const int M = 250;
  const MicrocanonicalCurve ldos(chebyshev_moments_state(H, psi, rs, M));
  const double x0 = rs.to_unit(eig.energies[n]);
  // Second moment of the peak in rescaled units by fine quadrature.
  double w0 = 0.0, w2 = 0.0, peak_x = 0.0, peak_v = 0.0;
  const double span = 0.2, h = 1e-5;
  for (double x = x0 - span; x <= x0 + span; x += h) {
    const double v = ldos.evaluate(rs.to_energy(x)) * rs.a_scale;
    w0 += v * h;
    w2 += v * (x - x0) * (x - x0) * h;
    if (v > peak_v) {
      peak_v = v;
      peak_x = x;
    }
  }
  CHECK(w0 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(peak_x - x0) < 1e-3);
  CHECK(std::sqrt(w2 / w0) <= kPi / M);
}

TEST_CASE("DOS normalisation and exact-oracle agreement") {
  const auto H = chain(12);
  const Rescale rs = rescale_spectrum(H);
  KpmOptions o;
  o.seed = 3;
  const MicrocanonicalCurve dos(chebyshev_moments_trace(H, rs, o));
  const double dim = static_cast<double>(H.dim());
  CHECK(dos.total() / dim == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dos.integral(rs.e_min(), rs.e_max()) / dim == doctest::Approx(1.0).epsilon(1e-3));

  // Grid values integrate to the same total (trapezoid on the angle grid).
  double s = 0.0;
  for (std::size_t k = 1; k < dos.energy().size(); ++k)
    s += 0.5 * (dos.value()[k] + dos.value()[k - 1]) * (dos.energy()[k] - dos.energy()[k - 1]);
  CHECK(s / dim == doctest::Approx(1.0).epsilon(5e-3));

  // beta(E) converges to the exact-moment expansion as the stochastic error
  // falls; at this size a single R = 20 estimate is noise dominated.
  const auto eig = exact_eigensystem(H);
  const MicrocanonicalCurve exact(exact_trace_expansion(eig.energies, rs, o.moments));
  auto beta_rms = [&](int R) {
    KpmOptions q = o;
    q.random_vectors = R;
    const MicrocanonicalCurve c(chebyshev_moments_trace(H, rs, q));
    double s2 = 0.0;
    int n = 0;
    for (double x = -0.7; x <= 0.5; x += 0.01, ++n)
      s2 += std::pow(microcanonical_beta(c, rs.to_energy(x)) - microcanonical_beta(exact, rs.to_energy(x)), 2);
    return std::sqrt(s2 / n);
  };
  const double coarse = beta_rms(20), fine = beta_rms(320);
  MESSAGE("beta rms deviation, R=20: " << coarse << ", R=320: " << fine);
  CHECK(coarse / fine > 2.0);
}

TEST_CASE("beta sign structure and inversion") {
  const auto H = chain(12);
  const Rescale rs = rescale_spectrum(H);
  KpmOptions o;
  o.seed = 11;
  const MicrocanonicalCurve dos(chebyshev_moments_trace(H, rs, o));
  const auto& V = dos.value();
  const std::size_t peak = std::max_element(V.begin(), V.end()) - V.begin();
  const double ep = dos.energy()[peak];
  const double de = (rs.e_max() - rs.e_min()) / 2000.0;
  CHECK(std::abs(microcanonical_beta(dos, ep)) < 0.01);
  CHECK(microcanonical_beta(dos, ep - 50 * de) > 0.0);
  CHECK(microcanonical_beta(dos, ep + 50 * de) < 0.0);
  for (double beta : {0.05, 0.2, 0.5}) {
    const double E = energy_for_beta(dos, beta);
    CHECK(E < ep);
    CHECK(microcanonical_beta(dos, E) == doctest::Approx(beta).epsilon(1e-6));
  }
  CHECK_THROWS_AS(microcanonical_beta(dos, rs.to_energy(0.99)), ValidationError);
  CHECK_THROWS_AS(dos.evaluate(rs.to_energy(1.0)), ValidationError);
  CHECK_THROWS_AS(energy_for_beta(dos, 50.0), ValidationError);
  CHECK(microcanonical_entropy(dos, ep) == doctest::Approx(std::log(dos.evaluate(ep))));
}

TEST_CASE("microcanonical averages") {
  const auto H = chain(12);
  const Rescale rs = rescale_spectrum(H);
  KpmOptions o;
  o.seed = 5;
  o.moments = 250;
  o.random_vectors = 400;
  const MicrocanonicalCurve dos(chebyshev_moments_trace(H, rs, o));

  SUBCASE("identity observable") {
    const auto I = SparseOperator::diagonal(H.sector_ptr(), std::vector<double>(H.dim(), 1.0));
    const MicrocanonicalCurve one(chebyshev_moments_observable(H, I, rs, o));
    for (double x : {-0.9, -0.4, 0.0, 0.6}) CHECK(microcanonical_average(one, dos, rs.to_energy(x)) ==
                                                  doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("local magnetisation against exact windows") {
    const int j0 = default_probe_site(12);
    const auto A = build_sigma_z(j0, H.sector_ptr());
    const MicrocanonicalCurve ac(chebyshev_moments_observable(H, A, rs, o));
    const auto eig = exact_eigensystem(H);
    const auto ann = diagonal_elements(eig, A);
    for (double eps : {0.4, 0.5, 0.6}) {
      CAPTURE(eps);
      const double E = eig.e_min() + eps * (eig.e_max() - eig.e_min());
      CHECK(std::abs(microcanonical_average(ac, dos, E) - window_average(eig, ann, E, 0.02)) < 0.02);
    }
  }
}

TEST_CASE("stochastic DOS error scales as R^-1/2 at L=14") {
  const auto H = chain(14);
  const Rescale rs = rescale_spectrum(H);
  // Two independent estimates differ by sqrt(2) times the single-estimate error.
  auto spread = [&](int R) {
    KpmOptions a, b;
    a.random_vectors = b.random_vectors = R;
    a.seed = 100;
    b.seed = 200;
    const MicrocanonicalCurve ca(chebyshev_moments_trace(H, rs, a)), cb(chebyshev_moments_trace(H, rs, b));
    double d2 = 0.0, vmax = 0.0;
    int n = 0;
    for (double x = -0.9; x <= 0.9; x += 0.01, ++n) {
      const double va = ca.evaluate(rs.to_energy(x));
      d2 += std::pow(va - cb.evaluate(rs.to_energy(x)), 2);
      vmax = std::max(vmax, va);
    }
    return std::sqrt(d2 / n) / vmax;
  };
  const double s10 = spread(10), s40 = spread(40);
  MESSAGE("relative spread R=10: " << s10 << ", R=40: " << s40);
  CHECK(s10 / s40 > 1.4);
  CHECK(s10 / s40 < 2.9);
  CHECK(s40 < 0.02);
}

TEST_CASE("option guards") {
  const auto H = chain(6);
  const Rescale rs = rescale_spectrum(H);
  KpmOptions o;
  o.moments = 1;
  CHECK_THROWS_AS(chebyshev_moments_trace(H, rs, o), ValidationError);
  o.moments = 10;
  o.random_vectors = 0;
  CHECK_THROWS_AS(chebyshev_moments_trace(H, rs, o), ValidationError);
  CHECK_THROWS_AS(rescale_from_bounds({0.0, 1.0}, 0.6), ValidationError);
}
