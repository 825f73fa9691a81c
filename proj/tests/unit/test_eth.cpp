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

#include "puretherm/errors.hpp"
#include "puretherm/eth.hpp"

using namespace puretherm;

namespace {

SparseOperator chain(int L) { return build_static_hamiltonian(ChainParams{L}, BasisSector::half_filled(L)); }

}  // namespace

TEST_CASE("L=4 eigensystem against an independent solver") {
  const auto H = chain(4);
  const auto eig = exact_eigensystem(H);
  const auto d = H.to_dense();
  Eigen::Map<const Eigen::MatrixXd> M(d.data(), 6, 6);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(M);
  REQUIRE(eig.dim == 6);
  double s1 = 0.0, s2 = 0.0;
  for (int k = 0; k < 6; ++k) {
    CHECK(eig.energies[k] == doctest::Approx(ref.eigenvalues()[k]).epsilon(1e-12));
    s1 += eig.energies[k];
    s2 += eig.energies[k] * eig.energies[k];
  }
  CHECK(std::abs(s1 - M.trace()) < 1e-8);
  CHECK(s2 == doctest::Approx((M * M).trace()).epsilon(1e-6));
}

TEST_CASE("eigensystem quality at L=12") {
  const auto H = chain(12);
  const auto eig = exact_eigensystem(H);
  CHECK(eigen_residual(eig, H) < 1e-10);
  CHECK(orthonormality_error(eig, 7) < 1e-12);
  // The symmetry-breaking field leaves no exact degeneracies.
  CHECK(degenerate_gap_fraction(eig) < 1e-3);
  CHECK_THROWS_AS(exact_eigensystem(H, 100), ResourceError);
}

TEST_CASE("diagonal elements and the trace") {
  const auto H = chain(10);
  const auto eig = exact_eigensystem(H);
  const auto A = build_probe_observable(ProbeProfile::gaussian(10, 5), H.sector_ptr());
  const auto ann = diagonal_elements(eig, A);
  double tr = 0.0, s = 0.0;
  for (double v : A.diag()) tr += v;
  for (double v : ann) s += v;
  CHECK(s == doctest::Approx(tr).epsilon(1e-10).scale(1.0));

  const auto amn = matrix_elements(eig, A);
  const std::size_t n = eig.dim;
  double asym = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dmax = std::max(dmax, std::abs(amn[i + i * n] - ann[i]));
    for (std::size_t j = 0; j < i; ++j) asym = std::max(asym, std::abs(amn[i + j * n] - amn[j + i * n]));
  }
  CHECK(asym < 1e-12);
  CHECK(dmax < 1e-12);
  CHECK_THROWS_AS(matrix_elements(eig, A, 100), ResourceError);
}

TEST_CASE("identity observable") {
  const auto H = chain(10);
  const auto eig = exact_eigensystem(H);
  const auto I = SparseOperator::diagonal(H.sector_ptr(), std::vector<double>(H.dim(), 1.0));
  const auto ann = diagonal_elements(eig, I);
  const auto st = diagonal_statistics(eig, ann);
  CHECK(st.central_variance < 1e-24);
  CHECK(st.central_raw_variance < 1e-24);
  const auto amn = matrix_elements(eig, I);
  const std::size_t n = eig.dim;
  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) off = std::max(off, std::abs(amn[i + j * n]));
  CHECK(off < 1e-12);
  const auto prof = offdiagonal_magnitude_profile(eig, amn, eig.e_min(), eig.e_max());
  for (const auto& b : prof.bins) CHECK(b.mean_abs < 1e-12);
}

TEST_CASE("running average is smooth in energy") {
  const auto H = chain(12);
  const auto eig = exact_eigensystem(H);
  const auto A = build_sigma_z(default_probe_site(12), H.sector_ptr());
  const auto ann = diagonal_elements(eig, A);
  const auto st = diagonal_statistics(eig, ann, 0.02, 0.1);
  CHECK(st.central_count == 92);
  CHECK(st.windows.size() == 50);
  // Within the bulk, neighbouring window means differ by less than the spread.
  for (std::size_t w = 10; w + 1 < 40; ++w) {
    const auto& a = st.windows[w];
    const auto& b = st.windows[w + 1];
    if (a.count < 5 || b.count < 5) continue;
    CHECK(std::abs(a.mean - b.mean) <= std::max(a.stddev, b.stddev));
  }
  // Subtracting the running mean can only remove variance in the slice.
  CHECK(st.central_variance <= st.central_raw_variance * 1.05);
  // Window average against a hand count.
  const double E = eig.e_min() + 0.5 * (eig.e_max() - eig.e_min());
  double s = 0.0;
  int c = 0;
  for (std::size_t k = 0; k < eig.dim; ++k)
    if (std::abs(eig.normalized(eig.energies[k]) - 0.5) <= 0.01) {
      s += ann[k];
      ++c;
    }
  CHECK(window_average(eig, ann, E) == doctest::Approx(s / c));
}

TEST_CASE("power-law fit") {
  std::vector<double> x{10, 100, 1000, 10000}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.0));
  const auto f = fit_power_law(x, y);
  CHECK(f.exponent == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.residual_rms < 1e-12);
  CHECK_THROWS_AS(fit_power_law({1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(fit_power_law({1.0, -2.0}, {1.0, 1.0}), ValidationError);
}

TEST_CASE("off-diagonal statistics") {
  const auto H = chain(12);
  const auto eig = exact_eigensystem(H);
  const auto A = build_probe_observable(ProbeProfile::gaussian(12, 7), H.sector_ptr());
  const auto amn = matrix_elements(eig, A);
  const double mid = 0.5 * (eig.e_min() + eig.e_max());
  const double w = 0.1 * (eig.e_max() - eig.e_min());
  OffDiagonalOptions o;
  o.omega_max = 8.0;
  const auto prof = offdiagonal_magnitude_profile(eig, amn, mid - w, mid + w, o);
  const std::size_t nb = prof.bins.size();
  REQUIRE(nb % 2 == 1);
  // (m, n) and (n, m) enter symmetrically.
  for (std::size_t i = 0; i < nb; ++i) {
    CHECK(prof.bins[i].count == prof.bins[nb - 1 - i].count);
    CHECK(prof.bins[i].mean_abs == doctest::Approx(prof.bins[nb - 1 - i].mean_abs));
  }
  auto bin_at = [&](double omega) { return prof.bins[static_cast<std::size_t>(std::lround(omega / o.d_omega)) + nb / 2]; };
  CHECK(bin_at(6.0).mean_abs < bin_at(0.4).mean_abs);
  // Signs are erratic: pooled signed mean is small against the magnitude.
  double s = 0.0, sa = 0.0;
  std::size_t c = 0;
  for (const auto& b : prof.bins)
    if (b.omega > 0.0 && b.omega <= 2.0) {
      s += b.mean * b.count;
      sa += b.mean_abs * b.count;
      c += b.count;
    }
  REQUIRE(c > 0);
  CHECK(std::abs(s) < 0.1 * sa);

  // Spectral function at a target temperature with a flat-density stand-in.
  const auto sf = offdiagonal_spectral_function(
      eig, amn, 0.2, [&](double e) { return -0.5 * (e - mid) / (0.5 * (eig.e_max() - eig.e_min())); },
      [](double) { return 1.0; }, o);
  CHECK(sf.e_low < sf.e_high);
  CHECK(sf.e_high < mid);
  CHECK(bin_at(0.0).count > 0);
  for (const auto& b : sf.bins)
    if (b.count > 0) CHECK(b.f2 == doctest::Approx(b.variance + b.mean * b.mean));
  CHECK_THROWS_AS(offdiagonal_spectral_function(
                      eig, amn, 0.2, [](double) { return 5.0; }, [](double) { return 1.0; }, o),
                  NumericalError);
}
