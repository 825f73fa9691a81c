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
#include <random>
#include <sstream>

#include "puretherm/errors.hpp"
#include "puretherm/operators.hpp"

using namespace puretherm;

namespace {

using Mat = Eigen::MatrixXcd;

// Single-site Pauli matrix on the full 2^L space. Bit j set = site j+1 up.
Mat pauli(int L, int site, char which) {
  const std::size_t n = std::size_t{1} << L;
  Mat m = Mat::Zero(n, n);
  const int b = site - 1;
  for (std::size_t s = 0; s < n; ++s) {
    const bool up = (s >> b) & 1u;
    const std::size_t f = s ^ (std::size_t{1} << b);
    switch (which) {
      case 'z': m(s, s) = up ? 1.0 : -1.0; break;
      case 'x': m(f, s) = 1.0; break;
      // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
      case 'y': m(f, s) = up ? cplx(0, 1) : cplx(0, -1); break;
    }
  }
  return m;
}

Mat dense_chain(const ChainParams& p) {
  const int L = p.sites;
  const std::size_t n = std::size_t{1} << L;
  Mat H = Mat::Zero(n, n);
  for (int j = 1; j <= L; ++j) {
    const int k = j % L + 1;
    H += p.J * (pauli(L, j, 'x') * pauli(L, k, 'x') + pauli(L, j, 'y') * pauli(L, k, 'y'));
    H += p.J * p.Delta * pauli(L, j, 'z') * pauli(L, k, 'z');
    if (j % 2 == 1) H += p.h * pauli(L, j, 'z');
  }
  H += p.delta_h * pauli(L, 1, 'z');
  return H;
}

Mat project(const Mat& full, const BasisSector& s) {
  Mat out(s.dim(), s.dim());
  for (std::size_t a = 0; a < s.dim(); ++a)
    for (std::size_t b = 0; b < s.dim(); ++b) out(a, b) = full(s.config(a), s.config(b));
  return out;
}

}  // namespace

TEST_CASE("probe site rule") {
  CHECK(default_probe_site(10) == 5);
  CHECK(default_probe_site(12) == 7);
  CHECK(default_probe_site(14) == 7);
  CHECK(default_probe_site(16) == 9);
}

TEST_CASE("drive coefficient") {
  DriveParams d;
  CHECK(drive_coefficient(0.0, d) == 0.0);
  CHECK(drive_coefficient(M_PI / 2 / d.omega, d) == doctest::Approx(2.0));
  CHECK(std::abs(drive_coefficient(M_PI / d.omega, d)) < 1e-12);
}

TEST_CASE("Gaussian probe profile") {
  const auto p = ProbeProfile::gaussian(12, 7);
  const double centre = 1.0 / (1.0 + 2.0 * std::exp(-1.0) + 2.0 * std::exp(-4.0));
  CHECK(p.weights[6] == doctest::Approx(centre).epsilon(1e-14));
  CHECK(centre == doctest::Approx(0.5642).epsilon(1e-4));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
  int support = 0;
  for (double w : p.weights) support += w > 0.0;
  CHECK(support == 5);
  // Wraps around the periodic chain.
  const auto q = ProbeProfile::gaussian(10, 1);
  CHECK(q.weights[9] > 0.0);
  CHECK(q.weights[8] > 0.0);
  CHECK(q.weights[7] == 0.0);
  CHECK_THROWS_AS(ProbeProfile::gaussian(10, 11), ValidationError);
}

TEST_CASE("hopping amplitude between 1010 and 1100") {
  auto s = BasisSector::make(4, 2);
  ChainParams p{4};
  const auto H = build_static_hamiltonian(p, s);
  CHECK(H.entry(s->index_of(0b1010), s->index_of(0b1100)) == doctest::Approx(2.0 * p.J));
}

TEST_CASE("static Hamiltonian equals dense Pauli construction") {
  for (int L : {4, 6, 8}) {
    CAPTURE(L);
    ChainParams p{L};
    p.Delta = 0.55;
    p.h = 1.0;
    p.delta_h = 0.1;
    auto s = BasisSector::half_filled(L);
    const auto H = build_static_hamiltonian(p, s);
    const Mat ref = project(dense_chain(p), *s);
    const auto dense = H.to_dense();
    double worst = 0.0;
    for (std::size_t a = 0; a < s->dim(); ++a)
      for (std::size_t b = 0; b < s->dim(); ++b)
        worst = std::max(worst, std::abs(ref(a, b) - dense[a * s->dim() + b]));
    CHECK(worst < 1e-14);
    CHECK(H.hermiticity_residual() == 0.0);
  }
}

TEST_CASE("Hamiltonian conserves particle number") {
  // The full-space commutator vanishes, so the projected operator loses nothing.
  ChainParams p{6};
  const Mat H = dense_chain(p);
  Mat N = Mat::Zero(H.rows(), H.cols());
  for (int j = 1; j <= 6; ++j) N += 0.5 * (Mat::Identity(H.rows(), H.cols()) + pauli(6, j, 'z'));
  CHECK((H * N - N * H).cwiseAbs().maxCoeff() < 1e-12);

  auto s = BasisSector::half_filled(10);
  const auto Hs = build_static_hamiltonian(ChainParams{10}, s);
  const auto Ns = build_number_operator(s);
  for (double v : Ns.diag()) CHECK(v == doctest::Approx(5.0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<cplx> x(s->dim()), a(s->dim()), b(s->dim()), c(s->dim());
  for (int trial = 0; trial < 50; ++trial) {
    for (auto& v : x) v = {nd(rng), nd(rng)};
    Ns.apply(x, a);
    Hs.apply(a, b);
    Hs.apply(x, a);
    Ns.apply(a, c);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(b[i] - c[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("probe observable") {
  auto s = BasisSector::half_filled(8);
  const int j0 = default_probe_site(8);
  const auto prof = ProbeProfile::gaussian(8, j0);
  const auto A = build_probe_observable(prof, s);
  CHECK(A.is_diagonal());
  for (double v : A.diag()) {
    CHECK(v >= -1.0 - 1e-15);
    CHECK(v <= 1.0 + 1e-15);
  }
  // Four up spins cannot cover five support sites at L=8, so check the
  // all-up-in-support value in the N=5 sector instead.
  auto s5 = BasisSector::make(8, 5);
  const auto A5 = build_probe_observable(prof, s5);
  mask_t m = 0;
  for (int j = 1; j <= 8; ++j)
    if (prof.weights[j - 1] > 0.0) m |= mask_t{1} << (j - 1);
  CHECK(A5.entry(s5->index_of(m), s5->index_of(m)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sigma^z matches the bit convention") {
  auto s = BasisSector::make(4, 1);
  const auto z1 = build_sigma_z(1, s);
  CHECK(z1.entry(s->index_of(0b0001), s->index_of(0b0001)) == 1.0);
  CHECK(z1.entry(s->index_of(0b0010), s->index_of(0b0010)) == -1.0);
}

TEST_CASE("triplet assembly sums duplicates and drops zeros") {
  auto s = BasisSector::make(3, 1);
  auto op = SparseOperator::from_triplets(s, {{0, 1, 1.0}, {0, 1, 0.5}, {1, 0, 1.5}, {2, 2, 0.0}});
  CHECK(op.nnz() == 2);
  CHECK(op.entry(0, 1) == 1.5);
  CHECK(op.entry(2, 2) == 0.0);
  std::ostringstream os;
  op.write_triplets(os);
  CHECK(os.str().find("0 1 1.5 0") != std::string::npos);
}

TEST_CASE("mismatched sector is rejected") {
  auto s = BasisSector::half_filled(6);
  CHECK_THROWS_AS(build_static_hamiltonian(ChainParams{8}, s), ValidationError);
}
