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

#include "puretherm/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "puretherm/errors.hpp"
#include "puretherm/simd/kernels.hpp"

namespace puretherm {

namespace {

double residual_norm(const SparseOperator& H, double e, std::span<const cplx> x) {
  std::vector<cplx> y(x.size());
  H.apply(x, y);
  simd::active().axpy(x.size(), cplx(-e, 0.0), x.data(), y.data());
  return std::sqrt(simd::active().norm2(y.size(), y.data()));
}

double residual_bound(const SparseOperator& H) {
  return 1e-8 * std::max(1.0, H.max_abs()) * std::sqrt(static_cast<double>(H.dim()));
}

// Eigen-decomposition of the m x m symmetric tridiagonal (alpha, beta).
void tridiagonal_eigs(const std::vector<double>& alpha, const std::vector<double>& beta, std::vector<double>& w,
                      std::vector<double>& z) {
  const auto m = static_cast<lapack_int>(alpha.size());
  w = alpha;
  std::vector<double> e(beta.begin(), beta.begin() + std::max<lapack_int>(m - 1, 0));
  z.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0.0);
  const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', m, w.data(), e.data(), z.data(), m);
  if (info != 0) throw NumericalError("dstev failed with info=" + std::to_string(info));
}

struct LanczosRun {
  std::vector<std::vector<cplx>> basis;
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples basis[j] and basis[j+1]
  std::vector<double> ritz;
  std::vector<double> ritz_vecs;
};

// Krylov run from `start` with full (twice-iterated) Gram-Schmidt. Stops once the
// requested extremal Ritz values have residual estimates below tolerance.
LanczosRun lanczos_run(const SparseOperator& H, std::vector<cplx> start, const LanczosOptions& opts, bool want_top) {
  const auto& k = simd::active();
  const std::size_t n = H.dim();
  const int m_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opts.krylov_dim), n));

  LanczosRun run;
  k.scale(n, 1.0 / std::sqrt(k.norm2(n, start.data())), start.data());
  run.basis.push_back(std::move(start));

  std::vector<cplx> w(n);
  for (int j = 0; j < m_max; ++j) {
    H.apply(run.basis[static_cast<std::size_t>(j)], w);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : run.basis) {
        const cplx c = k.dotc(n, v.data(), w.data());
        k.axpy(n, -c, v.data(), w.data());
        if (pass == 0 && &v == &run.basis.back()) run.alpha.push_back(c.real());
      }
    // alpha was captured from the first pass; the second pass only cleans round-off.
    const double b = std::sqrt(k.norm2(n, w.data()));
    run.beta.push_back(b);

    const bool check = (j + 1) % 5 == 0 || j + 1 == m_max || b < 1e-12;
    if (check) {
      tridiagonal_eigs(run.alpha, run.beta, run.ritz, run.ritz_vecs);
      const std::size_t m = run.alpha.size();
      const auto est = [&](std::size_t col) { return std::abs(b * run.ritz_vecs[col * m + (m - 1)]); };
      const double lo_tol = opts.tol * std::max(1.0, std::abs(run.ritz.front()));
      const double hi_tol = opts.tol * std::max(1.0, std::abs(run.ritz.back()));
      const bool lo_ok = est(0) <= lo_tol;
      const bool hi_ok = !want_top || est(m - 1) <= hi_tol;
      if ((lo_ok && hi_ok) || b < 1e-12 || j + 1 == m_max) break;
    }
    std::vector<cplx> next(w);
    k.scale(n, 1.0 / b, next.data());
    run.basis.push_back(std::move(next));
  }
  run.basis.resize(run.alpha.size());
  return run;
}

std::vector<cplx> ritz_vector(const LanczosRun& run, std::size_t col) {
  const std::size_t m = run.alpha.size();
  const std::size_t n = run.basis.front().size();
  std::vector<cplx> x(n, cplx{});
  for (std::size_t i = 0; i < m; ++i)
    simd::active().axpy(n, cplx(run.ritz_vecs[col * m + i], 0.0), run.basis[i].data(), x.data());
  return x;
}

std::vector<cplx> random_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& a : v) a = cplx(u(rng), 0.0);
  return v;
}

}  // namespace

DenseEigen dense_eigh(std::vector<double> a, std::size_t n, bool want_vectors) {
  if (a.size() != n * n) throw std::invalid_argument("dense_eigh: matrix size mismatch");
  DenseEigen out;
  out.n = n;
  out.values.assign(n, 0.0);
  if (n == 0) return out;
  if (want_vectors) out.vectors.assign(n * n, 0.0);
  std::vector<lapack_int> isuppz(2 * n);
  lapack_int found = 0;
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', 'U', ln, a.data(), ln, 0.0, 0.0, 0, 0, 0.0,
                     &found, out.values.data(), want_vectors ? out.vectors.data() : nullptr, ln, isuppz.data());
  if (info != 0 || found != ln) throw NumericalError("dsyevr failed with info=" + std::to_string(info));
  return out;
}

EigenPair ground_state_dense(const SparseOperator& H) {
  const std::size_t n = H.dim();
  std::vector<double> a = H.to_dense();
  std::vector<double> w(n), z(n);
  std::vector<lapack_int> isuppz(2);
  lapack_int found = 0;
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', ln, a.data(), ln, 0.0, 0.0, 1, 1, 0.0,
                                         &found, w.data(), z.data(), ln, isuppz.data());
  if (info != 0 || found != 1) throw NumericalError("dsyevr (lowest) failed with info=" + std::to_string(info));
  std::vector<cplx> amps(n);
  for (std::size_t i = 0; i < n; ++i) amps[i] = z[i];
  StateVector psi(H.sector_ptr(), std::move(amps));
  const double res = residual_norm(H, w[0], psi.amps());
  if (res > residual_bound(H))
    throw NumericalError("dense ground state residual " + std::to_string(res) + " exceeds bound");
  return EigenPair{w[0], std::move(psi), res, 0, true};
}

EigenPair ground_state_lanczos(const SparseOperator& H, const LanczosOptions& opts) {
  std::vector<cplx> start = random_start(H.dim(), opts.seed);
  double res = 0.0;
  int iters = 0;
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    LanczosRun run = lanczos_run(H, std::move(start), opts, false);
    iters += static_cast<int>(run.alpha.size());
    std::vector<cplx> x = ritz_vector(run, 0);
    StateVector psi(H.sector_ptr(), std::move(x));
    const double e = H.expectation(psi.amps());
    res = residual_norm(H, e, psi.amps());
    if (res <= opts.tol * std::max(1.0, std::abs(e)) * 1e3 && res <= residual_bound(H))
      return EigenPair{e, std::move(psi), res, iters, false};
    start.assign(psi.amps().begin(), psi.amps().end());
  }
  throw NumericalError("Lanczos ground state did not converge: residual " + std::to_string(res) + " after " +
                       std::to_string(iters) + " iterations");
}

EigenPair ground_state(const SparseOperator& H, std::size_t dense_threshold) {
  return H.dim() <= dense_threshold ? ground_state_dense(H) : ground_state_lanczos(H);
}

SpectralBounds spectral_bounds(const SparseOperator& H, const LanczosOptions& opts) {
  if (H.dim() <= 64) {
    const DenseEigen e = dense_eigh(H.to_dense(), H.dim(), false);
    return {e.values.front(), e.values.back()};
  }
  LanczosOptions o = opts;
  o.tol = std::max(opts.tol, 1e-9);
  LanczosRun run = lanczos_run(H, random_start(H.dim(), opts.seed), o, true);
  return {run.ritz.front(), run.ritz.back()};
}

}  // namespace puretherm
