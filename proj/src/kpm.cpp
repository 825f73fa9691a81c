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

#include "puretherm/kpm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "puretherm/errors.hpp"
#include "puretherm/parallel.hpp"
#include "puretherm/simd/kernels.hpp"

namespace puretherm {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> gaussian_vector(std::size_t dim, std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> r(dim);
  for (auto& x : r) x = cplx(normal(gen), 0.0);
  return r;
}

// Runs the Chebyshev recursion from `start` and records <bra|T_m(H~)|start>.
std::vector<double> chebyshev_run(const SparseOperator& H, const Rescale& rs, const std::vector<cplx>& start,
                                  const std::vector<cplx>& bra, int moments) {
  const auto& k = simd::active();
  const std::size_t n = start.size();
  const auto csr = H.csr();
  std::vector<double> mu(static_cast<std::size_t>(moments), 0.0);
  std::vector<cplx> prev = start;
  std::vector<cplx> cur(n);
  mu[0] = k.dotc(n, bra.data(), prev.data()).real();
  if (moments == 1) return mu;
  // T_1 = H~
  k.csr_apply(csr, 1.0 / rs.a_scale, prev.data(), 0.0, cur.data());
  k.axpy(n, cplx(-rs.b_shift / rs.a_scale, 0.0), prev.data(), cur.data());
  mu[1] = k.dotc(n, bra.data(), cur.data()).real();
  for (int m = 2; m < moments; ++m) {
    // prev <- 2 H~ cur - prev
    k.csr_apply(csr, 2.0 / rs.a_scale, cur.data(), -1.0, prev.data());
    k.axpy(n, cplx(-2.0 * rs.b_shift / rs.a_scale, 0.0), cur.data(), prev.data());
    std::swap(prev, cur);
    mu[static_cast<std::size_t>(m)] = k.dotc(n, bra.data(), cur.data()).real();
  }
  return mu;
}

void validate(const KpmOptions& opts) {
  if (opts.moments < 2) throw ValidationError("kpm: need at least two moments");
  if (opts.random_vectors < 1) throw ValidationError("kpm: need at least one random vector");
}

KpmExpansion stochastic(const SparseOperator& H, const SparseOperator* A, const Rescale& rs, const KpmOptions& opts) {
  validate(opts);
  const std::size_t n = H.dim();
  const auto R = static_cast<std::size_t>(opts.random_vectors);
  std::vector<std::vector<double>> per(R);
  std::vector<double> norms(R);
  parallel_for(R, opts.threads, [&](std::size_t r) {
    const auto vec = gaussian_vector(n, opts.seed, r);
    norms[r] = simd::active().norm2(n, vec.data());
    if (A == nullptr) {
      per[r] = chebyshev_run(H, rs, vec, vec, opts.moments);
    } else {
      std::vector<cplx> bra(n);
      A->apply(vec, bra);
      per[r] = chebyshev_run(H, rs, vec, bra, opts.moments);
    }
  });
  KpmExpansion e;
  e.kind = A ? MomentKind::observable : MomentKind::trace;
  e.moments = opts.moments;
  e.random_vectors = opts.random_vectors;
  e.seed = opts.seed;
  e.dim = n;
  e.rescale = rs;
  e.kernel = jackson_kernel(opts.moments);
  e.mu.assign(static_cast<std::size_t>(opts.moments), 0.0);
  double norm_sum = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    norm_sum += norms[r];
    for (std::size_t m = 0; m < e.mu.size(); ++m) e.mu[m] += per[r][m];
  }
  const double scale = static_cast<double>(n) / norm_sum;
  for (auto& x : e.mu) x *= scale;
  return e;
}

}  // namespace

Rescale rescale_from_bounds(const SpectralBounds& bounds, double margin) {
  if (!(margin > 0.0 && margin < 0.5)) throw ValidationError("rescale: margin must lie in (0, 0.5)");
  if (!std::isfinite(bounds.e_min) || !std::isfinite(bounds.e_max) || bounds.e_max < bounds.e_min)
    throw NumericalError("rescale: invalid spectral bounds");
  Rescale rs;
  rs.margin = margin;
  const double width = std::max(bounds.e_max - bounds.e_min, 1e-12);
  rs.a_scale = width / (2.0 * (1.0 - margin));
  rs.b_shift = 0.5 * (bounds.e_max + bounds.e_min);
  return rs;
}

Rescale rescale_spectrum(const SparseOperator& H, double margin) {
  return rescale_from_bounds(spectral_bounds(H), margin);
}

std::vector<double> jackson_kernel(int moments) {
  if (moments < 1) throw ValidationError("jackson_kernel: need at least one moment");
  const double np1 = moments + 1.0;
  const double cot = 1.0 / std::tan(kPi / np1);
  std::vector<double> g(static_cast<std::size_t>(moments));
  for (int m = 0; m < moments; ++m) {
    const double q = kPi * m / np1;
    g[static_cast<std::size_t>(m)] = ((np1 - m) * std::cos(q) + std::sin(q) * cot) / np1;
  }
  return g;
}

KpmExpansion chebyshev_moments_trace(const SparseOperator& H, const Rescale& rs, const KpmOptions& opts) {
  return stochastic(H, nullptr, rs, opts);
}

KpmExpansion chebyshev_moments_observable(const SparseOperator& H, const SparseOperator& A, const Rescale& rs,
                                          const KpmOptions& opts) {
  if (A.dim() != H.dim()) throw ValidationError("kpm: observable dimension mismatch");
  return stochastic(H, &A, rs, opts);
}

KpmExpansion chebyshev_moments_state(const SparseOperator& H, std::span<const cplx> psi, const Rescale& rs,
                                     int moments) {
  if (moments < 2) throw ValidationError("kpm: need at least two moments");
  if (psi.size() != H.dim()) throw ValidationError("kpm: state dimension mismatch");
  std::vector<cplx> v(psi.begin(), psi.end());
  KpmExpansion e;
  e.kind = MomentKind::state;
  e.moments = moments;
  e.dim = H.dim();
  e.rescale = rs;
  e.kernel = jackson_kernel(moments);
  e.mu = chebyshev_run(H, rs, v, v, moments);
  return e;
}

MicrocanonicalCurve::MicrocanonicalCurve(const KpmExpansion& expansion, std::size_t grid_points)
    : exp_(expansion) {
  if (exp_.mu.size() != exp_.kernel.size() || exp_.mu.empty())
    throw ValidationError("MicrocanonicalCurve: moments and kernel differ in length");
  if (grid_points < 3) throw ValidationError("MicrocanonicalCurve: grid too small");
  coeff_.resize(exp_.mu.size());
  for (std::size_t m = 0; m < coeff_.size(); ++m) coeff_[m] = exp_.kernel[m] * exp_.mu[m];

  // Chebyshev-angle grid, strictly inside (-1, 1), ascending in energy.
  energy_.resize(grid_points);
  value_.resize(grid_points);
  double vmax = 0.0;
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double theta = kPi * (static_cast<double>(grid_points - 1 - k) + 0.5) / static_cast<double>(grid_points);
    energy_[k] = exp_.rescale.to_energy(std::cos(theta));
    value_[k] = evaluate(energy_[k]);
    vmax = std::max(vmax, value_[k]);
  }
  if (exp_.kind != MomentKind::observable) {
    // Jackson damping keeps a positive measure positive; clip round-off undershoot only.
    for (auto& v : value_)
      if (v < 0.0 && v > -1e-6 * vmax) v = 0.0;
  }
}

double MicrocanonicalCurve::evaluate(double e) const {
  const double x = exp_.rescale.to_unit(e);
  if (!(std::abs(x) < 1.0)) throw ValidationError("kpm: energy " + std::to_string(e) + " outside the rescaled interval");
  // Clenshaw-free direct recursion is adequate for M <= a few hundred.
  double t_prev = 1.0, t_cur = x;
  double s = coeff_[0];
  if (coeff_.size() > 1) s += 2.0 * coeff_[1] * x;
  for (std::size_t m = 2; m < coeff_.size(); ++m) {
    const double t_next = 2.0 * x * t_cur - t_prev;
    s += 2.0 * coeff_[m] * t_next;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return s / (kPi * std::sqrt(1.0 - x * x) * exp_.rescale.a_scale);
}

double MicrocanonicalCurve::antiderivative(double theta) const {
  double s = coeff_[0] * theta;
  for (std::size_t m = 1; m < coeff_.size(); ++m)
    s += 2.0 * coeff_[m] * std::sin(static_cast<double>(m) * theta) / static_cast<double>(m);
  return s / kPi;
}

double MicrocanonicalCurve::integral(double e1, double e2) const {
  const double x1 = std::clamp(exp_.rescale.to_unit(e1), -1.0, 1.0);
  const double x2 = std::clamp(exp_.rescale.to_unit(e2), -1.0, 1.0);
  // dx = -sin(theta) d theta, so int_{x1}^{x2} = F(acos x1) - F(acos x2)
  return antiderivative(std::acos(x1)) - antiderivative(std::acos(x2));
}

namespace {

void check_interior(const MicrocanonicalCurve& c, double e) {
  const double x = c.rescale().to_unit(e);
  if (!(std::abs(x) <= kKpmInterior))
    throw ValidationError("kpm: energy " + std::to_string(e) + " outside the reliable interior (|x| = " +
                          std::to_string(std::abs(x)) + ")");
}

double positive_dos(const MicrocanonicalCurve& dos, double e) {
  const double v = dos.evaluate(e);
  if (!(v > 0.0)) throw NumericalError("kpm: density of states not positive at E = " + std::to_string(e));
  return v;
}

}  // namespace

double microcanonical_beta(const MicrocanonicalCurve& dos, double e) {
  check_interior(dos, e);
  const double de = (dos.rescale().e_max() - dos.rescale().e_min()) / 2000.0;
  const double hi = positive_dos(dos, e + de);
  const double lo = positive_dos(dos, e - de);
  return (std::log(hi) - std::log(lo)) / (2.0 * de);
}

double microcanonical_entropy(const MicrocanonicalCurve& dos, double e) {
  check_interior(dos, e);
  return std::log(positive_dos(dos, e));
}

double microcanonical_average(const MicrocanonicalCurve& a_curve, const MicrocanonicalCurve& dos, double e) {
  check_interior(dos, e);
  return a_curve.evaluate(e) / positive_dos(dos, e);
}

double energy_for_beta(const MicrocanonicalCurve& dos, double beta) {
  if (!(beta > 0.0)) throw ValidationError("energy_for_beta: beta must be positive");
  const auto& E = dos.energy();
  const auto& V = dos.value();
  // Maximum over the reliable interior only: the 1/sqrt(1 - x^2) weight can
  // lift Jackson tails above the bulk right at the rescaled edges.
  const double floor_e = dos.rescale().to_energy(-kKpmInterior);
  const double ceil_e = dos.rescale().to_energy(kKpmInterior);
  std::size_t peak = 0;
  for (std::size_t k = 0; k < E.size(); ++k)
    if (E[k] >= floor_e && E[k] <= ceil_e && (V[peak] < V[k] || E[peak] < floor_e)) peak = k;
  if (E[peak] <= floor_e) throw NumericalError("energy_for_beta: density maximum lies outside the interior");
  // beta(E) of a finite spectrum is not monotone, so walk down from the
  // maximum and bracket the first crossing rather than bisecting blindly.
  double hi = E[peak];
  double lo = hi;
  bool found = false;
  for (std::size_t k = peak; k-- > 0 && E[k] >= floor_e;) {
    if (microcanonical_beta(dos, E[k]) >= beta) {
      lo = E[k];
      found = true;
      break;
    }
    hi = E[k];
  }
  if (!found) throw ValidationError("energy_for_beta: beta " + std::to_string(beta) + " colder than the reliable interior");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (microcanonical_beta(dos, mid) >= beta)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace puretherm
