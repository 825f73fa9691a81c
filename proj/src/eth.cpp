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

#include "puretherm/eth.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "puretherm/errors.hpp"
#include "puretherm/linalg.hpp"

namespace puretherm {

EigenSystem exact_eigensystem(const SparseOperator& H, std::size_t max_dim) {
  const std::size_t n = H.dim();
  if (n == 0) throw ValidationError("exact_eigensystem: empty operator");
  if (n > max_dim)
    throw ResourceError("exact_eigensystem: dimension " + std::to_string(n) + " exceeds the guard " +
                        std::to_string(max_dim));
  DenseEigen d = dense_eigh(H.to_dense(), n, true);
  EigenSystem eig;
  eig.dim = n;
  eig.energies = std::move(d.values);
  eig.vectors = std::move(d.vectors);
  // Fix the sign of each vector (largest-magnitude component positive) for reproducible output.
  for (std::size_t k = 0; k < n; ++k) {
    double* v = eig.vectors.data() + k * n;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[imax]) + 1e-14) imax = i;
    if (v[imax] < 0.0)
      for (std::size_t i = 0; i < n; ++i) v[i] = -v[i];
  }
  return eig;
}

double eigen_residual(const EigenSystem& eig, const SparseOperator& H) {
  const std::size_t n = eig.dim;
  std::vector<cplx> x(n), y(n);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double* v = eig.vector(k);
    for (std::size_t i = 0; i < n; ++i) x[i] = v[i];
    H.apply(x, y);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(y[i] - eig.energies[k] * x[i]);
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

double orthonormality_error(const EigenSystem& eig, std::size_t stride) {
  const std::size_t n = eig.dim;
  stride = std::max<std::size_t>(stride, 1);
  double worst = 0.0;
  for (std::size_t a = 0; a < n; a += stride)
    for (std::size_t b = a; b < n; b += stride) {
      const double d = cblas_ddot(static_cast<int>(n), eig.vector(a), 1, eig.vector(b), 1);
      worst = std::max(worst, std::abs(d - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

namespace {

// W = A V column by column (A sparse, real).
std::vector<double> apply_to_columns(const EigenSystem& eig, const SparseOperator& A) {
  const std::size_t n = eig.dim;
  const auto csr = A.csr();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double* v = eig.vector(k);
    double* out = w.data() + k * n;
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (auto p = csr.row_ptr[r]; p < csr.row_ptr[r + 1]; ++p) s += csr.val[p] * v[csr.col[p]];
      out[r] = s;
    }
  }
  return w;
}

}  // namespace

std::vector<double> diagonal_elements(const EigenSystem& eig, const SparseOperator& A) {
  if (A.dim() != eig.dim) throw ValidationError("diagonal_elements: dimension mismatch");
  const std::size_t n = eig.dim;
  std::vector<double> ann(n);
  const auto csr = A.csr();
  for (std::size_t k = 0; k < n; ++k) {
    const double* v = eig.vector(k);
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double row = 0.0;
      for (auto p = csr.row_ptr[r]; p < csr.row_ptr[r + 1]; ++p) row += csr.val[p] * v[csr.col[p]];
      s += v[r] * row;
    }
    ann[k] = s;
  }
  return ann;
}

std::vector<double> matrix_elements(const EigenSystem& eig, const SparseOperator& A, std::size_t max_dim) {
  if (A.dim() != eig.dim) throw ValidationError("matrix_elements: dimension mismatch");
  if (eig.dim > max_dim)
    throw ResourceError("matrix_elements: dimension " + std::to_string(eig.dim) + " exceeds " + std::to_string(max_dim));
  const int n = static_cast<int>(eig.dim);
  const auto w = apply_to_columns(eig, A);
  std::vector<double> out(eig.dim * eig.dim);
  // out = V^T W
  cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, n, n, n, 1.0, eig.vectors.data(), n, w.data(), n, 0.0,
              out.data(), n);
  return out;
}

double window_average(const EigenSystem& eig, const std::vector<double>& ann, double energy, double width) {
  const double eps = eig.normalized(energy);
  double s = 0.0;
  std::size_t c = 0;
  for (std::size_t k = 0; k < eig.dim; ++k)
    if (std::abs(eig.normalized(eig.energies[k]) - eps) <= 0.5 * width) {
      s += ann[k];
      ++c;
    }
  if (c == 0) throw NumericalError("window_average: empty window at E = " + std::to_string(energy));
  return s / static_cast<double>(c);
}

DiagonalStats diagonal_statistics(const EigenSystem& eig, const std::vector<double>& ann, double delta_eps,
                                  double central_fraction) {
  const std::size_t n = eig.dim;
  if (ann.size() != n) throw ValidationError("diagonal_statistics: size mismatch");
  if (!(delta_eps > 0.0 && delta_eps < 1.0)) throw ValidationError("diagonal_statistics: delta_eps out of range");
  if (!(central_fraction > 0.0 && central_fraction <= 1.0))
    throw ValidationError("diagonal_statistics: central_fraction out of range");

  std::vector<double> eps(n);
  for (std::size_t k = 0; k < n; ++k) eps[k] = eig.normalized(eig.energies[k]);

  DiagonalStats st;
  const auto nwin = static_cast<std::size_t>(std::ceil(1.0 / delta_eps - 1e-9));
  st.windows.resize(nwin);
  std::vector<double> s1(nwin, 0.0), s2(nwin, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto w = std::min(nwin - 1, static_cast<std::size_t>(eps[k] / delta_eps));
    s1[w] += ann[k];
    s2[w] += ann[k] * ann[k];
    ++st.windows[w].count;
  }
  for (std::size_t w = 0; w < nwin; ++w) {
    auto& win = st.windows[w];
    win.eps_center = (static_cast<double>(w) + 0.5) * delta_eps;
    if (win.count == 0) {
      ++st.empty_windows;
      continue;
    }
    const double c = static_cast<double>(win.count);
    win.mean = s1[w] / c;
    win.stddev = std::sqrt(std::max(0.0, s2[w] / c - win.mean * win.mean));
  }

  // Running mean over |eps_m - eps_k| <= delta_eps / 2 (two pointers on sorted eps).
  st.running_mean.resize(n);
  std::size_t lo = 0, hi = 0;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    while (hi < n && eps[hi] <= eps[k] + 0.5 * delta_eps) acc += ann[hi++];
    while (eps[lo] < eps[k] - 0.5 * delta_eps) acc -= ann[lo++];
    st.running_mean[k] = acc / static_cast<double>(hi - lo);
  }

  const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(central_fraction * n)));
  const std::size_t first = (n - std::min(count, n)) / 2;
  const std::size_t last = std::min(n, first + count);
  double d1 = 0.0, d2 = 0.0, r1 = 0.0, r2 = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const double d = ann[k] - st.running_mean[k];
    d1 += d;
    d2 += d * d;
    r1 += ann[k];
    r2 += ann[k] * ann[k];
  }
  const double c = static_cast<double>(last - first);
  st.central_count = last - first;
  st.central_variance = std::max(0.0, d2 / c - (d1 / c) * (d1 / c));
  st.central_raw_variance = std::max(0.0, r2 / c - (r1 / c) * (r1 / c));
  return st;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit_power_law: need matching samples, at least two");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw ValidationError("fit_power_law: samples must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = std::exp(intercept);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::log(y[i]) - intercept - fit.exponent * std::log(x[i]);
    r += e * e;
  }
  fit.residual_rms = std::sqrt(r / n);
  return fit;
}

namespace {

struct BinAccumulator {
  std::vector<double> s1, s2, sabs, sf2;
  std::vector<std::size_t> count;
  long half = 0;
  double d_omega = 0.2;

  BinAccumulator(double d, double omega_max) : half(static_cast<long>(std::floor(omega_max / d))), d_omega(d) {
    const auto nb = static_cast<std::size_t>(2 * half + 1);
    s1.assign(nb, 0.0);
    s2.assign(nb, 0.0);
    sabs.assign(nb, 0.0);
    sf2.assign(nb, 0.0);
    count.assign(nb, 0);
  }

  void add(double omega, double a, double density) {
    const long k = std::lround(omega / d_omega);
    if (k < -half || k > half) return;
    const auto i = static_cast<std::size_t>(k + half);
    s1[i] += a;
    s2[i] += a * a;
    sabs[i] += std::abs(a);
    sf2[i] += a * a * density;
    ++count[i];
  }

  std::vector<SpectralFunctionBin> finish(std::size_t min_count) const {
    std::vector<SpectralFunctionBin> out(count.size());
    for (std::size_t i = 0; i < count.size(); ++i) {
      auto& b = out[i];
      b.omega = static_cast<double>(static_cast<long>(i) - half) * d_omega;
      b.count = count[i];
      b.low_statistics = count[i] < min_count;
      if (count[i] == 0) continue;
      const double c = static_cast<double>(count[i]);
      b.mean = s1[i] / c;
      b.mean_abs = sabs[i] / c;
      b.variance = std::max(0.0, s2[i] / c - b.mean * b.mean);
      b.f2 = sf2[i] / c;
    }
    return out;
  }
};

void check_pairs_input(const EigenSystem& eig, const std::vector<double>& amn, const OffDiagonalOptions& opts) {
  if (amn.size() != eig.dim * eig.dim) throw ValidationError("offdiagonal: matrix size mismatch");
  if (!(opts.d_omega > 0.0) || !(opts.omega_max > 0.0)) throw ValidationError("offdiagonal: bad omega binning");
}

std::optional<std::string> degeneracy_flag(const EigenSystem& eig) {
  const double frac = degenerate_gap_fraction(eig);
  if (frac > 1e-3) return "degenerate levels: " + std::to_string(100.0 * frac) + "% of gaps below 1e-10";
  return std::nullopt;
}

}  // namespace

double degenerate_gap_fraction(const EigenSystem& eig, double gap) {
  if (eig.dim < 2) return 0.0;
  std::size_t c = 0;
  for (std::size_t k = 1; k < eig.dim; ++k)
    if (eig.energies[k] - eig.energies[k - 1] < gap) ++c;
  return static_cast<double>(c) / static_cast<double>(eig.dim - 1);
}

SpectralFunctionGrid offdiagonal_spectral_function(const EigenSystem& eig, const std::vector<double>& amn,
                                                   double beta_target,
                                                   const std::function<double(double)>& beta_of_energy,
                                                   const std::function<double(double)>& density_of_energy,
                                                   const OffDiagonalOptions& opts) {
  check_pairs_input(eig, amn, opts);
  if (!(beta_target > 0.0)) throw ValidationError("offdiagonal_spectral_function: beta_target must be positive");

  // Energy slice where beta(E) lies within the tolerance band.
  SpectralFunctionGrid grid;
  grid.beta_target = beta_target;
  grid.d_omega = opts.d_omega;
  bool found = false;
  const int samples = 4000;
  for (int i = 0; i <= samples; ++i) {
    const double e = eig.e_min() + (eig.e_max() - eig.e_min()) * i / samples;
    double b = 0.0;
    try {
      b = beta_of_energy(e);
    } catch (const std::exception&) {
      continue;
    }
    if (std::abs(b - beta_target) <= opts.beta_tolerance * beta_target) {
      if (!found) grid.e_low = e;
      grid.e_high = e;
      found = true;
    }
  }
  if (!found) throw NumericalError("offdiagonal_spectral_function: no energies at the target temperature");

  BinAccumulator acc(opts.d_omega, opts.omega_max);
  const std::size_t n = eig.dim;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = m + 1; k < n; ++k) {
      const double emn = 0.5 * (eig.energies[m] + eig.energies[k]);
      if (emn < grid.e_low || emn > grid.e_high) continue;
      const double w = eig.energies[k] - eig.energies[m];
      if (w > opts.omega_max + opts.d_omega) break;
      const double a = amn[m + k * n];
      const double rho = density_of_energy(emn);
      acc.add(w, a, rho);
      acc.add(-w, a, rho);
    }
  grid.bins = acc.finish(opts.min_count);
  grid.flag = degeneracy_flag(eig);
  return grid;
}

SpectralFunctionGrid offdiagonal_magnitude_profile(const EigenSystem& eig, const std::vector<double>& amn, double e_low,
                                                   double e_high, const OffDiagonalOptions& opts) {
  check_pairs_input(eig, amn, opts);
  if (!(e_high >= e_low)) throw ValidationError("offdiagonal_magnitude_profile: empty energy window");
  SpectralFunctionGrid grid;
  grid.e_low = e_low;
  grid.e_high = e_high;
  grid.d_omega = opts.d_omega;
  BinAccumulator acc(opts.d_omega, opts.omega_max);
  const std::size_t n = eig.dim;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = m + 1; k < n; ++k) {
      const double emn = 0.5 * (eig.energies[m] + eig.energies[k]);
      if (emn < e_low || emn > e_high) continue;
      const double w = eig.energies[k] - eig.energies[m];
      if (w > opts.omega_max + opts.d_omega) break;
      const double a = amn[m + k * n];
      acc.add(w, a, 1.0);
      acc.add(-w, a, 1.0);
    }
  grid.bins = acc.finish(opts.min_count);
  grid.flag = degeneracy_flag(eig);
  return grid;
}

}  // namespace puretherm
