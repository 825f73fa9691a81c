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

#include "puretherm/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "puretherm/errors.hpp"

namespace puretherm {

namespace {

inline double spin(mask_t m, int bit) { return ((m >> bit) & 1u) ? 1.0 : -1.0; }

void require_sector(const std::shared_ptr<const BasisSector>& sector) {
  if (!sector) throw ValidationError("operator construction: null sector");
}

}  // namespace

int default_probe_site(int sites) {
  const int half = sites / 2;
  return (half % 2 == 1) ? half : half + 1;
}

double drive_coefficient(double t, const DriveParams& drive) noexcept {
  return drive.amplitude * std::sin(drive.omega * t);
}

ProbeProfile ProbeProfile::gaussian(int sites, int center) {
  if (center < 1 || center > sites) throw ValidationError("probe centre outside the chain");
  ProbeProfile p;
  p.center = center;
  p.weights.assign(static_cast<std::size_t>(sites), 0.0);
  for (int j = 1; j <= sites; ++j) {
    int d = std::abs(j - center);
    d = std::min(d, sites - d);  // periodic distance
    const double w = std::exp(-static_cast<double>(d * d));
    if (w >= 1e-3) p.weights[static_cast<std::size_t>(j - 1)] = w;
  }
  const double s = p.sum();
  for (double& w : p.weights) w /= s;
  return p;
}

double ProbeProfile::sum() const noexcept {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

SparseOperator SparseOperator::from_triplets(std::shared_ptr<const BasisSector> sector,
                                             std::vector<Triplet> triplets) {
  require_sector(sector);
  const std::size_t n = sector->dim();
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });

  SparseOperator op;
  op.sector_ = std::move(sector);
  op.row_ptr_.assign(n + 1, 0);
  op.diag_.assign(n, 0.0);
  op.col_.reserve(triplets.size());
  op.val_.reserve(triplets.size());

  std::size_t k = 0;
  for (std::size_t r = 0; r < n; ++r) {
    while (k < triplets.size() && triplets[k].row == r) {
      const simd::index_t c = triplets[k].col;
      if (c >= n) throw std::out_of_range("triplet column outside the sector");
      double v = 0.0;
      while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) v += triplets[k++].value;
      if (v != 0.0) {
        op.col_.push_back(c);
        op.val_.push_back(v);
        if (c == r) op.diag_[r] = v;
      }
    }
    if (k < triplets.size() && triplets[k].row < r) throw std::out_of_range("triplet row outside the sector");
    op.row_ptr_[r + 1] = static_cast<simd::index_t>(op.col_.size());
  }
  if (k != triplets.size()) throw std::out_of_range("triplet row outside the sector");

  op.is_diagonal_ = true;
  for (std::size_t r = 0; r < n && op.is_diagonal_; ++r)
    for (auto i = op.row_ptr_[r]; i < op.row_ptr_[r + 1]; ++i)
      if (op.col_[i] != r) {
        op.is_diagonal_ = false;
        break;
      }
  return op;
}

SparseOperator SparseOperator::diagonal(std::shared_ptr<const BasisSector> sector, std::vector<double> diag) {
  require_sector(sector);
  if (diag.size() != sector->dim()) throw std::invalid_argument("diagonal operator: size mismatch");
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i)
    t.push_back({static_cast<simd::index_t>(i), static_cast<simd::index_t>(i), diag[i]});
  return from_triplets(std::move(sector), std::move(t));
}

void SparseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim() || y.size() != dim()) throw std::invalid_argument("SparseOperator::apply: size mismatch");
  if (is_diagonal_) {
    for (std::size_t i = 0; i < dim(); ++i) y[i] = diag_[i] * x[i];
    return;
  }
  simd::active().csr_apply(csr(), 1.0, x.data(), 0.0, y.data());
}

double SparseOperator::expectation(std::span<const cplx> x) const {
  if (x.size() != dim()) throw std::invalid_argument("SparseOperator::expectation: size mismatch");
  const auto& k = simd::active();
  if (is_diagonal_) return k.diag_expect(dim(), diag_.data(), x.data());
  std::vector<cplx> y(dim());
  k.csr_apply(csr(), 1.0, x.data(), 0.0, y.data());
  return k.dotc(dim(), x.data(), y.data()).real();
}

double SparseOperator::entry(std::size_t row, std::size_t col) const {
  if (row >= dim() || col >= dim()) throw std::out_of_range("SparseOperator::entry");
  const auto* b = col_.data() + row_ptr_[row];
  const auto* e = col_.data() + row_ptr_[row + 1];
  const auto* it = std::lower_bound(b, e, static_cast<simd::index_t>(col));
  return (it != e && *it == col) ? val_[static_cast<std::size_t>(it - col_.data())] : 0.0;
}

double SparseOperator::max_abs() const noexcept {
  double m = 0.0;
  for (double v : val_) m = std::max(m, std::abs(v));
  return m;
}

double SparseOperator::hermiticity_residual() const {
  double r = 0.0;
  for (std::size_t i = 0; i < dim(); ++i)
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) r = std::max(r, std::abs(val_[k] - entry(col_[k], i)));
  return r;
}

std::vector<double> SparseOperator::to_dense() const {
  const std::size_t n = dim();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i * n + col_[k]] = val_[k];
  return d;
}

void SparseOperator::write_triplets(std::ostream& os) const {
  char buf[96];
  for (std::size_t i = 0; i < dim(); ++i)
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu %u %.17g %.17g\n", i, col_[k], val_[k], 0.0);
      os << buf;
    }
}

SparseOperator build_static_hamiltonian(const ChainParams& p, std::shared_ptr<const BasisSector> sector) {
  require_sector(sector);
  if (sector->sites() != p.sites)
    throw ValidationError("Hamiltonian: sector has L=" + std::to_string(sector->sites()) + " but params have L=" +
                          std::to_string(p.sites));
  if (!(p.J > 0.0)) throw ValidationError("Hamiltonian: J must be positive");
  if (!p.periodic) throw ValidationError("Hamiltonian: only periodic boundary conditions are supported");

  const int L = p.sites;
  const auto configs = sector->configs();
  std::vector<SparseOperator::Triplet> t;
  t.reserve(configs.size() * static_cast<std::size_t>(L + 1));

  for (std::size_t idx = 0; idx < configs.size(); ++idx) {
    const mask_t m = configs[idx];
    double d = 0.0;
    for (int j = 0; j < L; ++j) {
      const int jn = (j + 1) % L;
      d += p.J * p.Delta * spin(m, j) * spin(m, jn);
      if (j % 2 == 0) d += p.h * spin(m, j);  // bit 0,2,... = sites 1,3,...
      const bool bj = (m >> j) & 1u;
      const bool bn = (m >> jn) & 1u;
      if (bj != bn) {
        const mask_t flipped = m ^ ((mask_t{1} << j) | (mask_t{1} << jn));
        t.push_back({static_cast<simd::index_t>(idx), static_cast<simd::index_t>(sector->index_of(flipped)), 2.0 * p.J});
      }
    }
    d += p.delta_h * spin(m, 0);
    t.push_back({static_cast<simd::index_t>(idx), static_cast<simd::index_t>(idx), d});
  }
  return SparseOperator::from_triplets(std::move(sector), std::move(t));
}

SparseOperator build_probe_observable(const ProbeProfile& profile, std::shared_ptr<const BasisSector> sector) {
  require_sector(sector);
  if (static_cast<int>(profile.weights.size()) != sector->sites())
    throw ValidationError("probe profile length does not match the sector");
  const auto configs = sector->configs();
  std::vector<double> d(configs.size(), 0.0);
  for (std::size_t i = 0; i < configs.size(); ++i)
    for (int j = 0; j < sector->sites(); ++j) d[i] += profile.weights[static_cast<std::size_t>(j)] * spin(configs[i], j);
  return SparseOperator::diagonal(std::move(sector), std::move(d));
}

SparseOperator build_sigma_z(int site, std::shared_ptr<const BasisSector> sector) {
  require_sector(sector);
  if (site < 1 || site > sector->sites()) throw ValidationError("sigma_z: site out of range");
  const auto configs = sector->configs();
  std::vector<double> d(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) d[i] = spin(configs[i], site - 1);
  return SparseOperator::diagonal(std::move(sector), std::move(d));
}

SparseOperator build_number_operator(std::shared_ptr<const BasisSector> sector) {
  require_sector(sector);
  const auto configs = sector->configs();
  std::vector<double> d(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) d[i] = static_cast<double>(std::popcount(configs[i]));
  return SparseOperator::diagonal(std::move(sector), std::move(d));
}

}  // namespace puretherm
