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

#include "puretherm/hilbert.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "puretherm/errors.hpp"
#include "puretherm/simd/kernels.hpp"

namespace puretherm {

std::uint64_t binomial(int n, int k) noexcept {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return c;
}

BasisSector::BasisSector(int sites, int excitations) : sites_(sites), excitations_(excitations) {
  if (sites < 1 || sites > kMaxSites)
    throw ResourceError("BasisSector: site count " + std::to_string(sites) + " outside [1, " +
                            std::to_string(kMaxSites) + "]");
  if (excitations < 0 || excitations > sites)
    throw std::invalid_argument("BasisSector: excitation count must lie in [0, L]");

  configs_.reserve(binomial(sites, excitations));
  if (excitations == 0) {
    configs_.push_back(0);
    return;
  }
  // Gosper's hack walks same-popcount masks in ascending order.
  mask_t m = (mask_t{1} << excitations) - 1;
  const mask_t limit = mask_t{1} << sites;
  while (m < limit) {
    configs_.push_back(m);
    const mask_t c = m & (~m + 1);
    const mask_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
}

std::shared_ptr<const BasisSector> BasisSector::half_filled(int sites) {
  if (sites % 2 != 0) throw std::invalid_argument("half filling requires an even number of sites");
  return std::make_shared<const BasisSector>(sites, sites / 2);
}

std::shared_ptr<const BasisSector> BasisSector::make(int sites, int excitations) {
  return std::make_shared<const BasisSector>(sites, excitations);
}

std::optional<std::size_t> BasisSector::find(mask_t mask) const noexcept {
  if (sites_ < 32 && (mask >> sites_) != 0) return std::nullopt;
  if (std::popcount(mask) != excitations_) return std::nullopt;
  std::size_t rank = 0;
  int k = 1;
  while (mask != 0) {
    const int pos = std::countr_zero(mask);
    rank += binomial(pos, k);
    ++k;
    mask &= mask - 1;
  }
  return rank;
}

std::size_t BasisSector::index_of(mask_t mask) const {
  if (auto i = find(mask)) return *i;
  throw std::domain_error("mask " + std::to_string(mask) + " is not in the (L=" + std::to_string(sites_) +
                          ", N=" + std::to_string(excitations_) + ") sector");
}

StateVector::StateVector(std::shared_ptr<const BasisSector> sector, std::vector<cplx> amps)
    : sector_(std::move(sector)), amps_(std::move(amps)) {
  if (!sector_) throw std::invalid_argument("StateVector: null sector");
  if (amps_.size() != sector_->dim()) throw std::invalid_argument("StateVector: amplitude count != sector dim");
  normalize();
}

StateVector StateVector::basis_state(std::shared_ptr<const BasisSector> sector, std::size_t index) {
  std::vector<cplx> a(sector->dim(), cplx{});
  a.at(index) = 1.0;
  return StateVector(std::move(sector), std::move(a));
}

double StateVector::norm() const noexcept { return std::sqrt(simd::active().norm2(amps_.size(), amps_.data())); }

void StateVector::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("StateVector: cannot normalise zero or non-finite vector");
  simd::active().scale(amps_.size(), 1.0 / n, amps_.data());
}

cplx StateVector::overlap(const StateVector& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("StateVector::overlap: dimension mismatch");
  return simd::active().dotc(amps_.size(), amps_.data(), other.amps_.data());
}

}  // namespace puretherm
