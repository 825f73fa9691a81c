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

/**
 * @file hilbert.hpp
 * @brief Fixed-magnetisation basis of an L-site spin-1/2 chain and state vectors on it.
 *
 * Bit convention: bit j (0-based) of a configuration mask is set iff site j+1
 * has sigma^z = +1. Configurations are enumerated in ascending mask order, which
 * for fixed popcount coincides with colexicographic order of the set-bit
 * positions; the ordinal of a mask is therefore its rank in the combinatorial
 * number system and is computed in O(N) without a hash table.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace puretherm {

using cplx = std::complex<double>;
using mask_t = std::uint32_t;

/// Binomial coefficient C(n, k) for 0 <= n <= 64; zero when k is out of range.
std::uint64_t binomial(int n, int k) noexcept;

class BasisSector {
 public:
  static constexpr int kMaxSites = 20;

  /// All masks of `sites` bits with exactly `excitations` bits set.
  BasisSector(int sites, int excitations);

  /// N = L/2; rejects odd L.
  static std::shared_ptr<const BasisSector> half_filled(int sites);
  static std::shared_ptr<const BasisSector> make(int sites, int excitations);

  int sites() const noexcept { return sites_; }
  int excitations() const noexcept { return excitations_; }
  std::size_t dim() const noexcept { return configs_.size(); }

  std::span<const mask_t> configs() const noexcept { return configs_; }
  mask_t config(std::size_t i) const { return configs_.at(i); }

  /// Ordinal of `mask`; throws std::domain_error on wrong popcount or stray bits.
  std::size_t index_of(mask_t mask) const;
  std::optional<std::size_t> find(mask_t mask) const noexcept;

 private:
  int sites_;
  int excitations_;
  std::vector<mask_t> configs_;
};

/// Unit-norm amplitude vector over a sector.
class StateVector {
 public:
  /// Normalises `amps`; throws if the length mismatches or the vector is zero.
  StateVector(std::shared_ptr<const BasisSector> sector, std::vector<cplx> amps);

  static StateVector basis_state(std::shared_ptr<const BasisSector> sector, std::size_t index);

  const BasisSector& sector() const noexcept { return *sector_; }
  const std::shared_ptr<const BasisSector>& sector_ptr() const noexcept { return sector_; }
  std::size_t dim() const noexcept { return amps_.size(); }

  std::span<const cplx> amps() const noexcept { return amps_; }
  std::span<cplx> amps() noexcept { return amps_; }
  std::vector<cplx>& data() noexcept { return amps_; }

  double norm() const noexcept;
  void normalize();
  /// <this|other>
  cplx overlap(const StateVector& other) const;

 private:
  std::shared_ptr<const BasisSector> sector_;
  std::vector<cplx> amps_;
};

}  // namespace puretherm
