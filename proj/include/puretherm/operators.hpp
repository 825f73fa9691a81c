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
 * @file operators.hpp
 * @brief Staggered-field XXZ chain, drive term and probe observable as sparse
 *        operators on a BasisSector.
 *
 * Pauli normalisation throughout: sigma^x sigma^x + sigma^y sigma^y exchanges
 * adjacent 10 <-> 01 with amplitude 2J.
 */
#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "puretherm/hilbert.hpp"
#include "puretherm/simd/kernels.hpp"

namespace puretherm {

struct ChainParams {
  int sites = 0;
  double J = 1.0;
  double Delta = 0.55;
  /// Staggered field on odd sites, in units of J.
  double h = 1.0;
  /// Extra field on site 1 that breaks translation invariance; 0 disables it.
  double delta_h = 0.1;
  bool periodic = true;

  bool operator==(const ChainParams&) const = default;
};

struct DriveParams {
  double amplitude = 2.0;
  double omega = 8.0;
  /// 1-based driven site, must be odd.
  int site = 1;
  double t_prep = 0.0;

  bool operator==(const DriveParams&) const = default;
};

/// j0 = L/2 if L/2 is odd, else L/2 + 1.
int default_probe_site(int sites);

/// a sin(omega t)
double drive_coefficient(double t, const DriveParams& drive) noexcept;

/// Normalised Gaussian weights u_j ~ exp(-(j - j0)^2) over sites, truncated
/// where the unnormalised weight drops below 1e-3 (five sites).
struct ProbeProfile {
  int center = 1;
  std::vector<double> weights;  // index j-1

  static ProbeProfile gaussian(int sites, int center);
  double sum() const noexcept;
};

class SparseOperator {
 public:
  struct Triplet {
    simd::index_t row;
    simd::index_t col;
    double value;
  };

  SparseOperator() = default;

  /// Duplicate (row, col) entries are summed; explicit zeros are dropped.
  static SparseOperator from_triplets(std::shared_ptr<const BasisSector> sector, std::vector<Triplet> triplets);
  static SparseOperator diagonal(std::shared_ptr<const BasisSector> sector, std::vector<double> diag);

  const std::shared_ptr<const BasisSector>& sector_ptr() const noexcept { return sector_; }
  std::size_t dim() const noexcept { return diag_.size(); }
  std::size_t nnz() const noexcept { return val_.size(); }
  bool is_diagonal() const noexcept { return is_diagonal_; }

  /// Diagonal entries (always materialised).
  std::span<const double> diag() const noexcept { return diag_; }
  simd::CsrRef csr() const noexcept { return {dim(), row_ptr_.data(), col_.data(), val_.data()}; }

  /// y = A x
  void apply(std::span<const cplx> x, std::span<cplx> y) const;
  /// <x|A|x> for real-symmetric A
  double expectation(std::span<const cplx> x) const;

  double entry(std::size_t row, std::size_t col) const;
  double max_abs() const noexcept;
  /// max |A_ij - A_ji|
  double hermiticity_residual() const;
  std::vector<double> to_dense() const;  // row-major dim x dim

  /// Lines "row col re im", 0-based indices, %.17g values.
  void write_triplets(std::ostream& os) const;

 private:
  std::shared_ptr<const BasisSector> sector_;
  std::vector<simd::index_t> row_ptr_;
  std::vector<simd::index_t> col_;
  std::vector<double> val_;
  std::vector<double> diag_;
  bool is_diagonal_ = false;
};

SparseOperator build_static_hamiltonian(const ChainParams& params, std::shared_ptr<const BasisSector> sector);
SparseOperator build_probe_observable(const ProbeProfile& profile, std::shared_ptr<const BasisSector> sector);
/// sigma^z on a 1-based site.
SparseOperator build_sigma_z(int site, std::shared_ptr<const BasisSector> sector);
/// N = (1/2) sum_j (1 + sigma^z_j)
SparseOperator build_number_operator(std::shared_ptr<const BasisSector> sector);

}  // namespace puretherm
