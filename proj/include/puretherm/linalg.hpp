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
 * @file linalg.hpp
 * @brief Eigensolvers: dense symmetric (LAPACK dsyevr) and Lanczos with full
 *        reorthogonalisation for the extremal eigenpairs of large sectors.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "puretherm/hilbert.hpp"
#include "puretherm/operators.hpp"

namespace puretherm {

struct LanczosOptions {
  int krylov_dim = 200;
  int max_restarts = 30;
  /// Convergence threshold on the residual estimate, relative to max(1, |E|).
  double tol = 1e-11;
  std::uint64_t seed = 0x5eedULL;
};

struct EigenPair {
  double energy = 0.0;
  StateVector state;
  /// ||H psi - E psi||
  double residual = 0.0;
  int iterations = 0;
  bool dense = false;
};

struct SpectralBounds {
  double e_min = 0.0;
  double e_max = 0.0;
};

/// Eigen-decomposition of a real symmetric matrix; values ascending,
/// vectors column-major (column n = eigenvector n).
struct DenseEigen {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;

  const double* vector(std::size_t k) const { return vectors.data() + k * n; }
};

/// `a` is the full n x n symmetric matrix (row- or column-major, identical).
DenseEigen dense_eigh(std::vector<double> a, std::size_t n, bool want_vectors);

/// Lowest eigenpair. Dense solve when dim <= dense_threshold, Lanczos otherwise.
/// Throws NumericalError when the residual check fails.
EigenPair ground_state(const SparseOperator& H, std::size_t dense_threshold = 4000);
EigenPair ground_state_dense(const SparseOperator& H);
EigenPair ground_state_lanczos(const SparseOperator& H, const LanczosOptions& opts = {});

/// Converged extremal Ritz values.
SpectralBounds spectral_bounds(const SparseOperator& H, const LanczosOptions& opts = {});

}  // namespace puretherm
