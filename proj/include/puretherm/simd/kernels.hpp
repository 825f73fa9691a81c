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
 * @file kernels.hpp
 * @brief Vector kernels used by every inner loop (matvec, RK4 stages, Chebyshev
 *        recursion, Lanczos).
 *
 * Each kernel has a portable scalar reference and, where the host supports it,
 * an AVX2+FMA variant. The variant is chosen once at first use; the environment
 * variable PURETHERM_SIMD=scalar|avx2 overrides the choice. Within one ISA all
 * kernels are deterministic (fixed reduction order), so reruns are bit-identical.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace puretherm::simd {

using cplx = std::complex<double>;
using index_t = std::uint32_t;

enum class Isa { scalar, avx2 };

/// Compressed-sparse-row matrix with real entries, acting on complex vectors.
struct CsrRef {
  std::size_t rows = 0;
  const index_t* row_ptr = nullptr;
  const index_t* col = nullptr;
  const double* val = nullptr;
};

struct KernelTable {
  Isa isa;
  /// y = alpha * A x + beta * y.  beta == 0 never reads y.
  void (*csr_apply)(const CsrRef& a, double alpha, const cplx* x, double beta, cplx* y);
  /// y += a x
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  /// w = y + a x  (w may alias y)
  void (*waxpy)(std::size_t n, cplx a, const cplx* x, const cplx* y, cplx* w);
  /// y += a (d ∘ x), d real
  void (*diag_axpy)(std::size_t n, cplx a, const double* d, const cplx* x, cplx* y);
  /// sum_i conj(x_i) y_i
  cplx (*dotc)(std::size_t n, const cplx* x, const cplx* y);
  /// sum_i |x_i|^2
  double (*norm2)(std::size_t n, const cplx* x);
  /// sum_i d_i |x_i|^2
  double (*diag_expect)(std::size_t n, const double* d, const cplx* x);
  /// x *= a
  void (*scale)(std::size_t n, double a, cplx* x);
};

bool isa_supported(Isa isa) noexcept;
std::string_view isa_name(Isa isa) noexcept;

/// Table for a specific ISA, or nullptr when the host cannot run it.
const KernelTable* table_for(Isa isa) noexcept;

/// The table used by the library.
const KernelTable& active() noexcept;

namespace detail {
extern const KernelTable scalar_table;
#if defined(PURETHERM_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace puretherm::simd
