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

#include "puretherm/simd/kernels.hpp"

namespace puretherm::simd::detail {
namespace {

void csr_apply(const CsrRef& a, double alpha, const cplx* x, double beta, cplx* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double re = 0.0;
    double im = 0.0;
    for (index_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const cplx xv = x[a.col[k]];
      re += a.val[k] * xv.real();
      im += a.val[k] * xv.imag();
    }
    const cplx acc(alpha * re, alpha * im);
    y[r] = (beta == 0.0) ? acc : acc + beta * y[r];
  }
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void waxpy(std::size_t n, cplx a, const cplx* x, const cplx* y, cplx* w) {
  for (std::size_t i = 0; i < n; ++i) w[i] = y[i] + a * x[i];
}

void diag_axpy(std::size_t n, cplx a, const double* d, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * (d[i] * x[i]);
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double norm2(std::size_t n, const cplx* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

double diag_expect(std::size_t n, const double* d, const cplx* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += d[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
  return s;
}

void scale(std::size_t n, double a, cplx* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace

const KernelTable scalar_table{Isa::scalar, csr_apply, axpy,        waxpy, diag_axpy,
                               dotc,        norm2,     diag_expect, scale};

}  // namespace puretherm::simd::detail
