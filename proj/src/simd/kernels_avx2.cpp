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

// Compiled with -mavx2 -mfma; only reached after a cpuid check.

#include <immintrin.h>

#include "puretherm/simd/kernels.hpp"

namespace puretherm::simd::detail {
namespace {

// Two complex doubles per __m256d: [re0, im0, re1, im1].
inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

// a * x for packed complex x and broadcast complex a.
inline __m256d cmul(__m256d a_re, __m256d a_im, __m256d x) {
  const __m256d x_swap = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(a_re, x, _mm256_mul_pd(a_im, x_swap));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void csr_apply(const CsrRef& a, double alpha, const cplx* x, double beta, cplx* y) {
  const double* xd = as_doubles(x);
  for (std::size_t r = 0; r < a.rows; ++r) {
    index_t k = a.row_ptr[r];
    const index_t end = a.row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 1 < end; k += 2) {
      const __m128d x0 = _mm_loadu_pd(xd + 2 * static_cast<std::size_t>(a.col[k]));
      const __m128d x1 = _mm_loadu_pd(xd + 2 * static_cast<std::size_t>(a.col[k + 1]));
      const __m256d xx = _mm256_set_m128d(x1, x0);
      const __m256d vv = _mm256_set_pd(a.val[k + 1], a.val[k + 1], a.val[k], a.val[k]);
      acc = _mm256_fmadd_pd(vv, xx, acc);
    }
    __m128d sum = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    if (k < end) {
      const __m128d x0 = _mm_loadu_pd(xd + 2 * static_cast<std::size_t>(a.col[k]));
      sum = _mm_fmadd_pd(_mm_set1_pd(a.val[k]), x0, sum);
    }
    sum = _mm_mul_pd(_mm_set1_pd(alpha), sum);
    double* yr = as_doubles(y + r);
    if (beta != 0.0) sum = _mm_fmadd_pd(_mm_set1_pd(beta), _mm_loadu_pd(yr), sum);
    _mm_storeu_pd(yr, sum);
  }
}

void waxpy(std::size_t n, cplx a, const cplx* x, const cplx* y, cplx* w) {
  const __m256d a_re = _mm256_set1_pd(a.real());
  const __m256d a_im = _mm256_set1_pd(a.imag());
  const double* xd = as_doubles(x);
  const double* yd = as_doubles(y);
  double* wd = as_doubles(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(wd + 2 * i, _mm256_add_pd(yv, cmul(a_re, a_im, xv)));
  }
  for (; i < n; ++i) w[i] = y[i] + a * x[i];
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) { waxpy(n, a, x, y, y); }

void diag_axpy(std::size_t n, cplx a, const double* d, const cplx* x, cplx* y) {
  const __m256d a_re = _mm256_set1_pd(a.real());
  const __m256d a_im = _mm256_set1_pd(a.imag());
  const double* xd = as_doubles(x);
  double* yd = as_doubles(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d dd = _mm256_set_pd(d[i + 1], d[i + 1], d[i], d[i]);
    const __m256d xv = _mm256_mul_pd(dd, _mm256_loadu_pd(xd + 2 * i));
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul(a_re, a_im, xv)));
  }
  for (; i < n; ++i) y[i] += a * (d[i] * x[i]);
}

cplx dotc(std::size_t n, const cplx* x, const cplx* y) {
  const double* xd = as_doubles(x);
  const double* yd = as_doubles(y);
  __m256d acc_re = _mm256_setzero_pd();  // xr*yr, xi*yi
  __m256d acc_im = _mm256_setzero_pd();  // xi*yr, xr*yi
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0b0101), yv, acc_im);
  }
  double re = hsum(acc_re);
  // imag = sum(xr*yi - xi*yr): odd lanes minus even lanes
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc_im);
  double im = (lanes[1] - lanes[0]) + (lanes[3] - lanes[2]);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

double norm2(std::size_t n, const cplx* x) {
  const double* xd = as_doubles(x);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(xd + 2 * i);
    const __m256d b = _mm256_loadu_pd(xd + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

double diag_expect(std::size_t n, const double* d, const cplx* x) {
  const double* xd = as_doubles(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d dd = _mm256_set_pd(d[i + 1], d[i + 1], d[i], d[i]);
    acc = _mm256_fmadd_pd(dd, _mm256_mul_pd(xv, xv), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += d[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
  return s;
}

void scale(std::size_t n, double a, cplx* x) {
  const __m256d av = _mm256_set1_pd(a);
  double* xd = as_doubles(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) _mm256_storeu_pd(xd + 2 * i, _mm256_mul_pd(av, _mm256_loadu_pd(xd + 2 * i)));
  for (; i < n; ++i) x[i] *= a;
}

}  // namespace

const KernelTable avx2_table{Isa::avx2, csr_apply, axpy,        waxpy, diag_axpy,
                             dotc,      norm2,     diag_expect, scale};

}  // namespace puretherm::simd::detail
