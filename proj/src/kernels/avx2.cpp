//
// Copyright 2026 The wgdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// AVX2 + FMA variants. This translation unit is built with -mavx2 -mfma and
// must only be entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include "wgdp/kernels.hpp"

namespace wgdp::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sum_squares_avx2(const double* x, std::size_t n) {
  return dot_avx2(x, x, n);
}

void affine_terms_avx2(const double* offset, const double* shift,
                       const double* margin, double* loss, double* slope,
                       std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(
        _mm256_add_pd(_mm256_loadu_pd(margin + i), _mm256_loadu_pd(offset + i)),
        _mm256_loadu_pd(shift + i));
    _mm256_storeu_pd(loss + i, v);
    _mm256_storeu_pd(slope + i, one);
  }
  for (; i < n; ++i) {
    loss[i] = margin[i] + offset[i] + shift[i];
    slope[i] = 1.0;
  }
}

void hinge_terms_avx2(const double* label, const double* shift,
                      const double* margin, double* loss, double* slope,
                      std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y = _mm256_loadu_pd(label + i);
    // u = 1 - y*m, computed as fnmadd to keep a single rounding.
    const __m256d u = _mm256_fnmadd_pd(y, _mm256_loadu_pd(margin + i), one);
    const __m256d active = _mm256_cmp_pd(u, zero, _CMP_GT_OQ);
    const __m256d hinge = _mm256_and_pd(active, u);
    _mm256_storeu_pd(loss + i,
                     _mm256_add_pd(hinge, _mm256_loadu_pd(shift + i)));
    _mm256_storeu_pd(slope + i,
                     _mm256_and_pd(active, _mm256_sub_pd(zero, y)));
  }
  for (; i < n; ++i) {
    const double u = 1.0 - label[i] * margin[i];
    const bool on = u > 0.0;
    loss[i] = (on ? u : 0.0) + shift[i];
    slope[i] = on ? -label[i] : 0.0;
  }
}

void multiply_avx2(double* x, const double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) x[i] *= y[i];
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{
      "avx2",          dot_avx2,          axpy_avx2,
      sum_avx2,        sum_squares_avx2,  affine_terms_avx2,
      hinge_terms_avx2, multiply_avx2};
  return table;
}

}  // namespace wgdp::kernels
