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

// Data-parallel inner loops used by loss/risk evaluation.
//
// Every kernel has a scalar reference implementation. Vectorized variants
// (currently AVX2+FMA on x86-64) are compiled in separate translation units
// and selected once per process at first use. The selection can be pinned
// with the WGDP_SIMD environment variable ("scalar" or "avx2"); the choice
// never changes mid-process, so replay within a process is bit-exact.
// Scalar and SIMD variants agree to rounding, not bit-for-bit, because the
// reductions are reassociated.

#ifndef WGDP_KERNELS_HPP_
#define WGDP_KERNELS_HPP_

#include <cstddef>
#include <string_view>

namespace wgdp::kernels {

struct KernelTable {
  std::string_view name;

  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // loss[i] = margin[i] + offset[i] + shift[i];  slope[i] = 1
  void (*affine_terms)(const double* offset, const double* shift,
                       const double* margin, double* loss, double* slope,
                       std::size_t n);
  // u = 1 - label[i] * margin[i]
  // loss[i] = max(0, u) + shift[i];  slope[i] = (u > 0) ? -label[i] : 0
  void (*hinge_terms)(const double* label, const double* shift,
                      const double* margin, double* loss, double* slope,
                      std::size_t n);
  // x[i] *= y[i]
  void (*multiply)(double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks
// AVX2/FMA.
const KernelTable* avx2_table();

// The table selected for this process.
const KernelTable& active();

}  // namespace wgdp::kernels

#endif  // WGDP_KERNELS_HPP_
