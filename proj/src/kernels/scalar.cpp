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

#include "wgdp/kernels.hpp"

namespace wgdp::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void affine_terms_scalar(const double* offset, const double* shift,
                         const double* margin, double* loss, double* slope,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    loss[i] = margin[i] + offset[i] + shift[i];
    slope[i] = 1.0;
  }
}

void hinge_terms_scalar(const double* label, const double* shift,
                        const double* margin, double* loss, double* slope,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double u = 1.0 - label[i] * margin[i];
    const bool active = u > 0.0;
    loss[i] = (active ? u : 0.0) + shift[i];
    slope[i] = active ? -label[i] : 0.0;
  }
}

void multiply_scalar(double* x, const double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= y[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",          dot_scalar,          axpy_scalar,
      sum_scalar,        sum_squares_scalar,  affine_terms_scalar,
      hinge_terms_scalar, multiply_scalar};
  return table;
}

}  // namespace wgdp::kernels
