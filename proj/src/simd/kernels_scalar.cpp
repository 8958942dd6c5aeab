// Copyright 2026 The actc Authors.
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

#include "actc/simd/kernels.hpp"

namespace actc::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void vecmat(const double* x, const double* w, std::size_t rows, std::size_t cols, double* y) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double xi = x[i];
    const double* wr = w + i * cols;
    for (std::size_t j = 0; j < cols; ++j) y[j] += xi * wr[j];
  }
}

void matvec(const double* w, const double* g, std::size_t rows, std::size_t cols, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] += dot(w + i * cols, g, cols);
}

void outer_acc(const double* x, const double* g, std::size_t rows, std::size_t cols, double* w) {
  for (std::size_t i = 0; i < rows; ++i) axpy(x[i], g, w + i * cols, cols);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::kScalar, dot, axpy, vecmat, matvec, outer_acc};
  return table;
}

}  // namespace actc::simd
