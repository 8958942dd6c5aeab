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

// Inner-loop arithmetic used by the layer code. Every routine has a scalar
// reference version; vectorized versions (AVX2+FMA on x86-64, NEON on
// AArch64) are picked at runtime from what the CPU reports. Vectorized
// results agree with the scalar reference up to floating-point reassociation
// (see tests/simd_kernels_test.cpp), so the chosen backend is fixed for the
// lifetime of a process to keep training runs bit-reproducible.
//
// The ACTC_SIMD environment variable ("scalar", "avx2", "neon") overrides the
// automatic choice.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace actc::simd {

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view backend_name(Backend b);

struct KernelTable {
  Backend backend;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[j] += sum_i x[i] * w[i, j]          (row vector times rows x cols matrix)
  void (*vecmat)(const double* x, const double* w, std::size_t rows, std::size_t cols, double* y);
  // y[i] += sum_j w[i, j] * g[j]          (matrix times column vector)
  void (*matvec)(const double* w, const double* g, std::size_t rows, std::size_t cols, double* y);
  // w[i, j] += x[i] * g[j]
  void (*outer_acc)(const double* x, const double* g, std::size_t rows, std::size_t cols, double* w);
};

const KernelTable& scalar_kernels();

// nullptr when the backend was not compiled in or the CPU lacks support.
const KernelTable* backend_kernels(Backend b);

std::vector<Backend> available_backends();

// Active table. Resolved once on first call.
const KernelTable& kernels();

// Test hook. Returns false (and changes nothing) if `b` is unavailable.
bool force_backend(Backend b);

}  // namespace actc::simd
