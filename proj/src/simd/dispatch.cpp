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

#include <cstdlib>
#include <string>

#include "actc/simd/kernels.hpp"

namespace actc::simd {

#if defined(ACTC_HAVE_AVX2)
const KernelTable& avx2_kernels_table();
#endif
#if defined(ACTC_HAVE_NEON)
const KernelTable& neon_kernels_table();
#endif

namespace {

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(ACTC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(ACTC_HAVE_NEON)
      return true;  // Advanced SIMD is mandatory on AArch64.
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* resolve() {
  if (const char* env = std::getenv("ACTC_SIMD")) {
    const std::string want(env);
    for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
      if (want == backend_name(b)) {
        if (const KernelTable* t = backend_kernels(b)) return t;
      }
    }
  }
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (const KernelTable* t = backend_kernels(b)) return t;
  }
  return &scalar_kernels();
}

const KernelTable*& active() {
  static const KernelTable* table = resolve();
  return table;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable* backend_kernels(Backend b) {
  if (!cpu_supports(b)) return nullptr;
  switch (b) {
    case Backend::kScalar:
      return &scalar_kernels();
    case Backend::kAvx2:
#if defined(ACTC_HAVE_AVX2)
      return &avx2_kernels_table();
#else
      return nullptr;
#endif
    case Backend::kNeon:
#if defined(ACTC_HAVE_NEON)
      return &neon_kernels_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
    if (backend_kernels(b) != nullptr) out.push_back(b);
  }
  return out;
}

const KernelTable& kernels() { return *active(); }

bool force_backend(Backend b) {
  const KernelTable* t = backend_kernels(b);
  if (t == nullptr) return false;
  active() = t;
  return true;
}

}  // namespace actc::simd
