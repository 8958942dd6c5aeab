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

#include "actc/features.hpp"

#include <algorithm>

#include "actc/error.hpp"

namespace actc {

Tensor stack_and_decimate(const Tensor& raw) {
  if (raw.rank() != 2) throw DimensionError("stack: expected T x F, got " + shape_string(raw.shape()));
  const std::size_t steps = raw.rows();
  const std::size_t dim = raw.cols();
  const std::size_t out_rows = (steps + 1) / 2;
  Tensor out = Tensor::matrix(out_rows, 2 * dim);
  for (std::size_t k = 0; k < out_rows; ++k) {
    const std::size_t second = std::min(2 * k + 1, steps - 1);
    auto row = out.row(k);
    std::ranges::copy(raw.row(2 * k), row.begin());
    std::ranges::copy(raw.row(second), row.begin() + static_cast<std::ptrdiff_t>(dim));
  }
  return out;
}

Tensor unstack(const Tensor& stacked) {
  if (stacked.rank() != 2 || stacked.cols() % 2 != 0) {
    throw DimensionError("unstack: expected K x 2F, got " + shape_string(stacked.shape()));
  }
  const std::size_t dim = stacked.cols() / 2;
  Tensor out = Tensor::matrix(2 * stacked.rows(), dim);
  for (std::size_t k = 0; k < stacked.rows(); ++k) {
    auto row = stacked.row(k);
    std::copy_n(row.begin(), dim, out.row(2 * k).begin());
    std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(dim), dim, out.row(2 * k + 1).begin());
  }
  return out;
}

void subtract_time_mean(Tensor& features) {
  const std::size_t steps = features.rows();
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < steps; ++t) mean += features(t, c);
    mean /= static_cast<double>(steps);
    for (std::size_t t = 0; t < steps; ++t) features(t, c) -= mean;
  }
}

}  // namespace actc
