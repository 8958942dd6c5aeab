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

#pragma once

#include "actc/tensor.hpp"

namespace actc {

// T x F -> ceil(T/2) x 2F. Row k is [raw(2k) ; raw(2k+1)]; an odd final frame
// is paired with itself.
Tensor stack_and_decimate(const Tensor& raw);

// Inverse of stack_and_decimate for even T.
Tensor unstack(const Tensor& stacked);

// Subtracts each column's mean over time, in place.
void subtract_time_mean(Tensor& features);

}  // namespace actc
