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

// Connectionist temporal classification over a per-frame log-probability
// lattice (T rows, V+1 columns, column 0 is the blank).

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "actc/autodiff.hpp"
#include "actc/tensor.hpp"

namespace actc {

inline constexpr int kBlank = 0;

// Phone indices in [1, V]; never contains the blank.
using LabelSequence = std::vector<int>;
// One symbol in [0, V] per frame.
using Alignment = std::vector<int>;

// Merges runs of equal symbols, then drops blanks.
LabelSequence collapse(std::span<const int> path);

// [blank, l1, blank, l2, ..., lL, blank]; length 2L+1.
std::vector<int> augment_labels(std::span<const int> labels);

// Fewest frames that can carry `labels`: L plus one per adjacent equal pair.
std::size_t min_frames(std::span<const int> labels);

double log_sum_exp(double a, double b);

struct CtcResult {
  double neg_log_likelihood = 0.0;
  Tensor grad_log_probs;  // d(-ln p)/d(log_probs), same shape as the lattice
};

// Forward-backward in log space. Throws FeasibilityError if the lattice has
// too few frames, ContractError if a row's probabilities do not sum to one
// within 1e-6, InvalidInput for labels outside [1, V].
CtcResult ctc_forward_backward(const Tensor& log_probs, std::span<const int> labels);

// Literal sum over every path whose collapse equals `labels`. Returns +inf
// when no path exists. Refuses (InvalidInput) when (V+1)^T exceeds 1e7.
double brute_force_ctc(const Tensor& log_probs, std::span<const int> labels);

// Per-frame argmax (ties go to the lower index) followed by collapse.
LabelSequence greedy_decode(const Tensor& log_probs);

namespace ops {
// Scalar -ln p(labels | lattice); backward uses the exact forward-backward gradient.
Var ctc_loss(Var log_probs, std::span<const int> labels);
}  // namespace ops

}  // namespace actc
