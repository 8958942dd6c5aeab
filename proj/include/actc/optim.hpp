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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "actc/autodiff.hpp"

namespace actc {

// Every parameter value i.i.d. uniform on [lo, hi). Each parameter draws from
// its own stream keyed by (seed, parameter name), so models that share
// parameter names start from identical values for them.
void init_params(ParamStore& params, double lo, double hi, std::uint64_t seed);

void clip_values(std::span<double> values, double lo, double hi);
// Elementwise clamp of every gradient buffer. Throws ConfigError unless lo < hi.
void clip_gradients(ParamStore& params, double lo, double hi);

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  std::vector<Tensor> first_moment;   // parallel to the store's parameter order
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const ParamStore& params);
};

// Bias-corrected Adam update using each parameter's gradient buffer.
void adam_step(ParamStore& params, AdamState& state, double lr);

struct NewBobState {
  double lr = 0.0;
  std::optional<double> previous_loss;
  std::size_t halvings = 0;
  // Halving is held off until the arming loss (the held-out loss unless given
  // separately) falls more than start_gain (relative) below its first-epoch
  // value. Zero arms the schedule from the first epoch.
  double start_gain = 0.0;
  bool armed = false;
  std::optional<double> first_arm_loss;
};

struct NewBobDecision {
  double lr = 0.0;  // rate for the next epoch
  bool halved = false;
  bool stop = false;
};

// Once armed, halves the rate when heldout_loss >= previous - tolerance. Requests a stop
// once the rate falls below min_lr or `epoch` (1-based) reaches max_epochs.
// `arm_loss` replaces heldout_loss for the arming test only.
NewBobDecision newbob_update(NewBobState& state, double heldout_loss, std::size_t epoch,
                             std::size_t max_epochs, double min_lr, double tolerance = 1e-6,
                             std::optional<double> arm_loss = std::nullopt);

}  // namespace actc
