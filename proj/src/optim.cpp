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

#include "actc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "actc/error.hpp"

namespace actc {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void init_params(ParamStore& params, double lo, double hi, std::uint64_t seed) {
  if (!(lo < hi)) throw ConfigError("init: lower bound must be below upper bound");
  for (Param& p : params) {
    const std::uint64_t key = fnv1a(p.name);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(lo, hi);
    for (double& v : p.value.values()) v = u(rng);
  }
}

void clip_values(std::span<double> values, double lo, double hi) {
  for (double& v : values) v = std::clamp(v, lo, hi);
}

void clip_gradients(ParamStore& params, double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("clip: lower bound must be below upper bound");
  for (Param& p : params) clip_values(p.grad.values(), lo, hi);
}

AdamState AdamState::zeros_like(const ParamStore& params) {
  AdamState s;
  for (const Param& p : params) {
    s.first_moment.emplace_back(p.value.shape());
    s.second_moment.emplace_back(p.value.shape());
  }
  return s;
}

void adam_step(ParamStore& params, AdamState& state, double lr) {
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw DimensionError("adam: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                         " parameters, store has " + std::to_string(params.size()));
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(AdamState::kBeta1, t);
  const double c2 = 1.0 - std::pow(AdamState::kBeta2, t);
  std::size_t i = 0;
  for (Param& p : params) {
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    ++i;
    if (m.shape() != p.value.shape() || v.shape() != p.value.shape() || p.grad.shape() != p.value.shape()) {
      throw DimensionError("adam: shape mismatch for parameter '" + p.name + "'");
    }
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad[k];
      m[k] = AdamState::kBeta1 * m[k] + (1.0 - AdamState::kBeta1) * g;
      v[k] = AdamState::kBeta2 * v[k] + (1.0 - AdamState::kBeta2) * g * g;
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      p.value[k] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::kEpsilon);
    }
  }
}

NewBobDecision newbob_update(NewBobState& state, double heldout_loss, std::size_t epoch,
                             std::size_t max_epochs, double min_lr, double tolerance,
                             std::optional<double> arm_loss) {
  NewBobDecision d;
  const double progress = arm_loss.value_or(heldout_loss);
  if (!state.armed && (state.start_gain <= 0.0 ||
                       (state.first_arm_loss &&
                        progress < *state.first_arm_loss * (1.0 - state.start_gain)))) {
    state.armed = true;
  } else if (state.armed && state.previous_loss && heldout_loss >= *state.previous_loss - tolerance) {
    state.lr /= 2.0;
    ++state.halvings;
    d.halved = true;
  }
  state.previous_loss = heldout_loss;
  if (!state.first_arm_loss) state.first_arm_loss = progress;
  d.lr = state.lr;
  d.stop = state.lr < min_lr || epoch >= max_epochs;
  return d;
}

}  // namespace actc
