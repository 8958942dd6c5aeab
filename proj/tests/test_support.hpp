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

// Helpers shared by the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "actc/autodiff.hpp"
#include "actc/layers.hpp"
#include "actc/tensor.hpp"

namespace actc::testing {

inline Tensor random_tensor(std::mt19937_64& rng, const Shape& shape, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(shape);
  for (double& v : t.values()) v = u(rng);
  return t;
}

inline void randomize(ParamStore& store, std::mt19937_64& rng, double lo = -0.5, double hi = 0.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (Param& p : store) {
    for (double& v : p.value.values()) v = u(rng);
  }
}

// Each row a proper log-distribution.
inline Tensor random_log_probs(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  return log_softmax(random_tensor(rng, {rows, cols}, -2.0, 2.0));
}

// Records a scalar loss on the given tape.
using LossBuilder = std::function<Var(Tape&)>;

inline bool close_enough(double analytic, double numeric, double rel = 1e-4, double abs = 1e-7) {
  const double diff = std::abs(analytic - numeric);
  return diff <= abs || diff <= rel * std::max(std::abs(analytic), std::abs(numeric));
}

// Compares every parameter gradient against central differences with step h.
// Returns the number of coordinates that disagree (each is reported).
inline std::size_t check_param_gradients(ParamStore& store, const LossBuilder& build, double h = 1e-5,
                                         double rel = 1e-4, double abs = 1e-7) {
  store.zero_grad();
  {
    Tape tape(store);
    tape.backward(build(tape));
  }
  auto loss_at = [&] {
    Tape tape(static_cast<const ParamStore&>(store));
    return build(tape).value()[0];
  };
  std::size_t failures = 0;
  for (Param& p : store) {
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double saved = p.value[k];
      p.value[k] = saved + h;
      const double up = loss_at();
      p.value[k] = saved - h;
      const double down = loss_at();
      p.value[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      if (!close_enough(p.grad[k], numeric, rel, abs)) {
        ++failures;
        ADD_FAILURE() << p.name << "[" << k << "]: analytic " << p.grad[k] << " numeric " << numeric;
      }
    }
  }
  return failures;
}

// Gradient with respect to an input tensor fed through tape.constant() is not
// tracked, so input gradients are checked by routing the input through a
// parameter named "x".
inline ParamId add_input_param(ParamStore& store, const Tensor& x) {
  const ParamId id = store.add("x", x.shape());
  store[id].value = x;
  return id;
}

}  // namespace actc::testing
