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

// Joint-model sweep over the AID loss weight.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "actc/corpus.hpp"
#include "actc/model.hpp"
#include "actc/train.hpp"

namespace actc {

struct SweepRow {
  double alpha = 0.0;
  double per_oracle = 0.0;    // pooled over both accents, true-accent heads
  double per_switched = 0.0;  // pooled, heads picked by the model's own AID
  double aid_acc = 0.0;
  std::size_t epochs = 0;
  std::string status = "ok";  // or the training failure
};

inline constexpr const char* kSweepHeader = "alpha,per_oracle,per_switched,aid_acc,epochs,status";

std::string format_sweep_row(const SweepRow& row);

// Trains one joint model per alpha (same seed and data each time) and scores
// it on `test` (or on the training held-out partition when `test` is null).
// A training failure is recorded in the row and the sweep continues.
// Repeated alpha values reuse the earlier row. Throws ConfigError for an
// empty list or alpha outside [0, 1].
std::vector<SweepRow> alpha_sweep(const Corpus& corpus, const Corpus* test, AmConfig model_config,
                                  TrainingConfig config, const std::vector<double>& alphas,
                                  const std::function<void(const SweepRow&)>& on_row = {});

}  // namespace actc
