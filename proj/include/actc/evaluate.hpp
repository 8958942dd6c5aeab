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

// Test-set evaluation in the three decoding regimes:
//   oracle            the true accent picks the head
//   switched:ind-aid  a separately trained AID model picks the head
//   switched:joint    the model's own AID branch picks the head

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actc/corpus.hpp"
#include "actc/metrics.hpp"
#include "actc/model.hpp"

namespace actc {

enum class EvalMode { kOracle, kSwitchedIndependentAid, kSwitchedJoint };

std::string_view eval_mode_name(EvalMode m);
// Throws ConfigError.
EvalMode parse_eval_mode(std::string_view name);

struct UtteranceDecision {
  std::string id;
  Accent truth = Accent::kUS;
  std::optional<Accent> head;  // lattice decoded; empty if none was
  std::optional<double> p_us;
  LabelSequence hypothesis;
  std::size_t edits = 0;
};

struct EvalReport {
  EvalMode mode = EvalMode::kOracle;
  PerAccumulator per_us;
  PerAccumulator per_uk;
  std::optional<AidConfusion> aid;  // of whichever AID drove the switch / the model's own
  std::vector<UtteranceDecision> decisions;

  const PerAccumulator& per(Accent a) const { return a == Accent::kUS ? per_us : per_uk; }
  bool has(Accent a) const { return per(a).utterances > 0; }
  // Unweighted mean of the per-accent PERs present.
  double mean_per() const;
  // Total edits over total reference phones.
  double pooled_per() const;
};

// Throws ConfigError when the checkpoint and dataset disagree on phone
// inventories or feature width, or the mode lacks what it needs (switched
// modes need both heads; ind-aid needs `independent_aid`).
EvalReport evaluate(const AccentModel& model, const Corpus& data, EvalMode mode,
                    const AccentModel* independent_aid = nullptr);

// Fails with ConfigError if `model` cannot consume `data`.
void check_compatible(const AmConfig& model, const Corpus& data);

}  // namespace actc
