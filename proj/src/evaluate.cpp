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

#include "actc/evaluate.hpp"

#include <string>

#include "actc/error.hpp"

namespace actc {

std::string_view eval_mode_name(EvalMode m) {
  switch (m) {
    case EvalMode::kOracle:
      return "oracle";
    case EvalMode::kSwitchedIndependentAid:
      return "switched:ind-aid";
    case EvalMode::kSwitchedJoint:
      return "switched:joint";
  }
  return "unknown";
}

EvalMode parse_eval_mode(std::string_view name) {
  for (EvalMode m : {EvalMode::kOracle, EvalMode::kSwitchedIndependentAid, EvalMode::kSwitchedJoint}) {
    if (name == eval_mode_name(m)) return m;
  }
  throw ConfigError("unknown mode '" + std::string(name) +
                    "' (expected oracle, switched:ind-aid or switched:joint)");
}

double EvalReport::mean_per() const {
  double sum = 0.0;
  int n = 0;
  for (Accent a : kAccents) {
    if (has(a)) {
      sum += per(a).per();
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / n;
}

double EvalReport::pooled_per() const {
  PerAccumulator all;
  all.edits = per_us.edits + per_uk.edits;
  all.ref_phones = per_us.ref_phones + per_uk.ref_phones;
  return all.per();
}

void check_compatible(const AmConfig& model, const Corpus& data) {
  const std::size_t width = data.feature_dim * (model.stack_frames ? 2 : 1);
  if (width != model.input_dim) {
    throw ConfigError("checkpoint expects input width " + std::to_string(model.input_dim) +
                      ", dataset frames give " + std::to_string(width));
  }
  for (Accent a : kAccents) {
    if (model.has_head(a) && data.phones(a) != model.phones(a)) {
      throw ConfigError("incompatible phone inventories: checkpoint " + std::string(accent_name(a)) +
                        " head has " + std::to_string(model.phones(a)) + " phones, dataset has " +
                        std::to_string(data.phones(a)));
    }
  }
}

EvalReport evaluate(const AccentModel& model, const Corpus& data, EvalMode mode,
                    const AccentModel* independent_aid) {
  const AmConfig& cfg = model.config();
  check_compatible(cfg, data);
  if (mode != EvalMode::kOracle && !(cfg.has_head(Accent::kUS) && cfg.has_head(Accent::kUK))) {
    throw ConfigError(std::string(eval_mode_name(mode)) + " needs a model with both accent heads, got " +
                      std::string(model_kind_name(cfg.kind)));
  }
  if (mode == EvalMode::kSwitchedIndependentAid) {
    if (independent_aid == nullptr) throw ConfigError("switched:ind-aid needs an AID checkpoint");
    if (!independent_aid->config().has_aid()) throw ConfigError("the AID checkpoint has no AID branch");
    check_compatible(independent_aid->config(), data);
  }
  if (mode == EvalMode::kSwitchedJoint && !cfg.has_aid()) {
    throw ConfigError("switched:joint needs a joint checkpoint, got " + std::string(model_kind_name(cfg.kind)));
  }

  EvalReport report;
  report.mode = mode;
  std::vector<Accent> predicted;
  std::vector<Accent> truth;
  for (const Utterance& u : data.utterances) {
    const Tensor input = model_input(cfg, u.features);
    JointOutput out = am_forward(model, input);
    if (mode == EvalMode::kSwitchedIndependentAid) {
      out.aid = aid_forward(*independent_aid, model_input(independent_aid->config(), u.features));
    }
    UtteranceDecision d;
    d.id = u.id;
    d.truth = u.accent;
    if (out.aid) {
      d.p_us = out.aid->p_us;
      predicted.push_back(out.aid->switch_us ? Accent::kUS : Accent::kUK);
      truth.push_back(u.accent);
    }
    const bool has_heads = cfg.has_head(Accent::kUS) || cfg.has_head(Accent::kUK);
    if (has_heads && (mode != EvalMode::kOracle || cfg.has_head(u.accent))) {
      const Tensor* lattice = nullptr;
      if (mode == EvalMode::kOracle) {
        d.head = u.accent;
        lattice = &out.lattice(u.accent);
      } else {
        const HeadSelection sel = hard_switch(out);
        d.head = sel.accent;
        lattice = sel.lattice;
      }
      d.hypothesis = greedy_decode(*lattice);
      d.edits = edit_distance(u.labels, d.hypothesis);
      (u.accent == Accent::kUS ? report.per_us : report.per_uk).add(u.labels, d.hypothesis);
    }
    report.decisions.push_back(std::move(d));
  }
  if (!truth.empty()) report.aid = aid_accuracy(predicted, truth);
  return report;
}

}  // namespace actc
