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

#include "actc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "actc/error.hpp"
#include "actc/features.hpp"

namespace actc {
namespace {

constexpr double kProbabilityClamp = 1e-12;

void append(std::vector<ParamId>& out, const DenseParams& d) {
  out.push_back(d.weight);
  out.push_back(d.bias);
}

void append(std::vector<ParamId>& out, const LstmDirectionParams& d) {
  out.push_back(d.input);
  out.push_back(d.recurrent);
  out.push_back(d.bias);
}

void append(std::vector<ParamId>& out, const BlstmParams& b) {
  append(out, b.forward);
  append(out, b.backward);
}

}  // namespace

std::string_view model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kAspecUs:
      return "aspec-us";
    case ModelKind::kAspecUk:
      return "aspec-uk";
    case ModelKind::kMtlp:
      return "mtlp";
    case ModelKind::kJoint:
      return "joint";
    case ModelKind::kAid:
      return "aid";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::kAspecUs, ModelKind::kAspecUk, ModelKind::kMtlp, ModelKind::kJoint,
                      ModelKind::kAid}) {
    if (name == model_kind_name(k)) return k;
  }
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected aspec-us, aspec-uk, mtlp, joint or aid)");
}

bool AmConfig::has_head(Accent a) const {
  switch (kind) {
    case ModelKind::kAspecUs:
      return a == Accent::kUS;
    case ModelKind::kAspecUk:
      return a == Accent::kUK;
    case ModelKind::kMtlp:
    case ModelKind::kJoint:
      return true;
    case ModelKind::kAid:
      return false;
  }
  return false;
}

void AmConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string("model: ") + name + " must be positive");
  };
  positive(input_dim, "input_dim");
  if (has_trunk()) {
    positive(num_trunk_layers, "num_trunk_layers");
    positive(trunk_hidden, "trunk_hidden");
    positive(projection_units, "projection_units");
  }
  if (has_head(Accent::kUS)) positive(phones_us, "phones_us");
  if (has_head(Accent::kUK)) positive(phones_uk, "phones_uk");
  if (has_aid()) {
    positive(aid_branch_hidden, "aid_branch_hidden");
    positive(aid_projection_units, "aid_projection_units");
  }
  if (kind == ModelKind::kJoint && (aid_branch_layer < 1 || aid_branch_layer > num_trunk_layers)) {
    throw ConfigError("model: aid_branch_layer " + std::to_string(aid_branch_layer) +
                      " outside [1, " + std::to_string(num_trunk_layers) + "]");
  }
}

AidOutput make_aid_output(double p_us) { return AidOutput{p_us, p_us >= 0.5}; }

const Tensor& JointOutput::lattice(Accent a) const {
  const auto& l = a == Accent::kUS ? log_probs_us : log_probs_uk;
  if (!l) throw ConfigError("model: no " + std::string(accent_name(a)) + " head");
  return *l;
}

AccentModel::AccentModel(AmConfig config) : config_(config) {
  config_.validate();
  if (config_.has_trunk()) {
    std::size_t in = config_.input_dim;
    for (std::size_t l = 1; l <= config_.num_trunk_layers; ++l) {
      trunk_.push_back(add_blstm(params_, "trunk." + std::to_string(l), in, config_.trunk_hidden));
      in = 2 * config_.trunk_hidden;
    }
    for (Accent a : kAccents) {
      if (!config_.has_head(a)) continue;
      const std::string p = "head_" + std::string(accent_name(a));
      Head h{add_dense(params_, p + ".proj", in, config_.projection_units),
             add_dense(params_, p + ".out", config_.projection_units, config_.phones(a) + 1)};
      (a == Accent::kUS ? head_us_ : head_uk_) = h;
    }
  }
  if (config_.has_aid()) {
    const std::size_t in = config_.kind == ModelKind::kAid ? config_.input_dim : 2 * config_.trunk_hidden;
    aid_ = AidBranch{add_blstm(params_, "aid.blstm", in, config_.aid_branch_hidden),
                     add_dense(params_, "aid.proj", 2 * config_.aid_branch_hidden, config_.aid_projection_units),
                     add_dense(params_, "aid.out", config_.aid_projection_units, 1)};
  }
}

Var AccentModel::run_head(const Head& h, Var top) const {
  Var z = ops::activation(ops::dense(top, h.projection), config_.projection_activation);
  return ops::log_softmax(ops::dense(z, h.output));
}

Var AccentModel::run_aid(Var input) const {
  Var r = ops::blstm(input, aid_->recurrent);
  Var z = ops::activation(ops::dense(r, aid_->projection), config_.projection_activation);
  return ops::sigmoid(ops::dense(ops::average_pool(z), aid_->output));
}

AccentModel::Graph AccentModel::forward(Tape& tape, const Tensor& features, bool want_heads,
                                        bool want_aid) const {
  if (features.rank() != 2 || features.rows() == 0) {
    throw InvalidInput("model: features must be a non-empty T x F matrix");
  }
  if (features.cols() != config_.input_dim) {
    throw DimensionError("model: feature width " + std::to_string(features.cols()) +
                         " does not match configured input_dim " + std::to_string(config_.input_dim));
  }
  Graph g;
  Var x = tape.constant(features);
  if (config_.kind == ModelKind::kAid) {
    if (want_aid) g.p_us = run_aid(x);
    return g;
  }
  const bool need_aid = want_aid && aid_.has_value();
  if (!want_heads && !need_aid) return g;
  Var h = x;
  for (std::size_t l = 0; l < trunk_.size(); ++l) {
    h = ops::blstm(h, trunk_[l]);
    if (need_aid && l + 1 == config_.aid_branch_layer) g.p_us = run_aid(h);
    if (!want_heads && l + 1 >= config_.aid_branch_layer) return g;
  }
  if (want_heads) {
    if (head_us_) g.log_probs_us = run_head(*head_us_, h);
    if (head_uk_) g.log_probs_uk = run_head(*head_uk_, h);
  }
  return g;
}

std::vector<ParamId> AccentModel::trunk_layer_params(std::size_t layer) const {
  std::vector<ParamId> out;
  if (layer >= 1 && layer <= trunk_.size()) append(out, trunk_[layer - 1]);
  return out;
}

std::vector<ParamId> AccentModel::head_params(Accent a) const {
  std::vector<ParamId> out;
  const auto& h = a == Accent::kUS ? head_us_ : head_uk_;
  if (h) {
    append(out, h->projection);
    append(out, h->output);
  }
  return out;
}

std::vector<ParamId> AccentModel::aid_params() const {
  std::vector<ParamId> out;
  if (aid_) {
    append(out, aid_->recurrent);
    append(out, aid_->projection);
    append(out, aid_->output);
  }
  return out;
}

Tensor model_input(const AmConfig& config, const Tensor& raw_features) {
  return config.stack_frames ? stack_and_decimate(raw_features) : raw_features;
}

JointOutput am_forward(const AccentModel& model, const Tensor& features) {
  Tape tape(std::as_const(model.params()));
  const auto g = model.forward(tape, features);
  JointOutput out;
  if (g.log_probs_us) out.log_probs_us = g.log_probs_us->value();
  if (g.log_probs_uk) out.log_probs_uk = g.log_probs_uk->value();
  if (g.p_us) out.aid = make_aid_output(g.p_us->value()[0]);
  return out;
}

AidOutput aid_forward(const AccentModel& model, const Tensor& features) {
  if (!model.config().has_aid()) {
    throw ConfigError("model: " + std::string(model_kind_name(model.config().kind)) + " has no AID branch");
  }
  Tape tape(std::as_const(model.params()));
  const auto g = model.forward(tape, features, /*want_heads=*/false, /*want_aid=*/true);
  return make_aid_output(g.p_us->value()[0]);
}

double accent_cross_entropy(double p_us, Accent accent) {
  const double p = std::clamp(p_us, kProbabilityClamp, 1.0 - kProbabilityClamp);
  const double y = accent_target(accent);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

double multi_accent_loss(const JointOutput& out, std::span<const int> labels, Accent accent) {
  return ctc_forward_backward(out.lattice(accent), labels).neg_log_likelihood;
}

double joint_loss(double l_am, double l_aid, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("joint loss: alpha " + std::to_string(alpha) + " outside [0, 1]");
  }
  return (1.0 - alpha) * l_am + alpha * l_aid;
}

HeadSelection hard_switch(const JointOutput& out) {
  if (!out.aid) throw ConfigError("hard switch: output carries no AID decision");
  const Accent a = out.aid->switch_us ? Accent::kUS : Accent::kUK;
  return HeadSelection{&out.lattice(a), a};
}

Transcription transcribe_oracle(const AccentModel& model, const Tensor& features, Accent accent) {
  const JointOutput out = am_forward(model, features);
  return Transcription{greedy_decode(out.lattice(accent)), accent};
}

Transcription transcribe_switched(const AccentModel& model, const Tensor& features,
                                  const AccentModel* external_aid) {
  JointOutput out = am_forward(model, features);
  if (external_aid != nullptr) {
    out.aid = aid_forward(*external_aid, features);
  } else if (!out.aid) {
    throw ConfigError("transcribe: switched mode needs an AID; " +
                      std::string(model_kind_name(model.config().kind)) + " has none");
  }
  const HeadSelection sel = hard_switch(out);
  return Transcription{greedy_decode(*sel.lattice), sel.accent};
}

ObjectiveWeights objective_weights(ModelKind kind, double alpha, double am_weight) {
  switch (kind) {
    case ModelKind::kAspecUs:
    case ModelKind::kAspecUk:
    case ModelKind::kMtlp:
      return {am_weight, 0.0};
    case ModelKind::kJoint:
      if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("joint loss: alpha " + std::to_string(alpha) + " outside [0, 1]");
      }
      return {(1.0 - alpha) * am_weight, alpha};
    case ModelKind::kAid:
      return {0.0, 1.0};
  }
  return {};
}

UtteranceObjective record_objective(const AccentModel& model, Tape& tape, const Tensor& features,
                                    std::span<const int> labels, Accent accent, double alpha,
                                    double am_weight) {
  const AmConfig& cfg = model.config();
  const ModelKind kind = cfg.kind;
  const bool has_am = cfg.has_trunk();
  if (has_am && !cfg.has_head(accent)) {
    throw InvalidInput("objective: " + std::string(model_kind_name(kind)) + " has no " +
                       std::string(accent_name(accent)) + " head");
  }
  const auto g = model.forward(tape, features, has_am, cfg.has_aid());

  UtteranceObjective obj;
  std::optional<Var> am_term;
  std::optional<Var> aid_term;
  if (has_am) {
    Var ctc = ops::ctc_loss(*g.log_probs(accent), labels);
    obj.am = ctc.value()[0];
    am_term = ctc;
  }
  if (g.p_us) {
    Var ce = ops::binary_cross_entropy(*g.p_us, accent_target(accent), kProbabilityClamp);
    obj.aid = ce.value()[0];
    obj.p_us = g.p_us->value()[0];
    aid_term = ce;
  }

  const ObjectiveWeights w = objective_weights(kind, alpha, am_weight);
  const double am_coef = w.am;
  const double aid_coef = w.aid;
  // Terms with a zero coefficient stay off the graph so their parameters get
  // exactly zero gradient.
  std::optional<Var> total;
  if (am_term && am_coef != 0.0) total = ops::scale(*am_term, am_coef);
  if (aid_term && aid_coef != 0.0) {
    Var t = ops::scale(*aid_term, aid_coef);
    total = total ? ops::add(*total, t) : t;
  }
  if (!total) throw ConfigError("objective: every loss term has weight zero");
  obj.total = *total;
  return obj;
}

}  // namespace actc
