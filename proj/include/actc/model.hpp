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

// The acoustic models under comparison:
//
//   aspec-us / aspec-uk  trunk + one accent head, trained on one accent
//   mtlp                 shared trunk + both accent heads
//   joint                mtlp + accent-identification branch on a lower
//                        trunk layer, trained with (1-a) L_am + a L_aid
//   aid                  standalone accent classifier on raw features
//
// Trunk: stacked BLSTM layers. Head: dense projection + activation +
// dense output + log-softmax over the accent's phones plus blank.
// AID branch: BLSTM + dense projection + activation + mean over time +
// one sigmoid output neuron.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actc/accent.hpp"
#include "actc/autodiff.hpp"
#include "actc/ctc.hpp"
#include "actc/layers.hpp"
#include "actc/tensor.hpp"

namespace actc {

enum class ModelKind { kAspecUs, kAspecUk, kMtlp, kJoint, kAid };

std::string_view model_kind_name(ModelKind k);
// Throws ConfigError for unknown names.
ModelKind parse_model_kind(std::string_view name);

struct AmConfig {
  ModelKind kind = ModelKind::kJoint;
  // Raw frames are stacked in pairs and decimated before the first layer;
  // input_dim is the width after that step.
  bool stack_frames = true;
  std::size_t input_dim = 80;
  std::size_t num_trunk_layers = 4;
  std::size_t trunk_hidden = 32;
  std::size_t projection_units = 320;
  std::size_t phones_us = 12;
  std::size_t phones_uk = 12;
  // 1-based trunk layer whose output feeds the AID branch.
  std::size_t aid_branch_layer = 1;
  std::size_t aid_branch_hidden = 16;
  std::size_t aid_projection_units = 16;
  Activation projection_activation = Activation::kRelu;

  bool has_head(Accent a) const;
  bool has_trunk() const { return kind != ModelKind::kAid; }
  bool has_aid() const { return kind == ModelKind::kJoint || kind == ModelKind::kAid; }
  std::size_t phones(Accent a) const { return a == Accent::kUS ? phones_us : phones_uk; }

  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const AmConfig&, const AmConfig&) = default;
};

struct AidOutput {
  double p_us = 0.5;
  bool switch_us = true;
};

// p >= 0.5 selects US.
AidOutput make_aid_output(double p_us);

struct JointOutput {
  std::optional<Tensor> log_probs_us;
  std::optional<Tensor> log_probs_uk;
  std::optional<AidOutput> aid;

  const Tensor& lattice(Accent a) const;
};

class AccentModel {
 public:
  // Parameters start at zero; see init_params() in train.hpp.
  explicit AccentModel(AmConfig config);

  const AmConfig& config() const noexcept { return config_; }
  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }

  struct Graph {
    std::optional<Var> log_probs_us;
    std::optional<Var> log_probs_uk;
    std::optional<Var> p_us;
    std::optional<Var> log_probs(Accent a) const { return a == Accent::kUS ? log_probs_us : log_probs_uk; }
  };

  // Records the forward pass. Heads and AID are evaluated only when present
  // and requested.
  Graph forward(Tape& tape, const Tensor& features, bool want_heads = true, bool want_aid = true) const;

  // Parameter groups, for gradient-flow checks and freezing.
  std::vector<ParamId> trunk_layer_params(std::size_t layer) const;  // 1-based
  std::vector<ParamId> head_params(Accent a) const;
  std::vector<ParamId> aid_params() const;

 private:
  struct Head {
    DenseParams projection;
    DenseParams output;
  };
  struct AidBranch {
    BlstmParams recurrent;
    DenseParams projection;
    DenseParams output;
  };

  Var run_head(const Head& h, Var top) const;
  Var run_aid(Var input) const;

  AmConfig config_;
  ParamStore params_;
  std::vector<BlstmParams> trunk_;
  std::optional<Head> head_us_;
  std::optional<Head> head_uk_;
  std::optional<AidBranch> aid_;
};

// Applies the configured front end (frame stacking) to raw utterance features.
Tensor model_input(const AmConfig& config, const Tensor& raw_features);

// Forward pass evaluated on a read-only tape. `features` is the model input
// (after model_input()).
JointOutput am_forward(const AccentModel& model, const Tensor& features);
// Throws ConfigError if the model has no AID branch, InvalidInput for T = 0.
AidOutput aid_forward(const AccentModel& model, const Tensor& features);

// -[y ln p + (1-y) ln(1-p)], p clamped to [1e-12, 1-1e-12].
double accent_cross_entropy(double p_us, Accent accent);

// CTC loss of the head matching `accent`.
double multi_accent_loss(const JointOutput& out, std::span<const int> labels, Accent accent);

// (1 - alpha) * l_am + alpha * l_aid. Throws ConfigError unless alpha in [0, 1].
double joint_loss(double l_am, double l_aid, double alpha);

struct HeadSelection {
  const Tensor* lattice;
  Accent accent;
};

// Picks the US lattice iff the AID switch is on.
HeadSelection hard_switch(const JointOutput& out);

struct Transcription {
  LabelSequence labels;
  Accent head;  // lattice the labels were decoded from
};

Transcription transcribe_oracle(const AccentModel& model, const Tensor& features, Accent accent);
// Uses `external_aid` when given, otherwise the model's own AID branch.
Transcription transcribe_switched(const AccentModel& model, const Tensor& features,
                                  const AccentModel* external_aid = nullptr);

// How the two loss terms combine for a model kind:
//   aspec / mtlp  am_weight * L_am
//   joint         (1 - alpha) * am_weight * L_am + alpha * L_aid
//   aid           L_aid
struct ObjectiveWeights {
  double am = 0.0;
  double aid = 0.0;
};
ObjectiveWeights objective_weights(ModelKind kind, double alpha, double am_weight = 1.0);

// Per-utterance training objective for the model's kind. `am_weight` scales
// the CTC term (per-accent balancing, 1 for a balanced corpus).
struct UtteranceObjective {
  Var total;
  double am = 0.0;   // raw CTC loss of the matching head (0 without heads)
  double aid = 0.0;  // AID cross-entropy (0 without AID)
  std::optional<double> p_us;
};

UtteranceObjective record_objective(const AccentModel& model, Tape& tape, const Tensor& features,
                                    std::span<const int> labels, Accent accent, double alpha,
                                    double am_weight = 1.0);

}  // namespace actc
