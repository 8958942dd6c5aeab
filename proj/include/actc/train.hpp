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

// Training loop: uniform init, per-utterance Adam steps on clipped
// gradients, new-bob annealing on the held-out objective, early stopping on
// the best held-out epoch.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "actc/corpus.hpp"
#include "actc/model.hpp"
#include "actc/optim.hpp"

namespace actc {

struct TrainingConfig {
  double alpha = 0.001;
  double lr_init = 5e-4;
  double clip_lo = -10.0;
  double clip_hi = 10.0;
  double init_lo = -0.01;
  double init_hi = 0.01;
  std::size_t max_frames = 2000;
  double heldout_fraction = 0.05;
  std::size_t max_epochs = 50;
  // Unset means lr_init / 1024.
  std::optional<double> min_lr;
  // Relative held-out improvement that arms new-bob halving; 0 anneals from
  // the first epoch.
  double anneal_start_gain = 0.01;
  // Utterances whose gradients are summed before each optimizer step.
  std::size_t accumulate = 1;
  std::uint64_t seed = 1;

  double effective_min_lr() const { return min_lr.value_or(lr_init / 1024.0); }
  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double heldout_loss = 0.0;     // objective the annealing schedule watches
  double heldout_am_loss = 0.0;  // CTC part only
  std::optional<double> per_us;  // held-out PER (%), oracle head
  std::optional<double> per_uk;
  std::optional<double> aid_acc;  // held-out AID accuracy (%)
  double lr = 0.0;                // rate used during the epoch
};

inline constexpr const char* kTrainingLogHeader = "epoch,train_loss,heldout_loss,per_us,per_uk,aid_acc,lr";

std::string format_log_row(const EpochLog& row);

// Held-out statistics for one model over a set of utterances.
struct HeldoutStats {
  double loss = 0.0;
  double am_loss = 0.0;
  std::optional<double> per_us;
  std::optional<double> per_uk;
  std::optional<double> aid_acc;
};

HeldoutStats evaluate_heldout(const AccentModel& model, const Corpus& heldout, double alpha);

struct TrainingResult {
  AccentModel model;  // parameters of the best held-out epoch
  AdamState adam;     // optimizer state at the end of training
  double final_lr = 0.0;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  bool diverged = false;
  std::string status;  // human-readable stop reason
  Split split;         // indices into the corpus passed to run_training
};

// Optional per-epoch observer (logging, checkpointing). Receives the live
// model, i.e. the parameters at the end of the epoch.
using EpochCallback = std::function<void(const EpochLog&, const AccentModel&)>;

// Splits `corpus` into train/held-out (stratified), restricts both to the
// accent an aspec model is for, drops over-long training utterances, then
// trains. The AM term of each utterance is weighted so both accents
// contribute equally to a pass. Throws ConfigError for invalid configs or an
// empty training partition.
TrainingResult run_training(const Corpus& corpus, const AmConfig& model_config,
                            const TrainingConfig& config, const EpochCallback& on_epoch = {});

}  // namespace actc
