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

#include "actc/train.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "actc/error.hpp"
#include "actc/metrics.hpp"

namespace actc {
namespace {

struct Prepared {
  Tensor input;
  const Utterance* utterance;
};

std::vector<Prepared> prepare(const AmConfig& cfg, const Corpus& corpus) {
  std::vector<Prepared> out;
  out.reserve(corpus.utterances.size());
  for (const Utterance& u : corpus.utterances) out.push_back({model_input(cfg, u.features), &u});
  return out;
}

// Weight of each accent's AM term so that both accents contribute equally to
// a pass over `corpus` (1.0 each when balanced).
std::array<double, 2> accent_weights(const AmConfig& cfg, const Corpus& corpus) {
  if (cfg.kind != ModelKind::kMtlp && cfg.kind != ModelKind::kJoint) return {1.0, 1.0};
  std::size_t n[2] = {0, 0};
  for (const Utterance& u : corpus.utterances) ++n[u.accent == Accent::kUS ? 0 : 1];
  const double total = static_cast<double>(n[0] + n[1]);
  std::array<double, 2> w{1.0, 1.0};
  for (int a = 0; a < 2; ++a) {
    if (n[a] > 0) w[a] = total / (2.0 * static_cast<double>(n[a]));
  }
  return w;
}

double weight_for(const std::array<double, 2>& w, Accent a) { return w[a == Accent::kUS ? 0 : 1]; }

std::vector<Tensor> snapshot(const ParamStore& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Param& p : params) out.push_back(p.value);
  return out;
}

void restore(ParamStore& params, const std::vector<Tensor>& values) {
  std::size_t i = 0;
  for (Param& p : params) p.value = values[i++];
}

HeldoutStats evaluate_prepared(const AccentModel& model, const std::vector<Prepared>& data,
                               const std::array<double, 2>& weights, double alpha) {
  const AmConfig& cfg = model.config();
  HeldoutStats stats;
  PerAccumulator per[2];
  std::vector<Accent> predicted;
  std::vector<Accent> truth;
  for (const Prepared& p : data) {
    const Utterance& u = *p.utterance;
    const JointOutput out = am_forward(model, p.input);
    const ObjectiveWeights w = objective_weights(cfg.kind, alpha, weight_for(weights, u.accent));
    double am = 0.0;
    double aid = 0.0;
    if (cfg.has_head(u.accent)) {
      const Tensor& lattice = out.lattice(u.accent);
      am = ctc_forward_backward(lattice, u.labels).neg_log_likelihood;
      per[u.accent == Accent::kUS ? 0 : 1].add(u.labels, greedy_decode(lattice));
    }
    if (out.aid) {
      aid = accent_cross_entropy(out.aid->p_us, u.accent);
      predicted.push_back(out.aid->switch_us ? Accent::kUS : Accent::kUK);
      truth.push_back(u.accent);
    }
    stats.loss += w.am * am + w.aid * aid;
    stats.am_loss += am;
  }
  if (!data.empty()) {
    stats.loss /= static_cast<double>(data.size());
    stats.am_loss /= static_cast<double>(data.size());
  }
  if (per[0].utterances > 0) stats.per_us = per[0].per();
  if (per[1].utterances > 0) stats.per_uk = per[1].per();
  if (!truth.empty()) stats.aid_acc = aid_accuracy(predicted, truth).accuracy();
  return stats;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_optional(std::string& out, const std::optional<double>& v) {
  if (v) append_number(out, *v);
}

}  // namespace

void TrainingConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("train: alpha must be in [0, 1]");
  if (!(lr_init > 0.0)) throw ConfigError("train: lr_init must be > 0");
  if (!(clip_lo < clip_hi)) throw ConfigError("train: clip_lo must be below clip_hi");
  if (!(init_lo < init_hi)) throw ConfigError("train: init_lo must be below init_hi");
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0)) {
    throw ConfigError("train: heldout_fraction must be in (0, 1)");
  }
  if (max_frames == 0) throw ConfigError("train: max_frames must be positive");
  if (max_epochs == 0) throw ConfigError("train: max_epochs must be positive");
  if (accumulate == 0) throw ConfigError("train: accumulate must be positive");
  if (min_lr && !(*min_lr > 0.0)) throw ConfigError("train: min_lr must be > 0");
  if (!(anneal_start_gain >= 0.0 && anneal_start_gain < 1.0)) {
    throw ConfigError("train: anneal_start_gain must be in [0, 1)");
  }
}

std::string format_log_row(const EpochLog& row) {
  std::string s = std::to_string(row.epoch);
  s += ',';
  append_number(s, row.train_loss);
  s += ',';
  append_number(s, row.heldout_loss);
  s += ',';
  append_optional(s, row.per_us);
  s += ',';
  append_optional(s, row.per_uk);
  s += ',';
  append_optional(s, row.aid_acc);
  s += ',';
  append_number(s, row.lr);
  return s;
}

HeldoutStats evaluate_heldout(const AccentModel& model, const Corpus& heldout, double alpha) {
  return evaluate_prepared(model, prepare(model.config(), heldout), accent_weights(model.config(), heldout),
                           alpha);
}

TrainingResult run_training(const Corpus& corpus, const AmConfig& model_config, const TrainingConfig& config,
                            const EpochCallback& on_epoch) {
  config.validate();
  model_config.validate();
  const std::size_t width = corpus.feature_dim * (model_config.stack_frames ? 2 : 1);
  if (width != model_config.input_dim) {
    throw ConfigError("train: corpus feature width " + std::to_string(corpus.feature_dim) +
                      " does not produce the model input width " + std::to_string(model_config.input_dim));
  }
  for (Accent a : kAccents) {
    if (model_config.has_head(a) && corpus.phones(a) != model_config.phones(a)) {
      throw ConfigError("train: corpus has " + std::to_string(corpus.phones(a)) + " " +
                        std::string(accent_name(a)) + " phones, model expects " +
                        std::to_string(model_config.phones(a)));
    }
  }

  TrainingResult result{AccentModel(model_config), {}, 0.0, {}, 0, false, {}, {}};
  result.split = split_heldout(corpus, config.heldout_fraction, config.seed);
  Corpus train = corpus.subset(result.split.train);
  Corpus heldout = corpus.subset(result.split.heldout);
  if (model_config.kind == ModelKind::kAspecUs || model_config.kind == ModelKind::kAspecUk) {
    const Accent a = model_config.kind == ModelKind::kAspecUs ? Accent::kUS : Accent::kUK;
    train = train.only(a);
    heldout = heldout.only(a);
    // The split is drawn over both accents so every model kind holds out the
    // same utterances; report only the ones this model used.
    for (auto* part : {&result.split.train, &result.split.heldout}) {
      std::erase_if(*part, [&](std::size_t i) { return corpus.utterances[i].accent != a; });
    }
  }
  if (train.utterances.empty()) throw ConfigError("train: training partition is empty");
  train = filter_long(train, config.max_frames);

  const std::vector<Prepared> train_set = prepare(model_config, train);
  const std::vector<Prepared> heldout_set = prepare(model_config, heldout);
  const auto train_weights = accent_weights(model_config, train);
  const auto heldout_weights = accent_weights(model_config, heldout);

  AccentModel model(model_config);
  ParamStore& params = model.params();
  init_params(params, config.init_lo, config.init_hi, config.seed);
  AdamState adam = AdamState::zeros_like(params);
  NewBobState schedule{config.lr_init, std::nullopt, 0, config.anneal_start_gain, false, std::nullopt};
  double lr = config.lr_init;

  std::vector<Tensor> best = snapshot(params);
  std::vector<Tensor> last_good = best;
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 shuffler(config.seed ^ 0x9e3779b97f4a7c15ULL);

  auto step = [&] {
    clip_gradients(params, config.clip_lo, config.clip_hi);
    adam_step(params, adam, lr);
    params.zero_grad();
  };

  params.zero_grad();
  for (std::size_t epoch = 1;; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffler);
    double train_loss = 0.0;
    std::size_t pending = 0;
    bool diverged = false;
    for (std::size_t idx : order) {
      const Prepared& p = train_set[idx];
      Tape tape(params);
      const UtteranceObjective obj = record_objective(model, tape, p.input, p.utterance->labels,
                                                      p.utterance->accent, config.alpha,
                                                      weight_for(train_weights, p.utterance->accent));
      const double loss = obj.total.value()[0];
      if (!std::isfinite(loss)) {
        diverged = true;
        result.status = "diverged: non-finite loss on utterance '" + p.utterance->id + "' in epoch " +
                        std::to_string(epoch);
        break;
      }
      train_loss += loss;
      tape.backward(obj.total);
      if (++pending == config.accumulate) {
        step();
        pending = 0;
      }
    }
    if (!diverged && pending > 0) step();

    HeldoutStats stats;
    if (!diverged) {
      stats = evaluate_prepared(model, heldout_set, heldout_weights, config.alpha);
      if (!std::isfinite(stats.loss)) {
        diverged = true;
        result.status = "diverged: non-finite held-out loss in epoch " + std::to_string(epoch);
      }
    }
    if (diverged) {
      restore(params, last_good);
      params.zero_grad();
      result.diverged = true;
      break;
    }

    EpochLog row;
    row.epoch = epoch;
    row.train_loss = train_loss / static_cast<double>(train_set.size());
    row.heldout_loss = stats.loss;
    row.heldout_am_loss = stats.am_loss;
    row.per_us = stats.per_us;
    row.per_uk = stats.per_uk;
    row.aid_acc = stats.aid_acc;
    row.lr = lr;
    result.log.push_back(row);
    if (on_epoch) on_epoch(row, model);

    last_good = snapshot(params);
    if (stats.loss < best_loss) {
      best_loss = stats.loss;
      best = last_good;
      result.best_epoch = epoch;
    }
    // Arming waits for the CTC loss to leave its initial plateau; an AID term
    // that improves on its own must not start the halving early.
    const bool has_heads = model_config.has_head(Accent::kUS) || model_config.has_head(Accent::kUK);
    const NewBobDecision d =
        newbob_update(schedule, stats.loss, epoch, config.max_epochs, config.effective_min_lr(), 1e-6,
                      has_heads ? std::optional<double>(stats.am_loss) : std::nullopt);
    lr = d.lr;
    if (d.stop) {
      result.status = epoch >= config.max_epochs ? "reached max_epochs" : "learning rate fell below min_lr";
      break;
    }
  }

  if (result.best_epoch > 0) restore(params, best);
  result.model = std::move(model);
  result.adam = std::move(adam);
  result.final_lr = lr;
  return result;
}

}  // namespace actc
