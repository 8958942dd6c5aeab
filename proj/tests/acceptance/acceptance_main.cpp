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

// Acceptance suite. Each criterion prints one PASS/FAIL line followed by the
// measurements behind it. `--criterion N` (repeatable) runs a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actc/checkpoint.hpp"
#include "actc/corpus.hpp"
#include "actc/ctc.hpp"
#include "actc/dataset_io.hpp"
#include "actc/evaluate.hpp"
#include "actc/metrics.hpp"
#include "actc/model.hpp"
#include "actc/optim.hpp"
#include "actc/sweep.hpp"
#include "actc/train.hpp"

namespace actc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects named checks; the criterion passes iff all of them do.
class Report {
 public:
  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    lines_.push_back(std::string(ok ? "    ok   " : "    FAIL ") + what);
  }
  void note(const std::string& what) { lines_.push_back("         " + what); }
  bool ok() const { return ok_; }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  bool ok_ = true;
  std::vector<std::string> lines_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

Tensor random_log_probs(std::mt19937_64& rng, std::size_t frames, std::size_t symbols) {
  std::normal_distribution<double> n(0.0, 1.5);
  Tensor t = Tensor::matrix(frames, symbols);
  for (std::size_t r = 0; r < frames; ++r) {
    auto row = t.row(r);
    double m = -INFINITY;
    for (double& v : row) {
      v = n(rng);
      m = std::max(m, v);
    }
    double z = 0.0;
    for (double v : row) z += std::exp(v - m);
    for (double& v : row) v -= m + std::log(z);
  }
  return t;
}

// Default world, evaluated on an independent sample of it.
GeneratorConfig test_stream() {
  GeneratorConfig g;
  g.stream = 1;
  g.utterances_per_accent = 200;
  return g;
}

// ---------------------------------------------------------------------------

void ctc_oracle(Report& r) {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> frames(1, 6), vocab(1, 3), length(0, 3);
  std::size_t instances = 0;
  double worst = 0.0;
  while (instances < 300) {
    const std::size_t t = frames(rng), v = vocab(rng), n = length(rng);
    std::uniform_int_distribution<int> label(1, static_cast<int>(v));
    LabelSequence l;
    for (std::size_t i = 0; i < n; ++i) l.push_back(label(rng));
    if (min_frames(l) > t) continue;
    const Tensor lp = random_log_probs(rng, t, v + 1);
    worst = std::max(worst, std::abs(ctc_forward_backward(lp, l).neg_log_likelihood - brute_force_ctc(lp, l)));
    ++instances;
  }
  const double secs = seconds_since(start);
  r.check(worst < 1e-9, "max |forward-backward - enumeration| = " + fmt(worst) + " over " +
                            std::to_string(instances) + " instances (< 1e-9)");
  r.check(secs < 10.0, "runtime " + fmt(secs, 3) + " s (< 10 s)");
}

void gradient_check(Report& r) {
  const auto start = Clock::now();
  AmConfig c;
  c.kind = ModelKind::kJoint;
  c.stack_frames = false;
  c.input_dim = 40;
  c.num_trunk_layers = 2;
  c.trunk_hidden = 6;
  c.projection_units = 6;
  c.aid_branch_hidden = 4;
  c.aid_projection_units = 4;
  AccentModel m(c);
  init_params(m.params(), -0.5, 0.5, 7);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor x = Tensor::matrix(5, c.input_dim);
  for (double& v : x.values()) v = n(rng);
  const LabelSequence labels = {3, 7};
  const double h = 1e-5;

  std::size_t checked = 0, bad = 0;
  double worst_rel = 0.0, worst_abs = 0.0;
  for (Accent a : kAccents) {
    ParamStore& ps = m.params();
    ps.zero_grad();
    {
      Tape tape(ps);
      tape.backward(record_objective(m, tape, x, labels, a, 0.3).total);
    }
    auto loss = [&] {
      Tape tape(static_cast<const ParamStore&>(ps));
      return record_objective(m, tape, x, labels, a, 0.3).total.value()[0];
    };
    for (Param& p : ps) {
      for (std::size_t k = 0; k < p.value.size(); ++k) {
        const double saved = p.value[k];
        p.value[k] = saved + h;
        const double up = loss();
        p.value[k] = saved - h;
        const double down = loss();
        p.value[k] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double diff = std::abs(p.grad[k] - numeric);
        const double scale = std::max(std::abs(p.grad[k]), std::abs(numeric));
        ++checked;
        worst_abs = std::max(worst_abs, diff);
        if (scale > 1e-3) worst_rel = std::max(worst_rel, diff / scale);
        if (diff > 1e-7 && diff > 1e-4 * scale) {
          if (++bad <= 5) r.note(p.name + "[" + std::to_string(k) + "] analytic " + fmt(p.grad[k], 10) + " numeric " +
                                 fmt(numeric, 10));
        }
      }
    }
  }
  const double secs = seconds_since(start);
  r.check(bad == 0, std::to_string(bad) + " of " + std::to_string(checked) +
                        " coordinates outside rel 1e-4 / abs 1e-7 (worst abs " + fmt(worst_abs) +
                        ", worst rel where |g| > 1e-3 " + fmt(worst_rel) + ")");
  r.check(secs < 60.0, "runtime " + fmt(secs, 3) + " s (< 60 s)");
}

bool grads_zero(const ParamStore& ps, const std::vector<ParamId>& ids) {
  for (ParamId id : ids) {
    for (double g : ps[id].grad.values()) {
      if (g != 0.0 || std::signbit(g)) return false;
    }
  }
  return true;
}

void gradient_partition(Report& r) {
  AmConfig c;  // desk default: 4 layers, AID attached to layer 1
  AccentModel m(c);
  init_params(m.params(), -0.01, 0.01, 3);
  GeneratorConfig g;
  g.utterances_per_accent = 3;
  const Corpus data = generate_corpus(g);
  bool heads_zero = true, aid_zero = true, above_zero = true, below_live = true, aid_live = true, heads_live = true;
  for (const Utterance& u : data.utterances) {
    const Tensor x = model_input(c, u.features);
    for (double alpha : {1.0, 0.0}) {
      ParamStore& ps = m.params();
      ps.zero_grad();
      Tape tape(ps);
      tape.backward(record_objective(m, tape, x, u.labels, u.accent, alpha).total);
      if (alpha == 1.0) {
        heads_zero &= grads_zero(ps, m.head_params(Accent::kUS)) && grads_zero(ps, m.head_params(Accent::kUK));
        for (std::size_t layer = c.aid_branch_layer + 1; layer <= c.num_trunk_layers; ++layer) {
          above_zero &= grads_zero(ps, m.trunk_layer_params(layer));
        }
        for (std::size_t layer = 1; layer <= c.aid_branch_layer; ++layer) {
          below_live &= !grads_zero(ps, m.trunk_layer_params(layer));
        }
        aid_live &= !grads_zero(ps, m.aid_params());
      } else {
        aid_zero &= grads_zero(ps, m.aid_params());
        heads_live &= !grads_zero(ps, m.head_params(u.accent));
      }
    }
  }
  const std::string n = std::to_string(data.utterances.size()) + " utterances";
  r.check(heads_zero, "alpha=1: both accent heads have bitwise-zero gradients (" + n + ")");
  r.check(above_zero, "alpha=1: trunk layers 2-4 above the AID attachment have bitwise-zero gradients");
  r.check(aid_zero, "alpha=0: every AID-branch gradient is bitwise zero");
  r.check(below_live && aid_live && heads_live, "the complementary gradients are nonzero (checks are not vacuous)");
}

void overfit(Report& r) {
  const auto start = Clock::now();
  GeneratorConfig g;
  g.utterances_per_accent = 1;
  const Utterance u = generate_corpus(g).utterances.front();
  AmConfig c;
  c.kind = ModelKind::kAspecUs;
  AccentModel m(c);
  TrainingConfig t;
  init_params(m.params(), t.init_lo, t.init_hi, t.seed);
  AdamState adam = AdamState::zeros_like(m.params());
  const Tensor x = model_input(c, u.features);
  const double first = ctc_forward_backward(am_forward(m, x).lattice(u.accent), u.labels).neg_log_likelihood;
  constexpr int kSteps = 200;
  for (int step = 0; step < kSteps; ++step) {
    m.params().zero_grad();
    Tape tape(m.params());
    tape.backward(record_objective(m, tape, x, u.labels, u.accent, 0.0).total);
    clip_gradients(m.params(), t.clip_lo, t.clip_hi);
    adam_step(m.params(), adam, t.lr_init);
  }
  const double last = ctc_forward_backward(am_forward(m, x).lattice(u.accent), u.labels).neg_log_likelihood;
  const double secs = seconds_since(start);
  r.note("utterance " + u.id + ": " + std::to_string(x.rows()) + " frames, " + std::to_string(u.labels.size()) +
         " labels; loss " + fmt(first) + " before training");
  r.check(last < 0.1, "CTC loss after " + std::to_string(kSteps) + " steps = " + fmt(last, 6) +
                          " (< 0.1; lr 5e-4, clip [-10, 10])");
  r.check(secs < 30.0, "runtime " + fmt(secs, 3) + " s (< 30 s)");
}

TrainingResult train_kind(const Corpus& data, ModelKind kind, double alpha, double& seconds) {
  AmConfig c;
  c.kind = kind;
  TrainingConfig t;
  t.alpha = alpha;
  const auto start = Clock::now();
  TrainingResult res = run_training(data, c, t);
  seconds = seconds_since(start);
  return res;
}

void desk_reproduction(Report& r) {
  const Corpus data = generate_corpus(GeneratorConfig{});
  const Corpus test = generate_corpus(test_stream());
  double s_us = 0, s_uk = 0, s_mtlp = 0, s_joint = 0, s_aid = 0;
  const TrainingResult us = train_kind(data, ModelKind::kAspecUs, 0.0, s_us);
  const TrainingResult uk = train_kind(data, ModelKind::kAspecUk, 0.0, s_uk);
  const TrainingResult mtlp = train_kind(data, ModelKind::kMtlp, 0.0, s_mtlp);
  const TrainingResult joint = train_kind(data, ModelKind::kJoint, 0.001, s_joint);
  const TrainingResult aid = train_kind(data, ModelKind::kAid, 0.0, s_aid);

  const double aspec_us = evaluate(us.model, test, EvalMode::kOracle).per_us.per();
  const double aspec_uk = evaluate(uk.model, test, EvalMode::kOracle).per_uk.per();
  const double aspec_mean = (aspec_us + aspec_uk) / 2.0;
  const EvalReport mtlp_r = evaluate(mtlp.model, test, EvalMode::kOracle);
  const EvalReport joint_r = evaluate(joint.model, test, EvalMode::kOracle);
  const EvalReport switched = evaluate(joint.model, test, EvalMode::kSwitchedIndependentAid, &aid.model);
  const EvalReport aid_r = evaluate(aid.model, test, EvalMode::kOracle);

  auto row = [&](const std::string& name, double u, double k, const TrainingResult& tr, double secs) {
    r.note(name + ": us " + fmt(u) + "  uk " + fmt(k) + "  mean " + fmt((u + k) / 2.0) + "  (" +
           std::to_string(tr.log.size()) + " epochs, " + fmt(secs, 3) + " s)");
  };
  r.note("test set: stream 1 of the default world, " + std::to_string(test.utterances.size()) + " utterances");
  row("aspec", aspec_us, aspec_uk, us, s_us + s_uk);
  row("mtlp", mtlp_r.per_us.per(), mtlp_r.per_uk.per(), mtlp, s_mtlp);
  row("joint a=0.001 oracle", joint_r.per_us.per(), joint_r.per_uk.per(), joint, s_joint);
  r.note("joint switched:ind-aid: us " + fmt(switched.per_us.per()) + "  uk " + fmt(switched.per_uk.per()) +
         "  mean " + fmt(switched.mean_per()) + "; independent AID accuracy " + fmt(aid_r.aid->accuracy()) + "% (" +
         fmt(s_aid, 3) + " s)");

  const double joint_mean = joint_r.mean_per(), mtlp_mean = mtlp_r.mean_per();
  const double rel = relative_improvement(mtlp_mean, joint_mean);
  const double total = s_us + s_uk + s_mtlp + s_joint;
  r.check(joint_mean <= mtlp_mean, "joint " + fmt(joint_mean) + " <= mtlp " + fmt(mtlp_mean));
  r.check(mtlp_mean <= std::min(aspec_us, aspec_uk),
          "mtlp " + fmt(mtlp_mean) + " <= min(aspec-us, aspec-uk) = " + fmt(std::min(aspec_us, aspec_uk)) +
              " (aspec mean " + fmt(aspec_mean) + ")");
  r.check(rel <= -2.0, "joint vs mtlp relative change " + fmt(rel) + "% (<= -2%)");
  r.check(std::abs(switched.mean_per() - joint_mean) <= 1.0,
          "|switched:ind-aid - oracle| = " + fmt(std::abs(switched.mean_per() - joint_mean)) + " points (<= 1)");
  r.check(total < 900.0, "four trainings took " + fmt(total, 4) + " s (< 900 s)");
}

void sweep_shape(Report& r) {
  const auto start = Clock::now();
  const Corpus data = generate_corpus(GeneratorConfig{});
  const Corpus test = generate_corpus(test_stream());
  const std::vector<SweepRow> rows = alpha_sweep(data, &test, AmConfig{}, TrainingConfig{},
                                                 {0.0, 0.001, 0.01, 0.2, 0.5, 1.0}, [&](const SweepRow& row) {
                                                   r.note(format_sweep_row(row));
                                                 });
  const double secs = seconds_since(start);
  double max_other = 0.0, at_one = 0.0, aid_zero = 0.0, min_mid = 100.0;
  bool failed = false;
  for (const SweepRow& row : rows) {
    failed |= row.status != "ok";
    if (row.alpha == 1.0) {
      at_one = row.per_oracle;
    } else {
      max_other = std::max(max_other, row.per_oracle);
    }
    if (row.alpha == 0.0) aid_zero = row.aid_acc;
    if (row.alpha >= 0.001 && row.alpha <= 0.5) min_mid = std::min(min_mid, row.aid_acc);
  }
  r.check(!failed, "every sweep point trained without failure");
  r.check(at_one >= max_other, "PER at alpha=1 " + fmt(at_one) + " is the maximum (others <= " + fmt(max_other) + ")");
  r.check(std::abs(aid_zero - 50.0) <= 10.0, "AID accuracy at alpha=0 " + fmt(aid_zero) + "% (50 +- 10)");
  r.check(min_mid > 90.0, "lowest AID accuracy over alpha in [0.001, 0.5] " + fmt(min_mid) + "% (> 90%)");
  r.check(secs < 1800.0, "runtime " + fmt(secs, 4) + " s (< 1800 s)");
}

void hard_switch_contract(Report& r) {
  const Corpus data = generate_corpus(GeneratorConfig{});
  AmConfig c;
  TrainingConfig t;
  t.alpha = 0.5;
  t.max_epochs = 2;  // short, so the AID still makes mistakes
  const TrainingResult res = run_training(data, c, t);
  const Corpus heldout = data.subset(res.split.heldout);
  std::size_t right = 0, wrong = 0, violations = 0;
  for (const Utterance& u : heldout.utterances) {
    const JointOutput out = am_forward(res.model, model_input(c, u.features));
    const HeadSelection sel = hard_switch(out);
    const bool aid_right = (out.aid->p_us >= 0.5) == (u.accent == Accent::kUS);
    const Tensor& oracle = out.lattice(u.accent);
    const bool same_lattice = sel.lattice == &oracle;
    const bool same_bits = sel.lattice->shape() == oracle.shape() &&
                           std::memcmp(sel.lattice->data(), oracle.data(),
                                       oracle.size() * sizeof(double)) == 0;
    const bool same_decode = greedy_decode(*sel.lattice) == greedy_decode(oracle);
    (aid_right ? right : wrong) += 1;
    if (aid_right != same_lattice || aid_right != same_bits || (aid_right && !same_decode)) ++violations;
  }
  const EvalReport o = evaluate(res.model, heldout, EvalMode::kOracle);
  const EvalReport s = evaluate(res.model, heldout, EvalMode::kSwitchedJoint);
  for (std::size_t i = 0; i < o.decisions.size(); ++i) {
    const bool aid_right = s.decisions[i].head == s.decisions[i].truth;
    if (aid_right && s.decisions[i].hypothesis != o.decisions[i].hypothesis) ++violations;
  }
  r.note(std::to_string(heldout.utterances.size()) + " held-out utterances: AID right on " + std::to_string(right) +
         ", wrong on " + std::to_string(wrong));
  r.check(violations == 0, "switched lattice is the oracle lattice exactly when the AID is right (" +
                               std::to_string(violations) + " violations)");
}

void metric_arithmetic(Report& r) {
  struct Case {
    double baseline, system, expected;
  };
  for (const Case& c : {Case{11.5, 10.1, -12.17}, Case{10.1, 9.5, -5.94}, Case{9.5, 8.6, -9.47}}) {
    const double got = relative_improvement(c.baseline, c.system);
    r.check(std::abs(got - c.expected) <= 0.01,
            "(" + fmt(c.baseline) + " -> " + fmt(c.system) + ") = " + fmt(got, 6) + "% (expected " +
                fmt(c.expected) + " +- 0.01)");
  }
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void determinism(Report& r) {
  GeneratorConfig g;
  g.utterances_per_accent = 60;
  const Corpus data = generate_corpus(g);
  AmConfig c;
  TrainingConfig t;
  t.alpha = 0.001;
  t.max_epochs = 3;
  t.heldout_fraction = 0.1;
  const TrainingResult a = run_training(data, c, t);
  const TrainingResult b = run_training(data, c, t);
  bool identical = a.log.size() == b.log.size();
  for (std::size_t i = 0; identical && i < a.log.size(); ++i) {
    const EpochLog &x = a.log[i], &y = b.log[i];
    identical = format_log_row(x) == format_log_row(y) && same_bits(x.train_loss, y.train_loss) &&
                same_bits(x.heldout_loss, y.heldout_loss) && same_bits(x.lr, y.lr);
  }
  r.check(identical, "two fixed-seed trainings produce bit-identical logs (" + std::to_string(a.log.size()) +
                         " epochs)");

  const auto dir = std::filesystem::temp_directory_path() / "actc_acceptance";
  std::filesystem::create_directories(dir);
  const std::string ckpt = (dir / "model.ckpt").string();
  save_checkpoint(ckpt, a.model, t.alpha, &a.adam, a.final_lr);
  const Checkpoint loaded = load_checkpoint(ckpt);
  const Corpus heldout = data.subset(a.split.heldout);
  const double before = evaluate_heldout(a.model, heldout, t.alpha).loss;
  const double after = evaluate_heldout(loaded.model, heldout, loaded.alpha).loss;
  r.check(std::abs(before - after) <= 1e-15,
          "checkpoint round trip: held-out loss " + fmt(before, 17) + " vs " + fmt(after, 17));

  const std::string path = (dir / "data.bin").string();
  write_dataset(data, path);
  const Corpus back = read_dataset(path);
  bool exact = back.utterances.size() == data.utterances.size() && back.feature_dim == data.feature_dim;
  for (std::size_t i = 0; exact && i < data.utterances.size(); ++i) {
    const Utterance &x = data.utterances[i], &y = back.utterances[i];
    exact = x.id == y.id && x.accent == y.accent && x.labels == y.labels && x.features.shape() == y.features.shape() &&
            std::memcmp(x.features.data(), y.features.data(), x.features.size() * sizeof(double)) == 0;
  }
  exact = exact && encode_dataset(back) == encode_dataset(data);
  r.check(exact, "dataset write/read round trip is bit-exact (" + std::to_string(data.utterances.size()) +
                     " utterances)");
  std::filesystem::remove_all(dir);
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Report&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "CTC forward-backward equals brute-force enumeration", ctc_oracle},
      {2, "analytic gradients match finite differences", gradient_check},
      {3, "joint-loss gradient partition", gradient_partition},
      {4, "single-utterance overfit", overfit},
      {5, "desk reproduction of the model ordering", desk_reproduction},
      {6, "alpha-sweep shape", sweep_shape},
      {7, "hard-switch contract", hard_switch_contract},
      {8, "relative-improvement arithmetic", metric_arithmetic},
      {9, "determinism and persistence", determinism},
  };
  return all;
}

}  // namespace
}  // namespace actc

int main(int argc, char** argv) {
  CLI::App app{"actc acceptance suite"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "criterion number(s) to run; default all")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const auto& c : actc::criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    actc::Report report;
    const auto start = actc::Clock::now();
    try {
      c.run(report);
    } catch (const std::exception& e) {
      report.check(false, std::string("exception: ") + e.what());
    }
    const double secs = actc::seconds_since(start);
    std::printf("%s criterion %d: %s (%.1f s)\n", report.ok() ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const auto& line : report.lines()) std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    if (!report.ok()) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
