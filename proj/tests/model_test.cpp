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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "actc/corpus.hpp"
#include "actc/ctc.hpp"
#include "actc/error.hpp"
#include "actc/model.hpp"
#include "actc/optim.hpp"
#include "actc/train.hpp"
#include "test_support.hpp"

namespace actc {
namespace {

using actc::testing::check_param_gradients;
using actc::testing::random_tensor;
using actc::testing::randomize;

AmConfig small_config(ModelKind kind, std::size_t layers = 2) {
  AmConfig c;
  c.kind = kind;
  c.stack_frames = false;
  c.input_dim = 3;
  c.num_trunk_layers = layers;
  c.trunk_hidden = 3;
  c.projection_units = 3;
  c.phones_us = 2;
  c.phones_uk = 3;
  c.aid_branch_layer = 1;
  c.aid_branch_hidden = 2;
  c.aid_projection_units = 2;
  return c;
}

AccentModel random_model(const AmConfig& c, std::uint64_t seed, double range = 0.8) {
  AccentModel m(c);
  std::mt19937_64 rng(seed);
  randomize(m.params(), rng, -range, range);
  return m;
}

bool all_zero(const ParamStore& s, const std::vector<ParamId>& ids) {
  for (ParamId id : ids) {
    for (double g : s[id].grad.values()) {
      if (g != 0.0) return false;
    }
  }
  return true;
}

bool any_nonzero(const ParamStore& s, const std::vector<ParamId>& ids) { return !all_zero(s, ids); }

TEST(AmConfig, Validation) {
  AmConfig c = small_config(ModelKind::kJoint);
  c.aid_branch_layer = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c.aid_branch_layer = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config(ModelKind::kMtlp);
  c.phones_uk = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_model_kind("hybrid"), ConfigError);
  for (ModelKind k : {ModelKind::kAspecUs, ModelKind::kAspecUk, ModelKind::kMtlp, ModelKind::kJoint, ModelKind::kAid}) {
    EXPECT_EQ(parse_model_kind(model_kind_name(k)), k);
  }
}

TEST(AmForward, ShapeContract) {
  const AccentModel m = random_model(small_config(ModelKind::kJoint), 1);
  std::mt19937_64 rng(2);
  const JointOutput out = am_forward(m, random_tensor(rng, {7, 3}));
  ASSERT_TRUE(out.log_probs_us && out.log_probs_uk && out.aid);
  EXPECT_EQ(out.log_probs_us->shape(), (Shape{7, 3}));
  EXPECT_EQ(out.log_probs_uk->shape(), (Shape{7, 4}));
  for (const Tensor* l : {&*out.log_probs_us, &*out.log_probs_uk}) {
    for (std::size_t t = 0; t < 7; ++t) {
      double total = 0.0;
      for (double v : l->row(t)) total += std::exp(v);
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(AmForward, RejectsWrongFeatureWidth) {
  const AccentModel m = random_model(small_config(ModelKind::kMtlp), 1);
  EXPECT_THROW(am_forward(m, Tensor({4, 5})), DimensionError);
  EXPECT_THROW(am_forward(m, Tensor()), InvalidInput);
}

TEST(AmForward, ZeroWeightsGiveUniformLattices) {
  const AccentModel m(small_config(ModelKind::kMtlp));
  std::mt19937_64 rng(3);
  const JointOutput out = am_forward(m, random_tensor(rng, {4, 3}));
  for (double v : out.log_probs_us->values()) EXPECT_DOUBLE_EQ(v, -std::log(3.0));
  for (double v : out.log_probs_uk->values()) EXPECT_DOUBLE_EQ(v, -std::log(4.0));
}

TEST(AmForward, HeadsAreIndependent) {
  AccentModel m = random_model(small_config(ModelKind::kJoint), 4);
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor(rng, {6, 3});
  const JointOutput before = am_forward(m, x);
  for (ParamId id : m.head_params(Accent::kUK)) {
    for (double& v : m.params()[id].value.values()) v += 0.3;
  }
  const JointOutput after = am_forward(m, x);
  EXPECT_EQ(*after.log_probs_us, *before.log_probs_us);
  EXPECT_NE(*after.log_probs_uk, *before.log_probs_uk);
}

TEST(AmForward, Deterministic) {
  const AccentModel m = random_model(small_config(ModelKind::kJoint), 6);
  std::mt19937_64 rng(7);
  const Tensor x = random_tensor(rng, {5, 3});
  const JointOutput a = am_forward(m, x), b = am_forward(m, x);
  EXPECT_EQ(*a.log_probs_us, *b.log_probs_us);
  EXPECT_EQ(*a.log_probs_uk, *b.log_probs_uk);
  EXPECT_EQ(a.aid->p_us, b.aid->p_us);
}

TEST(AidForward, ZeroParametersTieToUs) {
  for (ModelKind k : {ModelKind::kJoint, ModelKind::kAid}) {
    const AccentModel m(small_config(k));
    std::mt19937_64 rng(8);
    const AidOutput a = aid_forward(m, random_tensor(rng, {4, 3}));
    EXPECT_EQ(a.p_us, 0.5);
    EXPECT_TRUE(a.switch_us);
  }
  EXPECT_THROW(aid_forward(AccentModel(small_config(ModelKind::kMtlp)), Tensor({2, 3})), ConfigError);
}

TEST(AidForward, PoolingIsOrderInvariantWithoutRecurrence) {
  AccentModel m = random_model(small_config(ModelKind::kAid), 9);
  ParamStore& s = m.params();
  // No recurrent weights and a closed forget gate: each frame is processed
  // on its own, so only the mean over time can depend on order.
  for (const char* dir : {"fwd", "bwd"}) {
    const std::string base = std::string("aid.blstm.") + dir;
    s[s.id(base + ".recurrent")].value.fill(0.0);
    Tensor& in = s[s.id(base + ".input")].value;
    Tensor& bias = s[s.id(base + ".bias")].value;
    const std::size_t h = m.config().aid_branch_hidden;
    for (std::size_t j = h; j < 2 * h; ++j) {
      bias[j] = -800.0;
      for (std::size_t r = 0; r < in.rows(); ++r) in(r, j) = 0.0;
    }
  }
  std::mt19937_64 rng(10);
  const Tensor x = random_tensor(rng, {6, 3});
  Tensor permuted = x;
  const std::size_t order[] = {3, 0, 5, 1, 4, 2};
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t k = 0; k < 3; ++k) permuted(t, k) = x(order[t], k);
  }
  EXPECT_NEAR(aid_forward(m, permuted).p_us, aid_forward(m, x).p_us, 1e-15);
}

TEST(AidForward, SaturatedBias) {
  AccentModel m = random_model(small_config(ModelKind::kJoint), 11, 0.1);
  m.params()[m.params().id("aid.out.bias")].value[0] = 100.0;
  std::mt19937_64 rng(12);
  const AidOutput a = aid_forward(m, random_tensor(rng, {3, 3}));
  EXPECT_NEAR(a.p_us, 1.0, 1e-12);
  EXPECT_TRUE(a.switch_us);
}

TEST(AccentCrossEntropy, Values) {
  EXPECT_DOUBLE_EQ(accent_cross_entropy(0.5, Accent::kUS), std::log(2.0));
  EXPECT_DOUBLE_EQ(accent_cross_entropy(0.5, Accent::kUK), std::log(2.0));
  EXPECT_NEAR(accent_cross_entropy(1.0 - 1e-12, Accent::kUS), 0.0, 1e-11);
  EXPECT_NEAR(accent_cross_entropy(0.9, Accent::kUK), 2.302585, 1e-6);
  EXPECT_TRUE(std::isfinite(accent_cross_entropy(0.0, Accent::kUS)));
}

TEST(MultiAccentLoss, DispatchesOnAccent) {
  const AccentModel m = random_model(small_config(ModelKind::kMtlp), 13);
  std::mt19937_64 rng(14);
  const JointOutput out = am_forward(m, random_tensor(rng, {5, 3}));
  const std::vector<int> l{2, 1};
  EXPECT_EQ(multi_accent_loss(out, l, Accent::kUS), ctc_forward_backward(*out.log_probs_us, l).neg_log_likelihood);
  EXPECT_EQ(multi_accent_loss(out, l, Accent::kUK), ctc_forward_backward(*out.log_probs_uk, l).neg_log_likelihood);
}

TEST(MultiAccentLoss, OtherHeadGetsNoGradient) {
  AccentModel m = random_model(small_config(ModelKind::kMtlp), 15);
  std::mt19937_64 rng(16);
  const Tensor x = random_tensor(rng, {5, 3});
  m.params().zero_grad();
  Tape tape(m.params());
  const UtteranceObjective obj = record_objective(m, tape, x, std::vector<int>{1, 2}, Accent::kUS, 0.0);
  tape.backward(obj.total);
  EXPECT_TRUE(all_zero(m.params(), m.head_params(Accent::kUK)));
  EXPECT_TRUE(any_nonzero(m.params(), m.head_params(Accent::kUS)));
}

TEST(MultiAccentLoss, BalancedPassAveragesAccents) {
  const AccentModel m = random_model(small_config(ModelKind::kMtlp), 17);
  std::mt19937_64 rng(18);
  Corpus c{3, 2, 3, {}};
  c.utterances.push_back(Utterance{"a", Accent::kUS, random_tensor(rng, {4, 3}), {1, 2}});
  c.utterances.push_back(Utterance{"b", Accent::kUK, random_tensor(rng, {5, 3}), {3}});
  const double us = multi_accent_loss(am_forward(m, c.utterances[0].features), c.utterances[0].labels, Accent::kUS);
  const double uk = multi_accent_loss(am_forward(m, c.utterances[1].features), c.utterances[1].labels, Accent::kUK);
  const HeldoutStats stats = evaluate_heldout(m, c, 0.0);
  EXPECT_DOUBLE_EQ(stats.am_loss, 0.5 * (us + uk));
  EXPECT_DOUBLE_EQ(stats.loss, 0.5 * (us + uk));
}

TEST(JointLoss, Examples) {
  EXPECT_EQ(joint_loss(2.0, 0.5, 0.0), 2.0);
  EXPECT_EQ(joint_loss(2.0, 0.5, 1.0), 0.5);
  EXPECT_NEAR(joint_loss(2.0, 0.5, 0.001), 1.9985, 1e-15);
  EXPECT_THROW(joint_loss(1.0, 1.0, -0.1), ConfigError);
  EXPECT_THROW(joint_loss(1.0, 1.0, 1.5), ConfigError);
}

JointOutput two_lattices(double p_us) {
  JointOutput out;
  out.log_probs_us = Tensor({1, 2}, std::log(0.5));
  out.log_probs_uk = Tensor({1, 3}, -std::log(3.0));
  out.aid = make_aid_output(p_us);
  return out;
}

TEST(HardSwitch, ThresholdAtHalf) {
  for (auto [p, want] : {std::pair{0.7, Accent::kUS}, {0.3, Accent::kUK}, {0.5, Accent::kUS}}) {
    const JointOutput out = two_lattices(p);
    const HeadSelection sel = hard_switch(out);
    EXPECT_EQ(sel.accent, want) << p;
    EXPECT_EQ(sel.lattice, want == Accent::kUS ? &*out.log_probs_us : &*out.log_probs_uk);
  }
  JointOutput no_aid = two_lattices(0.5);
  no_aid.aid.reset();
  EXPECT_THROW(hard_switch(no_aid), ConfigError);
}

TEST(HardSwitch, InvariantUnderMonotoneMapsFixingHalf) {
  auto warp = [](double p) { return 0.5 + 0.5 * std::tanh(3.0 * (p - 0.5)) / std::tanh(1.5); };
  for (double p = 0.0; p <= 1.0; p += 0.01) {
    EXPECT_EQ(hard_switch(two_lattices(p)).accent, hard_switch(two_lattices(warp(p))).accent) << p;
  }
}

TEST(Transcribe, ConfidentCorrectAidMatchesOracle) {
  AccentModel m = random_model(small_config(ModelKind::kJoint), 19);
  std::mt19937_64 rng(20);
  const Tensor x = random_tensor(rng, {8, 3});
  for (Accent a : kAccents) {
    m.params()[m.params().id("aid.out.bias")].value[0] = a == Accent::kUS ? 100.0 : -100.0;
    const Transcription sw = transcribe_switched(m, x);
    const Transcription oracle = transcribe_oracle(m, x, a);
    EXPECT_EQ(sw.labels, oracle.labels);
    EXPECT_EQ(sw.head, a);
  }
}

TEST(Transcribe, OracleStaysInAccentInventory) {
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AccentModel m = random_model(small_config(ModelKind::kMtlp), 100 + seed, 3.0);
    const Tensor x = random_tensor(rng, {10, 3}, -3, 3);
    for (int label : transcribe_oracle(m, x, Accent::kUS).labels) {
      EXPECT_GE(label, 1);
      EXPECT_LE(label, 2);
    }
  }
}

TEST(Transcribe, WrongAidDecodesOtherLatticeAndSaysSo) {
  AccentModel m = random_model(small_config(ModelKind::kJoint), 22);
  m.params()[m.params().id("aid.out.bias")].value[0] = -100.0;  // always UK
  std::mt19937_64 rng(23);
  const Tensor x = random_tensor(rng, {8, 3});
  const Transcription t = transcribe_switched(m, x);
  EXPECT_EQ(t.head, Accent::kUK);
  EXPECT_EQ(t.labels, transcribe_oracle(m, x, Accent::kUK).labels);
}

TEST(Transcribe, ExternalAid) {
  const AccentModel am = random_model(small_config(ModelKind::kMtlp), 24);
  AccentModel aid = random_model(small_config(ModelKind::kAid), 25);
  aid.params()[aid.params().id("aid.out.bias")].value[0] = -100.0;
  std::mt19937_64 rng(26);
  const Tensor x = random_tensor(rng, {6, 3});
  EXPECT_THROW(transcribe_switched(am, x), ConfigError);
  const Transcription t = transcribe_switched(am, x, &aid);
  EXPECT_EQ(t.head, Accent::kUK);
  EXPECT_EQ(t.labels, transcribe_oracle(am, x, Accent::kUK).labels);
}

struct GradientRun {
  AccentModel model;
  explicit GradientRun(const AmConfig& c, std::uint64_t seed) : model(random_model(c, seed, 0.5)) {}
  void run(double alpha, Accent accent = Accent::kUK) {
    std::mt19937_64 rng(99);
    const Tensor x = random_tensor(rng, {5, 3});
    model.params().zero_grad();
    Tape tape(model.params());
    tape.backward(record_objective(model, tape, x, std::vector<int>{1, 2}, accent, alpha).total);
  }
  const ParamStore& params() const { return model.params(); }
};

TEST(GradientPartition, AlphaOneLeavesHeadsUntouched) {
  AmConfig c = small_config(ModelKind::kJoint, 3);
  c.aid_branch_layer = 2;
  GradientRun g(c, 27);
  g.run(1.0);
  EXPECT_TRUE(all_zero(g.params(), g.model.head_params(Accent::kUS)));
  EXPECT_TRUE(all_zero(g.params(), g.model.head_params(Accent::kUK)));
  EXPECT_TRUE(any_nonzero(g.params(), g.model.aid_params()));
  // Per parameter: layers at or below the branch point get AID gradient,
  // layers above get none.
  for (std::size_t layer = 1; layer <= 3; ++layer) {
    for (ParamId id : g.model.trunk_layer_params(layer)) {
      const bool zero = all_zero(g.params(), {id});
      EXPECT_EQ(zero, layer > 2) << g.params()[id].name;
    }
  }
}

TEST(GradientPartition, AlphaZeroLeavesAidUntouched) {
  GradientRun g(small_config(ModelKind::kJoint), 28);
  g.run(0.0);
  EXPECT_TRUE(all_zero(g.params(), g.model.aid_params()));
  EXPECT_TRUE(any_nonzero(g.params(), g.model.head_params(Accent::kUK)));
}

TEST(ModelGradients, JointMatchesFiniteDifferences) {
  AccentModel m = random_model(small_config(ModelKind::kJoint), 29, 0.5);
  std::mt19937_64 rng(30);
  const Tensor x = random_tensor(rng, {5, 3});
  for (Accent a : kAccents) {
    EXPECT_EQ(check_param_gradients(m.params(),
                                    [&](Tape& t) {
                                      return record_objective(m, t, x, std::vector<int>{2, 1}, a, 0.3).total;
                                    }),
              0u);
  }
}

TEST(ModelGradients, AspecMatchesMtlpHeadOnFirstStep) {
  const AmConfig mc = small_config(ModelKind::kMtlp);
  AmConfig ac = mc;
  ac.kind = ModelKind::kAspecUs;
  AccentModel mtlp(mc), aspec(ac);
  init_params(mtlp.params(), -0.3, 0.3, 5);
  init_params(aspec.params(), -0.3, 0.3, 5);
  std::mt19937_64 rng(31);
  const Tensor x = random_tensor(rng, {6, 3});
  for (AccentModel* m : {&mtlp, &aspec}) {
    m->params().zero_grad();
    Tape tape(m->params());
    tape.backward(record_objective(*m, tape, x, std::vector<int>{1, 2}, Accent::kUS, 0.0).total);
  }
  for (const Param& p : aspec.params()) {
    const Param& q = mtlp.params()[mtlp.params().id(p.name)];
    EXPECT_EQ(p.value, q.value) << p.name;
    EXPECT_EQ(p.grad, q.grad) << p.name;
  }
  EXPECT_THROW(
      {
        Tape tape(aspec.params());
        record_objective(aspec, tape, x, std::vector<int>{1}, Accent::kUK, 0.0);
      },
      InvalidInput);
}

TEST(ObjectiveWeights, PerKind) {
  EXPECT_EQ(objective_weights(ModelKind::kMtlp, 0.4).aid, 0.0);
  EXPECT_EQ(objective_weights(ModelKind::kAid, 0.4).am, 0.0);
  const ObjectiveWeights j = objective_weights(ModelKind::kJoint, 0.25, 2.0);
  EXPECT_EQ(j.am, 1.5);
  EXPECT_EQ(j.aid, 0.25);
}

}  // namespace
}  // namespace actc
