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
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "actc/ctc.hpp"
#include "actc/error.hpp"
#include "actc/layers.hpp"
#include "test_support.hpp"

namespace actc {
namespace {

using actc::testing::check_param_gradients;
using actc::testing::random_log_probs;
using actc::testing::random_tensor;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Second enumeration written independently of the library: odometer over
// all paths, own collapse rule, probabilities multiplied in linear space.
double enumerate_probability(const Tensor& log_probs, const std::vector<int>& labels) {
  const std::size_t T = log_probs.rows(), K = log_probs.cols();
  std::vector<int> path(T, 0);
  double total = 0.0;
  for (;;) {
    std::vector<int> out;
    int prev = -1;
    for (int s : path) {
      if (s != prev && s != 0) out.push_back(s);
      prev = s;
    }
    if (out == labels) {
      double p = 1.0;
      for (std::size_t t = 0; t < T; ++t) p *= std::exp(log_probs(t, static_cast<std::size_t>(path[t])));
      total += p;
    }
    std::size_t t = 0;
    while (t < T && ++path[t] == static_cast<int>(K)) path[t++] = 0;
    if (t == T) break;
  }
  return total;
}

TEST(Collapse, Examples) {
  EXPECT_EQ(collapse(std::vector<int>{1, 1, 0, 1, 2}), (LabelSequence{1, 1, 2}));
  EXPECT_EQ(collapse(std::vector<int>{0, 0, 0}), LabelSequence{});
  EXPECT_EQ(collapse(std::vector<int>{2, 2, 2}), (LabelSequence{2}));
  EXPECT_EQ(collapse(std::vector<int>{}), LabelSequence{});
}

TEST(AugmentLabels, Examples) {
  EXPECT_EQ(augment_labels(std::vector<int>{1}), (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(augment_labels(std::vector<int>{}), (std::vector<int>{0}));
  EXPECT_EQ(augment_labels(std::vector<int>{1, 1}), (std::vector<int>{0, 1, 0, 1, 0}));
}

TEST(AugmentLabels, CollapseRecoversLabels) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> l(rng() % 7);
    for (int& v : l) v = 1 + static_cast<int>(rng() % 3);
    const auto aug = augment_labels(l);
    ASSERT_EQ(aug.size(), 2 * l.size() + 1);
    std::vector<int> no_blanks;
    for (int s : aug) {
      if (s != kBlank) no_blanks.push_back(s);
    }
    EXPECT_EQ(no_blanks, l);
    EXPECT_EQ(collapse(aug), l);
  }
}

TEST(MinFrames, CountsRepeats) {
  EXPECT_EQ(min_frames(std::vector<int>{}), 0u);
  EXPECT_EQ(min_frames(std::vector<int>{1, 2, 3}), 3u);
  EXPECT_EQ(min_frames(std::vector<int>{1, 1, 2, 2}), 6u);
}

TEST(CtcForwardBackward, SingleFrameUniform) {
  const Tensor lp = Tensor::from_rows({{std::log(0.5), std::log(0.5)}});
  EXPECT_NEAR(ctc_forward_backward(lp, std::vector<int>{1}).neg_log_likelihood, 0.693147, 1e-6);
}

TEST(CtcForwardBackward, UnitProbabilityPath) {
  const Tensor lp = Tensor::from_rows({{0.0, kNegInf}, {kNegInf, 0.0}});
  const CtcResult r = ctc_forward_backward(lp, std::vector<int>{1});
  EXPECT_EQ(r.neg_log_likelihood, 0.0);
  EXPECT_TRUE(r.grad_log_probs.all_finite());
}

TEST(CtcForwardBackward, MatchesBruteForceOnFixedInstance) {
  std::mt19937_64 rng(42);
  const Tensor lp = random_log_probs(rng, 4, 3);
  const std::vector<int> l{1, 2};
  const double fb = ctc_forward_backward(lp, l).neg_log_likelihood;
  EXPECT_NEAR(fb, brute_force_ctc(lp, l), 1e-10);
  EXPECT_NEAR(fb, -std::log(enumerate_probability(lp, l)), 1e-10);
}

TEST(CtcForwardBackward, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  while (checked < 300) {
    const std::size_t T = 1 + rng() % 6, V = 1 + rng() % 3, L = rng() % 4;
    std::vector<int> l(L);
    for (int& v : l) v = 1 + static_cast<int>(rng() % V);
    if (min_frames(l) > T) continue;
    const Tensor lp = random_log_probs(rng, T, V + 1);
    const double fb = ctc_forward_backward(lp, l).neg_log_likelihood;
    const double bf = brute_force_ctc(lp, l);
    ASSERT_LT(std::abs(fb - bf), 1e-9) << "T=" << T << " V=" << V << " L=" << L;
    EXPECT_NEAR(bf, -std::log(enumerate_probability(lp, l)), 1e-9);
    EXPECT_GE(fb, 0.0);
    ++checked;
  }
}

TEST(CtcForwardBackward, GradientMatchesFiniteDifferencesThroughLogSoftmax) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    ParamStore s;
    const std::size_t T = 3 + seed, V = 1 + seed % 3;
    const ParamId logits = actc::testing::add_input_param(s, random_tensor(rng, {T, V + 1}, -2, 2));
    std::vector<int> l;
    for (std::size_t k = 0; k < 1 + seed % 3; ++k) l.push_back(1 + static_cast<int>(k % V));
    if (min_frames(l) > T) l.pop_back();
    EXPECT_EQ(check_param_gradients(s, [&](Tape& t) { return ops::ctc_loss(ops::log_softmax(t.param(logits)), l); }),
              0u);
  }
}

TEST(CtcForwardBackward, GradientIsExactWithRespectToLattice) {
  // d(-ln p)/d(log_probs[t,k]) compared with differences on the lattice
  // entries themselves (the rows need not stay normalized for this check,
  // so the brute-force sum is used as the function).
  std::mt19937_64 rng(7);
  const Tensor lp = random_log_probs(rng, 4, 3);
  const std::vector<int> l{2, 1};
  const CtcResult r = ctc_forward_backward(lp, l);
  const double h = 1e-6;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    Tensor up = lp, down = lp;
    up[i] += h;
    down[i] -= h;
    const double numeric = (-std::log(enumerate_probability(up, l)) + std::log(enumerate_probability(down, l))) /
                           (2.0 * h);
    EXPECT_NEAR(r.grad_log_probs[i], numeric, 1e-7);
  }
}

TEST(CtcForwardBackward, InfeasibleReportsFramesAndRequirement) {
  const Tensor lp = Tensor::from_rows({{std::log(0.5), std::log(0.5)}});
  try {
    ctc_forward_backward(lp, std::vector<int>{1, 1});
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    EXPECT_EQ(e.frames(), 1u);
    EXPECT_EQ(e.required(), 3u);
  }
}

TEST(CtcForwardBackward, RejectsUnnormalizedRows) {
  const Tensor lp = Tensor::from_rows({{std::log(0.5), std::log(0.6)}});
  EXPECT_THROW(ctc_forward_backward(lp, std::vector<int>{1}), ContractError);
}

TEST(CtcForwardBackward, RejectsLabelsOutsideInventory) {
  const Tensor lp = Tensor::from_rows({{std::log(0.5), std::log(0.5)}, {std::log(0.5), std::log(0.5)}});
  EXPECT_THROW(ctc_forward_backward(lp, std::vector<int>{2}), InvalidInput);
  EXPECT_THROW(ctc_forward_backward(lp, std::vector<int>{0}), InvalidInput);
}

TEST(CtcForwardBackward, LongSequenceStaysFinite) {
  std::mt19937_64 rng(3);
  const Tensor lp = random_log_probs(rng, 500, 6);
  std::vector<int> l;
  for (int k = 0; k < 120; ++k) l.push_back(1 + k % 5);
  const CtcResult r = ctc_forward_backward(lp, l);
  EXPECT_TRUE(std::isfinite(r.neg_log_likelihood));
  EXPECT_TRUE(r.grad_log_probs.all_finite());
}

TEST(CtcForwardBackward, AppendingCertainBlankFrameKeepsProbability) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 1 + rng() % 5, V = 1 + rng() % 2;
    std::vector<int> l(rng() % 3);
    for (int& v : l) v = 1 + static_cast<int>(rng() % V);
    if (min_frames(l) > T) continue;
    const Tensor lp = random_log_probs(rng, T, V + 1);
    Tensor longer({T + 1, V + 1}, kNegInf);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t k = 0; k <= V; ++k) longer(t, k) = lp(t, k);
    }
    longer(T, 0) = 0.0;
    const double before = brute_force_ctc(lp, l);
    EXPECT_NEAR(brute_force_ctc(longer, l), before, 1e-12);
    EXPECT_NEAR(ctc_forward_backward(longer, l).neg_log_likelihood, before, 1e-12);
  }
}

TEST(BruteForceCtc, Examples) {
  const Tensor one = Tensor::from_rows({{std::log(0.3), std::log(0.7)}});
  EXPECT_NEAR(brute_force_ctc(one, std::vector<int>{}), -std::log(0.3), 1e-15);
  EXPECT_EQ(brute_force_ctc(one, std::vector<int>{1, 1}), std::numeric_limits<double>::infinity());
}

TEST(BruteForceCtc, RefusesHugeEnumerations) {
  std::mt19937_64 rng(1);
  const Tensor lp = random_log_probs(rng, 8, 10);  // 10^8 paths
  EXPECT_THROW(brute_force_ctc(lp, std::vector<int>{1}), InvalidInput);
}

TEST(GreedyDecode, Examples) {
  // Argmaxes [1, 1, blank, 2].
  const Tensor lp = log_softmax(Tensor::from_rows({{0, 3, 1}, {0, 2, 1}, {5, 0, 0}, {0, 1, 4}}));
  EXPECT_EQ(greedy_decode(lp), (LabelSequence{1, 2}));
  const Tensor blanks = log_softmax(Tensor::from_rows({{3, 0}, {2, 1}}));
  EXPECT_EQ(greedy_decode(blanks), LabelSequence{});
}

TEST(GreedyDecode, TiesGoToLowestIndex) {
  EXPECT_EQ(greedy_decode(log_softmax(Tensor::from_rows({{0, 1, 1}}))), (LabelSequence{1}));
  EXPECT_EQ(greedy_decode(log_softmax(Tensor::from_rows({{1, 1, 1}}))), LabelSequence{});
}

TEST(CtcLossOp, MatchesForwardBackward) {
  std::mt19937_64 rng(12);
  const Tensor lp = random_log_probs(rng, 5, 4);
  ParamStore s;
  Tape tape(static_cast<const ParamStore&>(s));
  const std::vector<int> l{3, 1};
  EXPECT_EQ(ops::ctc_loss(tape.constant(lp), l).value()[0], ctc_forward_backward(lp, l).neg_log_likelihood);
}

}  // namespace
}  // namespace actc
