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

#include "actc/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "actc/error.hpp"

namespace actc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRowTolerance = 1e-6;
constexpr double kBruteForceLimit = 1e7;

void check_lattice(const Tensor& log_probs, std::span<const int> labels) {
  if (log_probs.rank() != 2) {
    throw DimensionError("ctc: lattice must be T x (V+1), got " + shape_string(log_probs.shape()));
  }
  const int vocab = static_cast<int>(log_probs.cols()) - 1;
  for (int l : labels) {
    if (l < 1 || l > vocab) {
      throw InvalidInput("ctc: label " + std::to_string(l) + " outside [1, " + std::to_string(vocab) + "]");
    }
  }
}

void check_normalized(const Tensor& log_probs) {
  for (std::size_t t = 0; t < log_probs.rows(); ++t) {
    double lse = kNegInf;
    for (double v : log_probs.row(t)) lse = log_sum_exp(lse, v);
    if (!(std::abs(lse) <= kRowTolerance)) {
      throw ContractError("ctc: row " + std::to_string(t) + " of the lattice has log-mass " +
                          std::to_string(lse) + ", expected 0");
    }
  }
}

}  // namespace

LabelSequence collapse(std::span<const int> path) {
  LabelSequence out;
  int prev = -1;
  for (int s : path) {
    if (s != prev && s != kBlank) out.push_back(s);
    prev = s;
  }
  return out;
}

std::vector<int> augment_labels(std::span<const int> labels) {
  std::vector<int> out(2 * labels.size() + 1, kBlank);
  for (std::size_t i = 0; i < labels.size(); ++i) out[2 * i + 1] = labels[i];
  return out;
}

std::size_t min_frames(std::span<const int> labels) {
  std::size_t n = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) ++n;
  }
  return n;
}

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

CtcResult ctc_forward_backward(const Tensor& log_probs, std::span<const int> labels) {
  check_lattice(log_probs, labels);
  const std::size_t steps = log_probs.rows();
  const std::size_t classes = log_probs.cols();
  const std::size_t need = min_frames(labels);
  if (steps < need) throw FeasibilityError(steps, need);
  check_normalized(log_probs);

  const std::vector<int> ext = augment_labels(labels);
  const std::size_t states = ext.size();
  // Skip transition s-2 -> s is allowed into a label that differs from the
  // label two positions back.
  auto can_skip = [&](std::size_t s) { return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2]; };

  std::vector<double> alpha(steps * states, kNegInf);
  std::vector<double> beta(steps * states, kNegInf);
  auto a = [&](std::size_t t, std::size_t s) -> double& { return alpha[t * states + s]; };
  auto b = [&](std::size_t t, std::size_t s) -> double& { return beta[t * states + s]; };

  a(0, 0) = log_probs(0, ext[0]);
  if (states > 1) a(0, 1) = log_probs(0, ext[1]);
  for (std::size_t t = 1; t < steps; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = a(t - 1, s);
      if (s >= 1) acc = log_sum_exp(acc, a(t - 1, s - 1));
      if (can_skip(s)) acc = log_sum_exp(acc, a(t - 1, s - 2));
      a(t, s) = acc == kNegInf ? kNegInf : acc + log_probs(t, ext[s]);
    }
  }

  const std::size_t last = steps - 1;
  b(last, states - 1) = log_probs(last, ext[states - 1]);
  if (states > 1) b(last, states - 2) = log_probs(last, ext[states - 2]);
  for (std::size_t t = last; t-- > 0;) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = b(t + 1, s);
      if (s + 1 < states) acc = log_sum_exp(acc, b(t + 1, s + 1));
      if (s + 2 < states && can_skip(s + 2)) acc = log_sum_exp(acc, b(t + 1, s + 2));
      b(t, s) = acc == kNegInf ? kNegInf : acc + log_probs(t, ext[s]);
    }
  }

  double log_p = a(last, states - 1);
  if (states > 1) log_p = log_sum_exp(log_p, a(last, states - 2));
  if (log_p == kNegInf) throw FeasibilityError(steps, need);

  CtcResult result;
  result.neg_log_likelihood = std::max(0.0, -log_p);
  result.grad_log_probs = Tensor(log_probs.shape());
  std::vector<double> occupancy(classes);
  for (std::size_t t = 0; t < steps; ++t) {
    std::fill(occupancy.begin(), occupancy.end(), kNegInf);
    for (std::size_t s = 0; s < states; ++s) {
      const double ab = a(t, s) + b(t, s);
      if (ab == kNegInf) continue;
      occupancy[ext[s]] = log_sum_exp(occupancy[ext[s]], ab - log_probs(t, ext[s]));
    }
    for (std::size_t k = 0; k < classes; ++k) {
      result.grad_log_probs(t, k) = occupancy[k] == kNegInf ? 0.0 : -std::exp(occupancy[k] - log_p);
    }
  }
  return result;
}

double brute_force_ctc(const Tensor& log_probs, std::span<const int> labels) {
  check_lattice(log_probs, labels);
  const std::size_t steps = log_probs.rows();
  const std::size_t classes = log_probs.cols();
  const double paths = std::pow(static_cast<double>(classes), static_cast<double>(steps));
  if (paths > kBruteForceLimit) {
    throw InvalidInput("ctc: brute force would enumerate " + std::to_string(paths) +
                       " paths, limit is 1e7");
  }
  Alignment path(steps, 0);
  double log_p = kNegInf;
  while (true) {
    if (std::ranges::equal(collapse(path), labels)) {
      double lp = 0.0;
      for (std::size_t t = 0; t < steps; ++t) lp += log_probs(t, path[t]);
      log_p = log_sum_exp(log_p, lp);
    }
    std::size_t t = 0;
    while (t < steps && ++path[t] == static_cast<int>(classes)) path[t++] = 0;
    if (t == steps) break;
  }
  return -log_p;
}

LabelSequence greedy_decode(const Tensor& log_probs) {
  if (log_probs.rank() != 2) {
    throw DimensionError("ctc: lattice must be T x (V+1), got " + shape_string(log_probs.shape()));
  }
  Alignment best(log_probs.rows());
  for (std::size_t t = 0; t < log_probs.rows(); ++t) {
    auto row = log_probs.row(t);
    best[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return collapse(best);
}

namespace ops {

Var ctc_loss(Var log_probs, std::span<const int> labels) {
  if (!log_probs.valid()) throw ContractError("ctc_loss: input is an empty Var");
  Tape& tape = *log_probs.tape();
  CtcResult r = ctc_forward_backward(log_probs.value(), labels);
  const std::size_t xid = log_probs.id();
  return tape.record(Tensor({1}, r.neg_log_likelihood),
                     [xid, grad = std::move(r.grad_log_probs)](Tape& t, std::size_t self) {
                       const double g = t.grad(self)[0];
                       Tensor& dx = t.grad(xid);
                       for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g * grad[i];
                     });
}

}  // namespace ops
}  // namespace actc
