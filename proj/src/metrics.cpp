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

#include "actc/metrics.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "actc/error.hpp"

namespace actc {
namespace {

int slot(Accent a) { return a == Accent::kUS ? 0 : 1; }

}  // namespace

std::size_t edit_distance(std::span<const int> ref, std::span<const int> hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1);
  std::vector<std::size_t> cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

double phone_error_rate(std::span<const int> ref, std::span<const int> hyp) {
  return 100.0 * static_cast<double>(edit_distance(ref, hyp)) /
         static_cast<double>(std::max<std::size_t>(1, ref.size()));
}

void PerAccumulator::add(std::span<const int> ref, std::span<const int> hyp) {
  edits += edit_distance(ref, hyp);
  ref_phones += ref.size();
  ++utterances;
}

double PerAccumulator::per() const {
  return 100.0 * static_cast<double>(edits) / static_cast<double>(std::max<std::size_t>(1, ref_phones));
}

std::size_t AidConfusion::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

std::size_t AidConfusion::count(Accent truth, Accent predicted) const {
  return counts[slot(truth)][slot(predicted)];
}

double AidConfusion::accuracy() const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(counts[0][0] + counts[1][1]) / static_cast<double>(n);
}

double AidConfusion::recall(Accent a) const {
  const int s = slot(a);
  const std::size_t n = counts[s][0] + counts[s][1];
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(counts[s][s]) / static_cast<double>(n);
}

AidConfusion aid_accuracy(std::span<const Accent> predictions, std::span<const Accent> truths) {
  if (predictions.size() != truths.size()) {
    throw DimensionError("aid accuracy: " + std::to_string(predictions.size()) + " predictions for " +
                         std::to_string(truths.size()) + " references");
  }
  AidConfusion c;
  for (std::size_t i = 0; i < truths.size(); ++i) ++c.counts[slot(truths[i])][slot(predictions[i])];
  return c;
}

double relative_improvement(double baseline, double system) {
  if (!(baseline > 0.0)) throw InvalidInput("relative improvement: baseline must be positive");
  return (system - baseline) / baseline * 100.0;
}

}  // namespace actc
