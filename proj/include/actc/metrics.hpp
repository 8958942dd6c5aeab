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

#pragma once

#include <cstddef>
#include <span>

#include "actc/accent.hpp"

namespace actc {

// Levenshtein distance with unit costs.
std::size_t edit_distance(std::span<const int> ref, std::span<const int> hyp);

// edit_distance / max(1, |ref|) * 100.
double phone_error_rate(std::span<const int> ref, std::span<const int> hyp);

// Running corpus-level PER: total edits over total reference phones.
struct PerAccumulator {
  std::size_t edits = 0;
  std::size_t ref_phones = 0;
  std::size_t utterances = 0;

  void add(std::span<const int> ref, std::span<const int> hyp);
  double per() const;
};

struct AidConfusion {
  // [truth][prediction], index 0 = US, 1 = UK.
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};

  std::size_t total() const;
  std::size_t count(Accent truth, Accent predicted) const;
  double accuracy() const;        // percent; 0 for an empty set
  double recall(Accent a) const;  // percent; 0 if the accent is absent
};

// Throws DimensionError on length mismatch.
AidConfusion aid_accuracy(std::span<const Accent> predictions, std::span<const Accent> truths);

// (system - baseline) / baseline * 100; negative means the system is better.
// Throws InvalidInput unless baseline > 0.
double relative_improvement(double baseline, double system);

}  // namespace actc
