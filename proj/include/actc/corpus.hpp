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

// Synthetic two-accent corpus.
//
// Every phone has a random prototype vector. A fixed subset of phones is
// pronounced differently by the two accents: their realizations sit at
// prototype -/+ half an accent offset (US / UK), a per-phone random vector
// whose coordinates have standard deviation shift_magnitude * noise_sigma. An
// utterance is a phone string without immediate repeats; each phone lasts a
// random number of frames, each frame its accent's realization plus
// isotropic Gaussian noise. Features are mean-normalized per utterance.
//
// US and UK utterances are labelled in separate index spaces (1..V_us and
// 1..V_uk); phone j of either accent shares prototype j.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "actc/accent.hpp"
#include "actc/ctc.hpp"
#include "actc/tensor.hpp"

namespace actc {

struct Utterance {
  std::string id;
  Accent accent = Accent::kUS;
  Tensor features;  // T x F raw frames
  LabelSequence labels;

  std::size_t frames() const { return features.empty() ? 0 : features.rows(); }
  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Corpus {
  std::size_t feature_dim = 40;
  std::size_t phones_us = 12;
  std::size_t phones_uk = 12;
  std::vector<Utterance> utterances;

  std::size_t phones(Accent a) const { return a == Accent::kUS ? phones_us : phones_uk; }
  // Same header, selected utterances.
  Corpus subset(const std::vector<std::size_t>& indices) const;
  Corpus only(Accent a) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct GeneratorConfig {
  std::size_t phones_us = 12;
  std::size_t phones_uk = 12;
  std::size_t feature_dim = 40;
  std::size_t min_frames_per_phone = 2;
  std::size_t max_frames_per_phone = 5;
  std::size_t min_phones = 3;
  std::size_t max_phones = 12;
  double prototype_scale = 1.0;
  double shift_magnitude = 1.5;  // in units of noise_sigma
  double shift_fraction = 0.4;
  double noise_sigma = 1.0;
  std::size_t utterances_per_accent = 400;
  // `seed` fixes the phone prototypes and accent offsets; `stream` selects an
  // independent sample of utterances from that same world (e.g. a test set).
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;

  // Throws ConfigError.
  void validate() const;
};

// Deterministic for a given config.
Corpus generate_corpus(const GeneratorConfig& config);

// Drops utterances longer than max_frames. Throws ConfigError if nothing is left.
Corpus filter_long(const Corpus& corpus, std::size_t max_frames);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> heldout;
};

// Stratified by accent: round(fraction * N) utterances are held out and
// apportioned to the accents by largest remainder. Deterministic per seed.
// Throws ConfigError if either side would be empty.
Split split_heldout(const Corpus& corpus, double fraction, std::uint64_t seed);

}  // namespace actc
