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

#include "actc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "actc/error.hpp"
#include "actc/features.hpp"

namespace actc {
namespace {

std::string utterance_id(Accent a, std::uint64_t stream, std::size_t index) {
  std::string n = std::to_string(index);
  return std::string(accent_name(a)) + "-" + std::to_string(stream) + "-" +
         std::string(n.size() < 5 ? 5 - n.size() : 0, '0') + n;
}

struct World {
  std::vector<std::vector<double>> prototypes;  // per phone, F values
  std::vector<std::vector<double>> offsets;     // per phone; empty if unshifted
};

World make_world(const GeneratorConfig& c) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const std::size_t phones = std::max(c.phones_us, c.phones_uk);
  World w;
  w.prototypes.resize(phones);
  for (auto& p : w.prototypes) {
    p.resize(c.feature_dim);
    for (double& v : p) v = c.prototype_scale * unit(rng);
  }
  std::vector<std::size_t> order(phones);
  for (std::size_t i = 0; i < phones; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto shifted = static_cast<std::size_t>(std::lround(c.shift_fraction * static_cast<double>(phones)));
  w.offsets.resize(phones);
  for (std::size_t k = 0; k < shifted; ++k) {
    std::vector<double> offset(c.feature_dim);
    for (double& v : offset) v = c.shift_magnitude * c.noise_sigma * unit(rng);
    w.offsets[order[k]] = std::move(offset);
  }
  return w;
}

}  // namespace

Corpus Corpus::subset(const std::vector<std::size_t>& indices) const {
  Corpus out{feature_dim, phones_us, phones_uk, {}};
  out.utterances.reserve(indices.size());
  for (std::size_t i : indices) out.utterances.push_back(utterances.at(i));
  return out;
}

Corpus Corpus::only(Accent a) const {
  Corpus out{feature_dim, phones_us, phones_uk, {}};
  for (const Utterance& u : utterances) {
    if (u.accent == a) out.utterances.push_back(u);
  }
  return out;
}

void GeneratorConfig::validate() const {
  if (phones_us < 2 || phones_uk < 2) {
    throw ConfigError("generator: each accent needs at least 2 phones (no immediate repeats)");
  }
  if (feature_dim == 0) throw ConfigError("generator: feature_dim must be positive");
  if (min_frames_per_phone < 2 || min_frames_per_phone > max_frames_per_phone) {
    throw ConfigError("generator: frames per phone range must satisfy 2 <= min <= max");
  }
  if (min_phones < 1 || min_phones > max_phones) {
    throw ConfigError("generator: phones per utterance range must satisfy 1 <= min <= max");
  }
  if (!(noise_sigma > 0.0)) throw ConfigError("generator: noise_sigma must be > 0");
  if (!(prototype_scale > 0.0)) throw ConfigError("generator: prototype_scale must be > 0");
  if (!(shift_magnitude >= 0.0)) throw ConfigError("generator: shift_magnitude must be >= 0");
  if (!(shift_fraction > 0.0 && shift_fraction <= 1.0)) {
    throw ConfigError("generator: shift_fraction must be in (0, 1]");
  }
}

Corpus generate_corpus(const GeneratorConfig& c) {
  c.validate();
  const World world = make_world(c);
  std::seed_seq seq{c.seed, c.stream, std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, c.noise_sigma);
  std::uniform_int_distribution<std::size_t> length(c.min_phones, c.max_phones);
  std::uniform_int_distribution<std::size_t> duration(c.min_frames_per_phone, c.max_frames_per_phone);

  Corpus corpus{c.feature_dim, c.phones_us, c.phones_uk, {}};
  corpus.utterances.reserve(2 * c.utterances_per_accent);
  for (std::size_t n = 0; n < c.utterances_per_accent; ++n) {
    for (Accent a : kAccents) {
      const std::size_t phones = a == Accent::kUS ? c.phones_us : c.phones_uk;
      const double side = a == Accent::kUS ? -0.5 : 0.5;
      std::uniform_int_distribution<int> pick(1, static_cast<int>(phones));
      Utterance u;
      u.id = utterance_id(a, c.stream, n);
      u.accent = a;
      const std::size_t count = length(rng);
      std::vector<std::size_t> durations;
      for (std::size_t k = 0; k < count; ++k) {
        int p = pick(rng);
        while (!u.labels.empty() && p == u.labels.back()) p = pick(rng);
        u.labels.push_back(p);
        durations.push_back(duration(rng));
      }
      std::size_t steps = 0;
      for (std::size_t d : durations) steps += d;
      u.features = Tensor::matrix(steps, c.feature_dim);
      std::size_t t = 0;
      for (std::size_t k = 0; k < count; ++k) {
        const auto phone = static_cast<std::size_t>(u.labels[k] - 1);
        const auto& proto = world.prototypes[phone];
        const auto& offset = world.offsets[phone];
        for (std::size_t f = 0; f < durations[k]; ++f, ++t) {
          auto row = u.features.row(t);
          for (std::size_t d = 0; d < c.feature_dim; ++d) {
            row[d] = proto[d] + (offset.empty() ? 0.0 : side * offset[d]) + noise(rng);
          }
        }
      }
      subtract_time_mean(u.features);
      corpus.utterances.push_back(std::move(u));
    }
  }
  return corpus;
}

Corpus filter_long(const Corpus& corpus, std::size_t max_frames) {
  Corpus out{corpus.feature_dim, corpus.phones_us, corpus.phones_uk, {}};
  for (const Utterance& u : corpus.utterances) {
    if (u.frames() <= max_frames) out.utterances.push_back(u);
  }
  if (out.utterances.empty()) {
    throw ConfigError("filter: no utterance has at most " + std::to_string(max_frames) + " frames");
  }
  return out;
}

Split split_heldout(const Corpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split: heldout fraction must be in (0, 1)");
  }
  const std::size_t total = corpus.utterances.size();
  const auto target = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(total)));

  std::vector<std::size_t> by_accent[2];
  for (std::size_t i = 0; i < total; ++i) {
    by_accent[corpus.utterances[i].accent == Accent::kUS ? 0 : 1].push_back(i);
  }
  // Largest-remainder apportionment of `target` over the accents.
  std::size_t quota[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int a = 0; a < 2; ++a) {
    const double exact = total == 0 ? 0.0
                                    : static_cast<double>(target) * static_cast<double>(by_accent[a].size()) /
                                          static_cast<double>(total);
    quota[a] = static_cast<std::size_t>(std::floor(exact));
    remainder[a] = exact - static_cast<double>(quota[a]);
    assigned += quota[a];
  }
  while (assigned < target) {
    const int a = remainder[0] >= remainder[1] ? 0 : 1;
    ++quota[a];
    remainder[a] = -1.0;
    ++assigned;
  }

  std::mt19937_64 rng(seed);
  Split split;
  for (int a = 0; a < 2; ++a) {
    std::vector<std::size_t> idx = by_accent[a];
    std::shuffle(idx.begin(), idx.end(), rng);
    split.heldout.insert(split.heldout.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[a]));
    split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[a]), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.heldout.begin(), split.heldout.end());
  if (split.train.empty() || split.heldout.empty()) {
    throw ConfigError("split: fraction " + std::to_string(fraction) + " of " + std::to_string(total) +
                      " utterances leaves an empty partition");
  }
  return split;
}

}  // namespace actc
