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

#include "actc/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "binary_io.hpp"

namespace actc {
namespace {

constexpr std::string_view kMagic = "ACTCDATA";

}  // namespace

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace detail

std::string encode_dataset(const Corpus& corpus) {
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(corpus.feature_dim));
  w.u32(static_cast<std::uint32_t>(corpus.phones_us));
  w.u32(static_cast<std::uint32_t>(corpus.phones_uk));
  w.u64(corpus.utterances.size());
  for (const Utterance& u : corpus.utterances) {
    if (u.features.cols() != corpus.feature_dim) {
      throw DimensionError("dataset: utterance '" + u.id + "' has feature width " +
                           std::to_string(u.features.cols()) + ", corpus declares " +
                           std::to_string(corpus.feature_dim));
    }
    w.str(u.id);
    w.u8(static_cast<std::uint8_t>(u.accent));
    w.u32(static_cast<std::uint32_t>(u.frames()));
    w.u32(static_cast<std::uint32_t>(u.labels.size()));
    for (int l : u.labels) w.u32(static_cast<std::uint32_t>(l));
    w.f64s(u.features.values());
  }
  return w.buffer();
}

Corpus decode_dataset(const std::string& bytes) {
  detail::ByteReader r(bytes, "dataset");
  if (r.bytes(kMagic.size()) != kMagic) throw ParseError("dataset: bad magic", 0);
  const std::size_t version_at = r.offset();
  if (const std::uint32_t v = r.u32(); v != kDatasetVersion) {
    throw ParseError("dataset: unsupported version " + std::to_string(v), version_at);
  }
  Corpus c;
  c.feature_dim = r.u32();
  c.phones_us = r.u32();
  c.phones_uk = r.u32();
  if (c.feature_dim == 0) r.fail("feature_dim is zero");
  const std::uint64_t count = r.u64();
  for (std::uint64_t n = 0; n < count; ++n) {
    Utterance u;
    u.id = r.str();
    const std::uint8_t accent = r.u8();
    if (accent > 1) r.fail("accent byte " + std::to_string(accent) + " is neither 0 nor 1");
    u.accent = static_cast<Accent>(accent);
    const std::uint32_t frames = r.u32();
    const std::uint32_t labels = r.u32();
    if (frames == 0) r.fail("utterance '" + u.id + "' has no frames");
    const std::size_t vocab = c.phones(u.accent);
    u.labels.reserve(labels);
    for (std::uint32_t k = 0; k < labels; ++k) {
      const std::uint32_t l = r.u32();
      if (l < 1 || l > vocab) r.fail("label " + std::to_string(l) + " outside the accent inventory");
      u.labels.push_back(static_cast<int>(l));
    }
    if (r.remaining() / 8 / c.feature_dim < frames) {
      r.fail("truncated input (utterance '" + u.id + "' declares " + std::to_string(frames) + " frames)");
    }
    u.features = Tensor::matrix(frames, c.feature_dim);
    r.f64s(u.features.values());
    c.utterances.push_back(std::move(u));
  }
  if (!r.at_end()) r.fail("trailing bytes after the last record");
  return c;
}

void write_dataset(const Corpus& corpus, const std::string& path) {
  detail::write_file(path, encode_dataset(corpus));
}

Corpus read_dataset(const std::string& path) { return decode_dataset(detail::read_file(path)); }

}  // namespace actc
