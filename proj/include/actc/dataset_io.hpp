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

// Binary dataset files. Layout (all integers little-endian, floats IEEE-754
// binary64 little-endian), version 1:
//
//   "ACTCDATA"  u32 version  u32 feature_dim  u32 phones_us  u32 phones_uk
//   u64 record_count
//   per record:
//     u32 id_len, id bytes (UTF-8)
//     u8  accent (1 = US, 0 = UK)
//     u32 frames T, u32 label_count L
//     L x u32 labels (1-based phone index in the accent's inventory)
//     T x feature_dim x f64 features, row-major
//
// See docs/formats.md.

#pragma once

#include <string>

#include "actc/corpus.hpp"

namespace actc {

inline constexpr std::uint32_t kDatasetVersion = 1;

std::string encode_dataset(const Corpus& corpus);
// Throws ParseError (with byte offset); never returns a partial corpus.
Corpus decode_dataset(const std::string& bytes);

void write_dataset(const Corpus& corpus, const std::string& path);
Corpus read_dataset(const std::string& path);

}  // namespace actc
