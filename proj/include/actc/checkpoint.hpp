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

// Model checkpoints. Layout (little-endian), version 1:
//
//   "ACTCCKPT"  u32 version
//   u32 config_len, model config as UTF-8 JSON (see serialize.hpp)
//   f64 alpha
//   u32 param_count
//   per parameter, in model order:
//     u32 name_len, name bytes
//     u32 rank, rank x u64 dims
//     prod(dims) x f64 values, row-major
//   optimizer:
//     u64 adam_step, f64 learning_rate, u8 has_moments
//     if has_moments: per parameter, first moment values then second moment values
//
// See docs/formats.md.

#pragma once

#include <cstdint>
#include <string>

#include "actc/model.hpp"
#include "actc/optim.hpp"

namespace actc {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  AccentModel model;
  double alpha = 0.0;
  AdamState adam;        // moments empty if the file stored none
  double learning_rate = 0.0;
};

std::string encode_checkpoint(const AccentModel& model, double alpha, const AdamState* adam,
                              double learning_rate);
// Throws ParseError for malformed bytes, ConfigError for an invalid config,
// and rejects parameter lists that do not match the config's architecture.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const AccentModel& model, double alpha, const AdamState* adam,
                     double learning_rate);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace actc
