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

// JSON forms of the configuration structs. Readers start from the defaults,
// override the keys present, and reject keys they do not know.

#pragma once

#include <string>

#include "json.hpp"

#include "actc/corpus.hpp"
#include "actc/model.hpp"
#include "actc/train.hpp"

namespace actc {

using Json = nlohmann::ordered_json;

Json to_json(const AmConfig& c);
Json to_json(const GeneratorConfig& c);
Json to_json(const TrainingConfig& c);

// All throw ConfigError on unknown keys or ill-typed values.
AmConfig am_config_from_json(const Json& j, AmConfig base = {});
GeneratorConfig generator_config_from_json(const Json& j, GeneratorConfig base = {});
TrainingConfig training_config_from_json(const Json& j, TrainingConfig base = {});

}  // namespace actc
