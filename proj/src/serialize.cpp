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

#include "actc/serialize.hpp"

#include <functional>
#include <map>
#include <string_view>
#include <type_traits>

#include "actc/error.hpp"

namespace actc {
namespace {

using Setter = std::function<void(const Json&)>;

// Applies `setters` to the members of `j`; unknown keys and type errors
// become ConfigError.
void apply(const Json& j, std::string_view section, const std::map<std::string, Setter, std::less<>>& setters) {
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(std::string(section) + ": unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(section) + "." + key + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string(section) + "." + key + ": " + e.what());
    }
  }
}

template <typename T>
Setter set(T& field) {
  return [&field](const Json& v) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("expected true or false, got " + v.dump());
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError("expected a non-negative integer, got " + v.dump());
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("expected a number, got " + v.dump());
    }
    field = v.get<T>();
  };
}

std::string activation_name(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + s + "' (expected tanh or relu)");
}

}  // namespace

Json to_json(const AmConfig& c) {
  return Json{{"kind", std::string(model_kind_name(c.kind))},
              {"stack_frames", c.stack_frames},
              {"input_dim", c.input_dim},
              {"num_trunk_layers", c.num_trunk_layers},
              {"trunk_hidden", c.trunk_hidden},
              {"projection_units", c.projection_units},
              {"phones_us", c.phones_us},
              {"phones_uk", c.phones_uk},
              {"aid_branch_layer", c.aid_branch_layer},
              {"aid_branch_hidden", c.aid_branch_hidden},
              {"aid_projection_units", c.aid_projection_units},
              {"projection_activation", activation_name(c.projection_activation)}};
}

Json to_json(const GeneratorConfig& c) {
  return Json{{"phones_us", c.phones_us},
              {"phones_uk", c.phones_uk},
              {"feature_dim", c.feature_dim},
              {"min_frames_per_phone", c.min_frames_per_phone},
              {"max_frames_per_phone", c.max_frames_per_phone},
              {"min_phones", c.min_phones},
              {"max_phones", c.max_phones},
              {"prototype_scale", c.prototype_scale},
              {"shift_magnitude", c.shift_magnitude},
              {"shift_fraction", c.shift_fraction},
              {"noise_sigma", c.noise_sigma},
              {"utterances_per_accent", c.utterances_per_accent},
              {"seed", c.seed},
              {"stream", c.stream}};
}

Json to_json(const TrainingConfig& c) {
  Json j{{"alpha", c.alpha},
         {"lr_init", c.lr_init},
         {"clip_lo", c.clip_lo},
         {"clip_hi", c.clip_hi},
         {"init_lo", c.init_lo},
         {"init_hi", c.init_hi},
         {"max_frames", c.max_frames},
         {"heldout_fraction", c.heldout_fraction},
         {"max_epochs", c.max_epochs},
         {"min_lr", c.effective_min_lr()},
         {"anneal_start_gain", c.anneal_start_gain},
         {"accumulate", c.accumulate},
         {"seed", c.seed}};
  return j;
}

AmConfig am_config_from_json(const Json& j, AmConfig c) {
  apply(j, "model",
        {{"kind", [&c](const Json& v) { c.kind = parse_model_kind(v.get<std::string>()); }},
         {"stack_frames", set(c.stack_frames)},
         {"input_dim", set(c.input_dim)},
         {"num_trunk_layers", set(c.num_trunk_layers)},
         {"trunk_hidden", set(c.trunk_hidden)},
         {"projection_units", set(c.projection_units)},
         {"phones_us", set(c.phones_us)},
         {"phones_uk", set(c.phones_uk)},
         {"aid_branch_layer", set(c.aid_branch_layer)},
         {"aid_branch_hidden", set(c.aid_branch_hidden)},
         {"aid_projection_units", set(c.aid_projection_units)},
         {"projection_activation",
          [&c](const Json& v) { c.projection_activation = parse_activation(v.get<std::string>()); }}});
  return c;
}

GeneratorConfig generator_config_from_json(const Json& j, GeneratorConfig c) {
  apply(j, "data",
        {{"phones_us", set(c.phones_us)},
         {"phones_uk", set(c.phones_uk)},
         {"feature_dim", set(c.feature_dim)},
         {"min_frames_per_phone", set(c.min_frames_per_phone)},
         {"max_frames_per_phone", set(c.max_frames_per_phone)},
         {"min_phones", set(c.min_phones)},
         {"max_phones", set(c.max_phones)},
         {"prototype_scale", set(c.prototype_scale)},
         {"shift_magnitude", set(c.shift_magnitude)},
         {"shift_fraction", set(c.shift_fraction)},
         {"noise_sigma", set(c.noise_sigma)},
         {"utterances_per_accent", set(c.utterances_per_accent)},
         {"seed", set(c.seed)},
         {"stream", set(c.stream)}});
  return c;
}

TrainingConfig training_config_from_json(const Json& j, TrainingConfig c) {
  apply(j, "train",
        {{"alpha", set(c.alpha)},
         {"lr_init", set(c.lr_init)},
         {"clip_lo", set(c.clip_lo)},
         {"clip_hi", set(c.clip_hi)},
         {"init_lo", set(c.init_lo)},
         {"init_hi", set(c.init_hi)},
         {"max_frames", set(c.max_frames)},
         {"heldout_fraction", set(c.heldout_fraction)},
         {"max_epochs", set(c.max_epochs)},
         {"min_lr", [&c](const Json& v) { c.min_lr = v.get<double>(); }},
         {"anneal_start_gain", set(c.anneal_start_gain)},
         {"accumulate", set(c.accumulate)},
         {"seed", set(c.seed)}});
  return c;
}

}  // namespace actc
