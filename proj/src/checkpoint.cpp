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

#include "actc/checkpoint.hpp"

#include "actc/error.hpp"
#include "actc/serialize.hpp"
#include "binary_io.hpp"

namespace actc {
namespace {

constexpr std::string_view kMagic = "ACTCCKPT";

}  // namespace

std::string encode_checkpoint(const AccentModel& model, double alpha, const AdamState* adam,
                              double learning_rate) {
  const ParamStore& params = model.params();
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.str(to_json(model.config()).dump());
  w.f64(alpha);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const Param& p : params) {
    w.str(p.name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.u64(d);
    w.f64s(p.value.values());
  }
  const bool moments = adam != nullptr && adam->first_moment.size() == params.size();
  w.u64(adam ? adam->step : 0);
  w.f64(learning_rate);
  w.u8(moments ? 1 : 0);
  if (moments) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      w.f64s(adam->first_moment[i].values());
      w.f64s(adam->second_moment[i].values());
    }
  }
  return w.buffer();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  detail::ByteReader r(bytes, "checkpoint");
  if (r.bytes(kMagic.size()) != kMagic) throw ParseError("checkpoint: bad magic", 0);
  const std::size_t version_at = r.offset();
  if (const std::uint32_t v = r.u32(); v != kCheckpointVersion) {
    throw ParseError("checkpoint: unsupported version " + std::to_string(v), version_at);
  }
  const std::size_t config_at = r.offset();
  const std::string config_text = r.str();
  Json config_json;
  try {
    config_json = Json::parse(config_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: config is not valid JSON (") + e.what() + ")", config_at);
  }
  Checkpoint ck{AccentModel(am_config_from_json(config_json)), 0.0, {}, 0.0};
  ck.alpha = r.f64();
  ParamStore& params = ck.model.params();
  const std::uint32_t count = r.u32();
  if (count != params.size()) {
    r.fail("stores " + std::to_string(count) + " parameters, the config implies " +
           std::to_string(params.size()));
  }
  for (Param& p : params) {
    const std::string name = r.str();
    if (name != p.name) r.fail("expected parameter '" + p.name + "', found '" + name + "'");
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (auto& d : shape) d = r.u64();
    if (shape != p.value.shape()) {
      r.fail("parameter '" + name + "' has shape " + shape_string(shape) + ", expected " +
             shape_string(p.value.shape()));
    }
    r.f64s(p.value.values());
  }
  const std::uint64_t adam_step_count = r.u64();
  ck.learning_rate = r.f64();
  const std::uint8_t moments = r.u8();
  if (moments > 1) r.fail("bad optimizer flag");
  if (moments == 1) {
    ck.adam = AdamState::zeros_like(params);
    for (std::size_t i = 0; i < params.size(); ++i) {
      r.f64s(ck.adam.first_moment[i].values());
      r.f64s(ck.adam.second_moment[i].values());
    }
  }
  ck.adam.step = adam_step_count;
  if (!r.at_end()) r.fail("trailing bytes");
  return ck;
}

void save_checkpoint(const std::string& path, const AccentModel& model, double alpha, const AdamState* adam,
                     double learning_rate) {
  detail::write_file(path, encode_checkpoint(model, alpha, adam, learning_rate));
}

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(detail::read_file(path)); }

}  // namespace actc
