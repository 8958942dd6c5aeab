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

#include <cstdint>
#include <string_view>

namespace actc {

// Binary accent label. The numeric values double as the AID target
// (US = 1) and as the on-disk accent byte.
enum class Accent : std::uint8_t { kUK = 0, kUS = 1 };

inline constexpr Accent kAccents[] = {Accent::kUS, Accent::kUK};

inline std::string_view accent_name(Accent a) { return a == Accent::kUS ? "us" : "uk"; }

inline double accent_target(Accent a) { return a == Accent::kUS ? 1.0 : 0.0; }

}  // namespace actc
