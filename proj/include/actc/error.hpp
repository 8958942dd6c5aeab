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
#include <stdexcept>
#include <string>

namespace actc {

// Shape disagreement between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input that is well-typed but unusable (empty sequence, out-of-range label).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a documented precondition (unnormalized lattice, stray tape value).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bad configuration value or combination.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The label sequence cannot be aligned to the given number of frames.
class FeasibilityError : public std::invalid_argument {
 public:
  FeasibilityError(std::size_t frames, std::size_t required)
      : std::invalid_argument("ctc: " + std::to_string(frames) +
                              " frames cannot align a label sequence that needs at least " +
                              std::to_string(required)),
        frames_(frames),
        required_(required) {}

  std::size_t frames() const noexcept { return frames_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t frames_;
  std::size_t required_;
};

// Malformed binary file. offset() is the byte position where decoding failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace actc
