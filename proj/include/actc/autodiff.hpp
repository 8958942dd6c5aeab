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

// Parameter storage and the reverse-mode tape.
//
// Parameters live in a ParamStore and are never copied onto the tape; layer
// ops read them through ParamId handles and their backward closures
// accumulate straight into Param::grad. A Tape is built for one utterance,
// used for one (or more) backward passes and then dropped.

#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actc/tensor.hpp"

namespace actc {

struct ParamId {
  std::size_t index = 0;
  friend auto operator<=>(const ParamId&, const ParamId&) = default;
};

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;  // same shape as value
};

class ParamStore {
 public:
  // Throws ConfigError on duplicate names.
  ParamId add(std::string name, const Shape& shape);

  Param& operator[](ParamId id) { return params_.at(id.index); }
  const Param& operator[](ParamId id) const { return params_.at(id.index); }

  std::optional<ParamId> find(std::string_view name) const;
  // Throws InvalidInput for unknown names.
  ParamId id(std::string_view name) const;

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t num_scalars() const noexcept;

  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }

  void zero_grad();

 private:
  std::vector<Param> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

class Tape;

// Handle to a value recorded on a tape. Cheap to copy; only valid while the
// tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const noexcept { return tape_ != nullptr; }
  Tape* tape() const noexcept { return tape_; }
  std::size_t id() const noexcept { return id_; }

  const Tensor& value() const;
  // Gradient of the last backward() call's loss with respect to this value.
  const Tensor& grad() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  // Trainable: backward() writes into the store's gradient buffers.
  explicit Tape(ParamStore& store) : store_(&store), mutable_store_(&store) {}
  // Inference only: backward() is a ContractError.
  explicit Tape(const ParamStore& store) : store_(&store) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  const ParamStore& store() const noexcept { return *store_; }
  bool trainable() const noexcept { return mutable_store_ != nullptr; }

  Var constant(Tensor value);
  // Identity view of a parameter; its gradient flows into Param::grad.
  Var param(ParamId id);

  // Accumulates d(loss)/d(param) into every parameter gradient reachable from
  // `loss`. Calling it twice without ParamStore::zero_grad() doubles them.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }

  // Op-implementation interface.
  Var record(Tensor value, BackwardFn backward);
  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  Tensor& grad(std::size_t id);
  Param& param_for_update(ParamId id);
  Var var(std::size_t id) { return Var(this, id); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    BackwardFn backward;  // empty for constants
  };

  const ParamStore* store_;
  ParamStore* mutable_store_ = nullptr;
  std::vector<Node> nodes_;
};

}  // namespace actc
