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

#include "actc/autodiff.hpp"

#include "actc/error.hpp"

namespace actc {

ParamId ParamStore::add(std::string name, const Shape& shape) {
  if (index_.contains(name)) throw ConfigError("param store: duplicate parameter '" + name + "'");
  const std::size_t idx = params_.size();
  index_.emplace(name, idx);
  params_.push_back(Param{std::move(name), Tensor(shape), Tensor(shape)});
  return ParamId{idx};
}

std::optional<ParamId> ParamStore::find(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return ParamId{it->second};
}

ParamId ParamStore::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw InvalidInput("param store: no parameter named '" + std::string(name) + "'");
}

std::size_t ParamStore::num_scalars() const noexcept {
  std::size_t n = 0;
  for (const Param& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (Param& p : params_) p.grad.fill(0.0);
}

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("var: value() on an empty handle");
  return tape_->value(id_);
}

const Tensor& Var::grad() const {
  if (!tape_) throw ContractError("var: grad() on an empty handle");
  return tape_->grad(id_);
}

Var Tape::constant(Tensor value) { return record(std::move(value), nullptr); }

Var Tape::param(ParamId id) {
  const ParamId pid = id;
  return record((*store_)[id].value, [pid](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    Tensor& dst = tape.param_for_update(pid).grad;
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  });
}

Var Tape::record(Tensor value, BackwardFn backward) {
  nodes_.push_back(Node{std::move(value), Tensor(), std::move(backward)});
  return Var(this, nodes_.size() - 1);
}

Tensor& Tape::grad(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.shape() != n.value.shape()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

Param& Tape::param_for_update(ParamId id) {
  if (!mutable_store_) throw ContractError("tape: parameters are read-only on an inference tape");
  return (*mutable_store_)[id];
}

void Tape::backward(Var loss) {
  if (loss.tape() != this || loss.id() >= nodes_.size()) {
    throw ContractError("tape: backward() on a value that was not recorded on this tape");
  }
  if (!mutable_store_) throw ContractError("tape: backward() on an inference tape");
  Node& root = nodes_[loss.id()];
  if (root.value.size() != 1) {
    throw ContractError("tape: backward() needs a scalar loss, got shape " +
                        shape_string(root.value.shape()));
  }
  if (!root.backward) {
    throw ContractError("tape: backward() on a constant that depends on no recorded operation");
  }
  for (std::size_t i = 0; i <= loss.id(); ++i) {
    if (!nodes_[i].grad.empty()) nodes_[i].grad.fill(0.0);
  }
  grad(loss.id())[0] = 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && !n.grad.empty()) n.backward(*this, i);
  }
}

}  // namespace actc
