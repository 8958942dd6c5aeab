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

// Layer primitives. Each op records its output on the tape of its input Var
// together with a hand-written backward rule.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "actc/autodiff.hpp"
#include "actc/tensor.hpp"

namespace actc {

// y = x W + b with W: in x out, b: out.
struct DenseParams {
  ParamId weight;
  ParamId bias;
};

// One direction of an LSTM layer. Gate blocks are laid out along the columns
// as [input | forget | cell | output], each `hidden` wide:
//   input:     in x 4H
//   recurrent: H  x 4H
//   bias:      4H
struct LstmDirectionParams {
  ParamId input;
  ParamId recurrent;
  ParamId bias;
  std::size_t hidden = 0;
};

struct BlstmParams {
  LstmDirectionParams forward;
  LstmDirectionParams backward;
};

// Registers parameters named <prefix>.weight / <prefix>.bias etc.
DenseParams add_dense(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out);
LstmDirectionParams add_lstm_direction(ParamStore& store, const std::string& prefix, std::size_t in,
                                       std::size_t hidden);
BlstmParams add_blstm(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t hidden);

enum class Activation { kTanh, kRelu };

double sigmoid(double x);

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;
};

// Single step of the gated cell (no peepholes):
//   i = s(z_i)  f = s(z_f)  g = tanh(z_g)  o = s(z_o)
//   c = f*c_prev + i*g      h = o*tanh(c)
// where z = x W_in + h_prev W_rec + b.
LstmState lstm_cell_step(std::span<const double> x, std::span<const double> h_prev,
                         std::span<const double> c_prev, const Tensor& input_weights,
                         const Tensor& recurrent_weights, const Tensor& bias);

Tensor log_softmax(const Tensor& logits);

namespace ops {

Var dense(Var x, const DenseParams& p);
Var activation(Var x, Activation a);
Var tanh(Var x);
Var relu(Var x);
Var sigmoid(Var x);

// T x in -> T x 2H. Row t is [forward h_t ; backward h_t]. Forward direction
// scans t = 0..T-1, backward direction scans t = T-1..0, both from zero state.
Var blstm(Var x, const BlstmParams& p);

// T x D -> 1 x D, mean over time.
Var average_pool(Var x);

Var log_softmax(Var x);

// Scalar helpers.
Var sum(Var x);
Var scale(Var x, double factor);
Var add(Var a, Var b);

// -[y ln p + (1-y) ln(1-p)] with p clamped to [eps, 1-eps]. `p` must hold one
// value. The gradient is zero where the clamp is active.
Var binary_cross_entropy(Var p, double target, double eps = 1e-12);

}  // namespace ops
}  // namespace actc
