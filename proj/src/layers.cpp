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

#include "actc/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "actc/error.hpp"
#include "actc/simd/kernels.hpp"

namespace actc {
namespace {

constexpr double kSigmoidLow = std::numeric_limits<double>::denorm_min();
// Largest double below 1: keeps sigmoid in the open interval even at saturation.
const double kSigmoidHigh = std::nextafter(1.0, 0.0);

Tape& tape_of(Var v) {
  if (!v.valid()) throw ContractError("op: input is an empty Var");
  return *v.tape();
}

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got shape " + shape_string(t.shape()));
  }
}

// Per-step cache of one LSTM direction.
struct LstmTrace {
  std::size_t hidden = 0;
  bool reverse = false;
  Tensor gates;   // T x 4H, post-activation
  Tensor cells;   // T x H
  Tensor tanh_c;  // T x H
  Tensor hidden_out;  // T x H
};

void lstm_gate_activations(double* z, std::size_t h) {
  for (std::size_t k = 0; k < h; ++k) z[k] = sigmoid(z[k]);
  for (std::size_t k = h; k < 2 * h; ++k) z[k] = sigmoid(z[k]);
  for (std::size_t k = 2 * h; k < 3 * h; ++k) z[k] = std::tanh(z[k]);
  for (std::size_t k = 3 * h; k < 4 * h; ++k) z[k] = sigmoid(z[k]);
}

void check_lstm_shapes(const Tensor& wx, const Tensor& wh, const Tensor& b, std::size_t in,
                       std::size_t hidden) {
  const Shape want_wx{in, 4 * hidden};
  const Shape want_wh{hidden, 4 * hidden};
  if (wx.shape() != want_wx || wh.shape() != want_wh || b.shape() != Shape{4 * hidden}) {
    throw DimensionError("lstm: weights " + shape_string(wx.shape()) + "/" + shape_string(wh.shape()) +
                         "/" + shape_string(b.shape()) + " inconsistent with input width " +
                         std::to_string(in) + " and hidden size " + std::to_string(hidden));
  }
}

std::shared_ptr<LstmTrace> lstm_scan(const Tensor& x, const Tensor& wx, const Tensor& wh,
                                     const Tensor& b, std::size_t hidden, bool reverse) {
  const auto& k = simd::kernels();
  const std::size_t steps = x.rows();
  const std::size_t in = x.cols();
  const std::size_t g4 = 4 * hidden;
  auto tr = std::make_shared<LstmTrace>();
  tr->hidden = hidden;
  tr->reverse = reverse;
  tr->gates = Tensor::matrix(steps, g4);
  tr->cells = Tensor::matrix(steps, hidden);
  tr->tanh_c = Tensor::matrix(steps, hidden);
  tr->hidden_out = Tensor::matrix(steps, hidden);

  for (std::size_t n = 0; n < steps; ++n) {
    const std::size_t t = reverse ? steps - 1 - n : n;
    double* z = tr->gates.row(t).data();
    std::copy(b.data(), b.data() + g4, z);
    k.vecmat(x.row(t).data(), wx.data(), in, g4, z);
    const double* c_prev = nullptr;
    if (n > 0) {
      const std::size_t tp = reverse ? t + 1 : t - 1;
      k.vecmat(tr->hidden_out.row(tp).data(), wh.data(), hidden, g4, z);
      c_prev = tr->cells.row(tp).data();
    }
    lstm_gate_activations(z, hidden);
    double* c = tr->cells.row(t).data();
    double* tc = tr->tanh_c.row(t).data();
    double* h = tr->hidden_out.row(t).data();
    for (std::size_t j = 0; j < hidden; ++j) {
      const double i_g = z[j];
      const double f_g = z[hidden + j];
      const double g_g = z[2 * hidden + j];
      const double o_g = z[3 * hidden + j];
      c[j] = i_g * g_g + (c_prev ? f_g * c_prev[j] : 0.0);
      tc[j] = std::tanh(c[j]);
      h[j] = o_g * tc[j];
    }
  }
  return tr;
}

// Backpropagates through one direction. `dh_out` is T x 2H (the op's output
// gradient); `col` selects this direction's half.
void lstm_backward(const LstmTrace& tr, const Tensor& x, const Tensor& dh_out, std::size_t col,
                   const Tensor& wx, const Tensor& wh, Param& pwx, Param& pwh, Param& pb,
                   Tensor* dx) {
  const auto& k = simd::kernels();
  const std::size_t steps = x.rows();
  const std::size_t in = x.cols();
  const std::size_t hidden = tr.hidden;
  const std::size_t g4 = 4 * hidden;
  std::vector<double> dh_next(hidden, 0.0);
  std::vector<double> dc_next(hidden, 0.0);
  std::vector<double> dz(g4);

  for (std::size_t n = steps; n-- > 0;) {
    const std::size_t t = tr.reverse ? steps - 1 - n : n;
    const bool first = n == 0;
    const std::size_t tp = tr.reverse ? t + 1 : t - 1;  // unused when first
    const double* z = tr.gates.row(t).data();
    const double* tc = tr.tanh_c.row(t).data();
    const double* c_prev = first ? nullptr : tr.cells.row(tp).data();
    const double* dh_row = dh_out.row(t).data() + col;
    for (std::size_t j = 0; j < hidden; ++j) {
      const double i_g = z[j];
      const double f_g = z[hidden + j];
      const double g_g = z[2 * hidden + j];
      const double o_g = z[3 * hidden + j];
      const double dh = dh_row[j] + dh_next[j];
      const double dc = dh * o_g * (1.0 - tc[j] * tc[j]) + dc_next[j];
      dz[j] = dc * g_g * i_g * (1.0 - i_g);
      dz[hidden + j] = first ? 0.0 : dc * c_prev[j] * f_g * (1.0 - f_g);
      dz[2 * hidden + j] = dc * i_g * (1.0 - g_g * g_g);
      dz[3 * hidden + j] = dh * tc[j] * o_g * (1.0 - o_g);
      dc_next[j] = dc * f_g;
    }
    k.axpy(1.0, dz.data(), pb.grad.data(), g4);
    k.outer_acc(x.row(t).data(), dz.data(), in, g4, pwx.grad.data());
    if (dx) k.matvec(wx.data(), dz.data(), in, g4, dx->row(t).data());
    if (!first) {
      k.outer_acc(tr.hidden_out.row(tp).data(), dz.data(), hidden, g4, pwh.grad.data());
      std::fill(dh_next.begin(), dh_next.end(), 0.0);
      k.matvec(wh.data(), dz.data(), hidden, g4, dh_next.data());
    }
  }
}

}  // namespace

DenseParams add_dense(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out) {
  return DenseParams{store.add(prefix + ".weight", {in, out}), store.add(prefix + ".bias", {out})};
}

LstmDirectionParams add_lstm_direction(ParamStore& store, const std::string& prefix, std::size_t in,
                                       std::size_t hidden) {
  return LstmDirectionParams{store.add(prefix + ".input", {in, 4 * hidden}),
                             store.add(prefix + ".recurrent", {hidden, 4 * hidden}),
                             store.add(prefix + ".bias", {4 * hidden}), hidden};
}

BlstmParams add_blstm(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t hidden) {
  return BlstmParams{add_lstm_direction(store, prefix + ".fwd", in, hidden),
                     add_lstm_direction(store, prefix + ".bwd", in, hidden)};
}

double sigmoid(double x) {
  const double y = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return std::clamp(y, kSigmoidLow, kSigmoidHigh);
}

LstmState lstm_cell_step(std::span<const double> x, std::span<const double> h_prev,
                         std::span<const double> c_prev, const Tensor& input_weights,
                         const Tensor& recurrent_weights, const Tensor& bias) {
  const std::size_t hidden = h_prev.size();
  check_lstm_shapes(input_weights, recurrent_weights, bias, x.size(), hidden);
  if (c_prev.size() != hidden) {
    throw DimensionError("lstm: cell state has " + std::to_string(c_prev.size()) +
                         " values, hidden state has " + std::to_string(hidden));
  }
  const auto& k = simd::kernels();
  std::vector<double> z(bias.data(), bias.data() + 4 * hidden);
  k.vecmat(x.data(), input_weights.data(), x.size(), 4 * hidden, z.data());
  k.vecmat(h_prev.data(), recurrent_weights.data(), hidden, 4 * hidden, z.data());
  lstm_gate_activations(z.data(), hidden);
  LstmState out{std::vector<double>(hidden), std::vector<double>(hidden)};
  for (std::size_t j = 0; j < hidden; ++j) {
    out.c[j] = z[hidden + j] * c_prev[j] + z[j] * z[2 * hidden + j];
    out.h[j] = z[3 * hidden + j] * std::tanh(out.c[j]);
  }
  return out;
}

Tensor log_softmax(const Tensor& logits) {
  require_matrix(logits, "log_softmax");
  Tensor out(logits.shape());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (double v : in) s += std::exp(v - m);
    const double lse = m + std::log(s);
    for (std::size_t c = 0; c < in.size(); ++c) o[c] = in[c] - lse;
  }
  return out;
}

namespace ops {

Var dense(Var x, const DenseParams& p) {
  Tape& tape = tape_of(x);
  const Tensor& in = x.value();
  const Tensor& w = tape.store()[p.weight].value;
  const Tensor& b = tape.store()[p.bias].value;
  require_matrix(in, "dense");
  if (w.rank() != 2 || in.cols() != w.rows() || b.shape() != Shape{w.cols()}) {
    throw DimensionError("dense: input " + shape_string(in.shape()) + " does not match weights " +
                         shape_string(w.shape()) + " and bias " + shape_string(b.shape()));
  }
  const auto& k = simd::kernels();
  const std::size_t rows = in.rows(), din = w.rows(), dout = w.cols();
  Tensor out = Tensor::matrix(rows, dout);
  for (std::size_t r = 0; r < rows; ++r) {
    double* y = out.row(r).data();
    std::copy(b.data(), b.data() + dout, y);
    k.vecmat(in.row(r).data(), w.data(), din, dout, y);
  }
  const std::size_t xid = x.id();
  const DenseParams pp = p;
  return tape.record(std::move(out), [xid, pp](Tape& t, std::size_t self) {
    const auto& k = simd::kernels();
    const Tensor& dy = t.grad(self);
    const Tensor& xin = t.value(xid);
    Param& pw = t.param_for_update(pp.weight);
    Param& pb = t.param_for_update(pp.bias);
    Tensor& dx = t.grad(xid);
    const std::size_t din = pw.value.rows(), dout = pw.value.cols();
    for (std::size_t r = 0; r < xin.rows(); ++r) {
      const double* g = dy.row(r).data();
      k.axpy(1.0, g, pb.grad.data(), dout);
      k.outer_acc(xin.row(r).data(), g, din, dout, pw.grad.data());
      k.matvec(pw.value.data(), g, din, dout, dx.row(r).data());
    }
  });
}

Var tanh(Var x) {
  Tape& tape = tape_of(x);
  Tensor out(x.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(x.value()[i]);
  const std::size_t xid = x.id();
  return tape.record(std::move(out), [xid](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(xid);
    for (std::size_t i = 0; i < y.size(); ++i) dx[i] += dy[i] * (1.0 - y[i] * y[i]);
  });
}

Var relu(Var x) {
  Tape& tape = tape_of(x);
  Tensor out(x.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, x.value()[i]);
  const std::size_t xid = x.id();
  return tape.record(std::move(out), [xid](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(xid);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] > 0.0) dx[i] += dy[i];
    }
  });
}

Var activation(Var x, Activation a) { return a == Activation::kTanh ? ops::tanh(x) : ops::relu(x); }

Var sigmoid(Var x) {
  Tape& tape = tape_of(x);
  Tensor out(x.value().shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = actc::sigmoid(x.value()[i]);
  const std::size_t xid = x.id();
  return tape.record(std::move(out), [xid](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(xid);
    for (std::size_t i = 0; i < y.size(); ++i) dx[i] += dy[i] * y[i] * (1.0 - y[i]);
  });
}

Var blstm(Var x, const BlstmParams& p) {
  Tape& tape = tape_of(x);
  const Tensor& in = x.value();
  if (in.empty()) throw InvalidInput("blstm: empty sequence");
  require_matrix(in, "blstm");
  const ParamStore& s = tape.store();
  const std::size_t hidden = p.forward.hidden;
  if (p.backward.hidden != hidden) throw DimensionError("blstm: directions disagree on hidden size");
  for (const LstmDirectionParams* d : {&p.forward, &p.backward}) {
    check_lstm_shapes(s[d->input].value, s[d->recurrent].value, s[d->bias].value, in.cols(), hidden);
  }
  auto fwd = lstm_scan(in, s[p.forward.input].value, s[p.forward.recurrent].value,
                       s[p.forward.bias].value, hidden, false);
  auto bwd = lstm_scan(in, s[p.backward.input].value, s[p.backward.recurrent].value,
                       s[p.backward.bias].value, hidden, true);
  Tensor out = Tensor::matrix(in.rows(), 2 * hidden);
  for (std::size_t t = 0; t < in.rows(); ++t) {
    auto row = out.row(t);
    std::copy_n(fwd->hidden_out.row(t).data(), hidden, row.data());
    std::copy_n(bwd->hidden_out.row(t).data(), hidden, row.data() + hidden);
  }
  const std::size_t xid = x.id();
  const BlstmParams pp = p;
  return tape.record(std::move(out), [xid, pp, fwd, bwd](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const Tensor& xin = t.value(xid);
    Tensor& dx = t.grad(xid);
    const std::size_t h = pp.forward.hidden;
    std::size_t col = 0;
    for (const auto& [dir, trace] : {std::pair{pp.forward, fwd}, std::pair{pp.backward, bwd}}) {
      Param& wx = t.param_for_update(dir.input);
      Param& wh = t.param_for_update(dir.recurrent);
      Param& b = t.param_for_update(dir.bias);
      lstm_backward(*trace, xin, dy, col, wx.value, wh.value, wx, wh, b, &dx);
      col += h;
    }
  });
}

Var average_pool(Var x) {
  Tape& tape = tape_of(x);
  const Tensor& in = x.value();
  if (in.empty()) throw InvalidInput("average_pool: empty sequence");
  require_matrix(in, "average_pool");
  const std::size_t steps = in.rows(), dim = in.cols();
  Tensor out = Tensor::matrix(1, dim);
  for (std::size_t t = 0; t < steps; ++t) simd::kernels().axpy(1.0, in.row(t).data(), out.data(), dim);
  for (std::size_t d = 0; d < dim; ++d) out[d] /= static_cast<double>(steps);
  const std::size_t xid = x.id();
  return tape.record(std::move(out), [xid](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(xid);
    const double inv = 1.0 / static_cast<double>(dx.rows());
    for (std::size_t r = 0; r < dx.rows(); ++r) simd::kernels().axpy(inv, dy.data(), dx.row(r).data(), dx.cols());
  });
}

Var log_softmax(Var x) {
  Tape& tape = tape_of(x);
  Tensor out = actc::log_softmax(x.value());
  const std::size_t xid = x.id();
  return tape.record(std::move(out), [xid](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(xid);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      auto yr = y.row(r);
      auto gr = dy.row(r);
      auto xr = dx.row(r);
      double total = 0.0;
      for (double g : gr) total += g;
      for (std::size_t c = 0; c < yr.size(); ++c) xr[c] += gr[c] - std::exp(yr[c]) * total;
    }
  });
}

Var sum(Var x) {
  Tape& tape = tape_of(x);
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  const std::size_t xid = x.id();
  return tape.record(Tensor({1}, s), [xid](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    Tensor& dx = t.grad(xid);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g;
  });
}

Var scale(Var x, double factor) {
  Tape& tape = tape_of(x);
  Tensor out = x.value();
  for (double& v : out.values()) v *= factor;
  const std::size_t xid = x.id();
  return tape.record(std::move(out), [xid, factor](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(xid);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += factor * dy[i];
  });
}

Var add(Var a, Var b) {
  Tape& tape = tape_of(a);
  if (b.tape() != &tape) throw ContractError("add: operands live on different tapes");
  if (a.value().shape() != b.value().shape()) {
    throw DimensionError("add: shapes " + shape_string(a.value().shape()) + " and " +
                         shape_string(b.value().shape()) + " differ");
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  const std::size_t aid = a.id(), bid = b.id();
  return tape.record(std::move(out), [aid, bid](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    for (std::size_t id : {aid, bid}) {
      Tensor& dx = t.grad(id);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    }
  });
}

Var binary_cross_entropy(Var p, double target, double eps) {
  Tape& tape = tape_of(p);
  if (p.value().size() != 1) {
    throw DimensionError("binary_cross_entropy: expected one probability, got shape " +
                         shape_string(p.value().shape()));
  }
  const double raw = p.value()[0];
  const double q = std::clamp(raw, eps, 1.0 - eps);
  const bool clamped = q != raw;
  const double loss = -(target * std::log(q) + (1.0 - target) * std::log(1.0 - q));
  const std::size_t pid = p.id();
  return tape.record(Tensor({1}, loss), [pid, q, target, clamped](Tape& t, std::size_t self) {
    if (clamped) return;
    const double g = t.grad(self)[0];
    t.grad(pid)[0] += g * (-(target / q) + (1.0 - target) / (1.0 - q));
  });
}

}  // namespace ops
}  // namespace actc
