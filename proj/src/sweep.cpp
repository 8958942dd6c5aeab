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

#include "actc/sweep.hpp"

#include <charconv>
#include <exception>
#include <map>

#include "actc/error.hpp"
#include "actc/evaluate.hpp"

namespace actc {
namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string format_sweep_row(const SweepRow& row) {
  std::string s;
  append_number(s, row.alpha);
  for (double v : {row.per_oracle, row.per_switched, row.aid_acc}) {
    s += ',';
    append_number(s, v);
  }
  s += ',';
  s += std::to_string(row.epochs);
  s += ',';
  for (char c : row.status) s += (c == ',' || c == '\n') ? ';' : c;
  return s;
}

std::vector<SweepRow> alpha_sweep(const Corpus& corpus, const Corpus* test, AmConfig model_config,
                                  TrainingConfig config, const std::vector<double>& alphas,
                                  const std::function<void(const SweepRow&)>& on_row) {
  if (alphas.empty()) throw ConfigError("sweep: no alpha values given");
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("sweep: alpha " + std::to_string(a) + " outside [0, 1]");
  }
  model_config.kind = ModelKind::kJoint;
  std::map<double, SweepRow> done;
  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    if (auto it = done.find(alpha); it != done.end()) {
      rows.push_back(it->second);
      if (on_row) on_row(rows.back());
      continue;
    }
    SweepRow row;
    row.alpha = alpha;
    try {
      config.alpha = alpha;
      const TrainingResult r = run_training(corpus, model_config, config);
      row.epochs = r.log.size();
      if (r.diverged) row.status = r.status;
      const Corpus scored = test ? *test : corpus.subset(r.split.heldout);
      const EvalReport oracle = evaluate(r.model, scored, EvalMode::kOracle);
      const EvalReport switched = evaluate(r.model, scored, EvalMode::kSwitchedJoint);
      row.per_oracle = oracle.pooled_per();
      row.per_switched = switched.pooled_per();
      row.aid_acc = oracle.aid ? oracle.aid->accuracy() : 0.0;
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
    }
    done.emplace(alpha, row);
    rows.push_back(row);
    if (on_row) on_row(row);
  }
  return rows;
}

}  // namespace actc
