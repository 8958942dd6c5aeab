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

// actc: generate data, train, evaluate and sweep from the command line.
//
// Exit status: 0 on success, 1 for usage or configuration errors, 2 when a
// run fails at runtime. Diagnostics go to stderr prefixed with "error:".

#include <charconv>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actc/checkpoint.hpp"
#include "actc/corpus.hpp"
#include "actc/dataset_io.hpp"
#include "actc/error.hpp"
#include "actc/evaluate.hpp"
#include "actc/metrics.hpp"
#include "actc/serialize.hpp"
#include "actc/sweep.hpp"
#include "actc/train.hpp"

namespace fs = std::filesystem;

namespace actc {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// A failed run that still wrote its outputs.
class RunFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<double> kDefaultAlphas = {0.0, 0.001, 0.005, 0.01, 0.2, 0.5, 0.8, 1.0};

// Everything a command reads from the config file and the command line.
struct RunConfig {
  GeneratorConfig data;
  Json model_json = Json::object();
  TrainingConfig train;
  std::vector<double> alphas = kDefaultAlphas;
  std::string mode = "oracle";
  // io section
  std::string data_path;
  std::string test_data_path;
  std::string checkpoint;
  std::string aid_checkpoint;
  std::vector<std::string> baseline;
};

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

template <typename T>
T get_as(const Json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + ": unexpected value " + v.dump());
  }
}

void read_io(const Json& j, RunConfig& rc) {
  if (!j.is_object()) throw ConfigError("io: expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    const std::string where = "io." + key;
    if (key == "data") {
      rc.data_path = get_as<std::string>(v, where);
    } else if (key == "test_data") {
      rc.test_data_path = get_as<std::string>(v, where);
    } else if (key == "checkpoint") {
      rc.checkpoint = get_as<std::string>(v, where);
    } else if (key == "aid_checkpoint") {
      rc.aid_checkpoint = get_as<std::string>(v, where);
    } else if (key == "baseline") {
      rc.baseline = get_as<std::vector<std::string>>(v, where);
    } else {
      throw ConfigError("io: unknown key '" + key + "'");
    }
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig rc;
  if (path.empty()) return rc;
  Json root;
  try {
    root = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config '" + path + "': expected a JSON object");
  for (const auto& [key, v] : root.items()) {
    if (key == "data") {
      rc.data = generator_config_from_json(v);
    } else if (key == "model") {
      am_config_from_json(v);  // reject bad keys now; dataset-derived sizes are filled in later
      rc.model_json = v;
    } else if (key == "train") {
      rc.train = training_config_from_json(v);
    } else if (key == "sweep") {
      if (!v.is_object()) throw ConfigError("sweep: expected a JSON object");
      for (const auto& [k, a] : v.items()) {
        if (k != "alphas") throw ConfigError("sweep: unknown key '" + k + "'");
        rc.alphas = get_as<std::vector<double>>(a, "sweep.alphas");
      }
    } else if (key == "eval") {
      if (!v.is_object()) throw ConfigError("eval: expected a JSON object");
      for (const auto& [k, m] : v.items()) {
        if (k != "mode") throw ConfigError("eval: unknown key '" + k + "'");
        rc.mode = get_as<std::string>(m, "eval.mode");
      }
    } else if (key == "io") {
      read_io(v, rc);
    } else {
      throw ConfigError("config: unknown section '" + key + "'");
    }
  }
  return rc;
}

// Model sizes that the dataset determines are taken from it unless the config
// sets them explicitly.
AmConfig resolve_model(const RunConfig& rc, const Corpus& data) {
  AmConfig m = am_config_from_json(rc.model_json);
  if (!rc.model_json.contains("input_dim")) m.input_dim = data.feature_dim * (m.stack_frames ? 2 : 1);
  if (!rc.model_json.contains("phones_us")) m.phones_us = data.phones_us;
  if (!rc.model_json.contains("phones_uk")) m.phones_uk = data.phones_uk;
  return m;
}

const std::string& require(const std::string& value, const char* what) {
  if (value.empty()) throw ConfigError(std::string("missing ") + what);
  return value;
}

fs::path prepare_out_dir(const std::string& out) {
  const fs::path dir(require(out, "--out"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out + "': " + ec.message());
  return dir;
}

void write_config(const fs::path& path, const Json& resolved) { write_text(path, resolved.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

int cmd_gen_data(const RunConfig& rc, const std::string& out) {
  require(out, "--out");
  rc.data.validate();
  const Corpus corpus = generate_corpus(rc.data);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_dataset(corpus, out);
  write_config(out + ".config.json", Json{{"data", to_json(rc.data)}});
  std::size_t frames = 0;
  for (const Utterance& u : corpus.utterances) frames += u.frames();
  std::cout << "wrote " << corpus.utterances.size() << " utterances (" << frames << " frames) to " << out
            << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& rc, const std::string& out) {
  const Corpus data = read_dataset(require(rc.data_path, "dataset (--data or io.data)"));
  const AmConfig model = resolve_model(rc, data);
  model.validate();
  rc.train.validate();
  const fs::path dir = prepare_out_dir(out);
  write_config(dir / "config.json", Json{{"model", to_json(model)},
                                          {"train", to_json(rc.train)},
                                          {"io", {{"data", rc.data_path}}}});

  std::ofstream log(dir / "train_log.csv", std::ios::binary);
  if (!log) throw std::runtime_error("cannot write '" + (dir / "train_log.csv").string() + "'");
  log << kTrainingLogHeader << ",heldout_am_loss\n";
  std::cout << kTrainingLogHeader << "\n";
  const TrainingResult r = run_training(data, model, rc.train, [&](const EpochLog& row, const AccentModel&) {
    const std::string line = format_log_row(row);
    log << line << ',' << number(row.heldout_am_loss) << '\n';
    log.flush();
    std::cout << line << std::endl;
  });
  save_checkpoint((dir / "model.ckpt").string(), r.model, rc.train.alpha, &r.adam, r.final_lr);
  std::cout << "best epoch " << r.best_epoch << " of " << r.log.size() << ": " << r.status << "\n"
            << "checkpoint " << (dir / "model.ckpt").string() << "\n";
  if (r.diverged) throw RunFailure(r.status);
  return kExitOk;
}

struct Baseline {
  std::string name;
  std::optional<double> per[2];
};

Baseline baseline_per(const std::vector<std::string>& paths, const Corpus& data) {
  Baseline b;
  for (const std::string& path : paths) {
    const Checkpoint ck = load_checkpoint(path);
    const EvalReport r = evaluate(ck.model, data, EvalMode::kOracle);
    b.name += (b.name.empty() ? "" : "+") + std::string(model_kind_name(ck.model.config().kind));
    for (Accent a : kAccents) {
      if (!r.has(a)) continue;
      auto& slot = b.per[a == Accent::kUS ? 0 : 1];
      if (slot) throw ConfigError("baseline: more than one checkpoint covers accent " + std::string(accent_name(a)));
      slot = r.per(a).per();
    }
  }
  return b;
}

std::string join_labels(const LabelSequence& labels) {
  std::string s;
  for (int l : labels) {
    if (!s.empty()) s += ' ';
    s += std::to_string(l);
  }
  return s;
}

int cmd_eval(const RunConfig& rc, const std::string& out) {
  const EvalMode mode = parse_eval_mode(rc.mode);
  const Corpus data = read_dataset(require(rc.data_path, "dataset (--data or io.data)"));
  const Checkpoint ck = load_checkpoint(require(rc.checkpoint, "checkpoint (--checkpoint or io.checkpoint)"));
  std::optional<Checkpoint> aid;
  if (!rc.aid_checkpoint.empty()) aid = load_checkpoint(rc.aid_checkpoint);
  if (mode == EvalMode::kSwitchedIndependentAid && !aid) {
    throw ConfigError("switched:ind-aid needs an AID checkpoint (--aid or io.aid_checkpoint)");
  }
  const EvalReport report = evaluate(ck.model, data, mode, aid ? &aid->model : nullptr);
  const Baseline base = baseline_per(rc.baseline, data);

  const fs::path dir = prepare_out_dir(out);
  Json io{{"data", rc.data_path}, {"checkpoint", rc.checkpoint}};
  if (!rc.aid_checkpoint.empty()) io["aid_checkpoint"] = rc.aid_checkpoint;
  if (!rc.baseline.empty()) io["baseline"] = rc.baseline;
  write_config(dir / "config.json", Json{{"eval", {{"mode", rc.mode}}}, {"io", io}});

  struct Row {
    std::string accent;
    double per;
    std::optional<std::size_t> edits, ref_phones, utterances;
    std::optional<double> baseline;
  };
  std::vector<Row> rows;
  double base_sum = 0.0;
  int base_n = 0;
  bool base_complete = true;
  for (Accent a : kAccents) {
    if (!report.has(a)) continue;
    const PerAccumulator& p = report.per(a);
    const auto& b = base.per[a == Accent::kUS ? 0 : 1];
    rows.push_back({std::string(accent_name(a)), p.per(), p.edits, p.ref_phones, p.utterances, b});
    if (b) {
      base_sum += *b;
      ++base_n;
    } else {
      base_complete = false;
    }
  }
  rows.push_back({"mean", report.mean_per(), {}, {}, {},
                  base_complete && base_n > 0 ? std::optional<double>(base_sum / base_n) : std::nullopt});
  rows.push_back({"pooled", report.pooled_per(), report.per_us.edits + report.per_uk.edits,
                  report.per_us.ref_phones + report.per_uk.ref_phones,
                  report.per_us.utterances + report.per_uk.utterances, std::nullopt});

  auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
  std::string csv = "mode,accent,per,edits,ref_phones,utterances,baseline,baseline_per,relative_improvement\n";
  std::cout << "mode " << rc.mode << "  checkpoint " << rc.checkpoint << " ("
            << model_kind_name(ck.model.config().kind) << ")\n"
            << "accent   PER(%)";
  if (!base.name.empty()) std::cout << "   " << base.name << "(%)   rel(%)";
  std::cout << "\n";
  for (const Row& row : rows) {
    std::string rel;
    if (row.baseline && *row.baseline > 0.0) rel = number(relative_improvement(*row.baseline, row.per));
    csv += rc.mode + ',' + row.accent + ',' + number(row.per) + ',' + opt(row.edits) + ',' + opt(row.ref_phones) +
           ',' + opt(row.utterances) + ',' + base.name + ',' + (row.baseline ? number(*row.baseline) : "") + ',' +
           rel + '\n';
    std::printf("%-8s %6s", row.accent.c_str(), fixed(row.per).c_str());
    if (!base.name.empty()) {
      std::printf("   %*s   %s", static_cast<int>(base.name.size() + 3),
                  row.baseline ? fixed(*row.baseline).c_str() : "-",
                  rel.empty() ? "-" : fixed(relative_improvement(*row.baseline, row.per)).c_str());
    }
    std::printf("\n");
  }
  std::fflush(stdout);
  write_text(dir / "eval_summary.csv", csv);

  std::string utt = "id,truth,head,p_us,edits,ref_phones,hypothesis\n";
  for (std::size_t i = 0; i < report.decisions.size(); ++i) {
    const UtteranceDecision& d = report.decisions[i];
    utt += d.id + ',' + std::string(accent_name(d.truth)) + ',' +
           (d.head ? std::string(accent_name(*d.head)) : "") + ',' + (d.p_us ? number(*d.p_us) : "") + ',' +
           (d.head ? std::to_string(d.edits) : "") + ',' + std::to_string(data.utterances[i].labels.size()) +
           ',' + join_labels(d.hypothesis) + '\n';
  }
  write_text(dir / "eval_utterances.csv", utt);

  if (report.aid) {
    const AidConfusion& c = *report.aid;
    std::cout << "AID accuracy " << fixed(c.accuracy()) << "% (us recall " << fixed(c.recall(Accent::kUS))
              << "%, uk recall " << fixed(c.recall(Accent::kUK)) << "%)\n";
    write_text(dir / "eval_aid.csv",
               "accuracy,recall_us,recall_uk,us_as_us,us_as_uk,uk_as_us,uk_as_uk\n" + number(c.accuracy()) + ',' +
                   number(c.recall(Accent::kUS)) + ',' + number(c.recall(Accent::kUK)) + ',' +
                   std::to_string(c.counts[0][0]) + ',' + std::to_string(c.counts[0][1]) + ',' +
                   std::to_string(c.counts[1][0]) + ',' + std::to_string(c.counts[1][1]) + '\n');
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& rc, const std::string& out) {
  if (rc.alphas.empty()) throw ConfigError("sweep: no alpha values given");
  const Corpus data = read_dataset(require(rc.data_path, "dataset (--data or io.data)"));
  std::optional<Corpus> test;
  if (!rc.test_data_path.empty()) test = read_dataset(rc.test_data_path);
  AmConfig model = resolve_model(rc, data);
  model.kind = ModelKind::kJoint;
  model.validate();
  rc.train.validate();
  for (double a : rc.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("sweep: alpha " + number(a) + " outside [0, 1]");
  }
  if (test) check_compatible(model, *test);

  const fs::path dir = prepare_out_dir(out);
  Json io{{"data", rc.data_path}};
  if (test) io["test_data"] = rc.test_data_path;
  write_config(dir / "config.json", Json{{"model", to_json(model)},
                                          {"train", to_json(rc.train)},
                                          {"sweep", {{"alphas", rc.alphas}}},
                                          {"io", io}});
  std::ofstream csv(dir / "sweep.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write '" + (dir / "sweep.csv").string() + "'");
  csv << kSweepHeader << "\n";
  std::cout << kSweepHeader << std::endl;
  std::size_t failed = 0;
  alpha_sweep(data, test ? &*test : nullptr, model, rc.train, rc.alphas, [&](const SweepRow& row) {
    const std::string line = format_sweep_row(row);
    csv << line << '\n';
    csv.flush();
    std::cout << line << std::endl;
    if (row.status.rfind("failed", 0) == 0 || row.status.rfind("diverged", 0) == 0) ++failed;
  });
  if (failed > 0) throw RunFailure(std::to_string(failed) + " sweep point(s) failed; see sweep.csv");
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> stream;
  std::string out;
  std::optional<std::string> alpha;
  std::optional<std::string> model;
  std::optional<std::string> mode;
  std::optional<std::string> data;
  std::optional<std::string> test_data;
  std::optional<std::string> checkpoint;
  std::optional<std::string> aid;
  std::vector<std::string> baseline;
};

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw ConfigError("--alpha: '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

int run(const std::string& command, const Flags& f) {
  RunConfig rc = load_config(f.config);
  if (f.seed) {
    rc.data.seed = *f.seed;
    rc.train.seed = *f.seed;
  }
  if (f.stream) rc.data.stream = *f.stream;
  if (f.model) rc.model_json["kind"] = *f.model;
  if (f.mode) rc.mode = *f.mode;
  if (f.data) rc.data_path = *f.data;
  if (f.test_data) rc.test_data_path = *f.test_data;
  if (f.checkpoint) rc.checkpoint = *f.checkpoint;
  if (f.aid) rc.aid_checkpoint = *f.aid;
  if (!f.baseline.empty()) rc.baseline = f.baseline;
  if (f.alpha) {
    if (command == "sweep") {
      rc.alphas = parse_alpha_list(*f.alpha);
    } else {
      const std::vector<double> a = parse_alpha_list(*f.alpha);
      if (a.size() != 1) throw ConfigError("--alpha: train takes a single value");
      rc.train.alpha = a[0];
    }
  }
  if (command == "gen-data") return cmd_gen_data(rc, f.out);
  if (command == "train") return cmd_train(rc, f.out);
  if (command == "eval") return cmd_eval(rc, f.out);
  return cmd_sweep(rc, f.out);
}

}  // namespace
}  // namespace actc

int main(int argc, char** argv) {
  using actc::Flags;
  CLI::App app{"Multi-accent CTC acoustic models with accent identification"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file (sections data, model, train, sweep, eval, io)");
    sub->add_option("--out", f.out, "output path (a file for gen-data, a directory otherwise)")->required();
  };
  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic two-accent dataset");
  common(gen);
  gen->add_option("--seed", f.seed, "world and sampling seed (data.seed)");
  gen->add_option("--stream", f.stream, "independent utterance sample of the same world (data.stream)");

  CLI::App* train = app.add_subcommand("train", "train one model and write model.ckpt and train_log.csv");
  common(train);
  train->add_option("--seed", f.seed, "training seed (train.seed)");
  train->add_option("--model", f.model, "aspec-us, aspec-uk, mtlp, joint or aid (model.kind)");
  train->add_option("--alpha", f.alpha, "AID loss weight (train.alpha)");
  train->add_option("--data", f.data, "dataset file (io.data)");

  CLI::App* eval = app.add_subcommand("eval", "score a checkpoint on a dataset");
  common(eval);
  eval->add_option("--mode", f.mode, "oracle, switched:ind-aid or switched:joint (eval.mode)");
  eval->add_option("--checkpoint", f.checkpoint, "model checkpoint (io.checkpoint)");
  eval->add_option("--aid", f.aid, "independent AID checkpoint (io.aid_checkpoint)");
  eval->add_option("--baseline", f.baseline, "checkpoint(s) to compare against in oracle mode (io.baseline)");
  eval->add_option("--data", f.data, "dataset file (io.data)");

  CLI::App* sweep = app.add_subcommand("sweep", "train one joint model per alpha and tabulate PER and AID accuracy");
  common(sweep);
  sweep->add_option("--seed", f.seed, "training seed (train.seed)");
  sweep->add_option("--alpha", f.alpha, "comma-separated alpha values (sweep.alphas)");
  sweep->add_option("--data", f.data, "training dataset (io.data)");
  sweep->add_option("--test", f.test_data, "dataset to score on; default is the held-out split (io.test_data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return actc::kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return actc::run(command, f);
  } catch (const actc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return actc::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return actc::kExitRuntime;
  }
}
