// Copyright 2026 The qpbae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qpbae: train, evaluate, infer, compare and gen-synth.
//
// Settings come from --config (key = value file) and are overridden by flags;
// --set key=value reaches any config key without a dedicated flag.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qpbae/errors.hpp"
#include "qpbae/run.hpp"

namespace {

struct Overrides {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::string> seed;  // single seed or comma list
  std::optional<std::string> patch_size;
  std::optional<std::string> stride;
  std::optional<std::string> bottleneck;
  std::optional<std::string> model;
  std::optional<std::string> data_root;
  std::optional<std::string> category;
  std::optional<std::string> source;
  std::optional<std::string> out;
  std::optional<std::string> shots;
  std::optional<std::string> reset;
  std::optional<std::string> epochs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value config file");
  cmd->add_option("--set", o.sets, "extra key=value override (repeatable)");
  cmd->add_option("--seed", o.seed, "training seed, or comma-separated seed list");
  cmd->add_option("--patch-size", o.patch_size, "patch size P (2, 4, 8)");
  cmd->add_option("--stride", o.stride, "stride S (1, 2, 4, 8; S <= P)");
  cmd->add_option("--bottleneck", o.bottleneck, "bottleneck qubits BD (1, 2)");
  cmd->add_option("--model", o.model, "quantum | classical");
  cmd->add_option("--source", o.source, "synthetic | mvtec | busi");
  cmd->add_option("--data-root", o.data_root, "dataset root directory");
  cmd->add_option("--category", o.category, "dataset category (MVTec layout)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--shots", o.shots, "measurement shots per patch (0 = exact)");
  cmd->add_option("--reset-trash-before-decode", o.reset,
                  "reset trash qubits between encoder and decoder when scoring (true | false)");
  cmd->add_option("--epochs", o.epochs, "training epochs");
}

qpbae::RunConfig resolve(const Overrides& o) {
  qpbae::RunConfig cfg = o.config.empty() ? qpbae::RunConfig{} : qpbae::read_config(o.config);
  const auto apply = [&cfg](const char* key, const std::optional<std::string>& v) {
    if (v) qpbae::set_config_value(cfg, key, *v);
  };
  apply("seeds", o.seed);
  apply("patch_size", o.patch_size);
  apply("stride", o.stride);
  apply("bottleneck", o.bottleneck);
  apply("model", o.model);
  apply("source", o.source);
  apply("data_root", o.data_root);
  apply("category", o.category);
  apply("out", o.out);
  apply("shots", o.shots);
  apply("reset_trash_before_decode", o.reset);
  apply("epochs", o.epochs);
  // A data root given on the command line implies an MVTec-layout dataset.
  if (o.data_root && !o.source) cfg.source = qpbae::DataSource::Mvtec;
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw qpbae::ConfigError("--set expects key=value, got " + kv);
    qpbae::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void print_reports(const std::vector<qpbae::SeedReport>& reports) {
  for (const auto& r : reports) {
    std::printf("seed %llu  AUROC %.4f  AUPRO %.4f\n", static_cast<unsigned long long>(r.seed),
                r.report.auroc, r.report.aupro);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum patch-based autoencoder for anomaly segmentation"};
  app.set_version_flag("--version", qpbae::version());
  app.require_subcommand(1);

  Overrides o;
  std::string checkpoint;
  std::string image;
  std::string map_out;

  auto* train = app.add_subcommand("train", "train one model per seed");
  add_common(train, o);
  auto* evaluate = app.add_subcommand("evaluate", "evaluate trained checkpoints on the test split");
  add_common(evaluate, o);
  auto* infer = app.add_subcommand("infer", "anomaly map of one image");
  add_common(infer, o);
  infer->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  infer->add_option("--image", image, "input PGM/PPM image")->required();
  infer->add_option("--map-out", map_out, "output stem (default: <out>/<image stem>_map)");
  auto* compare = app.add_subcommand("compare", "quantum vs classical on shared data and seeds");
  add_common(compare, o);
  auto* gen = app.add_subcommand("gen-synth", "write the synthetic dataset in MVTec layout");
  add_common(gen, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qpbae::exit_code(qpbae::ErrorKind::Config);
  }

  try {
    const qpbae::RunConfig cfg = resolve(o);
    if (train->parsed()) {
      const auto data = qpbae::load_dataset(cfg);
      const auto results = qpbae::run_train(cfg, data);
      for (const auto& r : results) {
        const auto& h = r.state.history.back();
        std::printf("seed %llu  epochs %d  train_loss %.6f  val_loss %.6f  best_epoch %d\n",
                    static_cast<unsigned long long>(r.seed), r.state.epochs_done, h.train_loss,
                    h.val_loss, r.state.best_epoch);
      }
      std::printf("wrote %s\n", cfg.out.c_str());
    } else if (evaluate->parsed()) {
      const auto data = qpbae::load_dataset(cfg);
      print_reports(qpbae::run_evaluate(cfg, data));
      std::printf("wrote %s/summary.csv\n", cfg.out.c_str());
    } else if (infer->parsed()) {
      std::string stem = map_out;
      if (stem.empty()) {
        stem = (std::filesystem::path(cfg.out) /
                (std::filesystem::path(image).stem().string() + "_map"))
                   .string();
      }
      const auto r = qpbae::run_infer(checkpoint, image, cfg, stem);
      std::printf("wrote %s and %s\n", r.pgm_path.c_str(), r.csv_path.c_str());
    } else if (compare->parsed()) {
      const auto data = qpbae::load_dataset(cfg);
      const auto cmp = qpbae::run_compare(cfg, data);
      for (const auto& row : cmp.rows) {
        std::printf("%-6s quantum AUROC %.4f AUPRO %.4f | classical AUROC %.4f AUPRO %.4f\n",
                    row.label.c_str(), row.quantum_auroc, row.quantum_aupro, row.classical_auroc,
                    row.classical_aupro);
      }
      std::printf("parameters: quantum %zu, classical %zu\n", cmp.quantum_params,
                  cmp.classical_params);
    } else if (gen->parsed()) {
      qpbae::run_gen_synth(cfg);
      std::printf("wrote %s/%s\n", cfg.out.c_str(), cfg.category.c_str());
    }
  } catch (const qpbae::Error& e) {
    std::fprintf(stderr, "qpbae: %s\n", e.what());
    return qpbae::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qpbae: %s\n", e.what());
    return 1;
  }
  return 0;
}
