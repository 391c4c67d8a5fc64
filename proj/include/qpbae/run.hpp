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

/**
 * @file
 * Run configuration and the commands behind the `qpbae` tool.
 *
 * Config files are flat `key = value` text; '#' starts a comment. Keys that
 * start with `info.` are written into manifests for the reader's benefit and
 * ignored on parse. Output layout under `out`:
 *
 *   manifest.txt                   config + seeds + version + parameter count
 *   seed_<s>/checkpoint.txt        trained model
 *   seed_<s>/loss.csv              epoch,train_loss,val_loss
 *   seed_<s>/report.csv            auroc,aupro + threshold,dice,iou
 *   seed_<s>/maps.csv              image,row,col,count,score per test pixel
 *   summary.csv                    per-seed AUROC/AUPRO plus mean and std
 */

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qpbae/ansatz.hpp"
#include "qpbae/baseline.hpp"
#include "qpbae/dataio.hpp"
#include "qpbae/metrics.hpp"
#include "qpbae/train.hpp"

namespace qpbae {

std::string version();

enum class ModelKind { Quantum, Classical };
enum class DataSource { Synthetic, Mvtec, Busi };

struct RunConfig {
  ModelKind model = ModelKind::Quantum;
  int patch_size = 4;
  int stride = 1;
  int bottleneck = 2;

  int epochs = 20;
  double learning_rate = 0.005;
  int batch_size = 4;
  std::vector<std::uint64_t> seeds{0};

  DataSource source = DataSource::Synthetic;
  std::string data_root;
  std::string category = "synthetic";
  SynthSpec synth;
  LoaderOptions loader;

  std::string out = "qpbae-out";
  int shots = 0;  // 0 = exact scores
  bool reset_trash_before_decode = true;
  bool zero_patch_scores_one = false;
  double fpr_limit = 0.3;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string to_string(ModelKind m);
std::string to_string(DataSource s);

/// Applies one `key = value` pair; unknown keys and malformed values raise
/// ConfigError.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig parse_config(const std::string& text);
RunConfig read_config(const std::string& path);
/// Every key, one per line, in a fixed order; parse_config(serialize) == cfg.
std::string serialize_config(const RunConfig& cfg);

/// Restricts (P, S, BD) to the grid the model was studied on: P in {2, 4, 8};
/// S in {1, 2, 4, 8} with S <= P; BD in {1, 2}; BD = 1 when P = 2. Also checks
/// training and output settings. Violations raise ConfigError naming the rule.
void validate_config(const RunConfig& cfg);

AutoencoderConfig autoencoder_config(const RunConfig& cfg);
TrainConfig train_config(const RunConfig& cfg, std::uint64_t seed);
/// Hidden width of the classical model: 2^BD, the size of the quantum
/// bottleneck register's state space (64 -> 4 at P = 8, BD = 2).
int classical_hidden_dim(const RunConfig& cfg);
/// Trainable parameters of the configured model.
std::size_t model_parameter_count(const RunConfig& cfg);

DatasetSplit load_dataset(const RunConfig& cfg);

/// Exclusive ownership of an output directory for one command.
class OutputLock {
 public:
  explicit OutputLock(const std::string& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::string path_;
};

std::string seed_dir(const RunConfig& cfg, std::uint64_t seed);

/// A loaded model of either kind, ready to produce anomaly maps.
struct Model {
  Checkpoint checkpoint;

  static Model from_checkpoint(Checkpoint ckpt);
  std::size_t parameter_count() const;
  /// Uses the best (lowest validation loss) parameters.
  ScoreMap anomaly_map(const Image& img, const RunConfig& cfg, std::uint64_t shot_seed) const;
};

Checkpoint make_checkpoint(const RunConfig& cfg, std::uint64_t seed, const TrainState& state);

struct TrainResult {
  std::uint64_t seed;
  TrainState state;
  Checkpoint checkpoint;
};

/// Trains one model per seed and writes checkpoints, loss histories and the
/// manifest.
std::vector<TrainResult> run_train(const RunConfig& cfg, const DatasetSplit& data);

struct SeedReport {
  std::uint64_t seed;
  EvalReport report;
  double mean_inside = 0.0;   // mean anomaly score on defect pixels
  double mean_outside = 0.0;  // mean anomaly score on normal pixels
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};
MeanStd mean_std(const std::vector<double>& values);

/// Anomaly maps of every test image.
std::vector<ScoreMap> predict_maps(const Model& model, const RunConfig& cfg,
                                   const std::vector<Image>& images, std::uint64_t seed);

SeedReport evaluate_model(const Model& model, const RunConfig& cfg, const DatasetSplit& data,
                          std::uint64_t seed);

/// Loads seed_<s>/checkpoint.txt for every seed, evaluates it on the test
/// split and writes per-seed reports, maps and summary.csv.
std::vector<SeedReport> run_evaluate(const RunConfig& cfg, const DatasetSplit& data);

void write_maps_csv(const std::string& path, const std::vector<ScoreMap>& maps);
void write_summary_csv(const std::string& path, const std::vector<SeedReport>& reports);

struct InferResult {
  ScoreMap map;
  std::string pgm_path;
  std::string csv_path;
};

/// Anomaly map of one image file; writes <out_stem>.pgm (16-bit, scores
/// scaled to [0, 65535]) and <out_stem>.csv (row,col,score at %.17g).
InferResult run_infer(const std::string& checkpoint_path, const std::string& image_path,
                      const RunConfig& cfg, const std::string& out_stem);
ScoreMap read_map_csv(const std::string& path, int rows, int cols);

struct ComparisonRow {
  std::string label;  // seed value, "mean" or "std"
  double quantum_auroc;
  double classical_auroc;
  double quantum_aupro;
  double classical_aupro;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::size_t quantum_params = 0;
  std::size_t classical_params = 0;
};

Comparison make_comparison(const std::vector<SeedReport>& quantum,
                           const std::vector<SeedReport>& classical, std::size_t quantum_params,
                           std::size_t classical_params);
void write_comparison_csv(const std::string& path, const Comparison& cmp);

/// Trains and evaluates both models on the shared data, P, S and seeds under
/// out/quantum and out/classical, then writes out/compare.csv.
Comparison run_compare(const RunConfig& cfg, const DatasetSplit& data);

/// Writes the configured synthetic dataset in MVTec layout under
/// out/<category>.
void run_gen_synth(const RunConfig& cfg);

}  // namespace qpbae
