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

#include "qpbae/run.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "qpbae/errors.hpp"

#ifndef QPBAE_VERSION
#define QPBAE_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace qpbae {

std::string version() { return QPBAE_VERSION; }

std::string to_string(ModelKind m) { return m == ModelKind::Quantum ? "quantum" : "classical"; }

std::string to_string(DataSource s) {
  switch (s) {
    case DataSource::Synthetic:
      return "synthetic";
    case DataSource::Mvtec:
      return "mvtec";
    case DataSource::Busi:
      return "busi";
  }
  return "synthetic";
}

// --- config text -------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + expected);
}

long long parse_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) bad_value(key, v, "an integer");
  return x;
}

int parse_int32(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    bad_value(key, v, "a 32-bit integer");
  }
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v[0] == '-') bad_value(key, v, "a non-negative integer");
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) bad_value(key, v, "a non-negative integer");
  return x;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(x)) bad_value(key, v, "a finite number");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean (true | false)");
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(parse_u64(key, trim(item)));
  if (seeds.empty()) bad_value(key, v, "a comma-separated seed list");
  return seeds;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "quantum") {
           c.model = ModelKind::Quantum;
         } else if (v == "classical") {
           c.model = ModelKind::Classical;
         } else {
           bad_value(k, v, "quantum | classical");
         }
       }},
      {"patch_size", [](RunConfig& c, auto& k, auto& v) { c.patch_size = parse_int32(k, v); }},
      {"stride", [](RunConfig& c, auto& k, auto& v) { c.stride = parse_int32(k, v); }},
      {"bottleneck", [](RunConfig& c, auto& k, auto& v) { c.bottleneck = parse_int32(k, v); }},
      {"epochs", [](RunConfig& c, auto& k, auto& v) { c.epochs = parse_int32(k, v); }},
      {"learning_rate",
       [](RunConfig& c, auto& k, auto& v) { c.learning_rate = parse_double(k, v); }},
      {"batch_size", [](RunConfig& c, auto& k, auto& v) { c.batch_size = parse_int32(k, v); }},
      {"seeds", [](RunConfig& c, auto& k, auto& v) { c.seeds = parse_seeds(k, v); }},
      {"source",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "synthetic") {
           c.source = DataSource::Synthetic;
         } else if (v == "mvtec") {
           c.source = DataSource::Mvtec;
         } else if (v == "busi") {
           c.source = DataSource::Busi;
         } else {
           bad_value(k, v, "synthetic | mvtec | busi");
         }
       }},
      {"data_root", [](RunConfig& c, auto&, auto& v) { c.data_root = v; }},
      {"category", [](RunConfig& c, auto&, auto& v) { c.category = v; }},
      {"synth.n_train", [](RunConfig& c, auto& k, auto& v) { c.synth.n_train = parse_int32(k, v); }},
      {"synth.n_val", [](RunConfig& c, auto& k, auto& v) { c.synth.n_val = parse_int32(k, v); }},
      {"synth.n_test", [](RunConfig& c, auto& k, auto& v) { c.synth.n_test = parse_int32(k, v); }},
      {"synth.image_size",
       [](RunConfig& c, auto& k, auto& v) { c.synth.image_size = parse_int32(k, v); }},
      {"synth.texture",
       [](RunConfig& c, auto&, auto& v) { c.synth.texture = parse_texture(v); }},
      {"synth.defect", [](RunConfig& c, auto&, auto& v) { c.synth.defect = parse_defect(v); }},
      {"synth.defect_size",
       [](RunConfig& c, auto& k, auto& v) { c.synth.defect_size = parse_int32(k, v); }},
      {"synth.defect_intensity_delta",
       [](RunConfig& c, auto& k, auto& v) { c.synth.defect_intensity_delta = parse_double(k, v); }},
      {"synth.anomalous_fraction",
       [](RunConfig& c, auto& k, auto& v) { c.synth.anomalous_fraction = parse_double(k, v); }},
      {"synth.noise", [](RunConfig& c, auto& k, auto& v) { c.synth.noise = parse_double(k, v); }},
      {"synth.seed", [](RunConfig& c, auto& k, auto& v) { c.synth.seed = parse_u64(k, v); }},
      {"loader.image_size",
       [](RunConfig& c, auto& k, auto& v) { c.loader.image_size = parse_int32(k, v); }},
      {"loader.max_train",
       [](RunConfig& c, auto& k, auto& v) { c.loader.max_train = parse_u64(k, v); }},
      {"loader.max_val", [](RunConfig& c, auto& k, auto& v) { c.loader.max_val = parse_u64(k, v); }},
      {"loader.max_test",
       [](RunConfig& c, auto& k, auto& v) { c.loader.max_test = parse_u64(k, v); }},
      {"loader.seed", [](RunConfig& c, auto& k, auto& v) { c.loader.seed = parse_u64(k, v); }},
      {"loader.mask_rule",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "threshold") {
           c.loader.mask_rule = MaskResizeRule::Threshold;
         } else if (v == "any-overlap") {
           c.loader.mask_rule = MaskResizeRule::AnyOverlap;
         } else {
           bad_value(k, v, "threshold | any-overlap");
         }
       }},
      {"loader.merge_benign_malignant",
       [](RunConfig& c, auto& k, auto& v) { c.loader.merge_benign_malignant = parse_bool(k, v); }},
      {"out", [](RunConfig& c, auto&, auto& v) { c.out = v; }},
      {"shots", [](RunConfig& c, auto& k, auto& v) { c.shots = parse_int32(k, v); }},
      {"reset_trash_before_decode",
       [](RunConfig& c, auto& k, auto& v) { c.reset_trash_before_decode = parse_bool(k, v); }},
      {"zero_patch_scores_one",
       [](RunConfig& c, auto& k, auto& v) { c.zero_patch_scores_one = parse_bool(k, v); }},
      {"fpr_limit", [](RunConfig& c, auto& k, auto& v) { c.fpr_limit = parse_double(k, v); }},
  };
  return table;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.rfind("info.", 0) == 0) continue;
    set_config_value(cfg, key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  std::string seeds;
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    seeds += (i ? "," : "") + std::to_string(c.seeds[i]);
  }
  const auto b = [](bool v) { return v ? "true" : "false"; };
  os << "model = " << to_string(c.model) << '\n'
     << "patch_size = " << c.patch_size << '\n'
     << "stride = " << c.stride << '\n'
     << "bottleneck = " << c.bottleneck << '\n'
     << "epochs = " << c.epochs << '\n'
     << "learning_rate = " << fmt_double(c.learning_rate) << '\n'
     << "batch_size = " << c.batch_size << '\n'
     << "seeds = " << seeds << '\n'
     << "source = " << to_string(c.source) << '\n'
     << "data_root = " << c.data_root << '\n'
     << "category = " << c.category << '\n'
     << "synth.n_train = " << c.synth.n_train << '\n'
     << "synth.n_val = " << c.synth.n_val << '\n'
     << "synth.n_test = " << c.synth.n_test << '\n'
     << "synth.image_size = " << c.synth.image_size << '\n'
     << "synth.texture = " << to_string(c.synth.texture) << '\n'
     << "synth.defect = " << to_string(c.synth.defect) << '\n'
     << "synth.defect_size = " << c.synth.defect_size << '\n'
     << "synth.defect_intensity_delta = " << fmt_double(c.synth.defect_intensity_delta) << '\n'
     << "synth.anomalous_fraction = " << fmt_double(c.synth.anomalous_fraction) << '\n'
     << "synth.noise = " << fmt_double(c.synth.noise) << '\n'
     << "synth.seed = " << c.synth.seed << '\n'
     << "loader.image_size = " << c.loader.image_size << '\n'
     << "loader.max_train = " << c.loader.max_train << '\n'
     << "loader.max_val = " << c.loader.max_val << '\n'
     << "loader.max_test = " << c.loader.max_test << '\n'
     << "loader.seed = " << c.loader.seed << '\n'
     << "loader.mask_rule = "
     << (c.loader.mask_rule == MaskResizeRule::Threshold ? "threshold" : "any-overlap") << '\n'
     << "loader.merge_benign_malignant = " << b(c.loader.merge_benign_malignant) << '\n'
     << "out = " << c.out << '\n'
     << "shots = " << c.shots << '\n'
     << "reset_trash_before_decode = " << b(c.reset_trash_before_decode) << '\n'
     << "zero_patch_scores_one = " << b(c.zero_patch_scores_one) << '\n'
     << "fpr_limit = " << fmt_double(c.fpr_limit) << '\n';
  return os.str();
}

void validate_config(const RunConfig& c) {
  const auto in = [](int v, std::initializer_list<int> set) {
    return std::find(set.begin(), set.end(), v) != set.end();
  };
  const std::string where = "(P=" + std::to_string(c.patch_size) +
                            ", S=" + std::to_string(c.stride) +
                            ", BD=" + std::to_string(c.bottleneck) + ")";
  if (!in(c.patch_size, {2, 4, 8})) {
    throw ConfigError(where + ": patch size P must be one of {2, 4, 8}");
  }
  if (!in(c.stride, {1, 2, 4, 8})) {
    throw ConfigError(where + ": stride S must be one of {1, 2, 4, 8}");
  }
  if (c.stride > c.patch_size) throw ConfigError(where + ": stride S must not exceed P");
  if (!in(c.bottleneck, {1, 2})) {
    throw ConfigError(where + ": bottleneck BD must be one of {1, 2}");
  }
  if (c.patch_size == 2 && c.bottleneck != 1) {
    throw ConfigError(where + ": BD is fixed to 1 when P = 2");
  }
  if (c.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (c.seeds.empty()) throw ConfigError("seeds must list at least one seed");
  if (c.shots < 0) throw ConfigError("shots must be >= 0 (0 = exact)");
  if (!(c.fpr_limit > 0.0 && c.fpr_limit <= 1.0)) {
    throw ConfigError("fpr_limit must lie in (0, 1]");
  }
  if (c.out.empty()) throw ConfigError("out must name an output directory");
  if (c.source != DataSource::Synthetic && c.data_root.empty()) {
    throw ConfigError("data_root is required for source = " + to_string(c.source));
  }
  const int size = c.source == DataSource::Synthetic ? c.synth.image_size : c.loader.image_size;
  if (c.patch_size > size) {
    throw ConfigError(where + ": patch size exceeds the " + std::to_string(size) + "px images");
  }
}

AutoencoderConfig autoencoder_config(const RunConfig& cfg) {
  AutoencoderConfig a = AutoencoderConfig::make(cfg.patch_size, cfg.bottleneck);
  a.reset_trash_before_decode = cfg.reset_trash_before_decode;
  a.zero_patch_scores_one = cfg.zero_patch_scores_one;
  return a;
}

TrainConfig train_config(const RunConfig& cfg, std::uint64_t seed) {
  TrainConfig t;
  t.epochs = cfg.epochs;
  t.learning_rate = cfg.learning_rate;
  t.batch_size = cfg.batch_size;
  t.seed = seed;
  return t;
}

int classical_hidden_dim(const RunConfig& cfg) { return 1 << cfg.bottleneck; }

std::size_t model_parameter_count(const RunConfig& cfg) {
  if (cfg.model == ModelKind::Quantum) {
    return static_cast<std::size_t>(
        mps_parameter_count(AutoencoderConfig::make(cfg.patch_size, cfg.bottleneck).n_data_qubits()));
  }
  return DenseAutoencoder::parameter_count(cfg.patch_size * cfg.patch_size,
                                           classical_hidden_dim(cfg));
}

DatasetSplit load_dataset(const RunConfig& cfg) {
  switch (cfg.source) {
    case DataSource::Synthetic:
      return generate_synthetic(cfg.synth);
    case DataSource::Mvtec:
      return load_mvtec_layout(cfg.data_root, cfg.category, cfg.loader);
    case DataSource::Busi:
      return load_busi_layout(cfg.data_root, cfg.loader);
  }
  throw ConfigError("unknown data source");
}

// --- output directory -----------------------------------------------------------

OutputLock::OutputLock(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  path_ = (fs::path(dir) / ".qpbae.lock").string();
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    const int err = errno;
    path_.clear();
    if (err == EEXIST) {
      throw IoError("output directory " + dir +
                    " is locked by another qpbae process (remove .qpbae.lock if stale)");
    }
    throw IoError("cannot lock output directory " + dir + ": " + std::strerror(err));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputLock::~OutputLock() {
  if (!path_.empty()) ::unlink(path_.c_str());
}

std::string seed_dir(const RunConfig& cfg, std::uint64_t seed) {
  return (fs::path(cfg.out) / ("seed_" + std::to_string(seed))).string();
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << text;
  if (!os) throw IoError("failed writing " + path);
}

void make_dirs(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

std::string manifest_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# qpbae run manifest\n" << serialize_config(cfg);
  os << "info.version = " << version() << '\n';
  os << "info.n_params = " << model_parameter_count(cfg) << '\n';
  const double ratio = std::pow(2.0, cfg.bottleneck) / (cfg.patch_size * cfg.patch_size);
  os << "info.compression_percent = " << fmt_double(100.0 * (1.0 - ratio)) << '\n';
  return os.str();
}

}  // namespace

// --- models ------------------------------------------------------------------

Model Model::from_checkpoint(Checkpoint ckpt) {
  if (ckpt.model == "classical") {
    if (ckpt.layout.size() != 2) throw DataError("classical checkpoint needs layout {in, hidden}");
    const auto n = DenseAutoencoder::parameter_count(ckpt.layout[0], ckpt.layout[1]);
    if (ckpt.best_params.size() != n || ckpt.params.size() != n) {
      throw DataError("classical checkpoint parameter count does not match its layout");
    }
    if (ckpt.layout[0] != ckpt.patch_size * ckpt.patch_size) {
      throw DataError("classical checkpoint input width does not match its patch size");
    }
  } else {
    const AutoencoderConfig a = AutoencoderConfig::make(ckpt.patch_size, ckpt.bottleneck);
    const auto n = static_cast<std::size_t>(mps_parameter_count(a.n_data_qubits()));
    if (ckpt.best_params.size() != n || ckpt.params.size() != n) {
      throw DataError("quantum checkpoint needs " + std::to_string(n) + " angles");
    }
  }
  return Model{std::move(ckpt)};
}

std::size_t Model::parameter_count() const { return checkpoint.best_params.size(); }

ScoreMap Model::anomaly_map(const Image& img, const RunConfig& cfg, std::uint64_t shot_seed) const {
  const Checkpoint& c = checkpoint;
  if (img.rows() < c.patch_size || img.cols() < c.patch_size) {
    throw ConfigError("image of " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                      " is smaller than the checkpoint's patch size " +
                      std::to_string(c.patch_size));
  }
  if (c.model == "classical") {
    const DenseAutoencoder model(c.layout[0], c.layout[1], c.best_params);
    return baseline_infer_map(img, model, c.patch_size, c.stride);
  }
  AutoencoderConfig a = AutoencoderConfig::make(c.patch_size, c.bottleneck);
  a.reset_trash_before_decode = c.reset_trash_before_decode;
  a.zero_patch_scores_one = cfg.zero_patch_scores_one;
  const MpsParams params(a.n_data_qubits(), c.best_params);
  return infer_map(img, params, a, c.patch_size, c.stride, InferOptions{cfg.shots, shot_seed});
}

Checkpoint make_checkpoint(const RunConfig& cfg, std::uint64_t seed, const TrainState& state) {
  Checkpoint c;
  c.model = to_string(cfg.model);
  c.patch_size = cfg.patch_size;
  c.stride = cfg.stride;
  c.bottleneck = cfg.bottleneck;
  c.reset_trash_before_decode = cfg.reset_trash_before_decode;
  c.seed = seed;
  c.epoch = state.epochs_done;
  c.best_epoch = state.best_epoch;
  if (cfg.model == ModelKind::Quantum) {
    for (const MpsBlock& b : mps_block_layout(autoencoder_config(cfg).n_data_qubits())) {
      c.layout.insert(c.layout.end(), {b.first, b.second, b.theta_first, b.theta_second});
    }
  } else {
    c.layout = {cfg.patch_size * cfg.patch_size, classical_hidden_dim(cfg)};
  }
  c.params = state.params;
  c.best_params = state.best_params;
  c.adam = state.adam;
  return c;
}

// --- train ---------------------------------------------------------------------

std::vector<TrainResult> run_train(const RunConfig& cfg, const DatasetSplit& data) {
  validate_config(cfg);
  if (data.train.empty()) throw DataError("training split is empty");
  OutputLock lock(cfg.out);
  write_text((fs::path(cfg.out) / "manifest.txt").string(), manifest_text(cfg));

  std::vector<TrainResult> results;
  for (std::uint64_t seed : cfg.seeds) {
    const TrainConfig tcfg = train_config(cfg, seed);
    TrainState state =
        cfg.model == ModelKind::Quantum
            ? fit(data.train, data.val, tcfg, autoencoder_config(cfg), cfg.patch_size, cfg.stride)
            : train_baseline(data.train, data.val, tcfg, cfg.patch_size, cfg.stride,
                             classical_hidden_dim(cfg));
    Checkpoint ckpt = make_checkpoint(cfg, seed, state);
    const std::string dir = seed_dir(cfg, seed);
    make_dirs(dir);
    write_checkpoint((fs::path(dir) / "checkpoint.txt").string(), ckpt);
    write_loss_csv((fs::path(dir) / "loss.csv").string(), state.history);
    results.push_back({seed, std::move(state), std::move(ckpt)});
  }
  return results;
}

// --- evaluate ------------------------------------------------------------------

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return r;
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

std::vector<ScoreMap> predict_maps(const Model& model, const RunConfig& cfg,
                                   const std::vector<Image>& images, std::uint64_t seed) {
  std::vector<ScoreMap> maps;
  maps.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    // Distinct, reproducible shot streams per image.
    maps.push_back(model.anomaly_map(images[i], cfg, seed * 1000003ULL + i));
  }
  return maps;
}

SeedReport evaluate_model(const Model& model, const RunConfig& cfg, const DatasetSplit& data,
                          std::uint64_t seed) {
  if (data.test.empty()) throw DataError("test split is empty; nothing to evaluate");
  const auto maps = predict_maps(model, cfg, data.test_images(), seed);
  const auto gts = data.test_masks();
  EvalOptions opts;
  opts.fpr_limit = cfg.fpr_limit;
  SeedReport r{seed, evaluate(maps, gts, opts)};
  double in_sum = 0.0;
  double out_sum = 0.0;
  std::size_t in_n = 0;
  std::size_t out_n = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (std::size_t k = 0; k < gts[i].size(); ++k) {
      if (maps[i].counts[k] == 0) continue;
      if (gts[i][k]) {
        in_sum += maps[i].values[k];
        ++in_n;
      } else {
        out_sum += maps[i].values[k];
        ++out_n;
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.mean_inside = in_n ? in_sum / static_cast<double>(in_n) : nan;
  r.mean_outside = out_n ? out_sum / static_cast<double>(out_n) : nan;
  return r;
}

void write_maps_csv(const std::string& path, const std::vector<ScoreMap>& maps) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "image,row,col,count,score\n";
  char buf[64];
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const ScoreMap& m = maps[i];
    for (int r = 0; r < m.values.rows(); ++r) {
      for (int c = 0; c < m.values.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", m.values(r, c));
        os << i << ',' << r << ',' << c << ',' << m.counts(r, c) << ',' << buf << '\n';
      }
    }
  }
  if (!os) throw IoError("failed writing " + path);
}

void write_summary_csv(const std::string& path, const std::vector<SeedReport>& reports) {
  std::ostringstream os;
  os << "seed,auroc,aupro,mean_inside,mean_outside\n";
  std::vector<double> au;
  std::vector<double> ap;
  std::vector<double> mi;
  std::vector<double> mo;
  for (const auto& r : reports) {
    os << r.seed << ',' << fmt_double(r.report.auroc) << ',' << fmt_double(r.report.aupro) << ','
       << fmt_double(r.mean_inside) << ',' << fmt_double(r.mean_outside) << '\n';
    au.push_back(r.report.auroc);
    ap.push_back(r.report.aupro);
    mi.push_back(r.mean_inside);
    mo.push_back(r.mean_outside);
  }
  const MeanStd s[4] = {mean_std(au), mean_std(ap), mean_std(mi), mean_std(mo)};
  os << "mean";
  for (const auto& x : s) os << ',' << fmt_double(x.mean);
  os << "\nstd";
  for (const auto& x : s) os << ',' << fmt_double(x.std);
  os << '\n';
  write_text(path, os.str());
}

namespace {

void check_compatible(const Checkpoint& c, const RunConfig& cfg, const std::string& path) {
  const auto mismatch = [&](const std::string& what, long long have, long long want) {
    throw ConfigError(path + ": checkpoint " + what + " " + std::to_string(have) +
                      " does not match the configured " + std::to_string(want));
  };
  if (c.model != to_string(cfg.model)) {
    throw ConfigError(path + ": checkpoint holds a " + c.model + " model, config asks for " +
                      to_string(cfg.model));
  }
  if (c.patch_size != cfg.patch_size) mismatch("patch size", c.patch_size, cfg.patch_size);
  if (c.stride != cfg.stride) mismatch("stride", c.stride, cfg.stride);
  if (c.bottleneck != cfg.bottleneck) mismatch("bottleneck", c.bottleneck, cfg.bottleneck);
}

std::string summary_text(const std::vector<SeedReport>& reports, const RunConfig& cfg) {
  std::vector<double> au;
  std::vector<double> ap;
  for (const auto& r : reports) {
    au.push_back(r.report.auroc);
    ap.push_back(r.report.aupro);
  }
  const MeanStd a = mean_std(au);
  const MeanStd p = mean_std(ap);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s P=%d S=%d BD=%d seeds=%zu\nAUROC %.4f +- %.4f\nAUPRO %.4f +- %.4f\n",
                to_string(cfg.model).c_str(), cfg.patch_size, cfg.stride, cfg.bottleneck,
                reports.size(), a.mean, a.std, p.mean, p.std);
  return buf;
}

}  // namespace

std::vector<SeedReport> run_evaluate(const RunConfig& cfg, const DatasetSplit& data) {
  validate_config(cfg);
  if (data.test.empty()) throw DataError("test split is empty; nothing to evaluate");
  OutputLock lock(cfg.out);
  std::vector<SeedReport> reports;
  for (std::uint64_t seed : cfg.seeds) {
    const std::string dir = seed_dir(cfg, seed);
    const std::string path = (fs::path(dir) / "checkpoint.txt").string();
    Checkpoint ckpt = read_checkpoint(path);
    check_compatible(ckpt, cfg, path);
    const Model model = Model::from_checkpoint(std::move(ckpt));
    const auto maps = predict_maps(model, cfg, data.test_images(), seed);
    write_maps_csv((fs::path(dir) / "maps.csv").string(), maps);
    SeedReport r = evaluate_model(model, cfg, data, seed);
    write_report_csv((fs::path(dir) / "report.csv").string(), r.report);
    reports.push_back(std::move(r));
  }
  write_summary_csv((fs::path(cfg.out) / "summary.csv").string(), reports);
  write_text((fs::path(cfg.out) / "summary.txt").string(), summary_text(reports, cfg));
  return reports;
}

// --- infer ---------------------------------------------------------------------

InferResult run_infer(const std::string& checkpoint_path, const std::string& image_path,
                      const RunConfig& cfg, const std::string& out_stem) {
  const Model model = Model::from_checkpoint(read_checkpoint(checkpoint_path));
  const Image img = read_pnm(image_path);
  InferResult r;
  r.map = model.anomaly_map(img, cfg, model.checkpoint.seed);
  r.pgm_path = out_stem + ".pgm";
  r.csv_path = out_stem + ".csv";
  const fs::path parent = fs::path(out_stem).parent_path();
  if (!parent.empty()) make_dirs(parent.string());
  write_pgm16(r.pgm_path, r.map.values);

  std::ostringstream os;
  os << "row,col,count,score\n";
  char buf[64];
  for (int row = 0; row < r.map.values.rows(); ++row) {
    for (int col = 0; col < r.map.values.cols(); ++col) {
      std::snprintf(buf, sizeof buf, "%.17g", r.map.values(row, col));
      os << row << ',' << col << ',' << r.map.counts(row, col) << ',' << buf << '\n';
    }
  }
  write_text(r.csv_path, os.str());
  return r;
}

ScoreMap read_map_csv(const std::string& path, int rows, int cols) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (trim(line) != "row,col,count,score") throw DataError(path + ": unexpected header");
  ScoreMap m{Image(rows, cols, 0.0), Grid<int>(rows, cols, 0)};
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    int r = 0;
    int c = 0;
    int n = 0;
    char rest[64] = {0};
    if (std::sscanf(line.c_str(), "%d,%d,%d,%63s", &r, &c, &n, rest) != 4 || r < 0 || c < 0 ||
        r >= rows || c >= cols) {
      throw DataError(path + ": malformed row '" + line + "'");
    }
    m.values(r, c) = std::strtod(rest, nullptr);
    m.counts(r, c) = n;
  }
  return m;
}

// --- compare -------------------------------------------------------------------

Comparison make_comparison(const std::vector<SeedReport>& quantum,
                           const std::vector<SeedReport>& classical, std::size_t quantum_params,
                           std::size_t classical_params) {
  if (quantum.size() != classical.size()) {
    throw ConfigError("comparison needs the same seed list for both models");
  }
  Comparison cmp;
  cmp.quantum_params = quantum_params;
  cmp.classical_params = classical_params;
  std::vector<double> cols[4];
  for (std::size_t i = 0; i < quantum.size(); ++i) {
    if (quantum[i].seed != classical[i].seed) {
      throw ConfigError("comparison seeds differ at position " + std::to_string(i));
    }
    const ComparisonRow row{std::to_string(quantum[i].seed), quantum[i].report.auroc,
                            classical[i].report.auroc, quantum[i].report.aupro,
                            classical[i].report.aupro};
    cols[0].push_back(row.quantum_auroc);
    cols[1].push_back(row.classical_auroc);
    cols[2].push_back(row.quantum_aupro);
    cols[3].push_back(row.classical_aupro);
    cmp.rows.push_back(row);
  }
  MeanStd s[4];
  for (int k = 0; k < 4; ++k) s[k] = mean_std(cols[k]);
  cmp.rows.push_back({"mean", s[0].mean, s[1].mean, s[2].mean, s[3].mean});
  cmp.rows.push_back({"std", s[0].std, s[1].std, s[2].std, s[3].std});
  return cmp;
}

void write_comparison_csv(const std::string& path, const Comparison& cmp) {
  std::ostringstream os;
  os << "seed,quantum_auroc,classical_auroc,diff_auroc,quantum_aupro,classical_aupro,diff_aupro,"
        "quantum_params,classical_params\n";
  for (const auto& r : cmp.rows) {
    os << r.label << ',' << fmt_double(r.quantum_auroc) << ',' << fmt_double(r.classical_auroc)
       << ',' << fmt_double(r.quantum_auroc - r.classical_auroc) << ','
       << fmt_double(r.quantum_aupro) << ',' << fmt_double(r.classical_aupro) << ','
       << fmt_double(r.quantum_aupro - r.classical_aupro) << ',' << cmp.quantum_params << ','
       << cmp.classical_params << '\n';
  }
  write_text(path, os.str());
}

Comparison run_compare(const RunConfig& cfg, const DatasetSplit& data) {
  validate_config(cfg);
  if (data.test.empty()) throw DataError("test split is empty; nothing to compare");
  std::vector<SeedReport> reports[2];
  std::size_t params[2] = {0, 0};
  const ModelKind kinds[2] = {ModelKind::Quantum, ModelKind::Classical};
  for (int k = 0; k < 2; ++k) {
    RunConfig sub = cfg;
    sub.model = kinds[k];
    sub.out = (fs::path(cfg.out) / to_string(kinds[k])).string();
    run_train(sub, data);
    reports[k] = run_evaluate(sub, data);
    params[k] = model_parameter_count(sub);
  }
  OutputLock lock(cfg.out);
  Comparison cmp = make_comparison(reports[0], reports[1], params[0], params[1]);
  write_comparison_csv((fs::path(cfg.out) / "compare.csv").string(), cmp);
  return cmp;
}

// --- synthetic data --------------------------------------------------------------

void run_gen_synth(const RunConfig& cfg) {
  OutputLock lock(cfg.out);
  const DatasetSplit split = generate_synthetic(cfg.synth);
  write_mvtec_layout(split, cfg.out, cfg.category, cfg.synth.seed);
}

}  // namespace qpbae
