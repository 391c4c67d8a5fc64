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

#include "qpbae/train.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qpbae/errors.hpp"

namespace qpbae {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const TrainConfig& cfg) {
  if (grad.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw DimensionError("Adam: parameter, gradient and moment lengths differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.m[k] = cfg.adam_beta1 * state.m[k] + (1.0 - cfg.adam_beta1) * grad[k];
    state.v[k] = cfg.adam_beta2 * state.v[k] + (1.0 - cfg.adam_beta2) * grad[k] * grad[k];
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  }
}

void seeded_shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

double mean_cost(std::span<const Image> images, std::span<const double> params,
                 const ImageCostFn& cost) {
  if (images.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& img : images) sum += cost(img, params);
  return sum / static_cast<double>(images.size());
}

TrainState fit_params(std::vector<double> init, std::span<const Image> train,
                      std::span<const Image> val, const TrainConfig& tcfg,
                      const ImageCostFn& cost, const ImageCostGradFn& cost_grad,
                      std::mt19937_64& rng) {
  if (train.empty()) throw ArgumentError("training set is empty");
  if (tcfg.batch_size < 1) throw ArgumentError("batch size must be >= 1");
  if (tcfg.epochs < 0) throw ArgumentError("epoch count must be >= 0");

  TrainState state;
  state.params = std::move(init);
  state.adam = AdamState(state.params.size());

  const double init_val = mean_cost(val, state.params, cost);
  state.history.push_back({0, mean_cost(train, state.params, cost), init_val});
  state.best_params = state.params;
  state.best_val_loss = init_val;

  const std::size_t n_params = state.params.size();
  std::vector<double> image_grad(n_params);
  std::vector<double> batch_grad(n_params);
  std::vector<std::size_t> order(train.size());

  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    seeded_shuffle(order, rng);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(tcfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(tcfg.batch_size));
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t b = start; b < stop; ++b) {
        std::fill(image_grad.begin(), image_grad.end(), 0.0);
        epoch_loss += cost_grad(train[order[b]], state.params, image_grad);
        for (std::size_t k = 0; k < n_params; ++k) batch_grad[k] += image_grad[k];
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (auto& g : batch_grad) g *= inv;
      adam_step(state.params, batch_grad, state.adam, tcfg);
    }

    const double val_loss = mean_cost(val, state.params, cost);
    state.history.push_back({epoch, epoch_loss / static_cast<double>(train.size()), val_loss});
    state.epochs_done = epoch;
    if (!val.empty() && (std::isnan(state.best_val_loss) || val_loss < state.best_val_loss)) {
      state.best_val_loss = val_loss;
      state.best_params = state.params;
      state.best_epoch = epoch;
    }
  }
  if (val.empty()) {
    state.best_params = state.params;
    state.best_epoch = state.epochs_done;
  }
  return state;
}

// --- quantum model -------------------------------------------------------

double patch_training_score(std::span<const double> patch, std::span<const double> angles,
                            const AutoencoderConfig& acfg) {
  if (acfg.zero_patch_scores_one && is_zero_patch(patch)) return 1.0;
  return std::clamp(training_fidelity(embed_patch(patch), angles, acfg), 0.0, 1.0);
}

double image_cost(const Image& img, std::span<const double> angles,
                  const AutoencoderConfig& acfg, int patch_size, int stride) {
  const PatchGrid grid = extract_patches(img, patch_size, stride);
  std::vector<double> scores;
  scores.reserve(grid.size());
  for (const auto& patch : grid.patches) {
    scores.push_back(patch_training_score(patch, angles, acfg));
  }
  return 1.0 - covered_mean(assemble_map(scores, grid));
}

double image_cost(const Image& img, const MpsParams& params, const AutoencoderConfig& acfg,
                  int patch_size, int stride) {
  return image_cost(img, params.angles(), acfg, patch_size, stride);
}

double image_cost_and_gradient(const Image& img, std::span<const double> angles,
                               const AutoencoderConfig& acfg, int patch_size, int stride,
                               std::span<double> grad) {
  constexpr double kShift = std::numbers::pi / 2.0;
  if (grad.size() != angles.size()) throw DimensionError("gradient buffer length mismatch");
  const PatchGrid grid = extract_patches(img, patch_size, stride);
  const std::vector<double> weights =
      coverage_weights(grid.anchors, grid.image_size, grid.patch_size);

  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> scores;
  scores.reserve(grid.size());
  std::vector<double> shifted(angles.begin(), angles.end());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (acfg.zero_patch_scores_one && is_zero_patch(grid.patches[p])) {
      scores.push_back(1.0);
      continue;
    }
    const StateVector phi = embed_patch(grid.patches[p]);
    const double raw = training_fidelity(phi, angles, acfg);
    scores.push_back(std::clamp(raw, 0.0, 1.0));
    // The clamp has zero slope outside [0, 1].
    if (raw < 0.0 || raw > 1.0) continue;
    for (std::size_t k = 0; k < angles.size(); ++k) {
      shifted[k] = angles[k] + kShift;
      const double plus = training_fidelity(phi, shifted, acfg);
      shifted[k] = angles[k] - kShift;
      const double minus = training_fidelity(phi, shifted, acfg);
      shifted[k] = angles[k];
      grad[k] -= weights[p] * 0.5 * (plus - minus);
    }
  }
  return 1.0 - covered_mean(assemble_map(scores, grid));
}

std::vector<double> gradient(const Image& img, const MpsParams& params,
                             const AutoencoderConfig& acfg, int patch_size, int stride) {
  std::vector<double> grad(params.size());
  image_cost_and_gradient(img, params.angles(), acfg, patch_size, stride, grad);
  return grad;
}

TrainState fit(std::span<const Image> train, std::span<const Image> val,
               const TrainConfig& tcfg, const AutoencoderConfig& acfg, int patch_size,
               int stride) {
  if (train.empty()) throw ArgumentError("training set is empty");
  if (acfg.patch_size != patch_size) {
    throw ArgumentError("autoencoder configured for P=" + std::to_string(acfg.patch_size) +
                        " but training at P=" + std::to_string(patch_size));
  }
  std::mt19937_64 rng(tcfg.seed);
  MpsParams init = MpsParams::random(acfg.n_data_qubits(), rng);
  std::vector<double> angles(init.angles().begin(), init.angles().end());

  const ImageCostFn cost = [&](const Image& img, std::span<const double> theta) {
    return image_cost(img, theta, acfg, patch_size, stride);
  };
  const ImageCostGradFn cost_grad = [&](const Image& img, std::span<const double> theta,
                                        std::span<double> grad) {
    return image_cost_and_gradient(img, theta, acfg, patch_size, stride, grad);
  };
  return fit_params(std::move(angles), train, val, tcfg, cost, cost_grad, rng);
}

PatchScorer quantum_scorer(const MpsParams& params, const AutoencoderConfig& acfg) {
  return [params, acfg](std::span<const double> patch) {
    if (acfg.zero_patch_scores_one && is_zero_patch(patch)) return 1.0;
    return test_similarity(embed_patch(patch), params, acfg);
  };
}

ScoreMap infer_map(const Image& img, const MpsParams& params, const AutoencoderConfig& acfg,
                   int patch_size, int stride, const InferOptions& opts) {
  if (opts.shots > 0) {
    std::mt19937_64 rng(opts.shot_seed);
    const PatchScorer sampled = [&](std::span<const double> patch) {
      if (acfg.zero_patch_scores_one && is_zero_patch(patch)) return 1.0;
      return test_similarity_sampled(embed_patch(patch), params, acfg, opts.shots, rng);
    };
    return to_anomaly(score_image(img, patch_size, stride, sampled));
  }
  return to_anomaly(score_image(img, patch_size, stride, quantum_scorer(params, acfg)));
}

// --- checkpoints ---------------------------------------------------------

namespace {

constexpr const char* kCheckpointMagic = "qpbae-checkpoint";
constexpr int kCheckpointVersion = 1;

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void write_reals(std::ostream& os, const char* key, std::span<const double> values) {
  os << key << ' ' << values.size();
  for (double v : values) os << ' ' << hex_double(v);
  os << '\n';
}

double parse_hex_double(const std::string& token, const std::string& path) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE) {
    throw DataError(path + ": malformed real value '" + token + "'");
  }
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  os << "model " << ckpt.model << '\n';
  os << "patch_size " << ckpt.patch_size << '\n';
  os << "stride " << ckpt.stride << '\n';
  os << "bottleneck " << ckpt.bottleneck << '\n';
  os << "reset_trash_before_decode " << (ckpt.reset_trash_before_decode ? 1 : 0) << '\n';
  os << "seed " << ckpt.seed << '\n';
  os << "epoch " << ckpt.epoch << '\n';
  os << "best_epoch " << ckpt.best_epoch << '\n';
  os << "adam_step " << ckpt.adam.step << '\n';
  os << "layout " << ckpt.layout.size();
  for (int v : ckpt.layout) os << ' ' << v;
  os << '\n';
  write_reals(os, "params", ckpt.params);
  write_reals(os, "best_params", ckpt.best_params);
  write_reals(os, "adam_m", ckpt.adam.m);
  write_reals(os, "adam_v", ckpt.adam.v);
  if (!os) throw IoError("failed writing " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path);
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != kCheckpointMagic) throw DataError(path + ": not a qpbae checkpoint");
  if (version != kCheckpointVersion) {
    throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));
  }

  Checkpoint ckpt;
  const auto read_reals = [&](std::vector<double>& out) {
    std::size_t n = 0;
    if (!(is >> n)) throw DataError(path + ": truncated real array");
    out.resize(n);
    for (auto& v : out) {
      std::string tok;
      if (!(is >> tok)) throw DataError(path + ": truncated real array");
      v = parse_hex_double(tok, path);
    }
  };

  std::string key;
  while (is >> key) {
    if (key == "model") {
      is >> ckpt.model;
    } else if (key == "patch_size") {
      is >> ckpt.patch_size;
    } else if (key == "stride") {
      is >> ckpt.stride;
    } else if (key == "bottleneck") {
      is >> ckpt.bottleneck;
    } else if (key == "reset_trash_before_decode") {
      int flag = 0;
      is >> flag;
      ckpt.reset_trash_before_decode = flag != 0;
    } else if (key == "seed") {
      is >> ckpt.seed;
    } else if (key == "epoch") {
      is >> ckpt.epoch;
    } else if (key == "best_epoch") {
      is >> ckpt.best_epoch;
    } else if (key == "adam_step") {
      is >> ckpt.adam.step;
    } else if (key == "layout") {
      std::size_t n = 0;
      is >> n;
      ckpt.layout.resize(n);
      for (auto& v : ckpt.layout) is >> v;
    } else if (key == "params") {
      read_reals(ckpt.params);
    } else if (key == "best_params") {
      read_reals(ckpt.best_params);
    } else if (key == "adam_m") {
      read_reals(ckpt.adam.m);
    } else if (key == "adam_v") {
      read_reals(ckpt.adam.v);
    } else {
      throw DataError(path + ": unknown checkpoint key '" + key + "'");
    }
    if (!is) throw DataError(path + ": malformed value for '" + key + "'");
  }
  if (ckpt.model != "quantum" && ckpt.model != "classical") {
    throw DataError(path + ": unknown model kind '" + ckpt.model + "'");
  }
  return ckpt;
}

void write_loss_csv(const std::string& path, std::span<const LossRecord> history) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "epoch,train_loss,val_loss\n";
  char buf[128];
  for (const auto& rec : history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", rec.epoch, rec.train_loss, rec.val_loss);
    os << buf;
  }
  if (!os) throw IoError("failed writing " + path);
}

}  // namespace qpbae
