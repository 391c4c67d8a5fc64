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

#include "qpbae/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpbae/errors.hpp"

namespace qpbae {

namespace {

// Offsets into the flat parameter vector.
struct Layout {
  std::size_t in;
  std::size_t hid;
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hid * in; }
  std::size_t w2() const { return hid * in + hid; }
  std::size_t b2() const { return 2 * hid * in + hid; }
};

struct Activations {
  std::vector<double> hidden_pre;
  std::vector<double> hidden;
  std::vector<double> out_pre;
  std::vector<double> out;
};

Activations run_forward(std::span<const double> p, const Layout& l, std::span<const double> x) {
  Activations a;
  a.hidden_pre.resize(l.hid);
  a.hidden.resize(l.hid);
  a.out_pre.resize(l.in);
  a.out.resize(l.in);
  for (std::size_t h = 0; h < l.hid; ++h) {
    double acc = p[l.b1() + h];
    for (std::size_t i = 0; i < l.in; ++i) acc += p[l.w1() + h * l.in + i] * x[i];
    a.hidden_pre[h] = acc;
    a.hidden[h] = std::max(acc, 0.0);
  }
  for (std::size_t o = 0; o < l.in; ++o) {
    double acc = p[l.b2() + o];
    for (std::size_t h = 0; h < l.hid; ++h) acc += p[l.w2() + o * l.hid + h] * a.hidden[h];
    a.out_pre[o] = acc;
    a.out[o] = std::max(acc, 0.0);
  }
  return a;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

DenseAutoencoder::DenseAutoencoder(int input_dim, int hidden_dim)
    : DenseAutoencoder(input_dim, hidden_dim,
                       std::vector<double>(parameter_count(input_dim, hidden_dim), 0.0)) {}

DenseAutoencoder::DenseAutoencoder(int input_dim, int hidden_dim, std::vector<double> params)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), params_(std::move(params)) {
  if (params_.size() != parameter_count(input_dim, hidden_dim)) {
    throw DimensionError("dense autoencoder " + std::to_string(input_dim) + "-" +
                         std::to_string(hidden_dim) + "-" + std::to_string(input_dim) +
                         " needs " + std::to_string(parameter_count(input_dim, hidden_dim)) +
                         " parameters, got " + std::to_string(params_.size()));
  }
}

std::size_t DenseAutoencoder::parameter_count(int input_dim, int hidden_dim) {
  if (input_dim < 1 || hidden_dim < 1) throw ArgumentError("layer widths must be positive");
  const auto in = static_cast<std::size_t>(input_dim);
  const auto hid = static_cast<std::size_t>(hidden_dim);
  return (in * hid + hid) + (hid * in + in);
}

DenseAutoencoder DenseAutoencoder::random(int input_dim, int hidden_dim, std::mt19937_64& rng) {
  DenseAutoencoder model(input_dim, hidden_dim);
  const Layout l{static_cast<std::size_t>(input_dim), static_cast<std::size_t>(hidden_dim)};
  const auto uniform = [&rng](double bound) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * bound;
  };
  const double bound1 = std::sqrt(1.0 / input_dim);
  const double bound2 = std::sqrt(1.0 / hidden_dim);
  auto p = model.params();
  for (std::size_t k = l.w1(); k < l.w2(); ++k) p[k] = uniform(bound1);
  for (std::size_t k = l.w2(); k < p.size(); ++k) p[k] = uniform(bound2);
  return model;
}

std::vector<double> DenseAutoencoder::forward(std::span<const double> patch) const {
  if (patch.size() != static_cast<std::size_t>(input_dim_)) {
    throw DimensionError("expected a patch of " + std::to_string(input_dim_) + " values, got " +
                         std::to_string(patch.size()));
  }
  const Layout l{static_cast<std::size_t>(input_dim_), static_cast<std::size_t>(hidden_dim_)};
  return run_forward(params_, l, patch).out;
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("cosine similarity of mismatched vectors");
  const double nx = norm2(x);
  const double ny = norm2(y);
  if (nx == 0.0 || ny == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return dot / (nx * ny);
}

double cosine_score_backprop(const DenseAutoencoder& model, std::span<const double> patch,
                             double scale, std::span<double> grad) {
  if (grad.size() != model.parameter_count()) {
    throw DimensionError("gradient buffer length mismatch");
  }
  if (patch.size() != static_cast<std::size_t>(model.input_dim())) {
    throw DimensionError("patch length does not match the model input");
  }
  const Layout l{static_cast<std::size_t>(model.input_dim()),
                 static_cast<std::size_t>(model.hidden_dim())};
  const auto p = model.params();
  const Activations a = run_forward(p, l, patch);

  const double nx = norm2(patch);
  const double ny = norm2(a.out);
  if (nx == 0.0 || ny == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < l.in; ++i) dot += patch[i] * a.out[i];
  const double score = dot / (nx * ny);

  // d score / d out = x / (|x||y|) - score * y / |y|^2, then through the ReLUs.
  std::vector<double> d_out_pre(l.in);
  for (std::size_t o = 0; o < l.in; ++o) {
    const double d_out = patch[o] / (nx * ny) - score * a.out[o] / (ny * ny);
    d_out_pre[o] = a.out_pre[o] > 0.0 ? d_out : 0.0;
  }
  std::vector<double> d_hidden_pre(l.hid, 0.0);
  for (std::size_t o = 0; o < l.in; ++o) {
    grad[l.b2() + o] += scale * d_out_pre[o];
    for (std::size_t h = 0; h < l.hid; ++h) {
      grad[l.w2() + o * l.hid + h] += scale * d_out_pre[o] * a.hidden[h];
      d_hidden_pre[h] += p[l.w2() + o * l.hid + h] * d_out_pre[o];
    }
  }
  for (std::size_t h = 0; h < l.hid; ++h) {
    if (a.hidden_pre[h] <= 0.0) continue;
    grad[l.b1() + h] += scale * d_hidden_pre[h];
    for (std::size_t i = 0; i < l.in; ++i) {
      grad[l.w1() + h * l.in + i] += scale * d_hidden_pre[h] * patch[i];
    }
  }
  return score;
}

double baseline_image_cost(const Image& img, const DenseAutoencoder& model, int patch_size,
                           int stride) {
  return 1.0 - covered_mean(score_image(img, patch_size, stride, classical_scorer(model)));
}

double baseline_cost_and_gradient(const Image& img, const DenseAutoencoder& model,
                                  int patch_size, int stride, std::span<double> grad) {
  const PatchGrid grid = extract_patches(img, patch_size, stride);
  const std::vector<double> weights =
      coverage_weights(grid.anchors, grid.image_size, grid.patch_size);
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> scores;
  scores.reserve(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    scores.push_back(cosine_score_backprop(model, grid.patches[p], -weights[p], grad));
  }
  return 1.0 - covered_mean(assemble_map(scores, grid));
}

PatchScorer classical_scorer(const DenseAutoencoder& model) {
  return [model](std::span<const double> patch) {
    return cosine_similarity(patch, model.forward(patch));
  };
}

ScoreMap baseline_infer_map(const Image& img, const DenseAutoencoder& model, int patch_size,
                            int stride) {
  return to_anomaly(score_image(img, patch_size, stride, classical_scorer(model)));
}

TrainState train_baseline(std::span<const Image> train, std::span<const Image> val,
                          const TrainConfig& tcfg, int patch_size, int stride, int hidden_dim) {
  if (train.empty()) throw ArgumentError("training set is empty");
  const int input_dim = patch_size * patch_size;
  std::mt19937_64 rng(tcfg.seed);
  DenseAutoencoder init = DenseAutoencoder::random(input_dim, hidden_dim, rng);
  std::vector<double> params(init.params().begin(), init.params().end());

  const ImageCostFn cost = [&](const Image& img, std::span<const double> w) {
    const DenseAutoencoder model(input_dim, hidden_dim, std::vector<double>(w.begin(), w.end()));
    return baseline_image_cost(img, model, patch_size, stride);
  };
  const ImageCostGradFn cost_grad = [&](const Image& img, std::span<const double> w,
                                        std::span<double> grad) {
    const DenseAutoencoder model(input_dim, hidden_dim, std::vector<double>(w.begin(), w.end()));
    return baseline_cost_and_gradient(img, model, patch_size, stride, grad);
  };
  return fit_params(std::move(params), train, val, tcfg, cost, cost_grad, rng);
}

}  // namespace qpbae
