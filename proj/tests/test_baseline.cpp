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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qpbae/errors.hpp"

namespace qpbae {
namespace {

// Straight-line two-layer network, written independently of the library's
// flat-buffer walk.
std::vector<double> reference_forward(const std::vector<double>& p, int in, int hid,
                                      const std::vector<double>& x) {
  std::vector<std::vector<double>> w1(hid, std::vector<double>(in));
  std::vector<double> b1(hid);
  std::vector<std::vector<double>> w2(in, std::vector<double>(hid));
  std::vector<double> b2(in);
  std::size_t k = 0;
  for (auto& row : w1) {
    for (auto& v : row) v = p[k++];
  }
  for (auto& v : b1) v = p[k++];
  for (auto& row : w2) {
    for (auto& v : row) v = p[k++];
  }
  for (auto& v : b2) v = p[k++];
  std::vector<double> h(hid);
  for (int j = 0; j < hid; ++j) {
    double s = b1[j];
    for (int i = 0; i < in; ++i) s += w1[j][i] * x[i];
    h[j] = s > 0 ? s : 0;
  }
  std::vector<double> y(in);
  for (int i = 0; i < in; ++i) {
    double s = b2[i];
    for (int j = 0; j < hid; ++j) s += w2[i][j] * h[j];
    y[i] = s > 0 ? s : 0;
  }
  return y;
}

TEST(Dense, ParameterCount) {
  EXPECT_EQ(DenseAutoencoder::parameter_count(64, 4), 580u);
  EXPECT_EQ(DenseAutoencoder::parameter_count(16, 4), 148u);
  EXPECT_EQ(DenseAutoencoder::parameter_count(4, 2), 22u);
  EXPECT_EQ(DenseAutoencoder(64, 4).parameter_count(), 580u);
  EXPECT_THROW(DenseAutoencoder::parameter_count(0, 4), ArgumentError);
  EXPECT_THROW(DenseAutoencoder(4, 2, std::vector<double>(21, 0.0)), DimensionError);
}

TEST(Dense, ZeroWeightsGiveZeroOutput) {
  const DenseAutoencoder m(16, 4);
  const std::vector<double> x(16, 0.7);
  for (double y : m.forward(x)) EXPECT_EQ(y, 0.0);
  EXPECT_EQ(cosine_similarity(x, m.forward(x)), 0.0);
}

TEST(Dense, HandcraftedIdentityOnSparsePatch) {
  // Hidden unit j copies pixel j and writes it back.
  DenseAutoencoder m(64, 4);
  auto p = m.params();
  for (int j = 0; j < 4; ++j) {
    p[static_cast<std::size_t>(j * 64 + j)] = 1.0;                    // W1
    p[static_cast<std::size_t>(64 * 4 + 4 + j * 4 + j)] = 1.0;        // W2
  }
  std::vector<double> x(64, 0.0);
  x[0] = 0.2;
  x[1] = 0.9;
  x[2] = 0.4;
  x[3] = 0.6;
  const auto y = m.forward(x);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(y[i], x[i]);
  EXPECT_NEAR(cosine_similarity(x, y), 1.0, 1e-15);
  EXPECT_THROW(m.forward(std::vector<double>(16, 0.0)), DimensionError);
}

TEST(Property, ForwardMatchesReferenceAndIsNonNegative) {
  oracle::Gen gen(61);
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int in = gen.coin() ? 16 : 64;
    const int hid = gen.coin() ? 2 : 4;
    const DenseAutoencoder m = DenseAutoencoder::random(in, hid, rng);
    std::vector<double> x(static_cast<std::size_t>(in));
    for (auto& v : x) v = gen.uniform();
    const auto got = m.forward(x);
    const auto want = reference_forward({m.params().begin(), m.params().end()}, in, hid, x);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-14);
      EXPECT_GE(got[i], 0.0);
    }
  }
}

TEST(Dense, RandomInitWithinFanInBounds) {
  std::mt19937_64 rng(3);
  const DenseAutoencoder m = DenseAutoencoder::random(64, 4, rng);
  const auto p = m.params();
  for (std::size_t k = 0; k < 64 * 4 + 4; ++k) EXPECT_LE(std::abs(p[k]), 0.125);
  for (std::size_t k = 64 * 4 + 4; k < p.size(); ++k) EXPECT_LE(std::abs(p[k]), 0.5);
}

TEST(Cosine, Examples) {
  const std::vector<double> a{1, 0};
  const std::vector<double> b{0, 1};
  const std::vector<double> c{2, 0};
  const std::vector<double> z{0, 0};
  EXPECT_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_EQ(cosine_similarity(a, c), 1.0);
  EXPECT_EQ(cosine_similarity(a, z), 0.0);
  EXPECT_EQ(cosine_similarity(z, z), 0.0);
  const std::vector<double> d{1, 1};
  EXPECT_NEAR(cosine_similarity(a, d), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(cosine_similarity(a, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(Gradient, BackpropMatchesFiniteDifferences) {
  oracle::Gen gen(62);
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const int p_size = gen.coin() ? 2 : 4;
    const int in = p_size * p_size;
    const DenseAutoencoder m = DenseAutoencoder::random(in, 4, rng);
    const Image img = gen.image(8, 0.1, 0.9);
    const int stride = gen.integer(1, p_size);
    std::vector<double> grad(m.parameter_count());
    const double cost = baseline_cost_and_gradient(img, m, p_size, stride, grad);
    EXPECT_NEAR(cost, baseline_image_cost(img, m, p_size, stride), 1e-14);
    const double h = 1e-6;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      std::vector<double> plus(m.params().begin(), m.params().end());
      std::vector<double> minus = plus;
      plus[k] += h;
      minus[k] -= h;
      const double fd = (baseline_image_cost(img, DenseAutoencoder(in, 4, plus), p_size, stride) -
                         baseline_image_cost(img, DenseAutoencoder(in, 4, minus), p_size, stride)) /
                        (2 * h);
      EXPECT_NEAR(grad[k], fd, 1e-5 * std::max(1.0, std::abs(fd))) << "param " << k;
    }
  }
}

TEST(Infer, MapIsOneMinusCosine) {
  oracle::Gen gen(63);
  std::mt19937_64 rng(63);
  const DenseAutoencoder m = DenseAutoencoder::random(4, 4, rng);
  const Image img = gen.image(6);
  const ScoreMap y = baseline_infer_map(img, m, 2, 2);
  for (int r = 0; r < 6; r += 2) {
    for (int c = 0; c < 6; c += 2) {
      const std::vector<double> patch{img(r, c), img(r, c + 1), img(r + 1, c), img(r + 1, c + 1)};
      EXPECT_NEAR(y.values(r + 1, c + 1), 1.0 - cosine_similarity(patch, m.forward(patch)),
                  1e-15);
    }
  }
}

TEST(Train, ZeroLearningRateKeepsInit) {
  oracle::Gen gen(64);
  std::vector<Image> imgs{gen.image(8), gen.image(8)};
  TrainConfig t;
  t.epochs = 2;
  t.learning_rate = 0.0;
  t.seed = 9;
  const TrainState s = train_baseline(imgs, {}, t, 4, 4);
  std::mt19937_64 rng(9);
  const DenseAutoencoder init = DenseAutoencoder::random(16, 4, rng);
  EXPECT_EQ(s.params, std::vector<double>(init.params().begin(), init.params().end()));
  EXPECT_THROW(train_baseline({}, {}, t, 4, 4), ArgumentError);
}

TEST(Train, LossDecreases) {
  oracle::Gen gen(65);
  std::vector<Image> imgs;
  for (int i = 0; i < 8; ++i) {
    Image img(8, 8, 0.0);
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) img(r, c) = 0.5 + 0.1 * std::sin(r) + gen.uniform(-0.02, 0.02);
    }
    imgs.push_back(img);
  }
  TrainConfig t;
  t.epochs = 20;
  t.learning_rate = 0.01;
  t.seed = 1;
  const TrainState s = train_baseline(imgs, {}, t, 4, 4);
  ASSERT_EQ(s.history.size(), 21u);
  EXPECT_LT(s.history.back().train_loss, s.history.front().train_loss);
}

}  // namespace
}  // namespace qpbae
