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

#include "qpbae/patchflow.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qpbae/errors.hpp"

namespace qpbae {

std::size_t ScoreMap::covered_pixels() const {
  return static_cast<std::size_t>(
      std::count_if(counts.data().begin(), counts.data().end(), [](int c) { return c > 0; }));
}

int patch_count(int image_size, int patch_size, int stride) {
  if (patch_size < 1 || patch_size > image_size) {
    throw ArgumentError("patch size " + std::to_string(patch_size) + " invalid for image size " +
                        std::to_string(image_size));
  }
  if (stride < 1) throw ArgumentError("stride must be >= 1");
  const int per_axis = (image_size - patch_size) / stride + 1;
  return per_axis * per_axis;
}

void check_geometry(const Image& img, int patch_size, int stride) {
  if (img.rows() != img.cols()) {
    throw ArgumentError("image must be square, got " + std::to_string(img.rows()) + "x" +
                        std::to_string(img.cols()));
  }
  if (patch_size < 1 || patch_size > img.rows()) {
    throw ArgumentError("patch size " + std::to_string(patch_size) + " exceeds image size " +
                        std::to_string(img.rows()));
  }
  if (!std::has_single_bit(static_cast<unsigned>(patch_size * patch_size))) {
    throw ArgumentError("patch size " + std::to_string(patch_size) +
                        " does not give a power-of-two pixel count");
  }
  if (stride < 1) throw ArgumentError("stride must be >= 1");
}

std::vector<Anchor> patch_anchors(int image_size, int patch_size, int stride) {
  const int total = patch_count(image_size, patch_size, stride);
  std::vector<Anchor> anchors;
  anchors.reserve(static_cast<std::size_t>(total));
  for (int r = 0; r + patch_size <= image_size; r += stride) {
    for (int c = 0; c + patch_size <= image_size; c += stride) anchors.push_back({r, c});
  }
  return anchors;
}

PatchGrid extract_patches(const Image& img, int patch_size, int stride) {
  check_geometry(img, patch_size, stride);
  PatchGrid grid;
  grid.image_size = img.rows();
  grid.patch_size = patch_size;
  grid.stride = stride;
  grid.anchors = patch_anchors(img.rows(), patch_size, stride);
  grid.patches.reserve(grid.anchors.size());
  for (const auto& a : grid.anchors) {
    std::vector<double> patch;
    patch.reserve(static_cast<std::size_t>(patch_size * patch_size));
    for (int r = 0; r < patch_size; ++r) {
      for (int c = 0; c < patch_size; ++c) patch.push_back(img(a.row + r, a.col + c));
    }
    grid.patches.push_back(std::move(patch));
  }
  return grid;
}

bool is_zero_patch(std::span<const double> patch) {
  return std::all_of(patch.begin(), patch.end(), [](double v) { return v == 0.0; });
}

StateVector embed_patch(std::span<const double> patch) {
  const auto len = static_cast<unsigned>(patch.size());
  if (len < 2 || !std::has_single_bit(len)) {
    throw DimensionError("patch length " + std::to_string(len) + " is not a power of two");
  }
  const int n = std::countr_zero(len);
  if (is_zero_patch(patch)) {
    const std::vector<double> uniform(patch.size(), 1.0);
    return StateVector::from_amplitudes(uniform, n);
  }
  return StateVector::from_amplitudes(patch, n);
}

ScoreMap assemble_map(std::span<const double> scores, std::span<const Anchor> anchors,
                      int image_size, int patch_size) {
  if (scores.size() != anchors.size()) {
    throw DimensionError("got " + std::to_string(scores.size()) + " scores for " +
                         std::to_string(anchors.size()) + " patches");
  }
  ScoreMap map{Image(image_size, image_size, 0.0), Grid<int>(image_size, image_size, 0)};
  for (std::size_t p = 0; p < anchors.size(); ++p) {
    const auto& a = anchors[p];
    for (int r = a.row; r < a.row + patch_size; ++r) {
      for (int c = a.col; c < a.col + patch_size; ++c) {
        map.values(r, c) += scores[p];
        map.counts(r, c) += 1;
      }
    }
  }
  for (std::size_t k = 0; k < map.values.size(); ++k) {
    if (map.counts[k] > 0) map.values[k] /= map.counts[k];
  }
  return map;
}

ScoreMap assemble_map(std::span<const double> scores, const PatchGrid& grid) {
  return assemble_map(scores, grid.anchors, grid.image_size, grid.patch_size);
}

ScoreMap to_anomaly(const ScoreMap& similarity) {
  ScoreMap out = similarity;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (out.counts[k] > 0) out.values[k] = 1.0 - std::clamp(out.values[k], 0.0, 1.0);
  }
  return out;
}

double covered_mean(const ScoreMap& map) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < map.values.size(); ++k) {
    if (map.counts[k] > 0) {
      sum += map.values[k];
      ++n;
    }
  }
  if (n == 0) throw DimensionError("map has no covered pixels");
  return sum / static_cast<double>(n);
}

std::vector<double> coverage_weights(std::span<const Anchor> anchors, int image_size,
                                     int patch_size) {
  Grid<int> counts(image_size, image_size, 0);
  for (const auto& a : anchors) {
    for (int r = a.row; r < a.row + patch_size; ++r) {
      for (int c = a.col; c < a.col + patch_size; ++c) counts(r, c) += 1;
    }
  }
  const auto covered = std::count_if(counts.data().begin(), counts.data().end(),
                                     [](int c) { return c > 0; });
  std::vector<double> weights(anchors.size(), 0.0);
  for (std::size_t p = 0; p < anchors.size(); ++p) {
    const auto& a = anchors[p];
    double w = 0.0;
    for (int r = a.row; r < a.row + patch_size; ++r) {
      for (int c = a.col; c < a.col + patch_size; ++c) w += 1.0 / counts(r, c);
    }
    weights[p] = w / static_cast<double>(covered);
  }
  return weights;
}

ScoreMap score_image(const Image& img, int patch_size, int stride, const PatchScorer& scorer) {
  const PatchGrid grid = extract_patches(img, patch_size, stride);
  std::vector<double> scores;
  scores.reserve(grid.size());
  for (const auto& patch : grid.patches) scores.push_back(scorer(patch));
  return assemble_map(scores, grid);
}

ScoreMap full_coverage_map(Image values) {
  Grid<int> counts(values.rows(), values.cols(), 1);
  return ScoreMap{std::move(values), std::move(counts)};
}

}  // namespace qpbae
