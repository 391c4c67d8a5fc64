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
 * Sliding-window patch extraction, amplitude embedding of patches, and
 * assembly of per-patch scores into overlap-averaged pixel maps.
 */

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qpbae/image.hpp"
#include "qpbae/statevec.hpp"

namespace qpbae {

struct Anchor {
  int row;
  int col;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

struct PatchGrid {
  int image_size = 0;
  int patch_size = 0;
  int stride = 0;
  std::vector<std::vector<double>> patches;  // row-major flattened, length P^2
  std::vector<Anchor> anchors;               // raster order, top-left corners

  std::size_t size() const noexcept { return anchors.size(); }
};

/// Pixel map plus, per pixel, the number of patches that covered it.
/// Pixels with count 0 are uncovered and are excluded from costs and metrics.
struct ScoreMap {
  Image values;
  Grid<int> counts;

  int size() const noexcept { return values.rows(); }
  bool covered(int r, int c) const { return counts(r, c) > 0; }
  std::size_t covered_pixels() const;
};

/// (floor((H - P) / S) + 1)^2.
int patch_count(int image_size, int patch_size, int stride);

/// Throws ArgumentError unless H = W, 1 <= P <= H, S >= 1 and P^2 is a power of two.
void check_geometry(const Image& img, int patch_size, int stride);

PatchGrid extract_patches(const Image& img, int patch_size, int stride);

/// Anchors only, for callers that need geometry without pixel copies.
std::vector<Anchor> patch_anchors(int image_size, int patch_size, int stride);

bool is_zero_patch(std::span<const double> patch);

/// L2-normalized amplitude encoding. An all-zero patch maps to the uniform
/// superposition.
StateVector embed_patch(std::span<const double> patch);

/// Z(i,j) = (sum of scores of patches covering (i,j)) / count(i,j),
/// accumulated in raster patch order.
ScoreMap assemble_map(std::span<const double> scores, const PatchGrid& grid);
ScoreMap assemble_map(std::span<const double> scores, std::span<const Anchor> anchors,
                      int image_size, int patch_size);

/// Y = 1 - Z with Z clamped to [0, 1]; counts carried over.
ScoreMap to_anomaly(const ScoreMap& similarity);

/// Mean of the map over covered pixels.
double covered_mean(const ScoreMap& map);

/// Weight w_p with covered_mean(assemble_map(z)) == sum_p w_p z_p, i.e.
/// w_p = (sum over pixels of patch p of 1 / count) / (number of covered pixels).
std::vector<double> coverage_weights(std::span<const Anchor> anchors, int image_size,
                                     int patch_size);

/// Scores one raw (un-normalized) flattened patch.
using PatchScorer = std::function<double(std::span<const double> patch)>;

/// Extracts patches, scores each with `scorer`, and assembles the similarity map.
ScoreMap score_image(const Image& img, int patch_size, int stride, const PatchScorer& scorer);

/// A ScoreMap whose every pixel is covered once; for feeding externally
/// produced maps to the metrics.
ScoreMap full_coverage_map(Image values);

}  // namespace qpbae
