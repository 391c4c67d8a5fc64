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
 * Pixel-level segmentation metrics over anomaly maps (high = anomalous).
 *
 * Conventions shared by every metric here:
 *  - a pixel is predicted anomalous when its score is >= the threshold;
 *  - pixels a map marks as uncovered (count 0) take no part;
 *  - Dice and IoU of two empty masks are 1.
 */

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qpbae/image.hpp"
#include "qpbae/patchflow.hpp"

namespace qpbae {

enum class Connectivity { Four, Eight };
inline constexpr Connectivity kDefaultConnectivity = Connectivity::Eight;

enum class AurocPooling {
  Pooled,    // one ROC over all pixels of all images
  PerImage,  // mean of per-image AUROCs (images with both classes)
};

enum class ProAveraging {
  PerComponent,  // one mean over all (image, component) pairs
  PerImage,      // mean over components within an image, then over images
};

struct OverlapCounts {
  std::size_t intersection = 0;
  std::size_t predicted = 0;  // |A|
  std::size_t truth = 0;      // |B|

  std::size_t union_size() const noexcept { return predicted + truth - intersection; }
};

OverlapCounts overlap_counts(const Mask& pred, const Mask& gt);

double iou(const Mask& pred, const Mask& gt);
double dice(const Mask& pred, const Mask& gt);
double iou(const OverlapCounts& c);
double dice(const OverlapCounts& c);

/// Pixels with value >= threshold among covered pixels.
Mask binarize(const ScoreMap& map, double threshold);

struct ThresholdCurves {
  std::vector<double> thresholds;
  std::vector<double> dice;
  std::vector<double> iou;
};

/// n evenly spaced thresholds covering [0, 1] (101 by default).
std::vector<double> default_thresholds(int n = 101);

/// Per-image Dice/IoU at each threshold, averaged over images.
ThresholdCurves threshold_sweep(std::span<const ScoreMap> maps, std::span<const Mask> gts,
                                std::span<const double> thresholds);

/// Area under the ROC curve over every distinct score threshold. Ties
/// between an anomalous and a normal pixel count one half.
double pixel_auroc(std::span<const ScoreMap> maps, std::span<const Mask> gts,
                   AurocPooling pooling = AurocPooling::Pooled);

/// One mask per connected component of `mask`, in raster order of each
/// component's first pixel.
std::vector<Mask> connected_components(const Mask& mask,
                                       Connectivity connectivity = kDefaultConnectivity);

/// Area under the per-region-overlap vs false-positive-rate curve on
/// [0, fpr_limit], divided by fpr_limit.
double aupro(std::span<const ScoreMap> maps, std::span<const Mask> gts, double fpr_limit = 0.3,
             ProAveraging averaging = ProAveraging::PerComponent,
             Connectivity connectivity = kDefaultConnectivity);

/// Trapezoidal area under a monotone polyline starting at its first point,
/// truncated (with linear interpolation) at x_limit.
double truncated_trapezoid(std::span<const double> x, std::span<const double> y, double x_limit);

struct EvalReport {
  double auroc = 0.0;
  double aupro = 0.0;
  ThresholdCurves curves;
};

struct EvalOptions {
  double fpr_limit = 0.3;
  AurocPooling auroc_pooling = AurocPooling::Pooled;
  ProAveraging pro_averaging = ProAveraging::PerComponent;
  std::vector<double> thresholds = default_thresholds();
};

EvalReport evaluate(std::span<const ScoreMap> maps, std::span<const Mask> gts,
                    const EvalOptions& opts = {});

/// Scalar metrics as a header row + value row, then threshold,dice,iou rows:
///
///   auroc,aupro
///   <auroc>,<aupro>
///   threshold,dice,iou
///   <t>,<dice>,<iou>
///   ...
void write_report_csv(const std::string& path, const EvalReport& report);
std::string report_summary(const EvalReport& report);

}  // namespace qpbae
