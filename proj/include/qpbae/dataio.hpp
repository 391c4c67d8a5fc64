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
 * Image files, dataset layouts and the synthetic texture dataset.
 *
 * Files are binary Netpbm: P5 (grayscale, 8- or 16-bit, big-endian samples)
 * and P6 (RGB, reduced to grayscale by the channel mean). Intensities are
 * divided by maxval so images live in [0, 1]. Masks are grayscale files whose
 * nonzero pixels mark anomalies.
 *
 * MVTec-style layout under <root>/<category>:
 *
 *   train/good/<name>.pgm              normal training images
 *   val/good/<name>.pgm                optional normal validation images
 *   test/<type>/<name>.pgm             test images; <type> == "good" is normal
 *   ground_truth/<type>/<stem>_mask.pgm  (or <stem>.pgm) masks for test/<type>
 *
 * BUSI-style layout under <root>:
 *
 *   normal/<name>.pgm, benign/<name>.pgm, malignant/<name>.pgm with <stem>_mask.pgm masks
 *   in the same directory.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qpbae/image.hpp"

namespace qpbae {

struct TestSample {
  Image image;
  Mask mask;  // all zero for normal images
  std::string name;
};

struct DatasetSplit {
  std::vector<Image> train;  // normal only
  std::vector<Image> val;    // normal only
  std::vector<TestSample> test;

  std::vector<Image> test_images() const;
  std::vector<Mask> test_masks() const;
};

// --- Netpbm ----------------------------------------------------------------

/// Reads P5/P6 into [0, 1] grayscale.
Image read_pnm(const std::string& path);
/// Nonzero pixels -> 1.
Mask read_mask(const std::string& path);
/// 8-bit P5, values clamped to [0, 1] and rounded to the nearest level.
void write_pgm8(const std::string& path, const Image& img);
/// 16-bit P5 (maxval 65535, big-endian).
void write_pgm16(const std::string& path, const Image& img);
void write_mask(const std::string& path, const Mask& mask);

// --- resampling ------------------------------------------------------------

enum class MaskResizeRule {
  Threshold,   // area fraction >= 0.5 -> 1
  AnyOverlap,  // any anomalous area -> 1
};

/// Area (box-filter) resampling of a square image to size x size. Each output
/// pixel is the area-weighted mean of the input pixels it overlaps.
Image resize_area(const Image& img, int size);
inline Image resize_to_32(const Image& img) { return resize_area(img, 32); }
Mask resize_mask(const Mask& mask, int size, MaskResizeRule rule = MaskResizeRule::Threshold);

// --- loaders -----------------------------------------------------------------

struct LoaderOptions {
  int image_size = 32;
  std::size_t max_train = 100;
  std::size_t max_val = 25;
  std::size_t max_test = 0;  // 0 = keep every test image
  std::uint64_t seed = 0;    // drives subsampling
  MaskResizeRule mask_rule = MaskResizeRule::Threshold;
  bool merge_benign_malignant = true;  // BUSI only

  friend bool operator==(const LoaderOptions&, const LoaderOptions&) = default;
};

DatasetSplit load_mvtec_layout(const std::string& root, const std::string& category,
                               const LoaderOptions& opts = {});

/// Normal images feed train/val (then test, with zero masks); benign and
/// malignant images are anomalous test samples. Without merging, only
/// malignant images are used as anomalies and benign ones are skipped.
DatasetSplit load_busi_layout(const std::string& root, const LoaderOptions& opts = {});

// --- synthetic data --------------------------------------------------------------

enum class Texture { Stripes, Blobs, UniformNoise };
enum class DefectShape { Square, Ellipse, Scratch };

/// Synthetic texture-with-defect dataset. Textures stay in [0.4, 0.6] (plus
/// noise), so a defect of |delta| <= 0.35 never clips. Inside the defect the
/// intensity rises by delta on even columns and delta / 2 on odd columns
/// (relative to the defect's left edge), which changes local structure as
/// well as brightness.
struct SynthSpec {
  int n_train = 100;
  int n_val = 25;
  int n_test = 50;
  int image_size = 32;
  Texture texture = Texture::Stripes;
  DefectShape defect = DefectShape::Square;
  int defect_size = 8;
  double defect_intensity_delta = 0.3;
  double anomalous_fraction = 0.5;  // share of test images with a defect
  double noise = 0.0;               // uniform +-noise per pixel, <= 0.05
  std::uint64_t seed = 0;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

Image render_texture(Texture texture, int size, double noise, std::mt19937_64& rng);
/// Adds a defect in place and returns its mask.
Mask inject_defect(Image& img, DefectShape shape, int defect_size, double delta,
                   std::mt19937_64& rng);

DatasetSplit generate_synthetic(const SynthSpec& spec);

/// Writes a split in MVTec layout under <root>/<category>, plus manifest.txt
/// listing every file with its split and the generator seed.
void write_mvtec_layout(const DatasetSplit& split, const std::string& root,
                        const std::string& category, std::uint64_t seed);

std::string to_string(Texture t);
std::string to_string(DefectShape d);
Texture parse_texture(const std::string& s);
DefectShape parse_defect(const std::string& s);

}  // namespace qpbae
