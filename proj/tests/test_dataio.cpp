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

#include "qpbae/dataio.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "qpbae/errors.hpp"

namespace fs = std::filesystem;

namespace qpbae {
namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("qpbae_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const { return (path_ / rel).string(); }

 private:
  fs::path path_;
};

void write_bytes(const fs::path& p, const std::string& bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  os << bytes;
}

double mean_of(const Image& img) {
  return std::accumulate(img.data().begin(), img.data().end(), 0.0) /
         static_cast<double>(img.size());
}

TEST(Netpbm, Pgm8RoundTripIsExactOnLevels) {
  TempDir dir("pgm8");
  Image img(3, 5, 0.0);
  for (std::size_t k = 0; k < img.size(); ++k) img[k] = static_cast<double>(k * 17) / 255.0;
  write_pgm8(dir.str("a.pgm"), img);
  const Image back = read_pnm(dir.str("a.pgm"));
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 5);
  for (std::size_t k = 0; k < img.size(); ++k) EXPECT_EQ(back[k], img[k]);
}

TEST(Netpbm, Pgm8QuantizesAndClamps) {
  TempDir dir("pgm8q");
  Image img(1, 4, 0.0);
  img[0] = -0.2;
  img[1] = 1.3;
  img[2] = 0.5;
  img[3] = 0.123;
  write_pgm8(dir.str("q.pgm"), img);
  const Image back = read_pnm(dir.str("q.pgm"));
  EXPECT_EQ(back[0], 0.0);
  EXPECT_EQ(back[1], 1.0);
  EXPECT_EQ(back[2], 128.0 / 255.0);
  EXPECT_LE(std::abs(back[3] - 0.123), 0.5 / 255.0);
}

TEST(Netpbm, Pgm16RoundTripWithinHalfLevel) {
  TempDir dir("pgm16");
  oracle::Gen gen(71);
  const Image img = gen.image(9);
  write_pgm16(dir.str("b.pgm"), img);
  const Image back = read_pnm(dir.str("b.pgm"));
  for (std::size_t k = 0; k < img.size(); ++k) EXPECT_LE(std::abs(back[k] - img[k]), 0.5 / 65535.0);
}

TEST(Netpbm, HandWrittenFiles) {
  TempDir dir("hand");
  // 16-bit big-endian: 0x0100 = 256, 0xFFFF = 65535.
  write_bytes(dir.path() / "w.pgm", std::string("P5\n# comment\n2 1\n65535\n") +
                                        std::string("\x01\x00\xff\xff", 4));
  const Image w = read_pnm(dir.str("w.pgm"));
  EXPECT_EQ(w[0], 256.0 / 65535.0);
  EXPECT_EQ(w[1], 1.0);
  // P6 reduces to the channel mean.
  write_bytes(dir.path() / "c.ppm", std::string("P6 1 1 255\n") + std::string("\x00\x66\xcc", 3));
  EXPECT_DOUBLE_EQ(read_pnm(dir.str("c.ppm"))[0], (0.0 + 102.0 + 204.0) / 3.0 / 255.0);
}

TEST(Netpbm, Errors) {
  TempDir dir("bad");
  EXPECT_THROW(read_pnm(dir.str("missing.pgm")), IoError);
  write_bytes(dir.path() / "ascii.pgm", "P2\n1 1\n255\n7\n");
  EXPECT_THROW(read_pnm(dir.str("ascii.pgm")), DataError);
  write_bytes(dir.path() / "short.pgm", "P5\n4 4\n255\n\x01\x02");
  EXPECT_THROW(read_pnm(dir.str("short.pgm")), DataError);
}

TEST(Netpbm, MaskNonzeroIsAnomalous) {
  TempDir dir("mask");
  Mask m(2, 3, 0);
  m(0, 1) = 1;
  m(1, 2) = 1;
  write_mask(dir.str("m.pgm"), m);
  EXPECT_EQ(read_mask(dir.str("m.pgm")), m);
  write_bytes(dir.path() / "g.pgm", std::string("P5 3 1 255\n") + std::string("\x00\x01\x80", 3));
  const Mask g = read_mask(dir.str("g.pgm"));
  EXPECT_EQ(std::vector<std::uint8_t>(g.data().begin(), g.data().end()), (std::vector<std::uint8_t>{0, 1, 1}));
}

TEST(Resize, ConstantAndIdentity) {
  const Image c = resize_area(Image(100, 100, 0.37), 32);
  for (double v : c.data()) EXPECT_NEAR(v, 0.37, 1e-15);
  oracle::Gen gen(72);
  const Image img = gen.image(32);
  EXPECT_EQ(resize_to_32(img), img);
}

TEST(Resize, CheckerboardAveragesToHalf) {
  Image board(64, 64, 0.0);
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) board(r, c) = (r + c) % 2;
  }
  const Image small = resize_area(board, 32);
  for (double v : small.data()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Property, ResizePreservesMean) {
  oracle::Gen gen(73);
  for (int trial = 0; trial < 40; ++trial) {
    const int in = gen.integer(5, 90);
    const int out = gen.integer(2, 40);
    const Image img = gen.image(in);
    const Image r = resize_area(img, out);
    EXPECT_NEAR(mean_of(r), mean_of(img), 1e-12) << in << " -> " << out;
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    for (double v : r.data()) {
      EXPECT_GE(v, *lo - 1e-12);
      EXPECT_LE(v, *hi + 1e-12);
    }
  }
}

TEST(Resize, NonSquareIsArgumentError) {
  EXPECT_THROW(resize_area(Image(4, 6, 0.0), 2), ArgumentError);
  EXPECT_THROW(resize_area(Image(4, 4, 0.0), 0), ArgumentError);
}

TEST(Resize, MaskRules) {
  // A 3x3 block in a 6x6 mask covers a quarter of output pixel (1, 1)
  // when halving, and all of output pixel (0, 0).
  Mask m(6, 6, 0);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = 1;
  }
  const Mask t = resize_mask(m, 3, MaskResizeRule::Threshold);
  const Mask a = resize_mask(m, 3, MaskResizeRule::AnyOverlap);
  EXPECT_EQ(t(0, 0), 1);
  EXPECT_EQ(t(0, 1), 1);  // half covered: >= 0.5
  EXPECT_EQ(t(1, 1), 0);  // quarter
  EXPECT_EQ(a(1, 1), 1);
  EXPECT_EQ(a(2, 2), 0);
}

// MVTec-style tree with 5 training images, no val/, one defect type.
void build_mvtec_tree(const fs::path& root) {
  const fs::path base = root / "toy";
  fs::create_directories(base / "train" / "good");
  for (int i = 0; i < 5; ++i) {
    write_pgm8((base / "train" / "good" / ("00" + std::to_string(i) + ".pgm")).string(),
               Image(16, 16, 0.1 * (i + 1)));
  }
  fs::create_directories(base / "test" / "good");
  fs::create_directories(base / "test" / "crack");
  fs::create_directories(base / "ground_truth" / "crack");
  write_pgm8((base / "test" / "good" / "000.pgm").string(), Image(16, 16, 0.5));
  write_pgm8((base / "test" / "crack" / "000.pgm").string(), Image(16, 16, 0.9));
  Mask gt(16, 16, 0);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) gt(r, c) = 1;
  }
  write_mask((base / "ground_truth" / "crack" / "000_mask.pgm").string(), gt);
}

TEST(Mvtec, LoadsToyTree) {
  TempDir dir("mvtec");
  build_mvtec_tree(dir.path());
  LoaderOptions opts;
  opts.image_size = 8;
  const DatasetSplit s = load_mvtec_layout(dir.str(), "toy", opts);
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_EQ(s.val.size(), 0u);
  ASSERT_EQ(s.test.size(), 2u);
  EXPECT_EQ(s.test[0].name, "crack/000");
  EXPECT_EQ(s.test[1].name, "good/000");
  EXPECT_EQ(s.test[0].image.rows(), 8);
  // 4x4 of 16 -> 2x2 of 8.
  EXPECT_EQ(std::count(s.test[0].mask.data().begin(), s.test[0].mask.data().end(), 1), 4);
  EXPECT_EQ(std::count(s.test[1].mask.data().begin(), s.test[1].mask.data().end(), 1), 0);
}

TEST(Mvtec, SparesBecomeValidationAndSubsamplingIsSeeded) {
  TempDir dir("mvtec_val");
  build_mvtec_tree(dir.path());
  LoaderOptions opts;
  opts.image_size = 8;
  opts.max_train = 3;
  opts.seed = 5;
  const DatasetSplit a = load_mvtec_layout(dir.str(), "toy", opts);
  const DatasetSplit b = load_mvtec_layout(dir.str(), "toy", opts);
  EXPECT_EQ(a.train.size(), 3u);
  EXPECT_EQ(a.val.size(), 2u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.train[i], b.train[i]);
  // Train and val are disjoint: every training image is a distinct constant.
  std::vector<double> levels;
  for (const auto& img : a.train) levels.push_back(img[0]);
  for (const auto& img : a.val) levels.push_back(img[0]);
  std::sort(levels.begin(), levels.end());
  EXPECT_EQ(std::unique(levels.begin(), levels.end()), levels.end());
}

TEST(Mvtec, LayoutAndMaskErrors) {
  TempDir dir("mvtec_err");
  EXPECT_THROW(load_mvtec_layout(dir.str(), "toy"), LayoutError);
  build_mvtec_tree(dir.path());
  fs::remove(dir.path() / "toy" / "ground_truth" / "crack" / "000_mask.pgm");
  LoaderOptions opts;
  opts.image_size = 8;
  EXPECT_THROW(load_mvtec_layout(dir.str(), "toy", opts), DataError);
}

TEST(Busi, MergesBenignAndMalignant) {
  TempDir dir("busi");
  const fs::path root = dir.path();
  for (const char* cls : {"normal", "benign", "malignant"}) fs::create_directories(root / cls);
  for (int i = 0; i < 4; ++i) {
    write_pgm8((root / "normal" / ("n" + std::to_string(i) + ".pgm")).string(), Image(8, 8, 0.2));
  }
  Mask gt(8, 8, 0);
  gt(0, 0) = 1;
  for (const std::string cls : {"benign", "malignant"}) {
    write_pgm8((root / cls / "x.pgm").string(), Image(8, 8, 0.8));
    write_mask((root / cls / "x_mask.pgm").string(), gt);
  }
  LoaderOptions opts;
  opts.image_size = 8;
  opts.max_train = 2;
  opts.max_val = 1;
  const DatasetSplit s = load_busi_layout(root.string(), opts);
  EXPECT_EQ(s.train.size(), 2u);
  EXPECT_EQ(s.val.size(), 1u);
  ASSERT_EQ(s.test.size(), 3u);
  EXPECT_EQ(s.test[1].name, "benign/x");
  EXPECT_EQ(s.test[2].name, "malignant/x");
  EXPECT_EQ(s.test[2].mask(0, 0), 1);
  opts.merge_benign_malignant = false;
  EXPECT_EQ(load_busi_layout(root.string(), opts).test.size(), 2u);
  fs::remove_all(root / "benign");
  EXPECT_THROW(load_busi_layout(root.string(), opts), LayoutError);
}

TEST(Synthetic, DeterministicAndShaped) {
  SynthSpec spec;
  spec.n_train = 6;
  spec.n_val = 2;
  spec.n_test = 4;
  spec.seed = 11;
  const DatasetSplit a = generate_synthetic(spec);
  const DatasetSplit b = generate_synthetic(spec);
  ASSERT_EQ(a.train.size(), 6u);
  ASSERT_EQ(a.val.size(), 2u);
  ASSERT_EQ(a.test.size(), 4u);
  for (std::size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i], b.train[i]);
  for (std::size_t i = 0; i < a.test.size(); ++i) {
    EXPECT_EQ(a.test[i].image, b.test[i].image);
    EXPECT_EQ(a.test[i].mask, b.test[i].mask);
  }
  EXPECT_EQ(a.test[0].name, "square/000");
  EXPECT_EQ(a.test[3].name, "good/003");
  spec.seed = 12;
  EXPECT_NE(generate_synthetic(spec).train[0], a.train[0]);
}

TEST(Synthetic, TexturesStayInBand) {
  std::mt19937_64 rng(13);
  for (Texture t : {Texture::Stripes, Texture::Blobs, Texture::UniformNoise}) {
    for (int i = 0; i < 10; ++i) {
      const Image img = render_texture(t, 32, 0.05, rng);
      for (double v : img.data()) {
        EXPECT_GE(v, 0.35 - 1e-12);
        EXPECT_LE(v, 0.65 + 1e-12);
      }
    }
  }
}

TEST(Synthetic, SquareDefectMaskIsExactlyTheModifiedPixels) {
  std::mt19937_64 rng(14);
  for (DefectShape shape : {DefectShape::Square, DefectShape::Ellipse, DefectShape::Scratch}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Image before = render_texture(Texture::Stripes, 32, 0.0, rng);
      Image after = before;
      const Mask m = inject_defect(after, shape, 8, 0.3, rng);
      for (std::size_t k = 0; k < m.size(); ++k) {
        EXPECT_EQ(m[k] != 0, after[k] != before[k]);
        if (m[k]) {
          EXPECT_GE(after[k] - before[k], 0.15 - 1e-12);
        }
      }
      if (shape == DefectShape::Square) {
        EXPECT_EQ(std::count(m.data().begin(), m.data().end(), 1), 64);
      }
    }
  }
}

TEST(Synthetic, ZeroDeltaLeavesImageUntouched) {
  std::mt19937_64 rng(15);
  const Image before = render_texture(Texture::Blobs, 32, 0.0, rng);
  Image after = before;
  const Mask m = inject_defect(after, DefectShape::Square, 8, 0.0, rng);
  EXPECT_EQ(after, before);
  EXPECT_EQ(std::count(m.data().begin(), m.data().end(), 1), 0);
}

TEST(Synthetic, DefectChangesLocalStructure) {
  // Even/odd column amplitudes differ, so the defect is not a pure offset.
  Image img(8, 8, 0.5);
  std::mt19937_64 rng(16);
  const Mask m = inject_defect(img, DefectShape::Square, 8, 0.2, rng);
  EXPECT_DOUBLE_EQ(img(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(img(0, 1), 0.6);
  EXPECT_EQ(std::count(m.data().begin(), m.data().end(), 1), 64);
}

TEST(Synthetic, ValidationErrors) {
  SynthSpec spec;
  spec.defect_size = 40;
  EXPECT_THROW(generate_synthetic(spec), ArgumentError);
  spec = {};
  spec.defect_intensity_delta = 0.4;
  EXPECT_THROW(generate_synthetic(spec), ArgumentError);
  spec = {};
  spec.noise = 0.1;
  EXPECT_THROW(generate_synthetic(spec), ArgumentError);
  spec = {};
  spec.n_train = 0;
  EXPECT_THROW(generate_synthetic(spec), ArgumentError);
  Image small(4, 4, 0.5);
  std::mt19937_64 rng(0);
  EXPECT_THROW(inject_defect(small, DefectShape::Square, 8, 0.3, rng), ArgumentError);
}

TEST(Synthetic, NamesParse) {
  for (Texture t : {Texture::Stripes, Texture::Blobs, Texture::UniformNoise}) {
    EXPECT_EQ(parse_texture(to_string(t)), t);
  }
  for (DefectShape d : {DefectShape::Square, DefectShape::Ellipse, DefectShape::Scratch}) {
    EXPECT_EQ(parse_defect(to_string(d)), d);
  }
  EXPECT_THROW(parse_texture("plaid"), ConfigError);
  EXPECT_THROW(parse_defect("hole"), ConfigError);
}

TEST(Synthetic, WrittenLayoutLoadsBack) {
  TempDir dir("synth_rt");
  SynthSpec spec;
  spec.n_train = 4;
  spec.n_val = 2;
  spec.n_test = 4;
  spec.seed = 17;
  const DatasetSplit s = generate_synthetic(spec);
  write_mvtec_layout(s, dir.str(), "synthetic", spec.seed);
  EXPECT_TRUE(fs::is_regular_file(dir.path() / "synthetic" / "manifest.txt"));
  const DatasetSplit back = load_mvtec_layout(dir.str(), "synthetic");
  ASSERT_EQ(back.train.size(), 4u);
  ASSERT_EQ(back.val.size(), 2u);
  ASSERT_EQ(back.test.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < s.train[i].size(); ++k) {
      EXPECT_LE(std::abs(back.train[i][k] - s.train[i][k]), 0.5 / 255.0 + 1e-15);
    }
  }
  // Lexicographic type order puts good/ before square/.
  EXPECT_EQ(back.test[0].name, "good/002");
  EXPECT_EQ(back.test[2].name, "square/000");
  EXPECT_EQ(back.test[2].mask, s.test[0].mask);
  EXPECT_EQ(back.test[0].mask, s.test[2].mask);
}

}  // namespace
}  // namespace qpbae
