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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qpbae/errors.hpp"

namespace fs = std::filesystem;

namespace qpbae {

std::vector<Image> DatasetSplit::test_images() const {
  std::vector<Image> out;
  out.reserve(test.size());
  for (const auto& s : test) out.push_back(s.image);
  return out;
}

std::vector<Mask> DatasetSplit::test_masks() const {
  std::vector<Mask> out;
  out.reserve(test.size());
  for (const auto& s : test) out.push_back(s.mask);
  return out;
}

// --- Netpbm ----------------------------------------------------------------

namespace {

// Next header integer, skipping whitespace and '#' comments.
int read_header_int(std::istream& is, const std::string& path) {
  int c = is.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      break;
    }
    c = is.peek();
  }
  int v = 0;
  if (!(is >> v) || v <= 0) throw DataError(path + ": malformed Netpbm header");
  return v;
}

void write_p5(const std::string& path, int rows, int cols, int maxval,
              const std::vector<unsigned>& samples) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "P5\n" << cols << ' ' << rows << '\n' << maxval << '\n';
  for (unsigned s : samples) {
    if (maxval > 255) os.put(static_cast<char>((s >> 8) & 0xFF));
    os.put(static_cast<char>(s & 0xFF));
  }
  if (!os) throw IoError("failed writing " + path);
}

std::vector<unsigned> quantize(const Image& img, unsigned maxval) {
  std::vector<unsigned> out(img.size());
  for (std::size_t k = 0; k < img.size(); ++k) {
    const double v = std::clamp(img[k], 0.0, 1.0);
    out[k] = static_cast<unsigned>(std::lround(v * maxval));
  }
  return out;
}

}  // namespace

Image read_pnm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open image " + path);
  std::string magic(2, '\0');
  is.read(magic.data(), 2);
  if (magic != "P5" && magic != "P6") {
    throw DataError(path + ": unsupported image format (expected binary PGM/PPM)");
  }
  const int channels = magic == "P6" ? 3 : 1;
  const int cols = read_header_int(is, path);
  const int rows = read_header_int(is, path);
  const int maxval = read_header_int(is, path);
  if (maxval > 65535) throw DataError(path + ": maxval out of range");
  is.get();  // single whitespace before the raster
  const int bytes = maxval > 255 ? 2 : 1;
  Image img(rows, cols, 0.0);
  std::vector<unsigned char> raster(static_cast<std::size_t>(rows) * cols * channels * bytes);
  is.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (is.gcount() != static_cast<std::streamsize>(raster.size())) {
    throw DataError(path + ": truncated raster");
  }
  std::size_t pos = 0;
  for (std::size_t k = 0; k < img.size(); ++k) {
    double sum = 0.0;
    for (int ch = 0; ch < channels; ++ch) {
      unsigned s = raster[pos++];
      if (bytes == 2) s = (s << 8) | raster[pos++];
      sum += static_cast<double>(s);
    }
    img[k] = sum / (channels * static_cast<double>(maxval));
  }
  return img;
}

Mask read_mask(const std::string& path) {
  const Image img = read_pnm(path);
  Mask m(img.rows(), img.cols(), 0);
  for (std::size_t k = 0; k < img.size(); ++k) m[k] = img[k] > 0.0 ? 1 : 0;
  return m;
}

void write_pgm8(const std::string& path, const Image& img) {
  write_p5(path, img.rows(), img.cols(), 255, quantize(img, 255));
}

void write_pgm16(const std::string& path, const Image& img) {
  write_p5(path, img.rows(), img.cols(), 65535, quantize(img, 65535));
}

void write_mask(const std::string& path, const Mask& mask) {
  std::vector<unsigned> samples(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) samples[k] = mask[k] ? 255u : 0u;
  write_p5(path, mask.rows(), mask.cols(), 255, samples);
}

// --- resampling ------------------------------------------------------------

namespace {

// weights[o][i] = overlap length of output cell o with input cell i, in
// input-pixel units; each row sums to in / out.
std::vector<std::vector<std::pair<int, double>>> area_weights(int in, int out) {
  std::vector<std::vector<std::pair<int, double>>> w(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    for (int i = static_cast<int>(std::floor(lo)); i < in && i < hi; ++i) {
      const double overlap = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (overlap > 0.0) w[static_cast<std::size_t>(o)].emplace_back(i, overlap);
    }
  }
  return w;
}

}  // namespace

Image resize_area(const Image& img, int size) {
  if (img.rows() != img.cols()) {
    throw ArgumentError("resize expects a square image, got " + std::to_string(img.rows()) +
                        "x" + std::to_string(img.cols()));
  }
  if (size < 1) throw ArgumentError("target size must be positive");
  if (img.rows() == size) return img;
  const auto w = area_weights(img.rows(), size);
  const double scale = static_cast<double>(img.rows()) / size;
  const double norm = 1.0 / (scale * scale);
  Image out(size, size, 0.0);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double acc = 0.0;
      for (const auto& [ir, wr] : w[static_cast<std::size_t>(r)]) {
        for (const auto& [ic, wc] : w[static_cast<std::size_t>(c)]) acc += wr * wc * img(ir, ic);
      }
      out(r, c) = acc * norm;
    }
  }
  return out;
}

Mask resize_mask(const Mask& mask, int size, MaskResizeRule rule) {
  Image as_image(mask.rows(), mask.cols(), 0.0);
  for (std::size_t k = 0; k < mask.size(); ++k) as_image[k] = mask[k] ? 1.0 : 0.0;
  const Image area = resize_area(as_image, size);
  Mask out(size, size, 0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = rule == MaskResizeRule::Threshold ? (area[k] >= 0.5 - 1e-12) : (area[k] > 1e-12);
  }
  return out;
}

// --- loaders -----------------------------------------------------------------

namespace {

bool is_image_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

bool is_mask_file(const fs::path& p) {
  const std::string stem = p.stem().string();
  return stem.size() > 5 && stem.compare(stem.size() - 5, 5, "_mask") == 0;
}

// Image files of a directory, lexicographic by name, masks excluded.
std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path()) && !is_mask_file(entry.path())) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> list_subdirs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void require_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw LayoutError("missing dataset directory " + dir.string());
}

Image load_image(const fs::path& p, const LoaderOptions& opts) {
  const Image raw = read_pnm(p.string());
  if (raw.rows() != raw.cols()) {
    throw DataError(p.string() + ": images must be square");
  }
  return resize_area(raw, opts.image_size);
}

Mask load_mask(const fs::path& p, const LoaderOptions& opts) {
  const Mask raw = read_mask(p.string());
  if (raw.rows() != raw.cols()) throw DataError(p.string() + ": masks must be square");
  return resize_mask(raw, opts.image_size, opts.mask_rule);
}

// Seeded subsample of at most `cap` indices, returned in ascending order.
std::vector<std::size_t> subsample(std::size_t n, std::size_t cap, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (cap == 0 || n <= cap) return idx;
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<fs::path> pick(const std::vector<fs::path>& files,
                           const std::vector<std::size_t>& idx) {
  std::vector<fs::path> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(files[i]);
  return out;
}

}  // namespace

DatasetSplit load_mvtec_layout(const std::string& root, const std::string& category,
                               const LoaderOptions& opts) {
  const fs::path base = fs::path(root) / category;
  require_dir(base);
  require_dir(base / "train" / "good");
  require_dir(base / "test");

  std::mt19937_64 rng(opts.seed);
  DatasetSplit split;

  const auto train_files = list_images(base / "train" / "good");
  std::vector<std::size_t> order(train_files.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  const std::size_t n_train = std::min(opts.max_train, order.size());
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> spare_idx(order.begin() + n_train, order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(spare_idx.begin(), spare_idx.end());
  for (const auto& p : pick(train_files, train_idx)) split.train.push_back(load_image(p, opts));

  // Validation: val/good when present, otherwise training images left over.
  std::vector<fs::path> val_source;
  if (fs::is_directory(base / "val" / "good")) {
    val_source = list_images(base / "val" / "good");
  } else {
    val_source = pick(train_files, spare_idx);
  }
  for (const auto& p : pick(val_source, subsample(val_source.size(), opts.max_val, rng))) {
    split.val.push_back(load_image(p, opts));
  }

  std::vector<std::pair<fs::path, std::string>> test_files;  // (file, defect type)
  for (const auto& dir : list_subdirs(base / "test")) {
    for (const auto& p : list_images(dir)) test_files.emplace_back(p, dir.filename().string());
  }
  std::vector<std::size_t> test_idx(test_files.size());
  for (std::size_t i = 0; i < test_idx.size(); ++i) test_idx[i] = i;
  if (opts.max_test > 0) test_idx = subsample(test_files.size(), opts.max_test, rng);

  for (auto i : test_idx) {
    const auto& [file, type] = test_files[i];
    TestSample s;
    s.image = load_image(file, opts);
    s.name = type + "/" + file.stem().string();
    const fs::path gt_dir = base / "ground_truth" / type;
    fs::path mask_path;
    for (const auto& candidate : {gt_dir / (file.stem().string() + "_mask" + file.extension().string()),
                                  gt_dir / (file.stem().string() + "_mask.pgm"),
                                  gt_dir / file.filename()}) {
      if (fs::is_regular_file(candidate)) {
        mask_path = candidate;
        break;
      }
    }
    if (mask_path.empty()) {
      if (type != "good") throw DataError("no ground-truth mask for test image " + file.string());
      s.mask = Mask(opts.image_size, opts.image_size, 0);
    } else {
      s.mask = load_mask(mask_path, opts);
    }
    if (s.mask.rows() != s.image.rows() || s.mask.cols() != s.image.cols()) {
      throw DataError("mask and image shapes differ for " + file.string());
    }
    split.test.push_back(std::move(s));
  }
  return split;
}

DatasetSplit load_busi_layout(const std::string& root, const LoaderOptions& opts) {
  const fs::path base(root);
  require_dir(base / "normal");
  require_dir(base / "benign");
  require_dir(base / "malignant");
  std::mt19937_64 rng(opts.seed);
  DatasetSplit split;

  const auto normal = list_images(base / "normal");
  std::vector<std::size_t> order(normal.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  const std::size_t n_train = std::min(opts.max_train, order.size());
  const std::size_t n_val = std::min(opts.max_val, order.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Image img = load_image(normal[order[i]], opts);
    if (i < n_train) {
      split.train.push_back(img);
    } else if (i < n_train + n_val) {
      split.val.push_back(img);
    } else {
      split.test.push_back({img, Mask(opts.image_size, opts.image_size, 0),
                            "normal/" + normal[order[i]].stem().string()});
    }
  }

  std::vector<std::string> anomalous{"malignant"};
  if (opts.merge_benign_malignant) anomalous.insert(anomalous.begin(), "benign");
  for (const auto& cls : anomalous) {
    const auto files = list_images(base / cls);
    // Per-class cap keeps the class ratio of the full set.
    std::size_t cap = 0;
    if (opts.max_test > 0) {
      std::size_t total = 0;
      for (const auto& c : anomalous) total += list_images(base / c).size();
      cap = static_cast<std::size_t>(
          std::llround(static_cast<double>(opts.max_test) * files.size() / std::max<std::size_t>(total, 1)));
    }
    for (const auto& p : pick(files, subsample(files.size(), cap, rng))) {
      const fs::path mask_path = p.parent_path() / (p.stem().string() + "_mask" + p.extension().string());
      if (!fs::is_regular_file(mask_path)) throw DataError("no mask for " + p.string());
      TestSample s{load_image(p, opts), load_mask(mask_path, opts), cls + "/" + p.stem().string()};
      split.test.push_back(std::move(s));
    }
  }
  return split;
}

// --- synthetic data --------------------------------------------------------------

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Defect footprint in a size x size box.
Mask defect_footprint(DefectShape shape, int size) {
  Mask m(size, size, 0);
  switch (shape) {
    case DefectShape::Square:
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = 1;
      break;
    case DefectShape::Ellipse: {
      const double cy = (size - 1) / 2.0;
      const double cx = (size - 1) / 2.0;
      const double ry = size / 2.0;
      const double rx = size / 3.0;
      for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
          const double dy = (r - cy) / ry;
          const double dx = (c - cx) / rx;
          m(r, c) = dy * dy + dx * dx <= 1.0 ? 1 : 0;
        }
      }
      break;
    }
    case DefectShape::Scratch:
      // Two-pixel-wide diagonal stroke.
      for (int r = 0; r < size; ++r) {
        m(r, r) = 1;
        if (r + 1 < size) m(r, r + 1) = 1;
      }
      break;
  }
  return m;
}

}  // namespace

Image render_texture(Texture texture, int size, double noise, std::mt19937_64& rng) {
  Image img(size, size, 0.5);
  switch (texture) {
    case Texture::Stripes: {
      // Horizontal stripes: every row is constant.
      const double period = 4.0 + 4.0 * uniform01(rng);
      const double phase = 2.0 * std::numbers::pi * uniform01(rng);
      for (int r = 0; r < size; ++r) {
        const double v = 0.5 + 0.1 * std::sin(2.0 * std::numbers::pi * r / period + phase);
        for (int c = 0; c < size; ++c) img(r, c) = v;
      }
      break;
    }
    case Texture::Blobs: {
      Image acc(size, size, 0.0);
      for (int b = 0; b < 4; ++b) {
        const double cy = size * uniform01(rng);
        const double cx = size * uniform01(rng);
        const double sigma = size * (0.1 + 0.15 * uniform01(rng));
        for (int r = 0; r < size; ++r) {
          for (int c = 0; c < size; ++c) {
            const double d2 = (r - cy) * (r - cy) + (c - cx) * (c - cx);
            acc(r, c) += std::exp(-d2 / (2.0 * sigma * sigma));
          }
        }
      }
      const auto [lo, hi] = std::minmax_element(acc.data().begin(), acc.data().end());
      const double span = *hi - *lo;
      for (std::size_t k = 0; k < img.size(); ++k) {
        img[k] = 0.4 + 0.2 * (span > 0.0 ? (acc[k] - *lo) / span : 0.5);
      }
      break;
    }
    case Texture::UniformNoise:
      for (std::size_t k = 0; k < img.size(); ++k) img[k] = 0.4 + 0.2 * uniform01(rng);
      break;
  }
  if (noise > 0.0) {
    for (std::size_t k = 0; k < img.size(); ++k) img[k] += noise * (2.0 * uniform01(rng) - 1.0);
  }
  return img;
}

Mask inject_defect(Image& img, DefectShape shape, int defect_size, double delta,
                   std::mt19937_64& rng) {
  if (defect_size < 1 || defect_size > img.rows() || defect_size > img.cols()) {
    throw ArgumentError("defect of size " + std::to_string(defect_size) +
                        " does not fit a " + std::to_string(img.rows()) + "x" +
                        std::to_string(img.cols()) + " image");
  }
  const Mask footprint = defect_footprint(shape, defect_size);
  const int r0 = uniform_int(rng, 0, img.rows() - defect_size);
  const int c0 = uniform_int(rng, 0, img.cols() - defect_size);
  Mask mask(img.rows(), img.cols(), 0);
  if (delta == 0.0) return mask;
  for (int r = 0; r < defect_size; ++r) {
    for (int c = 0; c < defect_size; ++c) {
      if (!footprint(r, c)) continue;
      img(r0 + r, c0 + c) += (c % 2 == 0) ? delta : 0.5 * delta;
      mask(r0 + r, c0 + c) = 1;
    }
  }
  return mask;
}

DatasetSplit generate_synthetic(const SynthSpec& spec) {
  if (spec.n_train < 1 || spec.n_val < 0 || spec.n_test < 0) {
    throw ArgumentError("synthetic dataset needs n_train >= 1 and non-negative n_val, n_test");
  }
  if (spec.image_size < 2) throw ArgumentError("synthetic image size must be >= 2");
  if (spec.defect_size < 1 || spec.defect_size > spec.image_size) {
    throw ArgumentError("defect of size " + std::to_string(spec.defect_size) +
                        " is larger than the " + std::to_string(spec.image_size) + "px image");
  }
  if (std::abs(spec.defect_intensity_delta) > 0.35) {
    throw ArgumentError("defect intensity delta must lie in [-0.35, 0.35]");
  }
  if (spec.noise < 0.0 || spec.noise > 0.05) throw ArgumentError("noise must lie in [0, 0.05]");
  if (spec.anomalous_fraction < 0.0 || spec.anomalous_fraction > 1.0) {
    throw ArgumentError("anomalous fraction must lie in [0, 1]");
  }

  std::mt19937_64 rng(spec.seed);
  DatasetSplit split;
  for (int i = 0; i < spec.n_train; ++i) {
    split.train.push_back(render_texture(spec.texture, spec.image_size, spec.noise, rng));
  }
  for (int i = 0; i < spec.n_val; ++i) {
    split.val.push_back(render_texture(spec.texture, spec.image_size, spec.noise, rng));
  }
  const int n_anomalous =
      static_cast<int>(std::lround(spec.anomalous_fraction * static_cast<double>(spec.n_test)));
  for (int i = 0; i < spec.n_test; ++i) {
    TestSample s;
    s.image = render_texture(spec.texture, spec.image_size, spec.noise, rng);
    char stem[16];
    std::snprintf(stem, sizeof stem, "%03d", i);
    if (i < n_anomalous) {
      s.mask = inject_defect(s.image, spec.defect, spec.defect_size,
                             spec.defect_intensity_delta, rng);
      s.name = to_string(spec.defect) + "/" + stem;
    } else {
      s.mask = Mask(spec.image_size, spec.image_size, 0);
      s.name = std::string("good/") + stem;
    }
    split.test.push_back(std::move(s));
  }
  return split;
}

void write_mvtec_layout(const DatasetSplit& split, const std::string& root,
                        const std::string& category, std::uint64_t seed) {
  const fs::path base = fs::path(root) / category;
  std::error_code ec;
  fs::create_directories(base / "train" / "good", ec);
  fs::create_directories(base / "val" / "good", ec);
  if (ec) throw IoError("cannot create " + base.string() + ": " + ec.message());

  std::ostringstream manifest;
  manifest << "seed=" << seed << '\n';
  manifest << "n_train=" << split.train.size() << '\n';
  manifest << "n_val=" << split.val.size() << '\n';
  manifest << "n_test=" << split.test.size() << '\n';
  char stem[16];
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    std::snprintf(stem, sizeof stem, "%03zu.pgm", i);
    write_pgm8((base / "train" / "good" / stem).string(), split.train[i]);
    manifest << "train=train/good/" << stem << '\n';
  }
  for (std::size_t i = 0; i < split.val.size(); ++i) {
    std::snprintf(stem, sizeof stem, "%03zu.pgm", i);
    write_pgm8((base / "val" / "good" / stem).string(), split.val[i]);
    manifest << "val=val/good/" << stem << '\n';
  }
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const auto& s = split.test[i];
    const auto slash = s.name.find('/');
    const std::string type = slash == std::string::npos ? "good" : s.name.substr(0, slash);
    std::string name = slash == std::string::npos ? s.name : s.name.substr(slash + 1);
    if (name.empty()) {
      std::snprintf(stem, sizeof stem, "%03zu", i);
      name = stem;
    }
    fs::create_directories(base / "test" / type);
    write_pgm8((base / "test" / type / (name + ".pgm")).string(), s.image);
    manifest << "test=test/" << type << '/' << name << ".pgm\n";
    if (type != "good") {
      fs::create_directories(base / "ground_truth" / type);
      write_mask((base / "ground_truth" / type / (name + "_mask.pgm")).string(), s.mask);
    }
  }
  std::ofstream os(base / "manifest.txt", std::ios::binary | std::ios::trunc);
  os << manifest.str();
  if (!os) throw IoError("failed writing " + (base / "manifest.txt").string());
}

std::string to_string(Texture t) {
  switch (t) {
    case Texture::Stripes:
      return "stripes";
    case Texture::Blobs:
      return "blobs";
    case Texture::UniformNoise:
      return "uniform-noise";
  }
  return "stripes";
}

std::string to_string(DefectShape d) {
  switch (d) {
    case DefectShape::Square:
      return "square";
    case DefectShape::Ellipse:
      return "ellipse";
    case DefectShape::Scratch:
      return "scratch";
  }
  return "square";
}

Texture parse_texture(const std::string& s) {
  if (s == "stripes") return Texture::Stripes;
  if (s == "blobs") return Texture::Blobs;
  if (s == "uniform-noise") return Texture::UniformNoise;
  throw ConfigError("unknown texture '" + s + "' (stripes | blobs | uniform-noise)");
}

DefectShape parse_defect(const std::string& s) {
  if (s == "square") return DefectShape::Square;
  if (s == "ellipse") return DefectShape::Ellipse;
  if (s == "scratch") return DefectShape::Scratch;
  throw ConfigError("unknown defect '" + s + "' (square | ellipse | scratch)");
}

}  // namespace qpbae
