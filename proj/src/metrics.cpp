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

#include "qpbae/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "qpbae/errors.hpp"

namespace qpbae {

namespace {

void check_same_shape(const Mask& a, const Mask& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("mask shapes differ: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

void check_aligned(std::span<const ScoreMap> maps, std::span<const Mask> gts) {
  if (maps.size() != gts.size()) {
    throw DimensionError("got " + std::to_string(maps.size()) + " maps for " +
                         std::to_string(gts.size()) + " masks");
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].values.rows() != gts[i].rows() || maps[i].values.cols() != gts[i].cols()) {
      throw DimensionError("map " + std::to_string(i) + " does not match its mask shape");
    }
  }
}

// Ground truth restricted to covered pixels.
Mask covered_truth(const ScoreMap& map, const Mask& gt) {
  Mask out = gt;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (map.counts[k] <= 0) out[k] = 0;
  }
  return out;
}

struct ScoredPixel {
  double score;
  bool anomalous;
};

double auroc_of(std::vector<ScoredPixel> pixels) {
  std::size_t n_pos = 0;
  for (const auto& p : pixels) n_pos += p.anomalous ? 1 : 0;
  const std::size_t n_neg = pixels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedMetricError("AUROC needs both anomalous and normal pixels");
  }
  std::stable_sort(pixels.begin(), pixels.end(),
                   [](const ScoredPixel& a, const ScoredPixel& b) { return a.score > b.score; });
  // Walk thresholds from high to low; each tie group is one ROC step.
  double area = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < pixels.size();) {
    std::size_t j = i;
    std::size_t dtp = 0;
    std::size_t dfp = 0;
    while (j < pixels.size() && pixels[j].score == pixels[i].score) {
      (pixels[j].anomalous ? dtp : dfp) += 1;
      ++j;
    }
    area += static_cast<double>(dfp) * (static_cast<double>(tp) + 0.5 * static_cast<double>(dtp));
    tp += dtp;
    fp += dfp;
    i = j;
  }
  return area / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace

OverlapCounts overlap_counts(const Mask& pred, const Mask& gt) {
  check_same_shape(pred, gt);
  OverlapCounts c;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const bool a = pred[k] != 0;
    const bool b = gt[k] != 0;
    c.predicted += a;
    c.truth += b;
    c.intersection += (a && b);
  }
  return c;
}

double iou(const OverlapCounts& c) {
  const std::size_t u = c.union_size();
  if (u == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(u);
}

double dice(const OverlapCounts& c) {
  const std::size_t denom = c.predicted + c.truth;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.intersection) / static_cast<double>(denom);
}

double iou(const Mask& pred, const Mask& gt) { return iou(overlap_counts(pred, gt)); }

double dice(const Mask& pred, const Mask& gt) { return dice(overlap_counts(pred, gt)); }

Mask binarize(const ScoreMap& map, double threshold) {
  Mask out(map.values.rows(), map.values.cols(), 0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = (map.counts[k] > 0 && map.values[k] >= threshold) ? 1 : 0;
  }
  return out;
}

std::vector<double> default_thresholds(int n) {
  if (n < 2) throw ArgumentError("need at least two thresholds");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  return t;
}

ThresholdCurves threshold_sweep(std::span<const ScoreMap> maps, std::span<const Mask> gts,
                                std::span<const double> thresholds) {
  check_aligned(maps, gts);
  if (maps.empty()) throw UndefinedMetricError("threshold sweep over an empty image set");
  std::vector<Mask> truth;
  truth.reserve(gts.size());
  for (std::size_t i = 0; i < maps.size(); ++i) truth.push_back(covered_truth(maps[i], gts[i]));

  ThresholdCurves curves;
  curves.thresholds.assign(thresholds.begin(), thresholds.end());
  for (double t : thresholds) {
    double d_sum = 0.0;
    double u_sum = 0.0;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const OverlapCounts c = overlap_counts(binarize(maps[i], t), truth[i]);
      d_sum += dice(c);
      u_sum += iou(c);
    }
    curves.dice.push_back(d_sum / static_cast<double>(maps.size()));
    curves.iou.push_back(u_sum / static_cast<double>(maps.size()));
  }
  return curves;
}

double pixel_auroc(std::span<const ScoreMap> maps, std::span<const Mask> gts,
                   AurocPooling pooling) {
  check_aligned(maps, gts);
  const auto collect = [&](std::size_t i, std::vector<ScoredPixel>& out) {
    for (std::size_t k = 0; k < maps[i].values.size(); ++k) {
      if (maps[i].counts[k] > 0) out.push_back({maps[i].values[k], gts[i][k] != 0});
    }
  };
  if (pooling == AurocPooling::Pooled) {
    std::vector<ScoredPixel> pixels;
    for (std::size_t i = 0; i < maps.size(); ++i) collect(i, pixels);
    return auroc_of(std::move(pixels));
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    std::vector<ScoredPixel> pixels;
    collect(i, pixels);
    const auto pos = std::count_if(pixels.begin(), pixels.end(),
                                   [](const ScoredPixel& p) { return p.anomalous; });
    if (pos == 0 || static_cast<std::size_t>(pos) == pixels.size()) continue;
    sum += auroc_of(std::move(pixels));
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("no image contains both anomalous and normal pixels");
  return sum / static_cast<double>(n);
}

std::vector<Mask> connected_components(const Mask& mask, Connectivity connectivity) {
  const int rows = mask.rows();
  const int cols = mask.cols();
  Grid<int> label(rows, cols, -1);
  std::vector<Mask> components;
  std::deque<std::pair<int, int>> queue;
  for (int r0 = 0; r0 < rows; ++r0) {
    for (int c0 = 0; c0 < cols; ++c0) {
      if (mask(r0, c0) == 0 || label(r0, c0) >= 0) continue;
      const int id = static_cast<int>(components.size());
      Mask comp(rows, cols, 0);
      label(r0, c0) = id;
      queue.emplace_back(r0, c0);
      while (!queue.empty()) {
        const auto [r, c] = queue.front();
        queue.pop_front();
        comp(r, c) = 1;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            if (connectivity == Connectivity::Four && dr != 0 && dc != 0) continue;
            const int rr = r + dr;
            const int cc = c + dc;
            if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
            if (mask(rr, cc) == 0 || label(rr, cc) >= 0) continue;
            label(rr, cc) = id;
            queue.emplace_back(rr, cc);
          }
        }
      }
      components.push_back(std::move(comp));
    }
  }
  return components;
}

double truncated_trapezoid(std::span<const double> x, std::span<const double> y,
                           double x_limit) {
  if (x.size() != y.size()) throw DimensionError("curve coordinate lengths differ");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double x0 = x[i - 1];
    const double x1 = x[i];
    if (x0 >= x_limit) break;
    if (x1 <= x_limit) {
      area += (x1 - x0) * (y[i - 1] + y[i]) * 0.5;
    } else {
      const double y_lim = y[i - 1] + (y[i] - y[i - 1]) * (x_limit - x0) / (x1 - x0);
      area += (x_limit - x0) * (y[i - 1] + y_lim) * 0.5;
      break;
    }
  }
  return area;
}

double aupro(std::span<const ScoreMap> maps, std::span<const Mask> gts, double fpr_limit,
             ProAveraging averaging, Connectivity connectivity) {
  check_aligned(maps, gts);
  if (!(fpr_limit > 0.0) || fpr_limit > 1.0) throw ArgumentError("FPR limit must lie in (0, 1]");

  struct Pixel {
    double score;
    int component;  // -1 for normal pixels
  };
  std::vector<Pixel> pixels;
  std::vector<double> increment;  // PRO gained per detected pixel of each component
  std::size_t n_normal = 0;

  std::vector<std::vector<Mask>> per_image;
  std::size_t n_components = 0;
  std::size_t n_images_with_components = 0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    per_image.push_back(connected_components(covered_truth(maps[i], gts[i]), connectivity));
    n_components += per_image.back().size();
    n_images_with_components += per_image.back().empty() ? 0 : 1;
  }
  if (n_components == 0) throw UndefinedMetricError("AUPRO needs at least one anomalous region");

  for (std::size_t i = 0; i < maps.size(); ++i) {
    Grid<int> comp_of(maps[i].values.rows(), maps[i].values.cols(), -1);
    for (const auto& comp : per_image[i]) {
      const int id = static_cast<int>(increment.size());
      const auto size = std::count(comp.data().begin(), comp.data().end(), std::uint8_t{1});
      const double weight = averaging == ProAveraging::PerComponent
                                ? 1.0 / static_cast<double>(n_components)
                                : 1.0 / (static_cast<double>(n_images_with_components) *
                                         static_cast<double>(per_image[i].size()));
      increment.push_back(weight / static_cast<double>(size));
      for (std::size_t k = 0; k < comp.size(); ++k) {
        if (comp[k]) comp_of[k] = id;
      }
    }
    for (std::size_t k = 0; k < maps[i].values.size(); ++k) {
      if (maps[i].counts[k] <= 0) continue;
      // Anomalous pixels are scored through their component; everything else is normal.
      if (gts[i][k] != 0) {
        pixels.push_back({maps[i].values[k], comp_of[k]});
      } else {
        pixels.push_back({maps[i].values[k], -1});
        ++n_normal;
      }
    }
  }
  if (n_normal == 0) throw UndefinedMetricError("AUPRO needs normal pixels to measure FPR");

  std::stable_sort(pixels.begin(), pixels.end(),
                   [](const Pixel& a, const Pixel& b) { return a.score > b.score; });
  std::vector<double> fpr{0.0};
  std::vector<double> pro{0.0};
  std::size_t fp = 0;
  double pro_now = 0.0;
  for (std::size_t i = 0; i < pixels.size();) {
    std::size_t j = i;
    while (j < pixels.size() && pixels[j].score == pixels[i].score) {
      if (pixels[j].component < 0) {
        ++fp;
      } else {
        pro_now += increment[static_cast<std::size_t>(pixels[j].component)];
      }
      ++j;
    }
    fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_normal));
    pro.push_back(pro_now);
    i = j;
  }
  return truncated_trapezoid(fpr, pro, fpr_limit) / fpr_limit;
}

EvalReport evaluate(std::span<const ScoreMap> maps, std::span<const Mask> gts,
                    const EvalOptions& opts) {
  if (maps.empty()) throw UndefinedMetricError("evaluation over an empty test set");
  EvalReport report;
  report.auroc = pixel_auroc(maps, gts, opts.auroc_pooling);
  report.aupro = aupro(maps, gts, opts.fpr_limit, opts.pro_averaging);
  report.curves = threshold_sweep(maps, gts, opts.thresholds);
  return report;
}

void write_report_csv(const std::string& path, const EvalReport& report) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  char buf[160];
  os << "auroc,aupro\n";
  std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", report.auroc, report.aupro);
  os << buf << "threshold,dice,iou\n";
  for (std::size_t i = 0; i < report.curves.thresholds.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", report.curves.thresholds[i],
                  report.curves.dice[i], report.curves.iou[i]);
    os << buf;
  }
  if (!os) throw IoError("failed writing " + path);
}

std::string report_summary(const EvalReport& report) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "pixel AUROC : %.4f\nAUPRO@0.3   : %.4f\n", report.auroc,
                report.aupro);
  os << buf;
  if (!report.curves.thresholds.empty()) {
    const auto best = std::max_element(report.curves.dice.begin(), report.curves.dice.end()) -
                      report.curves.dice.begin();
    std::snprintf(buf, sizeof buf, "best Dice   : %.4f at threshold %.2f (IoU %.4f)\n",
                  report.curves.dice[static_cast<std::size_t>(best)],
                  report.curves.thresholds[static_cast<std::size_t>(best)],
                  report.curves.iou[static_cast<std::size_t>(best)]);
    os << buf;
  }
  return os.str();
}

}  // namespace qpbae
