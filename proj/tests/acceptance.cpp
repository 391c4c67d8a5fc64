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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance [keep_dir]. With keep_dir the first
// end-to-end run is left there for inspection.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qpbae/ansatz.hpp"
#include "qpbae/baseline.hpp"
#include "qpbae/metrics.hpp"
#include "qpbae/patchflow.hpp"
#include "qpbae/run.hpp"
#include "qpbae/statevec.hpp"
#include "qpbae/train.hpp"

namespace fs = std::filesystem;
using namespace qpbae;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int g_failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  std::printf("%s criterion %2d: %s (%.1f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              seconds_since(t0), o.detail.empty() ? "" : " -- ", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- criteria 1-8: structure and oracles --------------------------------------------

Outcome parameter_counts() {
  Outcome o;
  const int want[] = {2, 6, 10};
  int i = 0;
  for (int p : {2, 4, 8}) {
    const int n = static_cast<int>(std::lround(std::log2(p * p)));
    const int law = 2 * (n - 1);
    const int got = mps_parameter_count(AutoencoderConfig::make(p, 1).n_data_qubits());
    o.require(got == law && got == want[i], "P=" + std::to_string(p) + " count " +
                                                std::to_string(got));
    ++i;
  }
  RunConfig c;
  c.patch_size = 8;
  c.bottleneck = 2;
  o.require(model_parameter_count(c) == 10, "P=8 model does not report 10 parameters");
  return o;
}

Outcome compression() {
  Outcome o;
  struct Row {
    int p, bd;
    long num, den;  // percent as an exact fraction
  };
  const Row rows[] = {{4, 1, 875, 10}, {4, 2, 75, 1}, {8, 1, 96875, 1000}, {8, 2, 9375, 100}};
  for (const Row& r : rows) {
    // Rational reference: 100 (P^2 - 2^BD) / P^2.
    const long p2 = r.p * r.p;
    const long ref_num = 100 * (p2 - (1L << r.bd));
    o.require(ref_num * r.den == r.num * p2, "reference fraction");
    const double got = AutoencoderConfig::make(r.p, r.bd).compression_percent();
    o.require(got * static_cast<double>(r.den) == static_cast<double>(r.num),
              "P=" + std::to_string(r.p) + " BD=" + std::to_string(r.bd) + " gave " +
                  fmt("%.17g", got));
  }
  // 96.87 is the two-decimal truncation of the P=8, BD=1 value.
  o.require(std::trunc(AutoencoderConfig::make(8, 1).compression_percent() * 100.0) == 9687.0,
            "truncation");
  return o;
}

Outcome patch_counts() {
  Outcome o;
  for (int p : {2, 4, 8}) {
    for (int s : {1, 2, 4, 8}) {
      if (s > p) continue;  // nine (P, S) pairs
      const auto windows = oracle::sliding_windows(32, p, s);
      const Image img(32, 32, 0.5);
      const std::size_t got = extract_patches(img, p, s).size();
      o.require(got == windows.size() && patch_count(32, p, s) == static_cast<int>(got),
                "P=" + std::to_string(p) + " S=" + std::to_string(s));
    }
  }
  return o;
}

Outcome swap_test_identity() {
  Outcome o;
  oracle::Gen g(1001);
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto u = g.unit_vector(std::size_t{1} << n);
      const auto v = g.unit_vector(std::size_t{1} << n);
      StateVector reg = tensor(tensor(from_amplitudes(u, n), from_amplitudes(v, n)), StateVector(1));
      const int anc = 2 * n;
      reg.hadamard(anc);
      for (int i = 0; i < n; ++i) reg.cswap(anc, i, n + i);
      reg.hadamard(anc);
      const double overlap = oracle::dot(u, v);
      worst = std::max(worst, std::abs(reg.prob_zero(anc) - 0.5 * (1.0 + overlap * overlap)));
    }
  }
  o.require(worst < 1e-9, "max deviation " + fmt("%.3g", worst));
  o.detail = o.pass ? "max deviation " + fmt("%.2g", worst) : o.detail;
  return o;
}

Outcome adjointness() {
  Outcome o;
  oracle::Gen g(1002);
  double worst = 0.0;
  for (int p : {2, 4, 8}) {
    const int n = AutoencoderConfig::make(p, 1).n_data_qubits();
    for (int trial = 0; trial < 100; ++trial) {
      const StateVector s = from_amplitudes(g.unit_vector(std::size_t{1} << n), n);
      const MpsParams th(n, g.angles(static_cast<std::size_t>(mps_parameter_count(n))));
      const StateVector back = apply_decoder(apply_encoder(s, th), th);
      for (std::size_t k = 0; k < s.dim(); ++k) worst = std::max(worst, std::abs(back[k] - s[k]));
    }
  }
  o.require(worst < 1e-10, "max deviation " + fmt("%.3g", worst));
  o.detail = o.pass ? "max deviation " + fmt("%.2g", worst) : o.detail;
  return o;
}

Outcome gradients() {
  Outcome o;
  oracle::Gen g(1003);
  double worst_q = 0.0;
  for (int p : {2, 4, 8}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int bd = p == 2 ? 1 : g.integer(1, 2);
      const auto cfg = AutoencoderConfig::make(p, bd);
      const int h = g.integer(p, p + 6);
      const int s = g.integer(1, p);
      const Image img = g.image(h);
      auto th = g.angles(static_cast<std::size_t>(mps_parameter_count(cfg.n_data_qubits())));
      std::vector<double> grad(th.size());
      image_cost_and_gradient(img, th, cfg, p, s, grad);
      for (std::size_t k = 0; k < th.size(); ++k) {
        auto up = th;
        auto dn = th;
        up[k] += 1e-4;
        dn[k] -= 1e-4;
        const double fd = (image_cost(img, up, cfg, p, s) - image_cost(img, dn, cfg, p, s)) / 2e-4;
        worst_q = std::max(worst_q, std::abs(grad[k] - fd));
      }
    }
  }
  o.require(worst_q < 1e-6, "quantum abs error " + fmt("%.3g", worst_q));

  double worst_c = 0.0;
  std::mt19937_64 rng(1004);
  for (int trial = 0; trial < 6; ++trial) {
    const int p = trial % 2 == 0 ? 4 : 8;
    const DenseAutoencoder m = DenseAutoencoder::random(p * p, 4, rng);
    const Image img = g.image(16, 0.1, 0.9);
    std::vector<double> grad(m.parameter_count());
    baseline_cost_and_gradient(img, m, p, p / 2, grad);
    for (std::size_t k = 0; k < grad.size(); k += 3) {
      std::vector<double> up(m.params().begin(), m.params().end());
      std::vector<double> dn = up;
      up[k] += 1e-6;
      dn[k] -= 1e-6;
      const double fd = (baseline_image_cost(img, DenseAutoencoder(p * p, 4, up), p, p / 2) -
                         baseline_image_cost(img, DenseAutoencoder(p * p, 4, dn), p, p / 2)) /
                        2e-6;
      worst_c = std::max(worst_c, std::abs(grad[k] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  o.require(worst_c < 1e-5, "classical rel error " + fmt("%.3g", worst_c));
  if (o.pass) {
    o.detail = "quantum abs " + fmt("%.2g", worst_q) + ", classical rel " + fmt("%.2g", worst_c);
  }
  return o;
}

Outcome map_assembly() {
  Outcome o;
  oracle::Gen g(1005);
  for (int trial = 0; trial < 300; ++trial) {
    const int h = g.integer(8, 32);
    const int p = std::vector<int>{2, 4, 8}[static_cast<std::size_t>(g.integer(0, 2))];
    const int s = trial % 3 == 0 ? p : g.integer(1, p);  // tiling and overlap
    const auto anchors = patch_anchors(h, p, s);
    std::vector<double> scores(anchors.size());
    for (auto& x : scores) x = g.uniform();
    const ScoreMap got = assemble_map(scores, anchors, h, p);
    const auto want = oracle::brute_assemble(scores, h, p, s);
    for (std::size_t k = 0; k < got.values.size(); ++k) {
      if (got.values[k] != want.values[k] || got.counts[k] != want.counts[k]) {
        o.require(false, "mismatch at H=" + std::to_string(h) + " P=" + std::to_string(p) +
                             " S=" + std::to_string(s));
        return o;
      }
    }
  }
  const auto anchors = patch_anchors(4, 2, 1);
  std::vector<double> scores(anchors.size());
  for (std::size_t k = 0; k < scores.size(); ++k) scores[k] = static_cast<double>(k);
  o.require(assemble_map(scores, anchors, 4, 2).values(1, 1) == 2.0, "center pixel");
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  oracle::Gen g(1006);
  double worst_auroc = 0.0;
  double worst_aupro = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int side = g.integer(2, 14);  // <= 196 pixels
    const int levels = g.integer(2, 20);
    Image v = g.image(side);
    for (auto& x : v.data()) x = std::floor(x * levels) / levels;
    const Mask gt = g.mask(side, side, 0.3);
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t k = 0; k < v.size(); ++k) (gt[k] ? pos : neg).push_back(v[k]);
    if (pos.empty() || neg.empty()) continue;
    const ScoreMap m = full_coverage_map(v);
    worst_auroc = std::max(worst_auroc, std::abs(pixel_auroc(std::span(&m, 1), std::span(&gt, 1)) -
                                                 oracle::pair_auroc(pos, neg)));
  }
  for (int trial = 0; trial < 150; ++trial) {
    std::vector<Image> raw;
    std::vector<ScoreMap> maps;
    std::vector<Mask> gts;
    for (int i = 0; i < 2; ++i) {
      Image v = g.image(8);
      for (auto& x : v.data()) x = std::floor(x * 12) / 12;
      raw.push_back(v);
      maps.push_back(full_coverage_map(v));
      Mask gt = g.mask(8, 8, 0.15);
      gt(0, 0) = 1;
      gt(7, 7) = 0;
      gts.push_back(gt);
    }
    worst_aupro =
        std::max(worst_aupro, std::abs(aupro(maps, gts, 0.3) - oracle::exhaustive_aupro(raw, gts, 0.3)));
  }
  o.require(worst_auroc < 1e-12, "AUROC deviation " + fmt("%.3g", worst_auroc));
  o.require(worst_aupro < 1e-9, "AUPRO deviation " + fmt("%.3g", worst_aupro));

  for (int trial = 0; trial < 500; ++trial) {
    const Mask a = g.mask(6, 6, g.uniform());
    const Mask b = g.mask(6, 6, g.uniform());
    const OverlapCounts c = overlap_counts(a, b);
    // With u = I / U, 2u / (1 + u) = 2I / (U + I), and U + I = |A| + |B|:
    // the identity holds in exact integer arithmetic, and in floating point
    // up to rounding of the two divisions.
    const std::size_t i = c.intersection;
    const std::size_t u = c.union_size();
    if (u == 0) continue;
    const double uu = iou(c);
    o.require(u + i == c.predicted + c.truth, "Dice/IoU identity (integer)");
    o.require(std::abs(dice(c) - 2.0 * uu / (1.0 + uu)) <= 4e-16, "Dice/IoU identity");
  }
  const Mask empty(4, 4, 0);
  o.require(dice(empty, empty) == 1.0 && iou(empty, empty) == 1.0, "both-empty convention");
  return o;
}

// --- criteria 9-11: end-to-end runs ----------------------------------------------------

RunConfig synthetic_config(const std::string& out) {
  RunConfig c;
  c.synth.n_train = 100;
  c.synth.n_val = 25;
  c.synth.n_test = 50;
  c.synth.image_size = 32;
  c.synth.defect = DefectShape::Square;
  c.seeds = {0, 1, 2};
  c.out = out;
  return c;
}

RunConfig quantum_p4_config(const std::string& out) {
  RunConfig c = synthetic_config(out);
  c.patch_size = 4;
  c.stride = 1;
  c.bottleneck = 2;
  return c;
}

RunConfig compare_p8_config(const std::string& out) {
  RunConfig c = synthetic_config(out);
  c.patch_size = 8;
  c.stride = 4;
  c.bottleneck = 2;
  return c;
}

struct EndToEnd {
  std::vector<TrainResult> trained;
  std::vector<SeedReport> reports;
};

EndToEnd run_p4(const std::string& out) {
  const RunConfig cfg = quantum_p4_config(out);
  const DatasetSplit data = load_dataset(cfg);
  EndToEnd e;
  e.trained = run_train(cfg, data);
  e.reports = run_evaluate(cfg, data);
  return e;
}

Comparison run_p8(const std::string& out) {
  const RunConfig cfg = compare_p8_config(out);
  return run_compare(cfg, load_dataset(cfg));
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// Relative paths of every regular file under root, sorted.
std::vector<fs::path> tree(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome end_to_end(const fs::path& work, EndToEnd& first) {
  Outcome o;
  first = run_p4((work / "run1" / "p4").string());
  std::string per_seed;
  for (std::size_t i = 0; i < first.trained.size(); ++i) {
    const auto& h = first.trained[i].state.history;
    const auto& r = first.reports[i];
    const std::string tag = "seed " + std::to_string(r.seed);
    o.require(h.size() == 21, tag + ": expected 20 epochs");
    if (h.size() == 21) {
      o.require(h[20].train_loss < h[1].train_loss,
                tag + ": epoch-20 loss " + fmt("%.4g", h[20].train_loss) + " >= epoch-1 loss " +
                    fmt("%.4g", h[1].train_loss));
    }
    o.require(r.report.auroc >= 0.75, tag + ": AUROC " + fmt("%.4f", r.report.auroc));
    o.require(r.report.aupro >= 0.5, tag + ": AUPRO " + fmt("%.4f", r.report.aupro));
    o.require(r.mean_inside > r.mean_outside, tag + ": inside " + fmt("%.4g", r.mean_inside) +
                                                  " <= outside " + fmt("%.4g", r.mean_outside));
    per_seed += (per_seed.empty() ? "" : ", ") + tag + " AUROC " + fmt("%.3f", r.report.auroc) +
                " AUPRO " + fmt("%.3f", r.report.aupro);
  }

  // Forward pass over the 841 patches of one 32x32 image at P=4, S=1.
  const RunConfig cfg = quantum_p4_config("unused");
  const DatasetSplit data = generate_synthetic(cfg.synth);
  const AutoencoderConfig acfg = autoencoder_config(cfg);
  const MpsParams params(acfg.n_data_qubits(), first.trained[0].checkpoint.best_params);
  double best_ms = 1e300;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = Clock::now();
    const ScoreMap m = infer_map(data.test[0].image, params, acfg, 4, 1);
    best_ms = std::min(best_ms, 1e3 * seconds_since(t0));
    if (m.covered_pixels() != 1024) o.require(false, "coverage");
  }
  o.require(best_ms < 50.0, "841-patch forward pass took " + fmt("%.1f", best_ms) + " ms");
  if (o.pass) o.detail = per_seed + "; 841-patch forward " + fmt("%.1f", best_ms) + " ms";
  return o;
}

Outcome comparison(const fs::path& work) {
  Outcome o;
  const Comparison cmp = run_p8((work / "run1" / "p8").string());
  o.require(cmp.quantum_params == 10, "quantum parameter count " +
                                          std::to_string(cmp.quantum_params));
  o.require(cmp.rows.size() == 5, "expected 3 seed rows plus mean and std");
  o.require(fs::is_regular_file(work / "run1" / "p8" / "compare.csv"), "compare.csv missing");
  if (!o.pass) return o;
  for (const auto& r : cmp.rows) {
    std::printf("     %-5s quantum AUROC %.4f AUPRO %.4f | classical AUROC %.4f AUPRO %.4f\n",
                r.label.c_str(), r.quantum_auroc, r.quantum_aupro, r.classical_auroc,
                r.classical_aupro);
  }
  o.detail = "quantum params " + std::to_string(cmp.quantum_params) + ", classical params " +
             std::to_string(cmp.classical_params) + "; AUROC std quantum " +
             fmt("%.4f", cmp.rows[4].quantum_auroc) + " vs classical " +
             fmt("%.4f", cmp.rows[4].classical_auroc) + " (observation)";
  return o;
}

Outcome determinism(const fs::path& work) {
  Outcome o;
  run_p4((work / "run2" / "p4").string());
  run_p8((work / "run2" / "p8").string());
  std::size_t compared = 0;
  for (const char* part : {"p4", "p8"}) {
    const fs::path a = work / "run1" / part;
    const fs::path b = work / "run2" / part;
    const auto ta = tree(a);
    const auto tb = tree(b);
    o.require(ta == tb, std::string(part) + ": different file sets");
    if (ta != tb) continue;
    for (const auto& rel : ta) {
      ++compared;
      // Manifests name the output directory; everything else must match byte for byte.
      std::string x = slurp(a / rel);
      std::string y = slurp(b / rel);
      if (rel.filename() == "manifest.txt") {
        const auto strip = [](std::string s) {
          std::istringstream is(s);
          std::string line;
          std::string out;
          while (std::getline(is, line)) {
            if (line.rfind("out =", 0) != 0) out += line + '\n';
          }
          return out;
        };
        x = strip(x);
        y = strip(y);
      }
      o.require(x == y, std::string(part) + "/" + rel.string() + " differs");
    }
  }
  if (o.pass) o.detail = std::to_string(compared) + " files identical";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1])
                                 : fs::temp_directory_path() /
                                       ("qpbae_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  report(1, "parameter-count law {2, 6, 10}", parameter_counts);
  report(2, "compression percentages", compression);
  report(3, "patch-count law vs sliding-window oracle", patch_counts);
  report(4, "SWAP-test overlap identity, n = 1..6", swap_test_identity);
  report(5, "decoder undoes encoder", adjointness);
  report(6, "parameter-shift and backprop gradients vs finite differences", gradients);
  report(7, "map assembly vs brute force", map_assembly);
  report(8, "AUROC, AUPRO, Dice/IoU oracles", metric_oracles);
  EndToEnd first;
  report(9, "synthetic end-to-end, P=4 S=1 BD=2, seeds 0-2",
         [&] { return end_to_end(work, first); });
  report(10, "quantum vs classical at P=8 S=4, 93.75% compression, seeds 0-2",
         [&] { return comparison(work); });
  report(11, "bit-identical rerun of criteria 9-10", [&] { return determinism(work); });

  if (argc <= 1) fs::remove_all(work);
  std::printf("%s: %d of 11 criteria failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
