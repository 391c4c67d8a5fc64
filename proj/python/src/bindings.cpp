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

// Python view of the core: images and masks cross as 2-D numpy arrays,
// angles as 1-D float arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <vector>

#include "qpbae/ansatz.hpp"
#include "qpbae/baseline.hpp"
#include "qpbae/dataio.hpp"
#include "qpbae/errors.hpp"
#include "qpbae/metrics.hpp"
#include "qpbae/patchflow.hpp"
#include "qpbae/run.hpp"
#include "qpbae/train.hpp"

namespace py = pybind11;
using namespace qpbae;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Image to_image(const F64& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D image array");
  const auto rows = static_cast<int>(a.shape(0));
  const auto cols = static_cast<int>(a.shape(1));
  return Image(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

Mask to_mask(const py::array& a) {
  const U8 b = py::cast<U8>(py::array(a.attr("astype")("bool").attr("astype")("uint8")));
  if (b.ndim() != 2) throw DimensionError("expected a 2-D mask array");
  return Mask(static_cast<int>(b.shape(0)), static_cast<int>(b.shape(1)),
              std::vector<std::uint8_t>(b.data(), b.data() + b.size()));
}

template <typename T>
py::array_t<T> to_array(const Grid<T>& g) {
  py::array_t<T> out({g.rows(), g.cols()});
  std::copy(g.data().begin(), g.data().end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const F64& a) { return {a.data(), a.data() + a.size()}; }

// Uncovered pixels become NaN so they cannot be mistaken for scores.
py::array_t<double> map_to_array(const ScoreMap& m) {
  py::array_t<double> out({m.values.rows(), m.values.cols()});
  double* p = out.mutable_data();
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    p[k] = m.counts[k] > 0 ? m.values[k] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

ScoreMap from_array(const F64& a) {
  Image v = to_image(a);
  Grid<int> counts(v.rows(), v.cols(), 1);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (std::isnan(v[k])) {
      counts[k] = 0;
      v[k] = 0.0;
    }
  }
  return {std::move(v), std::move(counts)};
}

std::vector<ScoreMap> maps_from(const std::vector<F64>& arrays) {
  std::vector<ScoreMap> out;
  for (const auto& a : arrays) out.push_back(from_array(a));
  return out;
}

std::vector<Mask> masks_from(const std::vector<py::array>& arrays) {
  std::vector<Mask> out;
  for (const auto& a : arrays) out.push_back(to_mask(a));
  return out;
}

std::vector<Image> images_from(const std::vector<F64>& arrays) {
  std::vector<Image> out;
  for (const auto& a : arrays) out.push_back(to_image(a));
  return out;
}

py::list images_to(const std::vector<Image>& images) {
  py::list out;
  for (const auto& img : images) out.append(to_array(img));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum patch-based autoencoder for anomaly segmentation";

  static py::exception<Error> base(m, "QpbaeError", PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<ArgumentError> argument(m, "ArgumentError", base.ptr());
  static py::exception<DimensionError> dimension(m, "DimensionError", base.ptr());
  static py::exception<UndefinedMetricError> undefined(m, "UndefinedMetricError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const ArgumentError& e) {
      py::set_error(argument, e.what());
    } catch (const DimensionError& e) {
      py::set_error(dimension, e.what());
    } catch (const UndefinedMetricError& e) {
      py::set_error(undefined, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("version", &version);

  py::class_<AutoencoderConfig>(m, "AutoencoderConfig")
      .def(py::init(&AutoencoderConfig::make), py::arg("patch_size"), py::arg("bottleneck"))
      .def_readonly("patch_size", &AutoencoderConfig::patch_size)
      .def_readonly("bottleneck", &AutoencoderConfig::bottleneck_dim)
      .def_readwrite("reset_trash_before_decode", &AutoencoderConfig::reset_trash_before_decode)
      .def_readwrite("zero_patch_scores_one", &AutoencoderConfig::zero_patch_scores_one)
      .def_property_readonly("n_data_qubits", &AutoencoderConfig::n_data_qubits)
      .def_property_readonly("n_trash", &AutoencoderConfig::n_trash)
      .def_property_readonly("n_params",
                             [](const AutoencoderConfig& c) {
                               return mps_parameter_count(c.n_data_qubits());
                             })
      .def_property_readonly("compression_percent", &AutoencoderConfig::compression_percent);

  m.def("mps_parameter_count", &mps_parameter_count, py::arg("n_qubits"));
  m.def("patch_count", &patch_count, py::arg("image_size"), py::arg("patch_size"),
        py::arg("stride"));

  m.def(
      "extract_patches",
      [](const F64& img, int p, int s) {
        const PatchGrid g = extract_patches(to_image(img), p, s);
        py::array_t<double> patches({static_cast<py::ssize_t>(g.size()),
                                     static_cast<py::ssize_t>(p * p)});
        py::array_t<int> anchors({static_cast<py::ssize_t>(g.size()), py::ssize_t{2}});
        double* dp = patches.mutable_data();
        int* ap = anchors.mutable_data();
        for (std::size_t i = 0; i < g.size(); ++i) {
          std::copy(g.patches[i].begin(), g.patches[i].end(), dp + i * p * p);
          ap[2 * i] = g.anchors[i].row;
          ap[2 * i + 1] = g.anchors[i].col;
        }
        return py::make_tuple(patches, anchors);
      },
      py::arg("image"), py::arg("patch_size"), py::arg("stride"),
      "(patches [N, P*P], anchors [N, 2]) in raster order.");

  m.def(
      "assemble_map",
      [](const F64& scores, int image_size, int p, int s) {
        return map_to_array(assemble_map(to_vector(scores), patch_anchors(image_size, p, s),
                                         image_size, p));
      },
      py::arg("scores"), py::arg("image_size"), py::arg("patch_size"), py::arg("stride"),
      "Per-pixel mean of the covering patch scores; NaN where uncovered.");

  m.def(
      "training_fidelity",
      [](const F64& patch, const F64& angles, const AutoencoderConfig& cfg) {
        return patch_training_score(to_vector(patch), to_vector(angles), cfg);
      },
      py::arg("patch"), py::arg("angles"), py::arg("config"));

  m.def(
      "test_similarity",
      [](const F64& patch, const F64& angles, const AutoencoderConfig& cfg) {
        const auto a = to_vector(angles);
        return test_similarity(embed_patch(to_vector(patch)), MpsParams(cfg.n_data_qubits(), a),
                               cfg);
      },
      py::arg("patch"), py::arg("angles"), py::arg("config"));

  m.def(
      "image_cost",
      [](const F64& img, const F64& angles, const AutoencoderConfig& cfg, int s) {
        return image_cost(to_image(img), to_vector(angles), cfg, cfg.patch_size, s);
      },
      py::arg("image"), py::arg("angles"), py::arg("config"), py::arg("stride"));

  m.def(
      "image_cost_and_gradient",
      [](const F64& img, const F64& angles, const AutoencoderConfig& cfg, int s) {
        const auto a = to_vector(angles);
        std::vector<double> grad(a.size());
        const double c = image_cost_and_gradient(to_image(img), a, cfg, cfg.patch_size, s, grad);
        return py::make_tuple(c, py::array_t<double>(grad.size(), grad.data()));
      },
      py::arg("image"), py::arg("angles"), py::arg("config"), py::arg("stride"));

  m.def(
      "fit",
      [](const std::vector<F64>& train, const std::vector<F64>& val, const AutoencoderConfig& cfg,
         int stride, int epochs, double lr, int batch, std::uint64_t seed) {
        TrainConfig t;
        t.epochs = epochs;
        t.learning_rate = lr;
        t.batch_size = batch;
        t.seed = seed;
        const auto tr = images_from(train);
        const auto va = images_from(val);
        TrainState s;
        {
          py::gil_scoped_release release;
          s = fit(tr, va, t, cfg, cfg.patch_size, stride);
        }
        py::list history;
        for (const auto& h : s.history) history.append(py::make_tuple(h.epoch, h.train_loss, h.val_loss));
        py::dict out;
        out["params"] = py::array_t<double>(s.params.size(), s.params.data());
        out["best_params"] = py::array_t<double>(s.best_params.size(), s.best_params.data());
        out["best_epoch"] = s.best_epoch;
        out["history"] = history;
        return out;
      },
      py::arg("train"), py::arg("val"), py::arg("config"), py::arg("stride"),
      py::arg("epochs") = 20, py::arg("learning_rate") = 0.005, py::arg("batch_size") = 4,
      py::arg("seed") = 0);

  m.def(
      "anomaly_map",
      [](const F64& img, const F64& angles, const AutoencoderConfig& cfg, int s) {
        const auto a = to_vector(angles);
        return map_to_array(
            infer_map(to_image(img), MpsParams(cfg.n_data_qubits(), a), cfg, cfg.patch_size, s));
      },
      py::arg("image"), py::arg("angles"), py::arg("config"), py::arg("stride"),
      "Y = 1 - Z for one image; NaN where no patch covers a pixel.");

  m.def(
      "pixel_auroc",
      [](const std::vector<F64>& maps, const std::vector<py::array>& gts) {
        return pixel_auroc(maps_from(maps), masks_from(gts));
      },
      py::arg("maps"), py::arg("masks"));
  m.def(
      "aupro",
      [](const std::vector<F64>& maps, const std::vector<py::array>& gts, double limit) {
        return aupro(maps_from(maps), masks_from(gts), limit);
      },
      py::arg("maps"), py::arg("masks"), py::arg("fpr_limit") = 0.3);
  m.def(
      "dice", [](const py::array& a, const py::array& b) { return dice(to_mask(a), to_mask(b)); },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "iou", [](const py::array& a, const py::array& b) { return iou(to_mask(a), to_mask(b)); },
      py::arg("pred"), py::arg("truth"));

  m.def("classical_parameter_count",
        static_cast<std::size_t (*)(int, int)>(&DenseAutoencoder::parameter_count), py::arg("input_dim"),
        py::arg("hidden_dim"));

  m.def(
      "generate_synthetic",
      [](int n_train, int n_val, int n_test, int size, const std::string& texture,
         const std::string& defect, int defect_size, double delta, double noise,
         std::uint64_t seed) {
        SynthSpec spec;
        spec.n_train = n_train;
        spec.n_val = n_val;
        spec.n_test = n_test;
        spec.image_size = size;
        spec.texture = parse_texture(texture);
        spec.defect = parse_defect(defect);
        spec.defect_size = defect_size;
        spec.defect_intensity_delta = delta;
        spec.noise = noise;
        spec.seed = seed;
        const DatasetSplit s = generate_synthetic(spec);
        py::list test;
        for (const auto& t : s.test) {
          test.append(py::make_tuple(t.name, to_array(t.image), to_array(t.mask)));
        }
        py::dict out;
        out["train"] = images_to(s.train);
        out["val"] = images_to(s.val);
        out["test"] = test;
        return out;
      },
      py::arg("n_train") = 100, py::arg("n_val") = 25, py::arg("n_test") = 50,
      py::arg("image_size") = 32, py::arg("texture") = "stripes", py::arg("defect") = "square",
      py::arg("defect_size") = 8, py::arg("delta") = 0.3, py::arg("noise") = 0.0,
      py::arg("seed") = 0,
      "dict(train=[img], val=[img], test=[(name, img, mask)]).");
}
