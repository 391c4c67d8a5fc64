# Copyright 2026 The qpbae Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Quantum patch-based autoencoder for image anomaly segmentation."""

from ._core import (
    ArgumentError,
    AutoencoderConfig,
    ConfigError,
    DimensionError,
    QpbaeError,
    UndefinedMetricError,
    anomaly_map,
    assemble_map,
    aupro,
    classical_parameter_count,
    dice,
    extract_patches,
    fit,
    generate_synthetic,
    image_cost,
    image_cost_and_gradient,
    iou,
    mps_parameter_count,
    patch_count,
    pixel_auroc,
    test_similarity,
    training_fidelity,
    version,
)

__version__ = version()

__all__ = [
    "ArgumentError",
    "AutoencoderConfig",
    "ConfigError",
    "DimensionError",
    "QpbaeError",
    "UndefinedMetricError",
    "anomaly_map",
    "assemble_map",
    "aupro",
    "classical_parameter_count",
    "dice",
    "extract_patches",
    "fit",
    "generate_synthetic",
    "image_cost",
    "image_cost_and_gradient",
    "iou",
    "mps_parameter_count",
    "patch_count",
    "pixel_auroc",
    "test_similarity",
    "training_fidelity",
    "version",
]
