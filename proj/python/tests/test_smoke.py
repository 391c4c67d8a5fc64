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

import math

import numpy as np
import pytest

import qpbae


def test_version_and_counts():
    assert qpbae.__version__.count(".") == 2
    assert [qpbae.AutoencoderConfig(p, 1).n_params for p in (2, 4, 8)] == [2, 6, 10]
    assert qpbae.AutoencoderConfig(8, 2).compression_percent == 93.75
    assert qpbae.AutoencoderConfig(4, 1).compression_percent == 87.5
    assert qpbae.classical_parameter_count(64, 4) == 580


def test_bad_geometry_raises_library_error():
    with pytest.raises(qpbae.QpbaeError):
        qpbae.AutoencoderConfig(3, 1)
    with pytest.raises(qpbae.QpbaeError):
        qpbae.extract_patches(np.zeros((4, 4)), 8, 1)


@pytest.mark.parametrize("p,s", [(2, 1), (4, 1), (4, 3), (8, 4), (8, 8)])
def test_patches_match_numpy_windows(p, s):
    rng = np.random.default_rng(p * 10 + s)
    img = rng.random((19, 19))
    patches, anchors = qpbae.extract_patches(img, p, s)
    starts = range(0, 19 - p + 1, s)
    want = [img[r:r + p, c:c + p].ravel() for r in starts for c in starts]
    assert patches.shape == (len(want), p * p)
    assert qpbae.patch_count(19, p, s) == len(want)
    np.testing.assert_array_equal(patches, np.array(want))
    assert tuple(anchors[1]) == (0, s)


def test_assemble_center_pixel():
    m = qpbae.assemble_map(np.arange(9, dtype=float), 4, 2, 1)
    assert m[1, 1] == 2.0
    gapped = qpbae.assemble_map(np.ones(4), 9, 4, 4)
    assert np.isnan(gapped[8, 8]) and gapped[0, 0] == 1.0


def test_training_fidelity_closed_form():
    # P = 2 with zero angles: one CNOT, fidelity = (a^2 + d^2) / |x|^2.
    cfg = qpbae.AutoencoderConfig(2, 1)
    x = np.array([0.3, 0.5, 0.2, 0.7])
    want = (x[0] ** 2 + x[3] ** 2) / np.dot(x, x)
    assert qpbae.training_fidelity(x, np.zeros(2), cfg) == pytest.approx(want, abs=1e-12)


def test_similarity_range_and_uncompressed_limit():
    rng = np.random.default_rng(3)
    cfg = qpbae.AutoencoderConfig(4, 2)
    for _ in range(20):
        z = qpbae.test_similarity(rng.random(16), rng.uniform(0, 2 * math.pi, 6), cfg)
        assert 0.5 - 1e-12 <= z <= 1.0 + 1e-12
    full = qpbae.AutoencoderConfig(4, 4)
    assert qpbae.test_similarity(rng.random(16), rng.random(6), full) == pytest.approx(1.0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    cfg = qpbae.AutoencoderConfig(4, 2)
    img = rng.random((8, 8))
    th = rng.uniform(0, 2 * math.pi, 6)
    cost, grad = qpbae.image_cost_and_gradient(img, th, cfg, 2)
    assert cost == pytest.approx(qpbae.image_cost(img, th, cfg, 2), abs=1e-14)
    h = 1e-4
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        fd = (qpbae.image_cost(img, th + e, cfg, 2) - qpbae.image_cost(img, th - e, cfg, 2)) / (2 * h)
        assert grad[k] == pytest.approx(fd, abs=1e-6)


def pair_auroc(scores, labels):
    pos = scores[labels]
    neg = scores[~labels]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return wins / (len(pos) * len(neg))


def test_metrics_against_numpy():
    rng = np.random.default_rng(5)
    maps = [np.round(rng.random((6, 6)) * 8) / 8 for _ in range(3)]
    masks = [rng.random((6, 6)) < 0.3 for _ in range(3)]
    scores = np.concatenate([m.ravel() for m in maps])
    labels = np.concatenate([g.ravel() for g in masks])
    assert qpbae.pixel_auroc(maps, masks) == pytest.approx(pair_auroc(scores, labels), abs=1e-12)
    flat = [np.full((4, 4), 0.2)]
    gt = [np.eye(4, dtype=bool)]
    assert qpbae.aupro(flat, gt, 1.0) == pytest.approx(0.5)
    assert qpbae.aupro(flat, gt, 0.3) == pytest.approx(0.15)
    a = np.array([[1, 1], [0, 0]])
    b = np.array([[0, 1], [1, 0]])
    assert qpbae.iou(a, b) == pytest.approx(1 / 3)
    assert qpbae.dice(a, b) == pytest.approx(0.5)
    assert qpbae.dice(np.zeros((2, 2)), np.zeros((2, 2))) == 1.0
    with pytest.raises(qpbae.UndefinedMetricError):
        qpbae.pixel_auroc(flat, [np.zeros((4, 4))])


def test_synthetic_fit_and_map():
    data = qpbae.generate_synthetic(n_train=6, n_val=2, n_test=2, image_size=8, defect_size=4,
                                    seed=7)
    assert len(data["train"]) == 6 and data["train"][0].shape == (8, 8)
    name, img, mask = data["test"][0]
    assert name == "square/000" and mask.sum() == 16
    cfg = qpbae.AutoencoderConfig(4, 2)
    out = qpbae.fit(data["train"], data["val"], cfg, stride=4, epochs=3, learning_rate=0.05,
                    batch_size=2, seed=1)
    assert [h[0] for h in out["history"]] == [0, 1, 2, 3]
    again = qpbae.fit(data["train"], data["val"], cfg, stride=4, epochs=3, learning_rate=0.05,
                      batch_size=2, seed=1)
    np.testing.assert_array_equal(out["params"], again["params"])
    y = qpbae.anomaly_map(img, out["best_params"], cfg, 4)
    assert y.shape == (8, 8)
    assert np.all((y >= 0) & (y <= 1))
