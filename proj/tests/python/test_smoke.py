# tests/python/test_smoke.py

# Copyright 2026  Voxpriv Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the pybind11 module (run with PYTHONPATH pointing at the
build tree's python/ directory)."""

import math

import pytest

import voxpriv


def test_version():
    assert voxpriv.__version__ == "0.1.0"


def test_cosine_operations():
    assert voxpriv.cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0
    assert voxpriv.cosine_distance([1.0, 0.0], [0.0, 1.0]) == 1.0
    assert voxpriv.cosine_similarity([1.0, 0.0], [3.0, 0.0]) == pytest.approx(
        1.0, abs=1e-12
    )
    with pytest.raises(voxpriv.VoxprivError):
        voxpriv.cosine_similarity([1.0, 0.0], [1.0, 0.0, 0.0])


def test_mean_embedding_is_renormalized():
    mean = voxpriv.mean_embedding([[1.0, 0.0], [0.0, 1.0]])
    assert mean == pytest.approx([math.sqrt(0.5), math.sqrt(0.5)], abs=1e-12)


def test_compute_eer_fixture():
    eer, threshold = voxpriv.compute_eer([0.2, 0.6], [0.4, 0.8])
    assert eer == pytest.approx(0.5, abs=1e-12)
    assert threshold == pytest.approx(0.6, abs=1e-12)
    separable, _ = voxpriv.compute_eer([0.8, 0.9], [0.1, 0.2])
    assert separable == 0.0
    with pytest.raises(voxpriv.VoxprivError):
        voxpriv.compute_eer([], [0.5])


def test_flip_rule():
    assert voxpriv.flip_rule(0.66) == (pytest.approx(0.34, abs=1e-12), True)
    assert voxpriv.flip_rule(0.25) == (0.25, False)
    assert voxpriv.gender_average(0.2, 0.4) == pytest.approx(0.3, abs=1e-12)


def test_edit_distance_decomposition():
    ref = list("kitten")
    hyp = list("sitting")
    assert voxpriv.edit_distance(ref, hyp) == (2, 0, 1)
    assert voxpriv.edit_distance([], ["a"]) == (0, 0, 1)


def test_wer_normalization_toggle():
    refs = {"u1": "Hello, World!"}
    hyps = {"u1": "hello world"}
    assert voxpriv.wer(refs, hyps)["wer"] == 0.0
    raw = voxpriv.wer(refs, hyps, normalize=False)
    assert raw["wer"] == 1.0
    assert raw["substitutions"] == 2


def test_per_counts_phone_tokens():
    result = voxpriv.per({"u1": "a b c"}, {"u1": "a b d"})
    assert result["per"] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert result["ref_tokens"] == 3


def test_normalize_text():
    assert voxpriv.normalize_text("Hello, World!") == "hello world"
    assert voxpriv.normalize_text("ﬁne") == "fine"  # NFKC folds the ligature


def test_normalize_prosody_keeps_unvoiced_zero():
    result = voxpriv.normalize_prosody(
        ["p1", "p2", "p3"], [0.0, 2.0, 4.0], [1.0, 2.0, 3.0], [1.0, 1.0, 2.0]
    )
    assert result["pitch"] == pytest.approx([0.0, 2.0 / 3.0, 4.0 / 3.0], abs=1e-12)
    assert result["stats"]["pitch_mean"] == pytest.approx(3.0, abs=1e-12)
    assert result["stats"]["duration_mean"] == pytest.approx(4.0 / 3.0, abs=1e-12)


def test_select_anonymous_is_deterministic():
    pool = {"a": [0.0, 1.0], "b": [-1.0, 0.1]}
    first = voxpriv.select_anonymous(
        [1.0, 0.0], pool, d_min=0.3, max_attempts=10, seed=4, key="u1"
    )
    second = voxpriv.select_anonymous(
        [1.0, 0.0], pool, d_min=0.3, max_attempts=10, seed=4, key="u1"
    )
    assert first == second
    chosen_id, distance, fallback = first
    assert chosen_id in pool
    assert not fallback
    assert distance >= 0.3

    # A pool with no candidate past d_min falls back to the farthest one.
    near_pool = {"n1": [1.0, 0.01], "n2": [1.0, -0.02]}
    chosen_id, distance, fallback = voxpriv.select_anonymous(
        [1.0, 0.0], near_pool, d_min=0.5, max_attempts=5, seed=4, key="u1"
    )
    assert fallback
    assert chosen_id == "n2"  # |angle| slightly larger than n1's
    assert distance < 0.5
