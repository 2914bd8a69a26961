# tests/python/test_smoke.py
# Copyright 2026 The asrtk authors
#
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

import math

import numpy as np
import pytest

import asrtk


def test_convolve_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.05, 0.05, size=1000)
    h = rng.uniform(-0.05, 0.05, size=64)
    got, scale = asrtk.convolve(x, h)
    assert scale == 1.0
    want = np.convolve(x, h)[: len(x)]
    assert np.max(np.abs(got - want)) < 1e-9


def test_convolve_identity():
    x = np.array([0.1, -0.2, 0.3])
    got, scale = asrtk.convolve(x, np.array([1.0]))
    assert scale == 1.0
    assert np.allclose(got, x)


def test_mix_at_snr_ratio():
    rng = np.random.default_rng(1)
    speech = rng.uniform(-0.4, 0.4, size=4000)
    noise = rng.uniform(-0.4, 0.4, size=4000)
    mixed = asrtk.mix_at_snr(speech, noise, 13.7)
    scaled = mixed - speech
    measured = 10 * math.log10(np.mean(speech**2) / np.mean(scaled**2))
    assert abs(measured - 13.7) < 1e-6


def test_speed_perturb_lengths():
    x = np.zeros(16000)
    x[::50] = 0.5
    assert len(asrtk.speed_perturb(x, 16000, 1.1)) == 14545
    assert len(asrtk.speed_perturb(x, 16000, 0.9)) == 17778
    assert np.array_equal(asrtk.speed_perturb(x, 16000, 1.0), x)


def test_mfcc_shape_and_pipeline():
    rng = np.random.default_rng(2)
    audio = rng.uniform(-0.3, 0.3, size=16000)
    mfcc = asrtk.compute_mfcc(audio, 16000)
    assert mfcc.shape == (98, 40)
    spliced = asrtk.splice(mfcc)
    assert spliced.shape == (98, 200)
    # Center slot of the splice is the frame itself.
    assert np.array_equal(spliced[:, 80:120], mfcc)
    emb = asrtk.recording_embedding(mfcc, "utt")
    assert emb.shape == (100,)
    model_in = asrtk.assemble_input(spliced, emb)
    assert model_in.shape == (98, 300)
    assert np.array_equal(model_in[0, 200:], emb)


def test_wav_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.9, 0.9, size=500)
    path = str(tmp_path / "x.wav")
    clipped = asrtk.write_wav(x, 16000, path)
    assert clipped == 0
    back, rate = asrtk.read_wav(path)
    assert rate == 16000
    assert np.max(np.abs(back - x)) <= 1 / 32768


def test_scoring():
    assert asrtk.wer(["a", "b", "c"], ["a", "x", "c"]) == pytest.approx(1 / 3)
    counts = asrtk.align_words(["a", "b", "c"], ["a", "x", "c"])
    assert counts["substitutions"] == 1
    assert counts["correct"] == 2
    assert asrtk.weighted_average_wer([(0.10, 100), (0.50, 300)]) == pytest.approx(0.40)
    assert asrtk.relative_improvement(31.6, 25.5) == pytest.approx(19.3, abs=0.05)


def test_schedules():
    assert asrtk.lr_at(1e-3, 1e-4, 0.0) == pytest.approx(1e-3)
    assert asrtk.lr_at(1e-3, 1e-4, 1.0) == pytest.approx(1e-4)
    ramp = [(0.0, 0.0), (0.2, 0.0), (0.5, 0.3), (1.0, 0.0)]
    assert asrtk.dropout_rate(ramp, 0.35) == pytest.approx(0.15)
    assert asrtk.dropout_rate(ramp, 0.5) == pytest.approx(0.3)


def test_boxplot_and_decode():
    stats = asrtk.boxplot_stats([1.0, 2.0, 3.0, 4.0, 100.0])
    assert stats["q1"] == pytest.approx(2.0)
    assert stats["outliers"] == [100.0]

    posts = np.full((6, 3), -10.0)
    for t, k in enumerate([1, 1, 0, 2, 2, 2]):
        posts[t, k] = -0.01
    words = asrtk.greedy_decode(posts, ["<sil>", "wa", "wb"], 0)
    assert words == ["wa", "wb"]


def test_errors_are_typed():
    with pytest.raises(asrtk.DomainError):
        asrtk.wer([], ["a"])
    with pytest.raises(asrtk.DataError):
        asrtk.read_wav("/nonexistent/file.wav")
