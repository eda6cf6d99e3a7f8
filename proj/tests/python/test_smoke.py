# Copyright 2026 The lasr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import lasr


def test_log_mel_shape_and_determinism():
    rng = np.random.default_rng(0)
    samples = rng.uniform(-0.5, 0.5, 16000)
    feats = lasr.log_mel(samples, 16000, n_mels=80, window_ms=20.0, hop_ms=10.0)
    assert feats.shape == (99, 80)
    again = lasr.log_mel(samples, 16000, n_mels=80)
    assert np.array_equal(feats, again)


def test_spec_augment_seeded_and_stacking():
    feats = np.ones((30, 8))
    masked = lasr.spec_augment(feats, freq_mask=3, time_mask=10, seed=7)
    assert np.array_equal(masked, lasr.spec_augment(feats, freq_mask=3, time_mask=10, seed=7))
    assert masked.min() == 0.0  # something was blanked

    stacked = lasr.stack_frames(np.arange(12.0).reshape(4, 3), k=3)
    assert stacked.shape == (2, 9)
    assert stacked[1, -3:].tolist() == [0.0, 0.0, 0.0]  # zero-padded tail


def test_tokenizer_round_trip():
    model = lasr.SubwordModel.train(["red shoe", "blue bag", "red bag"], vocab_size=24)
    assert model.vocab_size <= 24
    ids = model.encode("red bag")
    assert model.decode(ids) == "red bag"


def test_ctc_loss_known_value():
    # Two frames, equal probabilities over {label, blank}: marginal 0.75.
    logits = np.zeros((2, 2))
    loss, grad = lasr.ctc_loss(logits, [0], blank=1)
    assert loss == pytest.approx(-math.log(0.75), abs=1e-12)
    assert grad.shape == (2, 2)


def test_ce_smoothed_uniform_logits():
    logits = np.zeros((1, 5))
    assert lasr.ce_smoothed(logits, [2], epsilon=0.1) == pytest.approx(math.log(5.0))
    q = lasr.smoothed_targets([2], 5, 0.1)
    assert q[0].tolist() == pytest.approx([0.02, 0.02, 0.92, 0.02, 0.02])


def test_mwer_self_baseline_is_zero():
    assert lasr.mwer_loss([-1.0, -2.0], [1.0, 3.0]) == pytest.approx(0.0, abs=1e-12)


def test_ngram_degenerate_corpus():
    lm = lasr.NGramLM.train(["a b", "a b"], order=2, discount=0.0)
    two = lm.score(["a", "b"])
    assert math.isfinite(two)
    # P(b|a) = 1 so the pair costs no more than "a" alone minus its ending.
    assert lm.score(["a", "b"]) > lm.score(["b", "a"])


def test_wer_and_relative_improvement():
    s, d, i, n = lasr.levenshtein_words(["a", "x", "c"], ["a", "b", "c"])
    assert (s, d, i, n) == (1, 0, 0, 3)
    assert lasr.corpus_wer(["a x c", "d e"], ["a b c", "d e"]) == pytest.approx(20.0)
    assert lasr.relative_improvement(14.87, 9.37) == pytest.approx(36.9, abs=0.1)
    assert lasr.relative_improvement(14.87, 11.12) == pytest.approx(25.2, abs=0.1)


def test_sampling_schedule():
    assert lasr.ss_prob(5) == 0.0
    assert lasr.ss_prob(25) == pytest.approx(0.10)
    assert lasr.ss_prob(60) == pytest.approx(0.30)


def test_error_translation():
    with pytest.raises(lasr.LasrError):
        lasr.ctc_loss(np.zeros((2, 2)), [0, 0], blank=1)  # needs 3 frames
