"""
Tests for overlapping frame extraction.

Tests cover:
- Frame counts for the reference 512/256 setup
- Frame contents against a naive slicing loop
- Window application leaving raw frames untouched
- Rejection of short clips and invalid hops
"""

import numpy as np
import pytest

from cough_spectra_py import AudioClip, WindowKind, frame_signal
from cough_spectra_py.dsp.framing import frame_count_for, make_window
from cough_spectra_py.errors import ClipTooShortError, InvalidArgumentError


def _clip(samples) -> AudioClip:
    return AudioClip(sample_rate=22050, samples=samples)


@pytest.mark.parametrize('num_samples, expected', [
    (22050, 85),
    (512, 1),
    (767, 1),
    (768, 2),
    (2304, 8),
])
def test_frame_counts(num_samples, expected):
    frames = frame_signal(_clip(np.zeros(num_samples)))
    assert frames.frame_count == expected
    assert frames.frames.shape == (expected, 512)
    assert frame_count_for(num_samples, 512, 256) == expected


def test_frames_match_naive_slicing(rng):
    window = make_window(WindowKind.HANN, 512)
    for _ in range(1000):
        num_samples = int(rng.integers(512, 3000))
        samples = rng.uniform(-1.0, 1.0, num_samples)
        frames = frame_signal(_clip(samples))

        expected = []
        start = 0
        while start + 512 <= num_samples:
            expected.append(samples[start:start + 512])
            start += 256
        assert frames.frame_count == len(expected) == 1 + (num_samples - 512) // 256
        np.testing.assert_array_equal(frames.raw, np.array(expected))
        np.testing.assert_array_equal(frames.frames, np.array(expected) * window)


def test_window_changes_frames_not_raw(rng):
    clip = _clip(rng.uniform(-1.0, 1.0, 3000))
    hann = frame_signal(clip, window_kind=WindowKind.HANN)
    rect = frame_signal(clip, window_kind='rectangular')

    np.testing.assert_array_equal(hann.raw, rect.raw)
    np.testing.assert_array_equal(rect.frames, rect.raw)
    assert not np.array_equal(hann.frames, rect.frames)


def test_hann_window_is_periodic():
    window = make_window(WindowKind.HANN, 512)
    n = np.arange(512)
    np.testing.assert_allclose(window, 0.5 - 0.5 * np.cos(2 * np.pi * n / 512), atol=1e-12)
    assert window[0] == 0.0
    assert not window.flags.writeable


def test_frame_times():
    frames = frame_signal(_clip(np.zeros(2304)))
    np.testing.assert_array_equal(frames.frame_starts(), np.arange(8) * 256)
    np.testing.assert_allclose(frames.frame_times(), np.arange(8) * 256 / 22050)


def test_custom_frame_length_and_hop():
    frames = frame_signal(_clip(np.zeros(1000)), frame_length=256, hop=100)
    assert frames.frame_count == 1 + (1000 - 256) // 100
    assert frames.hop == 100


def test_short_clip_raises():
    with pytest.raises(ClipTooShortError):
        frame_signal(_clip(np.zeros(511)))


@pytest.mark.parametrize('hop', [0, -1, 513])
def test_invalid_hop_raises(hop):
    with pytest.raises(InvalidArgumentError):
        frame_signal(_clip(np.zeros(2048)), hop=hop)
