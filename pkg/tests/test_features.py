"""
Tests for the seven frame-level descriptors.

Tests cover:
- Hand-computed values on synthetic spectra and frames
- Oracle behaviour on a pure tone and on white noise
- Silent-frame conventions
- Randomized properties: amplitude invariance, value ranges,
  roll-off monotonicity, bandwidth bound, flux symmetry
"""

import math
import time

import numpy as np
import pytest

from cough_spectra_py import (
    AudioClip,
    FeatureConfig,
    FluxNormalization,
    PowerSpectrum,
    WindowKind,
    extract_all,
    flux_between,
    power_spectrum,
    spectral_bandwidth,
    spectral_centroid,
    spectral_entropy,
    spectral_flatness,
    spectral_flux,
    spectral_rolloff,
    zero_crossing_rate,
)
from cough_spectra_py.dsp.features import FEATURE_NAMES, minmax_normalize
from cough_spectra_py.dsp.framing import FrameMatrix
from cough_spectra_py.errors import (
    InvalidArgumentError,
    InvalidFrameLengthError,
    SilentFrameError,
    TooFewFramesError,
)


BIN_HZ = 22050 / 512


def _single_bin(k: int, bins: int = 257) -> PowerSpectrum:
    power = np.zeros(bins)
    power[k] = 1.0
    return PowerSpectrum.from_power(power)


def _uniform(bins: int = 257) -> PowerSpectrum:
    return PowerSpectrum.from_power(np.ones(bins))


# roll-off

def test_rolloff_single_bin():
    assert spectral_rolloff(_single_bin(50)) == pytest.approx(50 * BIN_HZ)


def test_rolloff_two_equal_bins():
    power = np.zeros(257)
    power[[10, 20]] = 1.0
    assert spectral_rolloff(PowerSpectrum.from_power(power)) == pytest.approx(20 * BIN_HZ)
    assert spectral_rolloff(PowerSpectrum.from_power(power), roll_percent=0.5) == pytest.approx(10 * BIN_HZ)


def test_rolloff_uniform():
    # ceil(0.85 * 257) = 219 bins are needed, the last of which is bin 218
    assert spectral_rolloff(_uniform()) == pytest.approx(218 * BIN_HZ)
    assert spectral_rolloff(_uniform()) == pytest.approx(9388.4765625)


def test_rolloff_full_percent_hits_top_nonzero_bin():
    power = np.zeros(257)
    power[[3, 40, 120]] = [5.0, 1.0, 1e-6]
    assert spectral_rolloff(PowerSpectrum.from_power(power), roll_percent=1.0) == pytest.approx(120 * BIN_HZ)


def test_rolloff_rejects_bad_percent():
    with pytest.raises(InvalidArgumentError):
        spectral_rolloff(_uniform(), roll_percent=0.0)
    with pytest.raises(InvalidArgumentError):
        spectral_rolloff(_uniform(), roll_percent=1.2)


# entropy

def test_entropy_single_bin_is_zero():
    assert spectral_entropy(_single_bin(30)) == 0.0
    assert spectral_entropy(_single_bin(30), normalized=False) == 0.0


def test_entropy_uniform():
    assert spectral_entropy(_uniform()) == pytest.approx(1.0)
    assert spectral_entropy(_uniform(), normalized=False) == pytest.approx(math.log2(257))


def test_entropy_two_equal_bins():
    power = np.zeros(257)
    power[[5, 6]] = 2.0
    spec = PowerSpectrum.from_power(power)
    assert spectral_entropy(spec, normalized=False) == pytest.approx(1.0)
    assert spectral_entropy(spec) == pytest.approx(1 / math.log2(257))


# flatness

def test_flatness_uniform_is_one():
    assert spectral_flatness(_uniform()) == pytest.approx(1.0)


def test_flatness_single_bin_near_zero():
    assert spectral_flatness(_single_bin(100)) < 1e-8


def test_flatness_two_bins():
    spec = PowerSpectrum.from_power([1.0, 4.0])
    assert spectral_flatness(spec) == pytest.approx(0.8, abs=1e-9)


# centroid and bandwidth

def test_centroid_single_bin():
    assert spectral_centroid(_single_bin(77)) == pytest.approx(77 * BIN_HZ)


def test_centroid_and_bandwidth_two_bins():
    # 51200 Hz / 512 puts bin 10 at 1000 Hz and bin 20 at 2000 Hz
    power = np.zeros(257)
    power[[10, 20]] = 1.0
    spec = PowerSpectrum.from_power(power, sample_rate=51200)
    assert spectral_centroid(spec) == pytest.approx(1500.0)
    assert spectral_bandwidth(spec) == pytest.approx(500.0)
    assert spectral_bandwidth(spec, centroid=1000.0) == pytest.approx(500.0)


def test_centroid_and_bandwidth_uniform():
    spec = _uniform()
    assert spectral_centroid(spec) == pytest.approx(5512.5)
    expected_bandwidth = np.mean(np.abs(spec.bin_freq - 5512.5))
    assert spectral_bandwidth(spec) == pytest.approx(expected_bandwidth)
    assert spectral_bandwidth(spec) == pytest.approx(2767.0, abs=1.0)


def test_bandwidth_single_bin_is_zero():
    assert spectral_bandwidth(_single_bin(64)) == pytest.approx(0.0, abs=1e-9)


# silent frames

@pytest.mark.parametrize('descriptor', [
    spectral_rolloff,
    spectral_entropy,
    spectral_flatness,
    spectral_centroid,
    spectral_bandwidth,
])
def test_single_spectrum_descriptors_reject_silence(descriptor):
    with pytest.raises(SilentFrameError):
        descriptor(power_spectrum(np.zeros(512)))
    with pytest.raises(ArithmeticError):
        descriptor(power_spectrum(np.zeros(512)))


def test_silent_clip_gives_zeros():
    features = extract_all(AudioClip(sample_rate=22050, samples=np.zeros(2048)))
    assert features.frame_count == 7
    assert features.silent_frame_count == 7
    for name in FEATURE_NAMES:
        assert np.all(features[name].values == 0.0), name
    assert np.all(features['flux'].raw_values == 0.0)


# zero-crossing rate

def test_zcr_constant_frame():
    assert zero_crossing_rate(np.full(512, 0.3)) == 0.0
    assert zero_crossing_rate(np.zeros(512)) == 0.0


def test_zcr_alternating_frame():
    frame = np.where(np.arange(512) % 2 == 0, 0.5, -0.5)
    assert zero_crossing_rate(frame) == pytest.approx(511 / 512)


def test_zcr_ignores_crossings_below_threshold():
    frame = np.full(512, 1e-9)
    frame[::2] = -1e-9
    frame[0] = 1.0
    # only the first sample exceeds 1e-4 * peak
    assert zero_crossing_rate(frame) == 0.0


def test_zcr_counts_crossing_through_zero_sample():
    assert zero_crossing_rate([-1.0, 0.0, 1.0, 1.0]) == pytest.approx(1 / 4)
    assert zero_crossing_rate([-1.0, 1e-9, -1e-9, 1.0]) == pytest.approx(1 / 4)


def test_zcr_rejects_bad_frames():
    with pytest.raises(InvalidArgumentError):
        zero_crossing_rate([0.5])
    with pytest.raises(InvalidArgumentError):
        zero_crossing_rate(np.zeros((2, 2)))


# flux

def _rect_matrix(rows) -> FrameMatrix:
    rows = np.asarray(rows, dtype=np.float64)
    return FrameMatrix(
        frame_length=rows.shape[1],
        hop=rows.shape[1],
        window_kind=WindowKind.RECTANGULAR,
        sample_rate=22050,
        frames=rows,
        raw=rows,
    )


DC_FRAME = np.full(512, 0.5)
NYQUIST_FRAME = np.where(np.arange(512) % 2 == 0, 0.5, -0.5)


def test_flux_identical_frames_is_zero():
    spec = power_spectrum(DC_FRAME)
    assert flux_between(spec, spec) == 0.0


def test_flux_disjoint_unit_masses_is_two():
    assert flux_between(power_spectrum(DC_FRAME), power_spectrum(NYQUIST_FRAME)) == pytest.approx(2.0, abs=1e-9)


def test_flux_series_record_minmax():
    series = spectral_flux(_rect_matrix([DC_FRAME, DC_FRAME, NYQUIST_FRAME]))
    assert len(series) == 2
    np.testing.assert_allclose(series.raw_values, [0.0, 2.0], atol=1e-9)
    np.testing.assert_allclose(series.values, [0.0, 1.0], atol=1e-9)


def test_flux_series_raw_and_constant():
    raw = spectral_flux(_rect_matrix([DC_FRAME, NYQUIST_FRAME]), normalization='raw')
    np.testing.assert_allclose(raw.values, [2.0], atol=1e-9)

    constant = spectral_flux(_rect_matrix([DC_FRAME, DC_FRAME, DC_FRAME]))
    np.testing.assert_array_equal(constant.values, [0.0, 0.0])


def test_flux_needs_two_frames():
    with pytest.raises(TooFewFramesError):
        spectral_flux(_rect_matrix([DC_FRAME]))


def test_flux_silence_counts_as_uniform():
    silent = power_spectrum(np.zeros(512))
    assert flux_between(silent, silent) == 0.0
    expected = 1 - 1 / 257
    assert flux_between(silent, power_spectrum(DC_FRAME)) == pytest.approx(expected, abs=1e-9)


def test_flux_size_mismatch():
    with pytest.raises(InvalidArgumentError):
        flux_between(power_spectrum(np.ones(512)), power_spectrum(np.ones(256)))


def test_flux_peaks_at_onset():
    # 2048 samples of silence, then a 3000 Hz tone
    samples = np.zeros(22050 // 4)
    n = np.arange(samples.size - 2048)
    samples[2048:] = 0.5 * np.sin(2 * np.pi * 3000.0 * n / 22050)
    features = extract_all(AudioClip(sample_rate=22050, samples=samples))
    flux = features['flux'].values
    # frames 0..6 are silent, frame 7 is the first to reach the tone
    assert features.silent[:7].all() and not features.silent[7]
    assert np.all(flux[:6] == 0.0)
    assert np.argmax(flux) in (6, 7)
    assert np.max(flux) == pytest.approx(1.0)


def test_flux_peaks_after_impulse_block():
    # a 512-sample unit block, then one second of silence
    samples = np.concatenate([np.ones(512), np.zeros(22050)])
    features = extract_all(AudioClip(sample_rate=22050, samples=samples))
    flux = features['flux'].values
    assert not features.silent[0] and features.silent[2:].all()
    assert np.argmax(flux) == 0
    assert flux[0] == 1.0
    assert np.all(flux[2:] == 0.0)


def test_minmax_normalize():
    np.testing.assert_allclose(minmax_normalize([2.0, 4.0, 3.0]), [0.0, 1.0, 0.5])
    np.testing.assert_array_equal(minmax_normalize([3.0, 3.0]), [0.0, 0.0])
    assert minmax_normalize([]).size == 0


# whole-clip oracles

def test_sine_oracle(sine_clip):
    extract_all(sine_clip)
    started = time.perf_counter()
    features = extract_all(sine_clip)
    elapsed = time.perf_counter() - started
    assert elapsed < 0.1, f'1 s tone extracted in {elapsed:.3f} s'
    assert features.frame_count == 85
    assert len(features['flux']) == 84
    assert features.silent_frame_count == 0

    centroid = features['centroid'].values
    assert np.all(np.abs(centroid - 1000.0) <= 50.0)
    assert np.all(features['entropy'].values < 0.2)
    assert np.all(np.abs(features['rolloff'].values - 1000.0) <= 2 * BIN_HZ)
    assert np.all(features['flatness'].values < 0.05)
    assert np.all(np.abs(features['zcr'].values - 2000 / 22050) <= 0.004)


def test_noise_oracle(noise_clip):
    features = extract_all(noise_clip)
    assert np.mean(features['entropy'].values) > 0.9
    assert 0.4 <= np.mean(features['flatness'].values) <= 0.7
    assert abs(np.mean(features['centroid'].values) - 5512.5) <= 300.0
    assert np.mean(features['zcr'].values) > 0.4


def test_single_frame_clip_has_empty_flux():
    clip = AudioClip(sample_rate=22050, samples=np.full(512, 0.1))
    features = extract_all(clip)
    assert features.frame_count == 1
    assert len(features['flux']) == 0
    assert len(features['rolloff']) == 1


def test_extract_all_matches_single_frame_functions(sine_clip):
    features = extract_all(sine_clip)
    frame = sine_clip.samples[256 * 10:256 * 10 + 512] * np.hanning(513)[:-1]
    spec = power_spectrum(frame)
    assert features['centroid'].values[10] == pytest.approx(spectral_centroid(spec), rel=1e-6)
    assert features['rolloff'].values[10] == pytest.approx(spectral_rolloff(spec))
    assert features['entropy'].values[10] == pytest.approx(spectral_entropy(spec), rel=1e-6)


def test_feature_set_mapping(noise_clip):
    features = extract_all(noise_clip)
    assert list(features) == list(FEATURE_NAMES)
    assert features['centroid'].unit == 'Hz'
    assert features.frame_times[1] == pytest.approx(256 / 22050)
    assert features.flux_silent.size == features.frame_count - 1


def test_feature_config_validation():
    with pytest.raises(InvalidArgumentError):
        FeatureConfig(roll_percent=0.0)
    with pytest.raises(InvalidArgumentError):
        FeatureConfig(hop=0)
    with pytest.raises(InvalidFrameLengthError):
        FeatureConfig(frame_length=500)
    with pytest.raises(ValueError):
        FeatureConfig(flux_normalization='weekly')

    config = FeatureConfig(flux_normalization='raw', window_kind='hamming')
    assert config.flux_normalization is FluxNormalization.RAW
    assert FeatureConfig.from_dict(config.to_dict()) == config


def test_feature_config_from_env(monkeypatch):
    monkeypatch.setenv('COUGHSPEC_ROLL_PERCENT', '0.9')
    assert FeatureConfig.from_env().roll_percent == 0.9
    assert FeatureConfig.from_env(roll_percent=0.5).roll_percent == 0.5


def test_unnormalized_entropy_config(noise_clip):
    features = extract_all(noise_clip, FeatureConfig(entropy_normalized=False))
    assert np.mean(features['entropy'].values) > 0.9 * math.log2(257)


# randomized properties

def _random_clip(rng) -> AudioClip:
    length = int(rng.integers(512, 2048))
    kind = rng.integers(3)
    if kind == 0:
        samples = rng.uniform(-1.0, 1.0, length)
    elif kind == 1:
        n = np.arange(length)
        frequency = rng.uniform(50.0, 10000.0)
        samples = rng.uniform(0.1, 1.0) * np.sin(2 * np.pi * frequency * n / 22050)
    else:
        samples = rng.uniform(-1.0, 1.0, length)
        samples[: length // 2] = 0.0
    return AudioClip(sample_rate=22050, samples=samples)


def test_amplitude_invariance(rng):
    for _ in range(500):
        clip = _random_clip(rng)
        factor = float(rng.uniform(0.01, 1.0))
        base = extract_all(clip)
        scaled = extract_all(clip.scaled(factor))
        for name in FEATURE_NAMES:
            np.testing.assert_allclose(
                scaled[name].values, base[name].values, rtol=1e-9, atol=1e-9, err_msg=name,
            )
        np.testing.assert_array_equal(scaled['zcr'].values, base['zcr'].values)


def test_value_ranges(rng):
    for _ in range(500):
        features = extract_all(_random_clip(rng))
        for name in ('entropy', 'flatness', 'flux', 'zcr'):
            values = features[name].values
            assert np.all((values >= 0.0) & (values <= 1.0)), name
        for name in ('rolloff', 'centroid', 'bandwidth'):
            values = features[name].values
            assert np.all((values >= 0.0) & (values <= 11025.0)), name
        assert np.all(features['flux'].raw_values <= 2.0 + 1e-12)


def test_rolloff_monotone_in_percent(rng):
    for _ in range(500):
        spec = PowerSpectrum.from_power(rng.exponential(1.0, 257) * (rng.random(257) < 0.5) + 1e-3)
        low, high = sorted(rng.uniform(0.01, 1.0, 2))
        assert spectral_rolloff(spec, low) <= spectral_rolloff(spec, high)


def test_bandwidth_bound(rng):
    for _ in range(500):
        spec = PowerSpectrum.from_power(rng.exponential(1.0, 257))
        centroid = spectral_centroid(spec)
        assert 0.0 <= spectral_bandwidth(spec) <= max(centroid, 11025.0 - centroid)


def test_flux_symmetry(rng):
    for _ in range(500):
        a = power_spectrum(rng.uniform(-1.0, 1.0, 512))
        b = power_spectrum(rng.uniform(-1.0, 1.0, 512))
        assert flux_between(a, b) == pytest.approx(flux_between(b, a), abs=1e-15)
        assert flux_between(a, a) == 0.0
