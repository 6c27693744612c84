from enum import Enum
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field, asdict

import numpy as np

from cough_spectra_py.logger import debug_logger
from cough_spectra_py.audio.clip import AudioClip
from cough_spectra_py.utils.env import CoughSpecEnv
from cough_spectra_py.dsp.framing import (
    DEFAULT_FRAME_LENGTH,
    DEFAULT_HOP,
    FrameMatrix,
    WindowKind,
    frame_signal,
)
from cough_spectra_py.dsp.spectrum import (
    PowerSpectrum,
    bin_frequencies,
    is_power_of_two,
    magnitude_spectra,
)
from cough_spectra_py.errors import (
    InvalidArgumentError,
    InvalidFrameLengthError,
    SilentFrameError,
    TooFewFramesError,
)


FEATURE_NAMES = ('rolloff', 'entropy', 'flatness', 'flux', 'zcr', 'centroid', 'bandwidth')

FEATURE_UNITS = {
    'rolloff': 'Hz',
    'entropy': '',
    'flatness': '',
    'flux': '',
    'zcr': '',
    'centroid': 'Hz',
    'bandwidth': 'Hz',
}


class FluxNormalization(str, Enum):
    RECORD_MINMAX = 'record_minmax'
    GROUP_MINMAX = 'group_minmax'
    RAW = 'raw'


@dataclass(frozen=True)
class FeatureConfig:
    """
    Parameters of frame-level descriptor extraction.

    Defaults reproduce the reference setup: 512-sample frames with 50% overlap,
    Hann window, 85% roll-off, normalized entropy and per-record min-max flux.

    Attributes:
        roll_percent: Fraction of total power below the roll-off frequency, in (0, 1]
        zcr_epsilon_rel: Zero-crossing threshold as a fraction of the frame peak
        flatness_floor: Lower clamp for power bins in the geometric mean,
            as a fraction of the frame's peak power
        entropy_normalized: Divide entropy by log2(bin_count)
        flux_normalization: record_minmax, group_minmax or raw
        frame_length: Samples per frame, a power of two
        hop: Samples between frame starts
        window_kind: Analysis window applied before the DFT
    """

    roll_percent: float = 0.85
    zcr_epsilon_rel: float = 1e-4
    flatness_floor: float = 1e-12
    entropy_normalized: bool = True
    flux_normalization: FluxNormalization = FluxNormalization.RECORD_MINMAX
    frame_length: int = DEFAULT_FRAME_LENGTH
    hop: int = DEFAULT_HOP
    window_kind: WindowKind = WindowKind.HANN

    def __post_init__(self):
        object.__setattr__(self, 'flux_normalization', FluxNormalization(self.flux_normalization))
        object.__setattr__(self, 'window_kind', WindowKind(self.window_kind))
        if not 0.0 < self.roll_percent <= 1.0:
            raise InvalidArgumentError(
                f'roll_percent must be in (0, 1]. Got: roll_percent={self.roll_percent}'
            )
        if not self.zcr_epsilon_rel > 0.0:
            raise InvalidArgumentError(
                f'zcr_epsilon_rel must be > 0. Got: zcr_epsilon_rel={self.zcr_epsilon_rel}'
            )
        if not self.flatness_floor > 0.0:
            raise InvalidArgumentError(
                f'flatness_floor must be > 0. Got: flatness_floor={self.flatness_floor}'
            )
        if not is_power_of_two(self.frame_length):
            raise InvalidFrameLengthError(
                f'frame_length must be a power of two. Got: frame_length={self.frame_length}'
            )
        if not 1 <= self.hop <= self.frame_length:
            raise InvalidArgumentError(
                f'hop must be in [1, frame_length]. Got: hop={self.hop}, '
                f'frame_length={self.frame_length}'
            )

    @classmethod
    def from_env(cls, **overrides) -> 'FeatureConfig':
        """Build a config whose roll-off percent defaults to COUGHSPEC_ROLL_PERCENT."""
        overrides.setdefault('roll_percent', CoughSpecEnv.get_float('ROLL_PERCENT', 0.85))
        return cls(**overrides)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['flux_normalization'] = self.flux_normalization.value
        data['window_kind'] = self.window_kind.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'FeatureConfig':
        return cls(**data)


@dataclass(frozen=True, eq=False)
class FeatureSeries:
    """
    Per-frame values of one descriptor over a clip.

    Flux holds one value per frame pair, so its length is frame_count - 1;
    `raw_values` keeps un-normalized flux next to the normalized values.
    """

    name: str
    values: np.ndarray = field(repr=False)
    unit: str = ''
    raw_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.name not in FEATURE_NAMES:
            raise InvalidArgumentError(f'unknown descriptor {self.name!r}, expected one of {FEATURE_NAMES}')

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class FeatureSet(Mapping):
    """
    All seven descriptor series of one clip plus its per-frame silence mask.

    Behaves as a read-only mapping of descriptor name -> FeatureSeries.
    """

    series: dict[str, FeatureSeries] = field(repr=False)
    silent: np.ndarray = field(repr=False)
    frame_times: np.ndarray = field(repr=False)
    source_path: str = ''

    def __getitem__(self, name: str) -> FeatureSeries:
        return self.series[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.series)

    def __len__(self) -> int:
        return len(self.series)

    @property
    def frame_count(self) -> int:
        return int(self.silent.size)

    @property
    def silent_frame_count(self) -> int:
        return int(np.count_nonzero(self.silent))

    @property
    def flux_silent(self) -> np.ndarray:
        """A frame pair counts as silent when both of its frames are silent."""
        return self.silent[1:] & self.silent[:-1]

    def silent_mask_for(self, name: str) -> np.ndarray:
        return self.flux_silent if name == 'flux' else self.silent


# batch kernels over a (frame_count, bin_count) power array;
# silent rows (zero total power) yield 0

def _rolloff_rows(power: np.ndarray, freqs: np.ndarray, roll_percent: float) -> np.ndarray:
    cumulative = np.cumsum(power, axis=-1)
    # compare against the last cumulative value so roll_percent=1 hits the top non-zero bin
    reached = cumulative >= roll_percent * cumulative[..., -1:]
    result = freqs[np.argmax(reached, axis=-1)]
    return np.where(cumulative[..., -1] > 0, result, 0.0)


def _distribution_rows(power: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    total = np.sum(power, axis=-1)
    active = total > 0
    prob = np.zeros_like(power)
    prob[active] = power[active] / total[active, None]
    return prob, active


def _entropy_rows(power: np.ndarray, normalized: bool) -> np.ndarray:
    prob, active = _distribution_rows(power)
    log_prob = np.zeros_like(prob)
    np.log2(prob, out=log_prob, where=prob > 0)
    entropy = np.maximum(-np.sum(prob * log_prob, axis=-1), 0.0)
    if normalized:
        entropy = np.minimum(entropy / np.log2(power.shape[-1]), 1.0)
    return np.where(active, entropy, 0.0)


def _flatness_rows(power: np.ndarray, floor: float) -> np.ndarray:
    total = np.sum(power, axis=-1)
    active = total > 0
    result = np.zeros(power.shape[:-1])
    live = power[active]
    if live.size:
        clamped = np.maximum(live, floor * np.max(live, axis=-1, keepdims=True))
        geometric = np.exp(np.mean(np.log(clamped), axis=-1))
        arithmetic = np.mean(live, axis=-1)
        result[active] = np.minimum(geometric / arithmetic, 1.0)
    return result


def _centroid_rows(power: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    prob, active = _distribution_rows(power)
    return np.where(active, prob @ freqs, 0.0)


def _bandwidth_rows(power: np.ndarray, freqs: np.ndarray, centroid: np.ndarray) -> np.ndarray:
    prob, active = _distribution_rows(power)
    spread = np.sum(np.abs(freqs[None, :] - np.atleast_1d(centroid)[:, None]) * prob, axis=-1)
    return np.where(active, spread, 0.0)


def _unit_magnitudes(magnitude: np.ndarray) -> np.ndarray:
    """Rows scaled to unit sum; silent rows become the uniform distribution."""
    total = np.sum(magnitude, axis=-1, keepdims=True)
    uniform = np.full_like(magnitude, 1.0 / magnitude.shape[-1])
    safe_total = np.where(total > 0, total, 1.0)
    return np.where(total > 0, magnitude / safe_total, uniform)


def _raw_flux(magnitude: np.ndarray) -> np.ndarray:
    unit = _unit_magnitudes(magnitude)
    return np.sum((unit[1:] - unit[:-1]) ** 2, axis=-1)


def minmax_normalize(values: np.ndarray) -> np.ndarray:
    """Affinely map values onto [0, 1]; a constant vector maps to zeros."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return values.copy()
    low, high = float(np.min(values)), float(np.max(values))
    if high <= low:
        return np.zeros_like(values)
    return (values - low) / (high - low)


def _zcr_rows(raw_frames: np.ndarray, epsilon_rel: float) -> np.ndarray:
    peak = np.max(np.abs(raw_frames), axis=-1, keepdims=True)
    above = np.abs(raw_frames) > epsilon_rel * peak
    signs = np.sign(raw_frames) * above
    # sign of the latest supra-threshold sample at or before each position, 0 before the first
    positions = np.where(above, np.arange(raw_frames.shape[-1]), -1)
    latest = np.maximum.accumulate(positions, axis=-1)
    held = np.where(latest >= 0, np.take_along_axis(signs, np.maximum(latest, 0), axis=-1), 0.0)
    crossings = above[..., 1:] & (held[..., :-1] * signs[..., 1:] < 0)
    return np.count_nonzero(crossings, axis=-1) / raw_frames.shape[-1]


def _require_power(spec: PowerSpectrum, descriptor: str) -> None:
    if not spec.total_power > 0:
        raise SilentFrameError(f'{descriptor} is undefined for a frame with zero total power')


def spectral_rolloff(spec: PowerSpectrum, roll_percent: float = 0.85) -> float:
    """
    Frequency of the lowest bin at which cumulative power reaches
    roll_percent of the total (summed from DC, inclusive).
    """
    if not 0.0 < roll_percent <= 1.0:
        raise InvalidArgumentError(f'roll_percent must be in (0, 1]. Got: roll_percent={roll_percent}')
    _require_power(spec, 'spectral roll-off')
    return float(_rolloff_rows(spec.power[None, :], spec.bin_freq, roll_percent)[0])


def spectral_entropy(spec: PowerSpectrum, normalized: bool = True) -> float:
    """Shannon entropy (bits) of the power distribution; optionally divided by log2(bin_count)."""
    _require_power(spec, 'spectral entropy')
    return float(_entropy_rows(spec.power[None, :], normalized)[0])


def spectral_flatness(spec: PowerSpectrum, floor: float = 1e-12) -> float:
    """
    Geometric over arithmetic mean of the power bins.

    Bins are clamped from below at floor * peak power before the logarithm,
    so an isolated spectral line gives a value near 0 rather than log(0).
    """
    _require_power(spec, 'spectral flatness')
    return float(_flatness_rows(spec.power[None, :], floor)[0])


def spectral_centroid(spec: PowerSpectrum) -> float:
    """Power-weighted mean bin frequency in Hz."""
    _require_power(spec, 'spectral centroid')
    return float(_centroid_rows(spec.power[None, :], spec.bin_freq)[0])


def spectral_bandwidth(spec: PowerSpectrum, centroid: float | None = None) -> float:
    """Power-weighted mean absolute distance of bin frequency from the centroid, in Hz."""
    _require_power(spec, 'spectral bandwidth')
    if centroid is None:
        centroid = spectral_centroid(spec)
    return float(_bandwidth_rows(spec.power[None, :], spec.bin_freq, np.array([centroid]))[0])


def flux_between(previous: PowerSpectrum, current: PowerSpectrum) -> float:
    """Raw flux between two spectra: sum of squared differences of unit-sum magnitudes."""
    if previous.bin_count != current.bin_count:
        raise InvalidArgumentError(
            f'spectra differ in size: {previous.bin_count} vs {current.bin_count} bins'
        )
    return float(_raw_flux(np.stack([previous.magnitude, current.magnitude]))[0])


def spectral_flux(
    frames: FrameMatrix,
    normalization: FluxNormalization | str = FluxNormalization.RECORD_MINMAX,
) -> FeatureSeries:
    """
    Flux between every pair of consecutive frames.

    With record_minmax the raw series is mapped onto [0, 1] within the record;
    group_minmax and raw keep raw values here (group scaling happens when a
    group is pooled). Raw values are always kept in `raw_values`.

    Raises:
        TooFewFramesError: Fewer than two frames
    """
    if frames.frame_count < 2:
        raise TooFewFramesError(f'spectral flux needs >= 2 frames. Got: {frames.frame_count}')
    raw = _raw_flux(magnitude_spectra(frames.frames))
    return _flux_series(raw, FluxNormalization(normalization))


def _flux_series(raw: np.ndarray, normalization: FluxNormalization) -> FeatureSeries:
    if normalization is FluxNormalization.RECORD_MINMAX:
        values = minmax_normalize(raw)
    else:
        values = raw.copy()
    return FeatureSeries(name='flux', values=values, unit='', raw_values=raw)


def zero_crossing_rate(raw_frame, epsilon_rel: float = 1e-4) -> float:
    """
    Sign changes divided by the frame length.

    Samples at or below epsilon_rel times the frame peak are treated as zero
    and skipped, so a crossing counts between consecutive samples above the
    threshold even when a near-zero sample sits between them. An all-zero
    frame gives 0.
    """
    raw_frame = np.asarray(raw_frame, dtype=np.float64)
    if raw_frame.ndim != 1 or raw_frame.size < 2:
        raise InvalidArgumentError('zero-crossing rate needs a 1-D frame of >= 2 samples')
    return float(_zcr_rows(raw_frame[None, :], epsilon_rel)[0])


def extract_all(clip: AudioClip, config: FeatureConfig | None = None) -> FeatureSet:
    """
    Frame a clip and compute all seven descriptors for every frame.

    Silent frames (zero windowed power) get 0 for every spectral descriptor
    and a uniform distribution for flux, and are flagged in `silent`.

    Raises:
        ClipTooShortError: The clip is shorter than one frame
    """
    config = config or FeatureConfig()
    frames = frame_signal(
        clip,
        frame_length=config.frame_length,
        hop=config.hop,
        window_kind=config.window_kind,
    )
    magnitude = magnitude_spectra(frames.frames)
    power = magnitude ** 2
    freqs = bin_frequencies(config.frame_length, clip.sample_rate)
    silent = ~(np.sum(power, axis=-1) > 0)

    centroid = _centroid_rows(power, freqs)
    values = {
        'rolloff': _rolloff_rows(power, freqs, config.roll_percent),
        'entropy': _entropy_rows(power, config.entropy_normalized),
        'flatness': _flatness_rows(power, config.flatness_floor),
        'zcr': _zcr_rows(frames.raw, config.zcr_epsilon_rel),
        'centroid': centroid,
        'bandwidth': _bandwidth_rows(power, freqs, centroid),
    }
    series = {}
    for name in FEATURE_NAMES:
        if name == 'flux':
            series[name] = _flux_series(_raw_flux(magnitude), config.flux_normalization)
        else:
            series[name] = FeatureSeries(name=name, values=values[name], unit=FEATURE_UNITS[name])
    debug_logger.debug(
        f'Extracted {frames.frame_count} frames from {clip.source_path or "<clip>"} '
        f'({int(np.count_nonzero(silent))} silent)'
    )
    return FeatureSet(
        series=series,
        silent=silent,
        frame_times=frames.frame_times(),
        source_path=clip.source_path,
    )
