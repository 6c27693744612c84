from dataclasses import dataclass, field

import numpy as np

from cough_spectra_py.audio.clip import CANONICAL_SAMPLE_RATE
from cough_spectra_py.errors import InvalidFrameLengthError


def is_power_of_two(value: int) -> bool:
    return value >= 2 and value & (value - 1) == 0


def bin_frequencies(frame_length: int, sample_rate: int) -> np.ndarray:
    """Center frequency of every one-sided bin: f(k) = k * sample_rate / frame_length."""
    return np.arange(frame_length // 2 + 1) * (sample_rate / frame_length)


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    """
    One-sided spectrum of a frame, DC through Nyquist inclusive.

    Attributes:
        magnitude: |X(k)|
        power: |X(k)|**2
        bin_freq: Bin center frequencies in Hz
        frame_length: Length of the analysed frame
        sample_rate: Sampling frequency in Hz
    """

    magnitude: np.ndarray = field(repr=False)
    power: np.ndarray = field(repr=False)
    bin_freq: np.ndarray = field(repr=False)
    frame_length: int
    sample_rate: int

    @property
    def bin_count(self) -> int:
        return int(self.power.shape[-1])

    @property
    def total_power(self) -> float:
        return float(np.sum(self.power))

    @classmethod
    def from_power(cls, power, sample_rate: int = CANONICAL_SAMPLE_RATE) -> 'PowerSpectrum':
        """Build a spectrum directly from power values, e.g. for hand-made fixtures."""
        power = np.asarray(power, dtype=np.float64)
        frame_length = 2 * (power.size - 1)
        return cls(
            magnitude=np.sqrt(power),
            power=power,
            bin_freq=bin_frequencies(frame_length, sample_rate),
            frame_length=frame_length,
            sample_rate=sample_rate,
        )


def _check_frame_length(frame_length: int) -> None:
    if not is_power_of_two(frame_length):
        raise InvalidFrameLengthError(
            f'frame length must be a power of two. Got: frame_length={frame_length}'
        )


def magnitude_spectra(frames: np.ndarray) -> np.ndarray:
    """|rfft| of each row of a (frame_count, frame_length) array."""
    frames = np.asarray(frames, dtype=np.float64)
    _check_frame_length(frames.shape[-1])
    return np.abs(np.fft.rfft(frames, axis=-1))


def power_spectrum(frame, sample_rate: int = CANONICAL_SAMPLE_RATE) -> PowerSpectrum:
    """
    One-sided power spectrum of one (already windowed) frame.

    No normalization is applied here; every descriptor normalizes on its own.

    Raises:
        InvalidFrameLengthError: The frame length is not a power of two
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 1:
        raise InvalidFrameLengthError(f'expected a 1-D frame. Got shape {frame.shape}')
    magnitude = magnitude_spectra(frame)
    return PowerSpectrum(
        magnitude=magnitude,
        power=magnitude ** 2,
        bin_freq=bin_frequencies(frame.size, sample_rate),
        frame_length=frame.size,
        sample_rate=sample_rate,
    )
