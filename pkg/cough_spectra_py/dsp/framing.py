from enum import Enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window

from cough_spectra_py.audio.clip import AudioClip
from cough_spectra_py.errors import ClipTooShortError, InvalidArgumentError


DEFAULT_FRAME_LENGTH = 512
DEFAULT_HOP = 256


class WindowKind(str, Enum):
    HANN = 'hann'
    HAMMING = 'hamming'
    RECTANGULAR = 'rectangular'


@lru_cache(maxsize=32)
def _window_cached(window_kind: WindowKind, frame_length: int) -> np.ndarray:
    if window_kind is WindowKind.RECTANGULAR:
        window = np.ones(frame_length)
    else:
        # periodic (DFT-even) variant, as used for spectral analysis
        window = get_window(window_kind.value, frame_length, fftbins=True)
    window = np.asarray(window, dtype=np.float64)
    window.setflags(write=False)
    return window


def make_window(window_kind: WindowKind | str, frame_length: int) -> np.ndarray:
    """Return the read-only analysis window of the given kind and length."""
    return _window_cached(WindowKind(window_kind), int(frame_length))


def frame_count_for(num_samples: int, frame_length: int, hop: int) -> int:
    """Number of whole frames that fit into num_samples, no padding."""
    if num_samples < frame_length:
        return 0
    return (num_samples - frame_length) // hop + 1


@dataclass(frozen=True, eq=False)
class FrameMatrix:
    """
    Overlapping analysis frames of one clip.

    `raw` holds the unwindowed frames (used for zero-crossing rate),
    `frames` the same frames multiplied by the window. Both are read-only
    arrays of shape (frame_count, frame_length).
    """

    frame_length: int
    hop: int
    window_kind: WindowKind
    sample_rate: int
    frames: np.ndarray = field(repr=False)
    raw: np.ndarray = field(repr=False)

    @property
    def frame_count(self) -> int:
        return int(self.frames.shape[0])

    def frame_starts(self) -> np.ndarray:
        """Index of the first sample of every frame."""
        return np.arange(self.frame_count) * self.hop

    def frame_times(self) -> np.ndarray:
        """Start time of every frame in seconds."""
        return self.frame_starts() / self.sample_rate


def frame_signal(
    clip: AudioClip,
    frame_length: int = DEFAULT_FRAME_LENGTH,
    hop: int = DEFAULT_HOP,
    window_kind: WindowKind | str = WindowKind.HANN,
) -> FrameMatrix:
    """
    Slice a clip into overlapping frames starting at sample 0.

    Frame i covers samples [i*hop, i*hop + frame_length); samples that cannot
    fill a whole trailing frame are dropped.

    Raises:
        InvalidArgumentError: frame_length < 2 or hop outside [1, frame_length]
        ClipTooShortError: The clip is shorter than one frame
    """
    if frame_length < 2:
        raise InvalidArgumentError(f'frame_length must be >= 2. Got: frame_length={frame_length}')
    if not 1 <= hop <= frame_length:
        raise InvalidArgumentError(
            f'hop must be in [1, frame_length]. Got: hop={hop}, frame_length={frame_length}'
        )
    if clip.num_samples < frame_length:
        raise ClipTooShortError(
            f'{clip.source_path or "<clip>"}: {clip.num_samples} samples, '
            f'need at least {frame_length}'
        )
    window_kind = WindowKind(window_kind)
    raw = sliding_window_view(clip.samples, frame_length)[::hop].copy()
    frames = raw * make_window(window_kind, frame_length)
    raw.setflags(write=False)
    frames.setflags(write=False)
    return FrameMatrix(
        frame_length=frame_length,
        hop=hop,
        window_kind=window_kind,
        sample_rate=clip.sample_rate,
        frames=frames,
        raw=raw,
    )
