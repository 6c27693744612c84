from dataclasses import dataclass, field, replace

import numpy as np

from cough_spectra_py.errors import InvalidArgumentError


CANONICAL_SAMPLE_RATE = 22050


@dataclass(frozen=True, eq=False)
class AudioClip:
    """
    Mono amplitude sequence with its sample rate.

    Samples are stored as a read-only float64 array with every value in [-1, 1].
    The clip is canonical once `sample_rate` equals CANONICAL_SAMPLE_RATE.

    Attributes:
        sample_rate: Sampling frequency in Hz
        samples: 1-D float64 array of amplitudes
        source_path: Where the samples came from ('' for generated clips)
        group_label: Optional group tag, e.g. 'cough_voiced' or 'speech'
    """

    sample_rate: int
    samples: np.ndarray = field(repr=False)
    source_path: str = ''
    group_label: str | None = None

    def __post_init__(self):
        if isinstance(self.sample_rate, bool) or int(self.sample_rate) != self.sample_rate:
            raise InvalidArgumentError(
                f'sample_rate must be a positive integer. Got: sample_rate={self.sample_rate!r}'
            )
        if self.sample_rate <= 0:
            raise InvalidArgumentError(
                f'sample_rate must be a positive integer. Got: sample_rate={self.sample_rate!r}'
            )
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidArgumentError(f'samples must be 1-D. Got shape {samples.shape}')
        if samples.size == 0:
            raise InvalidArgumentError('samples must not be empty')
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError('samples must be finite')
        if np.any(np.abs(samples) > 1.0):
            raise InvalidArgumentError(
                f'samples must lie in [-1, 1]. Got peak {float(np.max(np.abs(samples)))!r}'
            )
        samples.setflags(write=False)
        object.__setattr__(self, 'sample_rate', int(self.sample_rate))
        object.__setattr__(self, 'samples', samples)

    @property
    def num_samples(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        """Clip duration in seconds."""
        return self.num_samples / self.sample_rate

    @property
    def is_canonical(self) -> bool:
        return self.sample_rate == CANONICAL_SAMPLE_RATE

    def with_label(self, group_label: str | None) -> 'AudioClip':
        return replace(self, group_label=group_label)

    def scaled(self, factor: float) -> 'AudioClip':
        """Return a copy with every sample multiplied by factor (|factor| <= 1)."""
        return replace(self, samples=self.samples * factor)
