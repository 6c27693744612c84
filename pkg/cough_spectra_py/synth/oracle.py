from enum import Enum
from dataclasses import dataclass

import numpy as np

from cough_spectra_py.audio.clip import AudioClip, CANONICAL_SAMPLE_RATE
from cough_spectra_py.dsp.framing import DEFAULT_FRAME_LENGTH
from cough_spectra_py.errors import InvalidSpecError


AMPLITUDE = 0.8
COUGH_ONSET_SILENCE = 0.020

DEFAULT_FREQUENCY = {
    'sine': 1000.0,
    'vowel': 150.0,
}


class SynthKind(str, Enum):
    SINE = 'sine'
    WHITE_NOISE = 'white_noise'
    COUGH_BURST = 'cough_burst'
    VOWEL = 'vowel'


@dataclass(frozen=True)
class SynthSpec:
    """
    Description of a deterministic synthetic clip.

    Attributes:
        kind: sine, white_noise, cough_burst or vowel
        frequency: Tone frequency (sine) or fundamental (vowel) in Hz;
            None picks 1000 Hz for sine and 150 Hz for vowel
        duration: Length in seconds
        seed: Seed of the PCG64 generator (white_noise, cough_burst)
        decay: Time constant of the cough envelope in seconds
        harmonics: Number of vowel harmonics
        sample_rate: Output rate in Hz
    """

    kind: SynthKind
    frequency: float | None = None
    duration: float = 1.0
    seed: int = 0
    decay: float = 0.1
    harmonics: int = 6
    sample_rate: int = CANONICAL_SAMPLE_RATE

    def __post_init__(self):
        try:
            object.__setattr__(self, 'kind', SynthKind(self.kind))
        except ValueError:
            kinds = [kind.value for kind in SynthKind]
            raise InvalidSpecError(f'unknown synth kind {self.kind!r}, expected one of {kinds}') from None
        if self.frequency is None and self.kind.value in DEFAULT_FREQUENCY:
            object.__setattr__(self, 'frequency', DEFAULT_FREQUENCY[self.kind.value])
        if self.sample_rate <= 0:
            raise InvalidSpecError(f'sample_rate must be positive. Got: {self.sample_rate}')
        if self.num_samples < DEFAULT_FRAME_LENGTH:
            raise InvalidSpecError(
                f'duration must cover at least one {DEFAULT_FRAME_LENGTH}-sample frame '
                f'({DEFAULT_FRAME_LENGTH / self.sample_rate:.4f} s). Got: duration={self.duration}'
            )
        if self.seed < 0:
            raise InvalidSpecError(f'seed must be non-negative. Got: seed={self.seed}')
        nyquist = self.sample_rate / 2
        if self.kind is SynthKind.SINE and not 0 < self.frequency < nyquist:
            raise InvalidSpecError(f'frequency must be in (0, {nyquist}) Hz. Got: {self.frequency}')
        if self.kind is SynthKind.VOWEL:
            if self.harmonics < 1:
                raise InvalidSpecError(f'harmonics must be >= 1. Got: {self.harmonics}')
            if not 0 < self.frequency * self.harmonics < nyquist:
                raise InvalidSpecError(
                    f'{self.harmonics} harmonics of {self.frequency} Hz exceed the Nyquist '
                    f'frequency {nyquist} Hz'
                )
        if self.kind is SynthKind.COUGH_BURST and not self.decay > 0:
            raise InvalidSpecError(f'decay must be > 0. Got: decay={self.decay}')

    @property
    def num_samples(self) -> int:
        return int(round(self.duration * self.sample_rate))


def make_generator(seed: int) -> np.random.Generator:
    """PCG64 generator (PCG XSL-RR 128/64) seeded with `seed`."""
    return np.random.Generator(np.random.PCG64(seed))


def _sine(spec: SynthSpec) -> np.ndarray:
    n = np.arange(spec.num_samples)
    return AMPLITUDE * np.sin(2 * np.pi * spec.frequency * n / spec.sample_rate)


def _white_noise(spec: SynthSpec) -> np.ndarray:
    return make_generator(spec.seed).uniform(-AMPLITUDE, AMPLITUDE, spec.num_samples)


def _cough_burst(spec: SynthSpec) -> np.ndarray:
    """20 ms of silence, then noise under an exponentially decaying envelope."""
    onset = int(round(COUGH_ONSET_SILENCE * spec.sample_rate))
    burst_length = spec.num_samples - onset
    samples = np.zeros(spec.num_samples)
    if burst_length > 0:
        noise = make_generator(spec.seed).uniform(-AMPLITUDE, AMPLITUDE, burst_length)
        envelope = np.exp(-np.arange(burst_length) / (spec.decay * spec.sample_rate))
        samples[onset:] = noise * envelope
    return samples


def _vowel(spec: SynthSpec) -> np.ndarray:
    """Harmonics of the fundamental with 1/h amplitudes, scaled to peak <= 0.8."""
    n = np.arange(spec.num_samples)
    orders = np.arange(1, spec.harmonics + 1)
    phases = 2 * np.pi * spec.frequency * np.outer(n, orders) / spec.sample_rate
    signal = np.sin(phases) @ (1.0 / orders)
    return AMPLITUDE * signal / np.sum(1.0 / orders)


_GENERATORS = {
    SynthKind.SINE: _sine,
    SynthKind.WHITE_NOISE: _white_noise,
    SynthKind.COUGH_BURST: _cough_burst,
    SynthKind.VOWEL: _vowel,
}


def synth(spec: SynthSpec) -> AudioClip:
    """Generate the clip described by spec; same spec and seed give the same samples."""
    samples = _GENERATORS[spec.kind](spec)
    return AudioClip(
        sample_rate=spec.sample_rate,
        samples=samples,
        source_path=f'<synth {spec.kind.value} seed={spec.seed}>',
    )


def synth_panel(kind: SynthKind | str, seeds, **params) -> list[AudioClip]:
    """One clip per seed, all other parameters shared."""
    return [synth(SynthSpec(kind=kind, seed=seed, **params)) for seed in seeds]
