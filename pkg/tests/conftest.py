import struct
from pathlib import Path

import numpy as np
import pytest

from dotenv import load_dotenv

from cough_spectra_py import (
    AudioClip,
    CoughSpecEnv,
    SynthKind,
    SynthSpec,
    synth,
)
from cough_spectra_py.synth.oracle import synth_panel


ENV_FILE = Path(__file__).parent / '.coughspec.test.env'


def make_wav_bytes(
    payload: bytes,
    format_tag: int = 1,
    channels: int = 1,
    sample_rate: int = 22050,
    bits_per_sample: int = 16,
    data_size: int | None = None,
) -> bytes:
    """Assemble a RIFF/WAVE byte string around a raw data payload.

    `data_size` overrides the declared size of the data chunk, which lets
    tests build truncated files.
    """
    block_align = channels * bits_per_sample // 8
    fmt_chunk = struct.pack(
        '<HHIIHH',
        format_tag,
        channels,
        sample_rate,
        sample_rate * block_align,
        block_align,
        bits_per_sample,
    )
    declared = len(payload) if data_size is None else data_size
    body = (
        b'WAVE'
        + b'fmt ' + struct.pack('<I', len(fmt_chunk)) + fmt_chunk
        + b'data' + struct.pack('<I', declared) + payload
    )
    return b'RIFF' + struct.pack('<I', len(body)) + body


def pcm24_payload(values) -> bytes:
    """Little-endian 24-bit two's complement samples."""
    return b''.join(int(v).to_bytes(3, 'little', signed=True) for v in values)


@pytest.fixture(scope='session', autouse=True)
def coughspec_env():
    """Load environment variables for the test session from .coughspec.test.env."""
    CoughSpecEnv.clear_all_vars()
    load_dotenv(ENV_FILE)


@pytest.fixture
def wav_bytes():
    return make_wav_bytes


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope='session')
def sine_clip() -> AudioClip:
    """1 s of a 1000 Hz sine at amplitude 0.8."""
    return synth(SynthSpec(kind=SynthKind.SINE, frequency=1000.0, duration=1.0))


@pytest.fixture(scope='session')
def noise_clip() -> AudioClip:
    return synth(SynthSpec(kind=SynthKind.WHITE_NOISE, duration=1.0, seed=7))


@pytest.fixture(scope='session')
def cough_panel() -> list[AudioClip]:
    """Ten 0.4 s synthetic cough bursts, seeds 0..9."""
    return synth_panel(SynthKind.COUGH_BURST, range(10), duration=0.4, decay=0.1)


@pytest.fixture(scope='session')
def vowel_panel() -> list[AudioClip]:
    """Ten 0.4 s synthetic vowels at 150 Hz, seeds 0..9."""
    return synth_panel(SynthKind.VOWEL, range(10), duration=0.4, frequency=150.0)
