import io
import sys
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from cough_spectra_py.logger import debug_logger
from cough_spectra_py.audio.clip import AudioClip, CANONICAL_SAMPLE_RATE
from cough_spectra_py.errors import (
    EmptyAudioError,
    InvalidArgumentError,
    MalformedFileError,
    ReportIOError,
    UnsupportedFormatError,
)


WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

SUPPORTED_FORMATS = {
    (WAVE_FORMAT_PCM, 16),
    (WAVE_FORMAT_PCM, 24),
    (WAVE_FORMAT_PCM, 32),
    (WAVE_FORMAT_IEEE_FLOAT, 32),
    (WAVE_FORMAT_IEEE_FLOAT, 64),
}

WavSource = str | Path | BinaryIO


@dataclass(frozen=True)
class WavFormat:
    """Fields of the `fmt ` chunk plus the declared size of the `data` chunk."""

    format_tag: int
    channels: int
    sample_rate: int
    block_align: int
    bits_per_sample: int
    data_size: int


def _read_source(source: WavSource) -> tuple[bytes, str]:
    """Read raw bytes from a path, '-' (stdin) or a binary file object."""
    if hasattr(source, 'read'):
        return source.read(), getattr(source, 'name', '<stream>')
    if str(source) == '-':
        return sys.stdin.buffer.read(), '<stdin>'
    path = Path(source)
    return path.read_bytes(), str(path)


def inspect_riff(data: bytes, name: str = '<bytes>') -> WavFormat:
    """
    Walk the RIFF chunks of a WAVE byte string and return its format.

    Only the header is validated here; sample decoding is left to scipy.

    Raises:
        MalformedFileError: Missing RIFF/WAVE magic, missing `fmt `/`data` chunk,
            or a chunk that runs past the end of the file.
        UnsupportedFormatError: Codec, sample width or channel count outside the
            supported set.
    """
    if len(data) < 12 or data[:4] != b'RIFF' or data[8:12] != b'WAVE':
        raise MalformedFileError(f'{name}: not a RIFF/WAVE file')
    fmt = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset:offset + 4]
        (size,) = struct.unpack('<I', data[offset + 4:offset + 8])
        body = offset + 8
        if chunk_id == b'fmt ':
            if size < 16 or body + size > len(data):
                raise MalformedFileError(f'{name}: truncated fmt chunk')
            tag, channels, rate, _, block_align, bits = struct.unpack(
                '<HHIIHH', data[body:body + 16]
            )
            if tag == WAVE_FORMAT_EXTENSIBLE and size >= 26:
                # first two bytes of the SubFormat GUID carry the real format tag
                (tag,) = struct.unpack('<H', data[body + 24:body + 26])
            fmt = (tag, channels, rate, block_align, bits)
        elif chunk_id == b'data':
            if fmt is None:
                raise MalformedFileError(f'{name}: data chunk precedes fmt chunk')
            if body + size > len(data):
                raise MalformedFileError(
                    f'{name}: truncated data chunk, declared {size} bytes, '
                    f'found {len(data) - body}'
                )
            tag, channels, rate, block_align, bits = fmt
            wav_format = WavFormat(tag, channels, rate, block_align, bits, size)
            _check_supported(wav_format, name)
            return wav_format
        offset = body + size + (size & 1)
    if fmt is None:
        raise MalformedFileError(f'{name}: missing fmt chunk')
    raise MalformedFileError(f'{name}: missing data chunk')


def _check_supported(wav_format: WavFormat, name: str) -> None:
    if wav_format.channels == 0 or wav_format.sample_rate == 0 or wav_format.block_align == 0:
        raise MalformedFileError(f'{name}: zero channels, sample rate or block size in fmt chunk')
    if wav_format.format_tag not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedFormatError(
            f'{name}: compressed or unknown codec 0x{wav_format.format_tag:04x}, '
            'only PCM and IEEE float are supported'
        )
    if (wav_format.format_tag, wav_format.bits_per_sample) not in SUPPORTED_FORMATS:
        raise UnsupportedFormatError(
            f'{name}: unsupported sample width {wav_format.bits_per_sample} bits'
        )
    if wav_format.channels > 2:
        raise UnsupportedFormatError(
            f'{name}: {wav_format.channels} channels, only mono and stereo are supported'
        )
    if wav_format.data_size % wav_format.block_align:
        raise MalformedFileError(
            f'{name}: data chunk of {wav_format.data_size} bytes is not a whole '
            f'number of {wav_format.block_align}-byte frames'
        )


def decode_wav(source: WavSource) -> AudioClip:
    """
    Decode a WAV file to a mono clip in [-1, 1] at the file's native rate.

    Stereo is averaged to mono before scaling. Integer PCM is scaled by the
    container's full scale (16-bit: /32768); scipy returns 24-bit data
    left-justified in int32, so /2**31 applies there too. Float data is
    clamped to [-1, 1].

    Args:
        source: Path, '-' for standard input, or a binary file object

    Raises:
        MalformedFileError, UnsupportedFormatError, EmptyAudioError
    """
    data, name = _read_source(source)
    wav_format = inspect_riff(data, name=name)
    if wav_format.data_size == 0:
        raise EmptyAudioError(f'{name}: data chunk holds zero samples')
    try:
        sample_rate, payload = wavfile.read(io.BytesIO(data))
    except ValueError as e:
        raise MalformedFileError(f'{name}: {e}') from e
    if payload.size == 0:
        raise EmptyAudioError(f'{name}: data chunk holds zero samples')
    samples = payload.astype(np.float64)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if np.issubdtype(payload.dtype, np.integer):
        samples = samples / float(-np.iinfo(payload.dtype).min)
    else:
        samples = np.nan_to_num(samples, nan=0.0)
    samples = np.clip(samples, -1.0, 1.0)
    debug_logger.debug(
        f'Decoded {name}: {wav_format.channels} ch, {wav_format.bits_per_sample} bit, '
        f'{sample_rate} Hz, {samples.size} samples'
    )
    return AudioClip(sample_rate=int(sample_rate), samples=samples, source_path=name)


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """
    Band-limited polyphase resampling of a clip to target_rate.

    The ratio is reduced by the gcd of both rates and passed to
    scipy.signal.resample_poly (Kaiser windowed-sinc); output is clamped to [-1, 1].
    A clip already at target_rate is returned unchanged.
    """
    if isinstance(target_rate, bool) or int(target_rate) != target_rate or target_rate <= 0:
        raise InvalidArgumentError(
            f'target_rate must be a positive integer. Got: target_rate={target_rate!r}'
        )
    target_rate = int(target_rate)
    if clip.sample_rate == target_rate:
        return clip
    divisor = math.gcd(clip.sample_rate, target_rate)
    up = target_rate // divisor
    down = clip.sample_rate // divisor
    resampled = resample_poly(clip.samples, up, down)
    debug_logger.debug(
        f'Resampled {clip.source_path or "<clip>"}: {clip.sample_rate} -> {target_rate} Hz '
        f'(up={up}, down={down}), {clip.num_samples} -> {resampled.size} samples'
    )
    return AudioClip(
        sample_rate=target_rate,
        samples=np.clip(resampled, -1.0, 1.0),
        source_path=clip.source_path,
        group_label=clip.group_label,
    )


def canonicalize(clip: AudioClip) -> AudioClip:
    """Resample a clip to the analysis rate of 22050 Hz."""
    if clip.is_canonical:
        return clip
    debug_logger.debug(
        f'Resampling {clip.source_path or "<clip>"} ({clip.duration:.3f} s) '
        f'from {clip.sample_rate} Hz to {CANONICAL_SAMPLE_RATE} Hz'
    )
    return resample(clip, CANONICAL_SAMPLE_RATE)


def encode_wav(clip: AudioClip) -> bytes:
    """Encode a clip as 16-bit PCM mono WAV bytes."""
    quantized = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype(np.int16)
    buffer = io.BytesIO()
    wavfile.write(buffer, clip.sample_rate, quantized)
    return buffer.getvalue()


def write_wav(clip: AudioClip, dest: WavSource) -> None:
    """
    Write a clip as 16-bit PCM mono WAV.

    Args:
        clip: Clip to write
        dest: Path, '-' for standard output, or a binary file object
    """
    payload = encode_wav(clip)
    try:
        if hasattr(dest, 'write'):
            dest.write(payload)
        elif str(dest) == '-':
            sys.stdout.buffer.write(payload)
            sys.stdout.buffer.flush()
        else:
            Path(dest).write_bytes(payload)
    except OSError as e:
        raise ReportIOError(f'Cannot write WAV to {dest}: {e}') from e
