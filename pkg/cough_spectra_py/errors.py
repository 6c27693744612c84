class CoughSpecError(Exception):
    """Base class for all errors raised by cough-spectra-py."""


class InvalidArgumentError(CoughSpecError, ValueError):
    """A precondition on an argument does not hold."""


# audio ingest
class MalformedFileError(CoughSpecError, ValueError):
    """Bad RIFF/WAVE header or truncated data chunk."""


class UnsupportedFormatError(CoughSpecError, ValueError):
    """Compressed codec, unsupported sample width or more than two channels."""


class EmptyAudioError(CoughSpecError, ValueError):
    """The file holds zero samples."""


# framing / spectrum / features
class ClipTooShortError(CoughSpecError, ValueError):
    """The clip has fewer samples than one analysis frame."""


class InvalidFrameLengthError(CoughSpecError, ValueError):
    """Frame length is not a power of two."""


class SilentFrameError(CoughSpecError, ArithmeticError):
    """A spectral descriptor is undefined because the frame has zero power."""


class TooFewFramesError(CoughSpecError, ValueError):
    """Spectral flux needs at least two frames."""


# stats / report
class EmptyInputError(CoughSpecError, ValueError):
    """A statistic was requested over an empty vector."""


class InvalidRangeError(CoughSpecError, ValueError):
    """Histogram range is not a finite lo < hi pair."""


class EmptyGroupError(CoughSpecError, ValueError):
    """No clip of a group survived to be characterized."""


class DuplicateLabelsError(CoughSpecError, ValueError):
    """Two reports in a comparison share a group label."""


# synth
class InvalidSpecError(CoughSpecError, ValueError):
    """A synthetic signal description is not valid."""


class ReportIOError(CoughSpecError, OSError):
    """A report could not be written or read back."""
