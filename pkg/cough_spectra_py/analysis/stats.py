from dataclasses import dataclass, asdict, fields

import numpy as np

from cough_spectra_py.errors import EmptyInputError, InvalidArgumentError, InvalidRangeError


DEFAULT_HISTOGRAM_BINS = 20
DEGENERATE_RANGE_PAD = 1e-9

STAT_NAMES = ('min', 'max', 'mean', 'p25', 'median', 'p75', 'std')


@dataclass(frozen=True)
class SummaryStats:
    """
    Location and spread of a series, in the series' unit.

    p25/p75 are the 25th and 75th percentiles (linear interpolation between
    closest ranks); std is the population standard deviation.
    """

    min: float
    max: float
    mean: float
    p25: float
    median: float
    p75: float
    std: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'SummaryStats':
        return cls(**{f.name: float(data[f.name]) for f in fields(cls)})

    def as_row(self) -> list[float]:
        """Values in table column order: min, max, mean, p25, median, p75, std."""
        return [getattr(self, name) for name in STAT_NAMES]


@dataclass(frozen=True, eq=False)
class Histogram:
    """Equal-width histogram; the last bin is closed on the right."""

    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(np.sum(self.counts))

    @property
    def bins(self) -> int:
        return int(self.counts.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Histogram):
            return NotImplemented
        return (
            np.array_equal(self.bin_edges, other.bin_edges)
            and np.array_equal(self.counts, other.counts)
        )

    def to_dict(self) -> dict:
        return {
            'bin_edges': [float(edge) for edge in self.bin_edges],
            'counts': [int(count) for count in self.counts],
            'total': self.total,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Histogram':
        return cls(
            bin_edges=np.asarray(data['bin_edges'], dtype=np.float64),
            counts=np.asarray(data['counts'], dtype=np.int64),
        )


def _as_vector(values) -> np.ndarray:
    vector = np.asarray(values, dtype=np.float64).ravel()
    if vector.size == 0:
        raise EmptyInputError('cannot summarize an empty vector')
    if not np.all(np.isfinite(vector)):
        raise InvalidArgumentError('values must be finite')
    return vector


def summarize(values) -> SummaryStats:
    """
    Min, max, mean, quartiles, median and population std of a vector.

    Raises:
        EmptyInputError: The vector is empty
    """
    vector = _as_vector(values)
    p25, median, p75 = np.percentile(vector, [25.0, 50.0, 75.0])
    return SummaryStats(
        min=float(np.min(vector)),
        max=float(np.max(vector)),
        mean=float(np.mean(vector)),
        p25=float(p25),
        median=float(median),
        p75=float(p75),
        std=float(np.std(vector)),
    )


def average_stats(summaries: list[SummaryStats]) -> SummaryStats:
    """Field-wise mean of several summaries (per-recording pooling)."""
    if not summaries:
        raise EmptyInputError('cannot average zero summaries')
    return SummaryStats(**{
        name: float(np.mean([getattr(summary, name) for summary in summaries]))
        for name in STAT_NAMES
    })


def build_histogram(
    values,
    bins: int = DEFAULT_HISTOGRAM_BINS,
    value_range: tuple[float, float] | None = None,
) -> Histogram:
    """
    Count values into `bins` equal-width bins.

    Without an explicit range the observed min/max is used, widened by 1e-9
    on both sides when all values are equal. Values outside an explicit
    range are not counted.

    Raises:
        EmptyInputError: The vector is empty
        InvalidArgumentError: bins < 1
        InvalidRangeError: The range is not a finite lo < hi pair
    """
    vector = _as_vector(values)
    if isinstance(bins, bool) or int(bins) != bins or bins < 1:
        raise InvalidArgumentError(f'bins must be a positive integer. Got: bins={bins!r}')
    if value_range is None:
        low, high = float(np.min(vector)), float(np.max(vector))
        if high <= low:
            low, high = low - DEGENERATE_RANGE_PAD, high + DEGENERATE_RANGE_PAD
    else:
        low, high = (float(bound) for bound in value_range)
        if not (np.isfinite(low) and np.isfinite(high) and low < high):
            raise InvalidRangeError(f'histogram range must satisfy lo < hi. Got: {value_range!r}')
    counts, edges = np.histogram(vector, bins=int(bins), range=(low, high))
    return Histogram(bin_edges=edges, counts=counts.astype(np.int64))
