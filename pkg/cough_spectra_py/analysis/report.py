import csv
import io
import json
import math
from enum import Enum
from pathlib import Path
from dataclasses import dataclass, field, asdict
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from tqdm import tqdm

from cough_spectra_py.logger import debug_logger, pipeline_logger
from cough_spectra_py.audio.clip import AudioClip
from cough_spectra_py.audio.ingest import canonicalize
from cough_spectra_py.utils.env import CoughSpecEnv
from cough_spectra_py.dsp.features import (
    FEATURE_NAMES,
    FeatureConfig,
    FeatureSet,
    FluxNormalization,
    extract_all,
    minmax_normalize,
)
from cough_spectra_py.analysis.stats import (
    DEFAULT_HISTOGRAM_BINS,
    STAT_NAMES,
    Histogram,
    SummaryStats,
    average_stats,
    build_histogram,
    summarize,
)
from cough_spectra_py.analysis.reference_tables import (
    ATTRIBUTE_TITLES,
    REFERENCE_GROUPS,
    REFERENCE_TABLES,
)
from cough_spectra_py.errors import (
    ClipTooShortError,
    DuplicateLabelsError,
    EmptyGroupError,
    InvalidArgumentError,
    ReportIOError,
    TooFewFramesError,
)


RANKED_STATISTICS = ('mean', 'max')
TIE_REL_TOL = 1e-12
TABLE_HEADER = ('min', 'max', 'Mean', 'med_25', 'median', 'med_75', 'Std')


class Pooling(str, Enum):
    FRAME = 'frame'
    RECORDING = 'recording'


class ExportFormat(str, Enum):
    CSV = 'csv'
    JSON = 'json'


@dataclass(frozen=True)
class ReportConfig:
    """
    How frame values of a group are aggregated.

    Attributes:
        bins: Histogram bin count per attribute
        exclude_silent: Drop frames flagged silent before aggregating
        pooling: 'frame' pools all frames of the group; 'recording' summarizes
            each clip and averages the summaries (histograms stay frame-pooled)
    """

    bins: int = DEFAULT_HISTOGRAM_BINS
    exclude_silent: bool = False
    pooling: Pooling = Pooling.FRAME

    def __post_init__(self):
        object.__setattr__(self, 'pooling', Pooling(self.pooling))
        if isinstance(self.bins, bool) or int(self.bins) != self.bins or self.bins < 1:
            raise InvalidArgumentError(f'bins must be a positive integer. Got: bins={self.bins!r}')

    @classmethod
    def from_env(cls, **overrides) -> 'ReportConfig':
        """Build a config whose bin count defaults to COUGHSPEC_HIST_BINS."""
        overrides.setdefault('bins', CoughSpecEnv.get_int('HIST_BINS', DEFAULT_HISTOGRAM_BINS))
        return cls(**overrides)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['pooling'] = self.pooling.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'ReportConfig':
        return cls(**data)


@dataclass(frozen=True)
class AttributeSummary:
    stats: SummaryStats
    histogram: Histogram

    def to_dict(self) -> dict:
        return {'stats': self.stats.to_dict(), 'histogram': self.histogram.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> 'AttributeSummary':
        return cls(
            stats=SummaryStats.from_dict(data['stats']),
            histogram=Histogram.from_dict(data['histogram']),
        )


@dataclass(frozen=True)
class SkippedClip:
    source_path: str
    reason: str


@dataclass(eq=False)
class GroupReport:
    """
    Statistical characterization of one group of clips.

    Attributes:
        group_label: Group name, used in export file names
        clip_count: Clips that were characterized (skipped clips excluded)
        frame_count: Total frames over those clips
        per_attribute: Descriptor name -> stats and histogram, all seven names
        config_echo: Feature and report configuration used
        silent_frame_count: Frames with zero windowed power
        raw_flux: Summary of un-normalized flux values
        sources: Source path of every characterized clip
        skipped: Clips that could not be characterized, with the reason
    """

    group_label: str
    clip_count: int
    frame_count: int
    per_attribute: dict[str, AttributeSummary]
    config_echo: dict
    silent_frame_count: int = 0
    raw_flux: SummaryStats | None = None
    sources: list[str] = field(default_factory=list)
    skipped: list[SkippedClip] = field(default_factory=list)

    def stats(self, attribute: str) -> SummaryStats:
        return self.per_attribute[attribute].stats

    def histogram(self, attribute: str) -> Histogram:
        return self.per_attribute[attribute].histogram

    def to_dict(self) -> dict:
        return {
            'group_label': self.group_label,
            'clip_count': self.clip_count,
            'frame_count': self.frame_count,
            'silent_frame_count': self.silent_frame_count,
            'per_attribute': {
                name: self.per_attribute[name].to_dict() for name in FEATURE_NAMES
            },
            'raw_flux': self.raw_flux.to_dict() if self.raw_flux else None,
            'config_echo': self.config_echo,
            'sources': list(self.sources),
            'skipped': [asdict(item) for item in self.skipped],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'GroupReport':
        return cls(
            group_label=data['group_label'],
            clip_count=int(data['clip_count']),
            frame_count=int(data['frame_count']),
            silent_frame_count=int(data.get('silent_frame_count', 0)),
            per_attribute={
                name: AttributeSummary.from_dict(value)
                for name, value in data['per_attribute'].items()
            },
            raw_flux=SummaryStats.from_dict(data['raw_flux']) if data.get('raw_flux') else None,
            config_echo=data['config_echo'],
            sources=list(data.get('sources', [])),
            skipped=[SkippedClip(**item) for item in data.get('skipped', [])],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@dataclass(frozen=True)
class OrderingFact:
    """
    Descending ranking of groups for one (attribute, statistic) pair.

    `reference` optionally carries the published value of the same statistic
    for each reference group, for side-by-side display.
    """

    attribute: str
    statistic: str
    ranking: tuple[str, ...]
    values: tuple[float, ...]
    tied: bool
    reference: dict[str, float] | None = None

    def describe(self) -> str:
        parts = [f'{self.ranking[0]} ({_format_value(self.attribute, self.values[0])})']
        for index in range(1, len(self.ranking)):
            relation = '=' if _is_tie(self.values[index - 1], self.values[index]) else '>'
            parts.append(
                f'{relation} {self.ranking[index]} '
                f'({_format_value(self.attribute, self.values[index])})'
            )
        text = f'{self.attribute} {self.statistic}: ' + ' '.join(parts)
        if self.tied:
            text += '  [tie]'
        return text

    def to_dict(self) -> dict:
        return {
            'attribute': self.attribute,
            'statistic': self.statistic,
            'ranking': list(self.ranking),
            'values': list(self.values),
            'tied': self.tied,
            'reference': self.reference,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'OrderingFact':
        return cls(
            attribute=data['attribute'],
            statistic=data['statistic'],
            ranking=tuple(data['ranking']),
            values=tuple(float(value) for value in data['values']),
            tied=bool(data['tied']),
            reference=data.get('reference'),
        )


@dataclass(eq=False)
class ComparisonReport:
    reports: list[GroupReport]
    orderings: list[OrderingFact]
    with_reference: bool = False

    def to_dict(self) -> dict:
        return {
            'reports': [report.to_dict() for report in self.reports],
            'orderings': [fact.to_dict() for fact in self.orderings],
            'with_reference': self.with_reference,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ComparisonReport':
        return cls(
            reports=[GroupReport.from_dict(item) for item in data['reports']],
            orderings=[OrderingFact.from_dict(item) for item in data['orderings']],
            with_reference=bool(data.get('with_reference', False)),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComparisonReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _is_tie(first: float, second: float) -> bool:
    return math.isclose(first, second, rel_tol=TIE_REL_TOL, abs_tol=1e-15)


def _extract_or_skip(
    clip: AudioClip,
    feature_config: FeatureConfig,
) -> FeatureSet | SkippedClip:
    try:
        feature_set = extract_all(canonicalize(clip), feature_config)
        if feature_set.frame_count < 2:
            raise TooFewFramesError(
                f'{clip.source_path or "<clip>"}: spectral flux needs >= 2 frames. '
                f'Got: {feature_set.frame_count}'
            )
        return feature_set
    except (ClipTooShortError, TooFewFramesError) as e:
        return SkippedClip(source_path=clip.source_path, reason=str(e))


def _attribute_values(
    feature_sets: list[FeatureSet],
    name: str,
    exclude_silent: bool,
    use_raw_flux: bool = False,
) -> list[np.ndarray]:
    per_clip = []
    for feature_set in feature_sets:
        series = feature_set[name]
        values = series.raw_values if use_raw_flux else series.values
        if exclude_silent:
            values = values[~feature_set.silent_mask_for(name)]
        per_clip.append(values)
    return per_clip


def _group_minmax(per_clip: list[np.ndarray]) -> list[np.ndarray]:
    """Min-max scale flux with bounds taken over the whole group."""
    pooled = np.concatenate(per_clip)
    if pooled.size == 0:
        return per_clip
    low, high = float(np.min(pooled)), float(np.max(pooled))
    if high <= low:
        return [np.zeros_like(values) for values in per_clip]
    return [(values - low) / (high - low) for values in per_clip]


def characterize_group(
    clips: list[AudioClip],
    label: str,
    feature_config: FeatureConfig | None = None,
    report_config: ReportConfig | None = None,
    workers: int = 1,
    progress: bool = False,
) -> GroupReport:
    """
    Extract descriptors from every clip of a group and aggregate them.

    Clips are resampled to 22050 Hz first. Clips yielding fewer than two
    frames have no flux pair; they are skipped with a warning and listed in
    `GroupReport.skipped`.

    Args:
        clips: Clips of the group
        label: Group label; clips carrying a different label are rejected
        feature_config: Extraction parameters (defaults reproduce the reference setup)
        report_config: Aggregation parameters
        workers: Number of threads extracting clips concurrently
        progress: Show a tqdm progress bar

    Raises:
        EmptyGroupError: No clips given, or none of them could be characterized
        InvalidArgumentError: A clip is labeled for another group
    """
    feature_config = feature_config or FeatureConfig()
    report_config = report_config or ReportConfig()
    if not clips:
        raise EmptyGroupError(f'group {label!r} has no clips')
    if not label or '/' in label or '\\' in label:
        raise InvalidArgumentError(f'group label must be a non-empty file-name-safe string. Got: {label!r}')
    for clip in clips:
        if clip.group_label not in (None, label):
            raise InvalidArgumentError(
                f'clip {clip.source_path or "<clip>"} is labeled {clip.group_label!r}, '
                f'expected {label!r}'
            )

    def extract(clip):
        return _extract_or_skip(clip, feature_config)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(tqdm(
            pool.map(extract, clips),
            total=len(clips),
            desc=f'Characterizing {label}',
            unit='clip',
            disable=not progress,
        ))

    feature_sets = [result for result in results if isinstance(result, FeatureSet)]
    skipped = [result for result in results if isinstance(result, SkippedClip)]
    for item in skipped:
        pipeline_logger.warning(f'Skipping clip: {item.reason}')
    if not feature_sets:
        raise EmptyGroupError(
            f'group {label!r}: none of {len(clips)} clips could be characterized '
            f'(first reason: {skipped[0].reason})'
        )

    exclude_silent = report_config.exclude_silent
    per_attribute = {}
    for name in FEATURE_NAMES:
        group_scaled_flux = (
            name == 'flux'
            and feature_config.flux_normalization is FluxNormalization.GROUP_MINMAX
        )
        per_clip = _attribute_values(
            feature_sets, name, exclude_silent, use_raw_flux=group_scaled_flux,
        )
        if group_scaled_flux:
            per_clip = _group_minmax(per_clip)
        pooled = np.concatenate(per_clip)
        if pooled.size == 0:
            raise EmptyGroupError(
                f'group {label!r}: no {name} values left to aggregate '
                '(every frame silent)'
            )
        if report_config.pooling is Pooling.RECORDING:
            stats = average_stats([summarize(values) for values in per_clip if values.size])
        else:
            stats = summarize(pooled)
        per_attribute[name] = AttributeSummary(
            stats=stats,
            histogram=build_histogram(pooled, bins=report_config.bins),
        )

    raw_flux = np.concatenate(
        _attribute_values(feature_sets, 'flux', exclude_silent, use_raw_flux=True)
    )
    report = GroupReport(
        group_label=label,
        clip_count=len(feature_sets),
        frame_count=sum(feature_set.frame_count for feature_set in feature_sets),
        per_attribute=per_attribute,
        config_echo={
            'features': feature_config.to_dict(),
            'report': report_config.to_dict(),
        },
        silent_frame_count=sum(feature_set.silent_frame_count for feature_set in feature_sets),
        raw_flux=summarize(raw_flux) if raw_flux.size else None,
        sources=[feature_set.source_path for feature_set in feature_sets],
        skipped=skipped,
    )
    pipeline_logger.info(
        f'Group {label}: {report.clip_count} clips, {report.frame_count} frames '
        f'({report.silent_frame_count} silent, {len(skipped)} clips skipped)'
    )
    return report


def compare_groups(reports: list[GroupReport], with_reference: bool = False) -> ComparisonReport:
    """
    Rank groups by the mean and the max of every descriptor.

    Groups with equal values are ordered by label and the fact is flagged as a tie.

    Raises:
        InvalidArgumentError: Fewer than two reports
        DuplicateLabelsError: Two reports share a label
    """
    if len(reports) < 2:
        raise InvalidArgumentError(f'comparison needs at least 2 groups. Got: {len(reports)}')
    labels = [report.group_label for report in reports]
    duplicates = sorted({label for label in labels if labels.count(label) > 1})
    if duplicates:
        raise DuplicateLabelsError(f'group labels must be distinct. Duplicated: {duplicates}')

    orderings = []
    for attribute in FEATURE_NAMES:
        for statistic in RANKED_STATISTICS:
            scored = sorted(
                ((getattr(report.stats(attribute), statistic), report.group_label) for report in reports),
                key=lambda item: (-item[0], item[1]),
            )
            values = tuple(value for value, _ in scored)
            tied = any(_is_tie(values[i - 1], values[i]) for i in range(1, len(values)))
            reference = None
            if with_reference:
                reference = {
                    group: REFERENCE_TABLES[group][attribute][statistic]
                    for group in REFERENCE_GROUPS
                }
            orderings.append(OrderingFact(
                attribute=attribute,
                statistic=statistic,
                ranking=tuple(label for _, label in scored),
                values=values,
                tied=tied,
                reference=reference,
            ))
    debug_logger.debug(f'Compared groups {labels}: {sum(f.tied for f in orderings)} tied facts')
    return ComparisonReport(reports=list(reports), orderings=orderings, with_reference=with_reference)


# export

def _format_number(value) -> str:
    """Shortest round-trip decimal for floats, plain digits for integers."""
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell if isinstance(cell, str) else _format_number(cell) for cell in row])
    return buffer.getvalue()


def _json_text(data: dict) -> str:
    return json.dumps(data, indent=2, allow_nan=False) + '\n'


def _write_text(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding='utf-8', newline='')
    except OSError as e:
        raise ReportIOError(f'Cannot write {path}: {e}') from e
    debug_logger.debug(f'Wrote {path}')
    return path


def _group_csv_files(report: GroupReport, dest: Path) -> list[Path]:
    rows = [[name, *report.stats(name).as_row()] for name in FEATURE_NAMES]
    written = [_write_text(
        dest / f'{report.group_label}.stats.csv',
        _csv_text(['attribute', *STAT_NAMES], rows),
    )]
    for name in FEATURE_NAMES:
        histogram = report.histogram(name)
        hist_rows = [
            [histogram.bin_edges[i], histogram.bin_edges[i + 1], histogram.counts[i]]
            for i in range(histogram.bins)
        ]
        written.append(_write_text(
            dest / f'{report.group_label}.{name}.hist.csv',
            _csv_text(['bin_lo', 'bin_hi', 'count'], hist_rows),
        ))
    return written


def _orderings_csv(comparison: ComparisonReport) -> str:
    header = ['attribute', 'statistic', 'ranking', 'values', 'tied']
    if comparison.with_reference:
        header += [f'reference_{group}' for group in REFERENCE_GROUPS]
    rows = []
    for fact in comparison.orderings:
        row = [
            fact.attribute,
            fact.statistic,
            ';'.join(fact.ranking),
            ';'.join(_format_number(value) for value in fact.values),
            fact.tied,
        ]
        if comparison.with_reference:
            row += [fact.reference[group] for group in REFERENCE_GROUPS]
        rows.append(row)
    return _csv_text(header, rows)


def export(
    report: GroupReport | ComparisonReport,
    format: ExportFormat | str,
    dest: str | Path,
    name: str = 'comparison',
) -> list[Path]:
    """
    Write a report into the directory `dest`.

    Group reports produce `<label>.stats.csv` plus `<label>.<attribute>.hist.csv`
    (csv) or `<label>.report.json` (json). Comparison reports produce every
    group's files plus `<name>.orderings.csv` (csv) or `<name>.comparison.json` (json).
    Identical inputs give byte-identical files.

    Returns:
        Paths of the written files

    Raises:
        ReportIOError: The destination is not writable
    """
    format = ExportFormat(format)
    dest = Path(dest)
    try:
        dest.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ReportIOError(f'Cannot create output directory {dest}: {e}') from e

    if isinstance(report, GroupReport):
        if format is ExportFormat.CSV:
            return _group_csv_files(report, dest)
        return [_write_text(dest / f'{report.group_label}.report.json', _json_text(report.to_dict()))]

    if format is ExportFormat.CSV:
        written = []
        for group_report in report.reports:
            written += _group_csv_files(group_report, dest)
        written.append(_write_text(dest / f'{name}.orderings.csv', _orderings_csv(report)))
        return written
    return [_write_text(dest / f'{name}.comparison.json', _json_text(report.to_dict()))]


def load_report(path: str | Path) -> GroupReport:
    """
    Read a `<label>.report.json` written by `export`.

    Raises:
        ReportIOError: The file cannot be read or is not a group report
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
        return GroupReport.from_dict(data)
    except OSError as e:
        raise ReportIOError(f'Cannot read {path}: {e}') from e
    except (ValueError, KeyError, TypeError) as e:
        raise ReportIOError(f'{path} is not a group report: {e}') from e


def export_series(feature_set: FeatureSet, dest: str | Path) -> Path:
    """
    Write the per-frame descriptor series of one clip as plot-ready CSV.

    Flux of the pair (i-1, i) is written on frame i; frame 0 leaves both
    flux columns empty.
    """
    flux = feature_set['flux']
    header = ['frame', 'time_s', 'silent', *FEATURE_NAMES, 'flux_raw']
    rows = []
    for index in range(feature_set.frame_count):
        row = [index, feature_set.frame_times[index], bool(feature_set.silent[index])]
        for name in FEATURE_NAMES:
            if name == 'flux':
                row.append(flux.values[index - 1] if index else '')
            else:
                row.append(feature_set[name].values[index])
        row.append(flux.raw_values[index - 1] if index else '')
        rows.append(row)
    return _write_text(Path(dest), _csv_text(header, rows))


# console tables

def _format_value(attribute: str, value: float) -> str:
    if attribute in ('rolloff', 'centroid', 'bandwidth'):
        return f'{value:.0f}'
    return f'{value:.3f}'


def format_stats_table(report: GroupReport) -> str:
    """Render a report as a fixed-width table: one row per attribute, min..Std columns."""
    title_width = max(len(title) for title in ATTRIBUTE_TITLES.values())
    lines = [
        f'Statistical analysis of {report.group_label} '
        f'({report.clip_count} clips, {report.frame_count} frames)',
        'Attributes'.ljust(title_width) + ''.join(f'{column:>10}' for column in TABLE_HEADER),
    ]
    for name in FEATURE_NAMES:
        cells = ''.join(
            f'{_format_value(name, value):>10}' for value in report.stats(name).as_row()
        )
        lines.append(ATTRIBUTE_TITLES[name].ljust(title_width) + cells)
    return '\n'.join(lines)


def format_orderings(comparison: ComparisonReport) -> str:
    lines = []
    for fact in comparison.orderings:
        line = fact.describe()
        if fact.reference:
            published = ', '.join(
                f'{group} {_format_value(fact.attribute, value)}'
                for group, value in fact.reference.items()
            )
            line += f'  | reference: {published}'
        lines.append(line)
    return '\n'.join(lines)
