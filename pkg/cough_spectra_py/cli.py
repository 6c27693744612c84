import re
import sys
import glob
import argparse
from pathlib import Path
from dataclasses import dataclass, field

from dotenv import load_dotenv

from cough_spectra_py.logger import pipeline_logger
from cough_spectra_py.utils.env import CoughSpecEnv
from cough_spectra_py.audio.clip import AudioClip
from cough_spectra_py.audio.ingest import canonicalize, decode_wav, write_wav
from cough_spectra_py.dsp.framing import WindowKind
from cough_spectra_py.dsp.features import FeatureConfig, FluxNormalization, extract_all
from cough_spectra_py.synth.oracle import SynthKind, SynthSpec, synth
from cough_spectra_py.analysis.report import (
    ExportFormat,
    GroupReport,
    Pooling,
    ReportConfig,
    characterize_group,
    compare_groups,
    export,
    export_series,
    format_orderings,
    format_stats_table,
    load_report,
)
from cough_spectra_py.errors import (
    CoughSpecError,
    EmptyAudioError,
    EmptyGroupError,
    InvalidArgumentError,
    MalformedFileError,
    ReportIOError,
    UnsupportedFormatError,
)


EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_USAGE = 2

FLUX_CHOICES = {
    'minmax': FluxNormalization.RECORD_MINMAX,
    'group': FluxNormalization.GROUP_MINMAX,
    'raw': FluxNormalization.RAW,
}


@dataclass
class CliConfig:
    """
    Resolved command-line configuration of one invocation.

    Attributes:
        command: analyze, compare or synth
        inputs: WAV paths/glob patterns (analyze) or exported JSON reports (compare)
        group_label: Label of the analyzed group
        output_dir: Directory receiving exports
        format: csv or json
        feature_config: Descriptor extraction parameters
        report_config: Aggregation parameters
        sets: Labeled input sets for compare, label -> patterns
        reference_ranges: Annotate comparisons with the published reference tables
        series: Also write per-frame series CSV for every clip
        workers: Threads used to extract clips
        quiet: Hide progress bars
        name: Base name of comparison exports
        synth_spec: Signal description for synth
        synth_out: WAV destination for synth ('-' for standard output)
    """

    command: str
    inputs: list[str] = field(default_factory=list)
    group_label: str = 'group'
    output_dir: Path = Path('.')
    format: ExportFormat = ExportFormat.CSV
    feature_config: FeatureConfig = field(default_factory=FeatureConfig)
    report_config: ReportConfig = field(default_factory=ReportConfig)
    sets: dict[str, list[str]] = field(default_factory=dict)
    reference_ranges: bool = False
    series: bool = False
    workers: int = 1
    quiet: bool = False
    name: str = 'comparison'
    synth_spec: SynthSpec | None = None
    synth_out: str = '-'

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'CliConfig':
        """
        Build the configuration from parsed arguments.

        Unset options fall back to COUGHSPEC_* environment variables, then to
        the reference defaults (22050 Hz, 512/256 framing, 85% roll-off).

        Raises:
            CoughSpecError: An option value is out of range
        """
        if args.command == 'synth':
            spec = SynthSpec(
                kind=args.kind,
                frequency=args.freq,
                duration=args.dur,
                seed=args.seed,
                decay=args.decay,
                harmonics=args.harmonics,
                sample_rate=args.sample_rate,
            )
            out = args.out
            if out is None:
                out = '-' if not sys.stdout.isatty() else f'{spec.kind.value}.wav'
            return cls(command='synth', synth_spec=spec, synth_out=out, quiet=args.quiet)

        feature_overrides = dict(
            entropy_normalized=not args.no_entropy_norm,
            flux_normalization=FLUX_CHOICES[args.flux],
            window_kind=WindowKind(args.window),
        )
        if args.roll_percent is not None:
            feature_overrides['roll_percent'] = args.roll_percent
        if args.frame_length is not None:
            feature_overrides['frame_length'] = args.frame_length
            feature_overrides.setdefault('hop', args.frame_length // 2)
        if args.hop is not None:
            feature_overrides['hop'] = args.hop
        report_overrides = dict(
            exclude_silent=args.exclude_silent,
            pooling=Pooling(args.pooling),
        )
        if args.bins is not None:
            report_overrides['bins'] = args.bins
        sets = {}
        for item in getattr(args, 'set', None) or []:
            label, _, pattern = item.partition('=')
            if not label or not pattern:
                raise InvalidArgumentError(f'--set expects LABEL=PATTERN. Got: {item!r}')
            sets.setdefault(label, []).append(pattern)
        return cls(
            command=args.command,
            inputs=list(args.inputs),
            group_label=getattr(args, 'group', None) or 'group',
            output_dir=Path(args.out or CoughSpecEnv.get_str('OUTPUT_DIR', '.')),
            format=ExportFormat(args.format),
            feature_config=FeatureConfig.from_env(**feature_overrides),
            report_config=ReportConfig.from_env(**report_overrides),
            sets=sets,
            reference_ranges=getattr(args, 'reference_ranges', False),
            series=getattr(args, 'series', False),
            workers=args.workers if args.workers is not None else CoughSpecEnv.get_int('WORKERS', 1),
            quiet=args.quiet,
            name=getattr(args, 'name', None) or 'comparison',
        )


def resolve_inputs(patterns: list[str]) -> list[str]:
    """Expand glob patterns (sorted), keep literal paths and '-' as given."""
    resolved = []
    for pattern in patterns:
        if pattern == '-' or not glob.has_magic(pattern):
            resolved.append(pattern)
            continue
        matches = sorted(glob.glob(pattern))
        if not matches:
            pipeline_logger.warning(f'Pattern {pattern!r} matched no files')
        resolved.extend(matches)
    return resolved


def load_clips(paths: list[str], label: str) -> list[AudioClip]:
    """Decode every path, skipping unreadable files with a warning."""
    clips = []
    for path in paths:
        try:
            clips.append(decode_wav(path).with_label(label))
        except (MalformedFileError, UnsupportedFormatError, EmptyAudioError, OSError) as e:
            pipeline_logger.warning(f'Skipping {path}: {e}')
    return clips


def _characterize(cfg: CliConfig, clips: list[AudioClip], label: str) -> GroupReport:
    return characterize_group(
        clips,
        label,
        feature_config=cfg.feature_config,
        report_config=cfg.report_config,
        workers=cfg.workers,
        progress=not cfg.quiet,
    )


def _write_series(cfg: CliConfig, clips: list[AudioClip]) -> None:
    for index, clip in enumerate(clips):
        try:
            feature_set = extract_all(canonicalize(clip), cfg.feature_config)
        except CoughSpecError:
            continue
        stem = re.sub(r'[^\w.-]+', '_', Path(clip.source_path).stem).strip('_') or 'clip'
        export_series(
            feature_set,
            cfg.output_dir / f'{cfg.group_label}.{index:03d}.{stem}.series.csv',
        )


def run_analyze(cfg: CliConfig) -> int:
    """Characterize one group of WAV files, export the report and print its table."""
    paths = resolve_inputs(cfg.inputs)
    clips = load_clips(paths, cfg.group_label)
    if not clips:
        pipeline_logger.error('No valid input files')
        return EXIT_USAGE
    try:
        report = _characterize(cfg, clips, cfg.group_label)
    except EmptyGroupError as e:
        pipeline_logger.error(str(e))
        return EXIT_USAGE
    try:
        written = export(report, cfg.format, cfg.output_dir)
        if cfg.series:
            _write_series(cfg, clips)
    except OSError as e:
        pipeline_logger.error(str(e))
        return EXIT_IO_ERROR
    pipeline_logger.info(f'Wrote {len(written)} files to {cfg.output_dir}')
    print(format_stats_table(report))
    return EXIT_OK


def run_compare(cfg: CliConfig) -> int:
    """Compare groups given as exported JSON reports and/or labeled input sets."""
    reports = []
    try:
        for path in resolve_inputs(cfg.inputs):
            reports.append(load_report(path))
    except ReportIOError as e:
        pipeline_logger.error(str(e))
        return EXIT_IO_ERROR
    for label, patterns in cfg.sets.items():
        clips = load_clips(resolve_inputs(patterns), label)
        if not clips:
            pipeline_logger.warning(f'Set {label!r} has no valid input files')
            continue
        try:
            reports.append(_characterize(cfg, clips, label))
        except EmptyGroupError as e:
            pipeline_logger.warning(str(e))
    if len(reports) < 2:
        pipeline_logger.error(f'Comparison needs at least 2 groups. Got: {len(reports)}')
        return EXIT_USAGE
    try:
        comparison = compare_groups(reports, with_reference=cfg.reference_ranges)
    except CoughSpecError as e:
        pipeline_logger.error(str(e))
        return EXIT_USAGE
    try:
        written = export(comparison, cfg.format, cfg.output_dir, name=cfg.name)
    except OSError as e:
        pipeline_logger.error(str(e))
        return EXIT_IO_ERROR
    pipeline_logger.info(f'Wrote {len(written)} files to {cfg.output_dir}')
    print(format_orderings(comparison))
    return EXIT_OK


def run_synth(cfg: CliConfig) -> int:
    """Write the synthetic clip described by cfg.synth_spec as 16-bit WAV."""
    clip = synth(cfg.synth_spec)
    try:
        write_wav(clip, cfg.synth_out)
    except OSError as e:
        pipeline_logger.error(str(e))
        return EXIT_IO_ERROR
    if cfg.synth_out != '-':
        pipeline_logger.info(
            f'Wrote {cfg.synth_out}: {cfg.synth_spec.kind.value}, '
            f'{clip.num_samples} samples at {clip.sample_rate} Hz'
        )
    return EXIT_OK


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--env-file', default=None, help='load COUGHSPEC_* variables from a dotenv file')
    parser.add_argument('--quiet', action='store_true', help='hide progress bars')


def _add_analysis_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--out', default=None, help='output directory (env: COUGHSPEC_OUTPUT_DIR)')
    parser.add_argument('--format', choices=[f.value for f in ExportFormat], default='csv')
    parser.add_argument('--bins', type=int, default=None, help='histogram bins (env: COUGHSPEC_HIST_BINS)')
    parser.add_argument('--roll-percent', type=float, default=None, help='roll-off fraction (env: COUGHSPEC_ROLL_PERCENT)')
    parser.add_argument('--no-entropy-norm', action='store_true', help='report entropy in bits')
    parser.add_argument('--flux', choices=list(FLUX_CHOICES), default='minmax', help='flux normalization scope')
    parser.add_argument('--exclude-silent', action='store_true', help='drop silent frames before aggregating')
    parser.add_argument('--pooling', choices=[p.value for p in Pooling], default='frame')
    parser.add_argument('--frame-length', type=int, default=None)
    parser.add_argument('--hop', type=int, default=None)
    parser.add_argument('--window', choices=[w.value for w in WindowKind], default='hann')
    parser.add_argument('--workers', type=int, default=None, help='extraction threads (env: COUGHSPEC_WORKERS)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='coughspec',
        description='Spectral and temporal characterization of short cough and speech recordings',
    )
    commands = parser.add_subparsers(dest='command', required=True)

    analyze = commands.add_parser('analyze', help='characterize one group of WAV files')
    analyze.add_argument('inputs', nargs='+', help="WAV files or glob patterns, '-' for stdin")
    analyze.add_argument('--group', default='group', help='group label used in output file names')
    analyze.add_argument('--series', action='store_true', help='also write per-frame series CSV per clip')
    _add_analysis_options(analyze)
    _add_common_options(analyze)

    compare = commands.add_parser('compare', help='rank groups by descriptor mean and max')
    compare.add_argument('inputs', nargs='*', help='exported <label>.report.json files')
    compare.add_argument('--set', action='append', metavar='LABEL=PATTERN', help='labeled WAV input set (repeatable)')
    compare.add_argument(
        '--paper-ranges', '--reference-ranges', dest='reference_ranges', action='store_true',
        help='annotate with the published reference tables',
    )
    compare.add_argument('--name', default='comparison', help='base name of comparison exports')
    _add_analysis_options(compare)
    _add_common_options(compare)

    synth_parser = commands.add_parser('synth', help='write a deterministic synthetic WAV')
    synth_parser.add_argument('kind', choices=[k.value for k in SynthKind])
    synth_parser.add_argument('--freq', type=float, default=None, help='tone or fundamental frequency in Hz')
    synth_parser.add_argument('--dur', type=float, default=1.0, help='duration in seconds')
    synth_parser.add_argument('--seed', type=int, default=0)
    synth_parser.add_argument('--decay', type=float, default=0.1, help='cough envelope time constant in seconds')
    synth_parser.add_argument('--harmonics', type=int, default=6)
    synth_parser.add_argument('--sample-rate', type=int, default=22050)
    synth_parser.add_argument('--out', default=None, help="WAV path, '-' for stdout (default when piped)")
    _add_common_options(synth_parser)
    return parser


COMMANDS = {
    'analyze': run_analyze,
    'compare': run_compare,
    'synth': run_synth,
}


def main(argv: list[str] | None = None) -> int:
    """Entry point of the `coughspec` command; returns the exit status."""
    args = build_parser().parse_args(argv)
    if args.env_file:
        load_dotenv(args.env_file, override=False)
    try:
        cfg = CliConfig.from_args(args)
    except (CoughSpecError, ValueError) as e:
        pipeline_logger.error(str(e))
        return EXIT_USAGE
    return COMMANDS[cfg.command](cfg)


if __name__ == '__main__':
    sys.exit(main())
