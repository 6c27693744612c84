from cough_spectra_py.audio.clip import AudioClip
from cough_spectra_py.audio.ingest import decode_wav, resample, canonicalize, write_wav
from cough_spectra_py.dsp.framing import FrameMatrix, WindowKind, frame_signal
from cough_spectra_py.dsp.spectrum import PowerSpectrum, power_spectrum
from cough_spectra_py.dsp.features import (
    FeatureConfig,
    FeatureSeries,
    FeatureSet,
    FluxNormalization,
    extract_all,
    flux_between,
    spectral_bandwidth,
    spectral_centroid,
    spectral_entropy,
    spectral_flatness,
    spectral_flux,
    spectral_rolloff,
    zero_crossing_rate,
)
from cough_spectra_py.analysis.stats import Histogram, SummaryStats, build_histogram, summarize
from cough_spectra_py.analysis.report import (
    ComparisonReport,
    GroupReport,
    ReportConfig,
    characterize_group,
    compare_groups,
    export,
    export_series,
    load_report,
)
from cough_spectra_py.synth.oracle import SynthKind, SynthSpec, synth
from cough_spectra_py.utils.env import CoughSpecEnv


__all__ = [
    'AudioClip',
    'decode_wav',
    'resample',
    'canonicalize',
    'write_wav',
    'FrameMatrix',
    'WindowKind',
    'frame_signal',
    'PowerSpectrum',
    'power_spectrum',
    'FeatureConfig',
    'FeatureSeries',
    'FeatureSet',
    'FluxNormalization',
    'extract_all',
    'flux_between',
    'spectral_bandwidth',
    'spectral_centroid',
    'spectral_entropy',
    'spectral_flatness',
    'spectral_flux',
    'spectral_rolloff',
    'zero_crossing_rate',
    'Histogram',
    'SummaryStats',
    'build_histogram',
    'summarize',
    'ComparisonReport',
    'GroupReport',
    'ReportConfig',
    'characterize_group',
    'compare_groups',
    'export',
    'export_series',
    'load_report',
    'SynthKind',
    'SynthSpec',
    'synth',
    'CoughSpecEnv',
]
