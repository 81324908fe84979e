"""Speech corpus preprocessing and synthesis evaluation toolkit."""

from . import cli, corpus, dsp, enhance, metrics, pitch, serialize, wavio
from .corpus import (
    FilterConfig,
    FilterResult,
    Manifest,
    UtteranceRecord,
    apply_filter,
    load_manifest,
    save_manifest,
    summarize,
)
from .dsp import (
    FeatureSeq,
    MelConfig,
    StftConfig,
    Waveform,
    dtw_align,
    griffin_lim,
    istft,
    log_mel,
    mel_filterbank,
    mfcc,
    resample,
    spectral_convergence,
    stft,
)
from .enhance import (
    DryWetConfig,
    SilencePolicy,
    VadConfig,
    dry_wet_mix,
    estimate_snr,
    normalize_volume,
    trim_and_compress,
    vad_label,
)
from .errors import (
    AllSilenceError,
    AllZeroError,
    ClippingWarning,
    EmptyReferenceError,
    InvalidConfigError,
    NoCovoicedFramesError,
    ParseError,
    TrackLengthWarning,
    VoxkitError,
)
from .metrics import (
    CerReport,
    F0MetricReport,
    cer,
    f0_metrics,
    ffe,
    gpe,
    mcd,
    msd,
    normalize_text,
    vde,
)
from .pitch import PitchConfig, PitchTrack, align_tracks, extract_pitch
from .wavio import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "AllSilenceError",
    "AllZeroError",
    "CerReport",
    "ClippingWarning",
    "DryWetConfig",
    "EmptyReferenceError",
    "F0MetricReport",
    "FeatureSeq",
    "FilterConfig",
    "FilterResult",
    "InvalidConfigError",
    "Manifest",
    "MelConfig",
    "NoCovoicedFramesError",
    "ParseError",
    "PitchConfig",
    "PitchTrack",
    "SilencePolicy",
    "StftConfig",
    "TrackLengthWarning",
    "UtteranceRecord",
    "VadConfig",
    "VoxkitError",
    "Waveform",
    "align_tracks",
    "apply_filter",
    "cer",
    "cli",
    "corpus",
    "dry_wet_mix",
    "dsp",
    "dtw_align",
    "enhance",
    "estimate_snr",
    "extract_pitch",
    "f0_metrics",
    "ffe",
    "gpe",
    "griffin_lim",
    "istft",
    "load_manifest",
    "log_mel",
    "mcd",
    "mel_filterbank",
    "metrics",
    "mfcc",
    "msd",
    "normalize_text",
    "normalize_volume",
    "pitch",
    "read_wav",
    "resample",
    "save_manifest",
    "serialize",
    "spectral_convergence",
    "stft",
    "summarize",
    "trim_and_compress",
    "vad_label",
    "vde",
    "wavio",
    "write_wav",
]
