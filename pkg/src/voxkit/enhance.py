"""Waveform cleanup: mixing, activity labeling, silence compression, leveling."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dsp import Waveform
from .errors import (
    AllSilenceError,
    AllZeroError,
    ClippingWarning,
    EmptySignalError,
    InvalidConfigError,
    LengthMismatchError,
    RateMismatchError,
)

VAD_SAMPLE_RATES = (8000, 16000, 22050, 44100, 48000)
PEAK_TARGET = 0.95  # headroom below full scale after normalization


@dataclass(frozen=True)
class DryWetConfig:
    """How much of the original signal to keep in an enhanced mix."""

    dry: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.dry <= 1.0:
            raise InvalidConfigError(f"dry must lie in [0, 1], got {self.dry}")


def dry_wet_mix(noisy: Waveform, enhanced: Waveform, cfg: DryWetConfig | None = None) -> Waveform:
    """Blend dry * noisy + (1 - dry) * enhanced and clip to [-1, 1].

    A small dry share masks artifacts the enhancer introduces. Warns with
    the clipped-sample count when clipping occurs.
    """
    cfg = cfg or DryWetConfig()
    if noisy.sample_rate != enhanced.sample_rate:
        raise RateMismatchError(
            f"sample rates differ: {noisy.sample_rate} vs {enhanced.sample_rate}"
        )
    if len(noisy) != len(enhanced):
        raise LengthMismatchError(f"lengths differ: {len(noisy)} vs {len(enhanced)}")
    mixed = cfg.dry * noisy.samples + (1.0 - cfg.dry) * enhanced.samples
    clipped = np.clip(mixed, -1.0, 1.0)
    n_clipped = int(np.count_nonzero(clipped != mixed))
    if n_clipped:
        warnings.warn(ClippingWarning(f"{n_clipped} samples clipped to [-1, 1]"))
    return Waveform(clipped, noisy.sample_rate)


@dataclass(frozen=True)
class VadConfig:
    """Energy-threshold voice activity detection parameters.

    Aggressiveness L widens the smoothing window to 2L+1 frames (a frame
    survives only if its whole window is above threshold) and drops speech
    runs shorter than L+1 frames, so higher levels keep strictly fewer
    speech frames.
    """

    frame_ms: float = 10.0
    energy_threshold_db: float = -45.0
    aggressiveness: int = 0

    def __post_init__(self):
        if self.frame_ms <= 0:
            raise InvalidConfigError(f"frame_ms must be positive, got {self.frame_ms}")
        if self.aggressiveness not in (0, 1, 2, 3):
            raise InvalidConfigError(
                f"aggressiveness must be 0, 1, 2, or 3, got {self.aggressiveness}"
            )


@dataclass(frozen=True)
class FrameLabels:
    """Per-frame speech flags at a fixed nominal frame duration."""

    speech: np.ndarray
    frame_ms: float

    def __post_init__(self):
        speech = np.asarray(self.speech, dtype=bool)
        if speech.ndim != 1 or len(speech) == 0:
            raise InvalidConfigError("labels must be a non-empty 1-D array")
        if self.frame_ms <= 0:
            raise InvalidConfigError(f"frame_ms must be positive, got {self.frame_ms}")
        object.__setattr__(self, "speech", speech)

    def __len__(self):
        return len(self.speech)


def frame_length_samples(sample_rate: int, frame_ms: float) -> int:
    """Samples per analysis frame (10 ms at 22050 Hz rounds to 220)."""
    return max(1, int(round(sample_rate * frame_ms / 1000.0)))


def _frame_powers(samples: np.ndarray, flen: int) -> np.ndarray:
    n = len(samples)
    n_frames = (n + flen - 1) // flen
    power = np.empty(n_frames)
    full = n // flen
    if full:
        power[:full] = (samples[: full * flen].reshape(full, flen) ** 2).mean(axis=1)
    if n_frames > full:
        power[full] = (samples[full * flen :] ** 2).mean()
    return power


def _runs(mask: np.ndarray, value: bool) -> list:
    """Half-open [start, end) spans where mask == value."""
    edges = np.flatnonzero(np.diff(mask.astype(np.int8))) + 1
    bounds = np.concatenate(([0], edges, [len(mask)]))
    return [
        (int(bounds[k]), int(bounds[k + 1]))
        for k in range(len(bounds) - 1)
        if mask[bounds[k]] == value
    ]


def vad_label(w: Waveform, cfg: VadConfig | None = None) -> FrameLabels:
    """Label frames as speech by mean-power threshold in dBFS, then smooth."""
    cfg = cfg or VadConfig()
    if w.sample_rate not in VAD_SAMPLE_RATES:
        raise InvalidConfigError(
            f"sample rate {w.sample_rate} not in {VAD_SAMPLE_RATES}; resample first"
        )
    if len(w) == 0:
        raise EmptySignalError("cannot label an empty signal")
    flen = frame_length_samples(w.sample_rate, cfg.frame_ms)
    power = _frame_powers(w.samples, flen)
    with np.errstate(divide="ignore"):
        level_db = 10.0 * np.log10(power)  # silence becomes -inf, below any threshold
    speech = level_db > cfg.energy_threshold_db
    level = cfg.aggressiveness
    if level:
        padded = np.pad(speech, level, constant_values=True)
        speech = sliding_window_view(padded, 2 * level + 1).all(axis=1)
        for start, end in _runs(speech, True):
            if end - start < level + 1:
                speech[start:end] = False
    return FrameLabels(speech, cfg.frame_ms)


@dataclass(frozen=True)
class SilencePolicy:
    """What to do with silence inside and around an utterance."""

    max_internal_silence_ms: float = 300.0
    fill: str = "zeros"
    comfort_noise_level_db: float = -60.0

    def __post_init__(self):
        if self.max_internal_silence_ms < 0:
            raise InvalidConfigError(
                f"max_internal_silence_ms must be non-negative, got {self.max_internal_silence_ms}"
            )
        if self.fill not in ("zeros", "comfort_noise"):
            raise InvalidConfigError(
                f"fill must be 'zeros' or 'comfort_noise', got {self.fill!r}"
            )


def _fill_samples(n: int, policy: SilencePolicy, seed: int) -> np.ndarray:
    if policy.fill == "zeros" or n == 0:
        return np.zeros(n)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(n)
    rms = math.sqrt(float((noise**2).mean()))
    target = 10.0 ** (policy.comfort_noise_level_db / 20.0)
    return noise * (target / max(rms, np.finfo(np.float64).tiny))


def trim_and_compress(
    w: Waveform,
    labels: FrameLabels,
    policy: SilencePolicy | None = None,
    seed: int = 0,
) -> Waveform:
    """Drop edge silence and cap internal silence runs at the policy length.

    Internal silence strictly longer than the cap is replaced by exactly
    the cap's worth of fill; runs at or under the cap are kept verbatim.
    """
    policy = policy or SilencePolicy()
    flen = frame_length_samples(w.sample_rate, labels.frame_ms)
    n = len(w.samples)
    if len(labels) != (n + flen - 1) // flen:
        raise LengthMismatchError(
            f"{len(labels)} labels do not cover {n} samples at {flen} samples per frame"
        )
    if not labels.speech.any():
        raise AllSilenceError("every frame is labeled silence")
    cap = int(round(policy.max_internal_silence_ms / 1000.0 * w.sample_rate))
    spans = _runs(labels.speech, True)
    pieces = []
    prev_end = None
    for start, end in spans:
        if prev_end is not None:
            gap = w.samples[prev_end * flen : min(start * flen, n)]
            if len(gap) > cap:
                pieces.append(_fill_samples(cap, policy, seed))
            else:
                pieces.append(gap)
        pieces.append(w.samples[start * flen : min(end * flen, n)])
        prev_end = end
    return Waveform(np.concatenate(pieces), w.sample_rate)


def estimate_snr(noisy: Waveform, enhanced: Waveform) -> float:
    """Enhanced-power to residual-power ratio in dB.

    The residual is noisy - enhanced. A zero residual returns +inf (and a
    zero enhanced signal -inf), so downstream filters can treat the values
    ordinarily.
    """
    if noisy.sample_rate != enhanced.sample_rate:
        raise RateMismatchError(
            f"sample rates differ: {noisy.sample_rate} vs {enhanced.sample_rate}"
        )
    if len(noisy) != len(enhanced):
        raise LengthMismatchError(f"lengths differ: {len(noisy)} vs {len(enhanced)}")
    if len(noisy) == 0:
        raise EmptySignalError("cannot estimate SNR of empty signals")
    residual = noisy.samples - enhanced.samples
    p_residual = float((residual**2).sum())
    p_signal = float((enhanced.samples**2).sum())
    if p_residual == 0.0:
        return math.inf
    if p_signal == 0.0:
        return -math.inf
    return 10.0 * math.log10(p_signal / p_residual)


def normalize_volume(w: Waveform, peak: float = PEAK_TARGET) -> Waveform:
    """Scale so the absolute peak sits at the target level."""
    if not 0.0 < peak <= 1.0:
        raise InvalidConfigError(f"peak must lie in (0, 1], got {peak}")
    if len(w) == 0:
        raise EmptySignalError("cannot normalize an empty signal")
    top = float(np.abs(w.samples).max())
    if top == 0.0:
        raise AllZeroError("cannot normalize an all-zero signal")
    return Waveform(w.samples * (peak / top), w.sample_rate)
