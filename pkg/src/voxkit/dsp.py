"""Spectral analysis, alignment, and reconstruction kernels.

Feature matrices are time-major: frames[t] is the feature vector of frame t.
Waveform samples are float64 with a nominal [-1, 1] range.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct
from scipy.signal import resample_poly
from scipy.spatial.distance import cdist

from .errors import (
    DimensionMismatchError,
    EmptySequenceError,
    EmptySignalError,
    InvalidConfigError,
    InvalidRateError,
)

DEFAULT_SAMPLE_RATE = 22050
DEFAULT_FFT_SIZE = 1024
DEFAULT_WIN_LENGTH = 1024
DEFAULT_HOP_LENGTH = 256
LOG_FLOOR = 1e-10  # added to mel power before the log

_FEATURE_KINDS = ("magnitude_spectrogram", "log_mel", "mfcc")


@dataclass(frozen=True)
class Waveform:
    """Mono audio samples with their sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidConfigError(f"waveform must be 1-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvalidConfigError("waveform contains NaN or infinite samples")
        if self.sample_rate <= 0:
            raise InvalidRateError(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class StftConfig:
    """Framing parameters for the short-time Fourier transform."""

    fft_size: int = DEFAULT_FFT_SIZE
    win_length: int = DEFAULT_WIN_LENGTH
    hop_length: int = DEFAULT_HOP_LENGTH
    window: str = "hann"

    def __post_init__(self):
        if min(self.fft_size, self.win_length, self.hop_length) <= 0:
            raise InvalidConfigError("fft_size, win_length, and hop_length must be positive")
        if self.win_length > self.fft_size:
            raise InvalidConfigError(
                f"win_length {self.win_length} exceeds fft_size {self.fft_size}"
            )
        if self.hop_length > self.win_length:
            raise InvalidConfigError(
                f"hop_length {self.hop_length} exceeds win_length {self.win_length}"
            )
        if self.window != "hann":
            raise InvalidConfigError(f"unsupported window {self.window!r}")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1


@dataclass(frozen=True)
class MelConfig:
    """Mel filterbank parameters on top of an STFT configuration.

    f_max of None means half the sample rate of whatever signal is analyzed.
    """

    n_mels: int = 80
    f_min: float = 0.0
    f_max: float | None = None
    stft: StftConfig = field(default_factory=StftConfig)

    def __post_init__(self):
        if self.n_mels < 1:
            raise InvalidConfigError(f"n_mels must be at least 1, got {self.n_mels}")
        if self.f_min < 0:
            raise InvalidConfigError(f"f_min must be non-negative, got {self.f_min}")
        if self.f_max is not None and self.f_max <= self.f_min:
            raise InvalidConfigError(
                f"f_max {self.f_max} must exceed f_min {self.f_min}"
            )


@dataclass(frozen=True)
class FeatureSeq:
    """Time-major feature matrix with its frame rate and kind tag."""

    frames: np.ndarray
    frame_rate: float
    kind: str

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise EmptySequenceError(
                f"feature matrix must be 2-D and non-empty, got shape {frames.shape}"
            )
        if not np.all(np.isfinite(frames)):
            raise InvalidConfigError("feature matrix contains NaN or infinite entries")
        if self.frame_rate <= 0:
            raise InvalidRateError(f"frame rate must be positive, got {self.frame_rate}")
        if self.kind not in _FEATURE_KINDS:
            raise InvalidConfigError(f"unknown feature kind {self.kind!r}")
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


@dataclass(frozen=True)
class DtwAlignment:
    """Monotone frame-to-frame alignment between two sequences."""

    path: tuple
    total_cost: float


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window of length n."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def frame_signal(samples: np.ndarray, win_length: int, hop_length: int) -> np.ndarray:
    """Slice a signal into centered frames after reflect padding.

    Padding is win_length // 2 on each side, so frame t is centered on
    sample t * hop_length and the frame count is 1 + len(samples) // hop
    for even window lengths.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) == 0:
        raise EmptySignalError("cannot frame an empty signal")
    pad = win_length // 2
    padded = np.pad(samples, pad, mode="reflect")
    n_frames = 1 + (len(padded) - win_length) // hop_length
    idx = np.arange(win_length)[None, :] + hop_length * np.arange(n_frames)[:, None]
    return padded[idx]


def _stft_complex(samples: np.ndarray, cfg: StftConfig) -> np.ndarray:
    frames = frame_signal(samples, cfg.win_length, cfg.hop_length)
    return np.fft.rfft(frames * hann_window(cfg.win_length), n=cfg.fft_size, axis=1)


def stft(w: Waveform, cfg: StftConfig | None = None) -> FeatureSeq:
    """Magnitude spectrogram of centered, Hann-windowed frames."""
    cfg = cfg or StftConfig()
    spec = np.abs(_stft_complex(w.samples, cfg))
    return FeatureSeq(spec, w.sample_rate / cfg.hop_length, "magnitude_spectrogram")


def istft(spec: np.ndarray, cfg: StftConfig | None = None) -> np.ndarray:
    """Overlap-add inverse of the framing used by stft.

    Accepts a complex (n_frames, n_bins) array and returns
    hop_length * (n_frames - 1) samples, undoing the center padding.
    """
    cfg = cfg or StftConfig()
    spec = np.asarray(spec)
    if spec.ndim != 2 or spec.shape[1] != cfg.n_bins:
        raise DimensionMismatchError(
            f"expected (n_frames, {cfg.n_bins}) spectrogram, got {spec.shape}"
        )
    if spec.shape[0] < 2:
        raise EmptySequenceError("need at least 2 frames to reconstruct a signal")
    frames = np.fft.irfft(spec, n=cfg.fft_size, axis=1)[:, : cfg.win_length]
    window = hann_window(cfg.win_length)
    frames = frames * window
    n_frames = frames.shape[0]
    out_len = cfg.hop_length * (n_frames - 1) + cfg.win_length
    out = np.zeros(out_len)
    norm = np.zeros(out_len)
    wsq = window**2
    for t in range(n_frames):
        start = t * cfg.hop_length
        out[start : start + cfg.win_length] += frames[t]
        norm[start : start + cfg.win_length] += wsq
    tiny = np.finfo(np.float64).tiny
    out = np.where(norm > tiny, out / np.maximum(norm, tiny), 0.0)
    pad = cfg.win_length // 2
    return out[pad : out_len - pad]


def hz_to_mel(f):
    """Map frequency in Hz to mel (2595 * log10(1 + f / 700))."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    """Inverse of hz_to_mel."""
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def _mel_edges(sample_rate: int, cfg: MelConfig) -> np.ndarray:
    f_max = cfg.f_max if cfg.f_max is not None else sample_rate / 2.0
    if f_max > sample_rate / 2.0 + 1e-9:
        raise InvalidConfigError(f"f_max {f_max} exceeds Nyquist {sample_rate / 2.0}")
    if f_max <= cfg.f_min:
        raise InvalidConfigError(f"f_max {f_max} must exceed f_min {cfg.f_min}")
    mel_pts = np.linspace(hz_to_mel(cfg.f_min), hz_to_mel(f_max), cfg.n_mels + 2)
    return mel_to_hz(mel_pts)


def mel_center_frequencies(sample_rate: int, cfg: MelConfig | None = None) -> np.ndarray:
    """Center frequency in Hz of each triangular mel filter."""
    cfg = cfg or MelConfig()
    return _mel_edges(sample_rate, cfg)[1:-1]


def mel_filterbank(sample_rate: int, cfg: MelConfig | None = None) -> np.ndarray:
    """Triangular mel filters sampled at FFT bin frequencies, (n_mels, n_bins)."""
    cfg = cfg or MelConfig()
    edges = _mel_edges(sample_rate, cfg)
    left, center, right = edges[:-2], edges[1:-1], edges[2:]
    bin_hz = np.arange(cfg.stft.n_bins) * sample_rate / cfg.stft.fft_size
    tiny = np.finfo(np.float64).tiny
    up = (bin_hz[None, :] - left[:, None]) / np.maximum(center - left, tiny)[:, None]
    down = (right[:, None] - bin_hz[None, :]) / np.maximum(right - center, tiny)[:, None]
    return np.maximum(0.0, np.minimum(up, down))


def log_mel(w: Waveform, cfg: MelConfig | None = None) -> FeatureSeq:
    """Natural-log mel power spectrogram."""
    cfg = cfg or MelConfig()
    spec = stft(w, cfg.stft)
    power = spec.frames**2
    fb = mel_filterbank(w.sample_rate, cfg)
    return FeatureSeq(np.log(power @ fb.T + LOG_FLOOR), spec.frame_rate, "log_mel")


def mfcc(w: Waveform, cfg: MelConfig | None = None, n_coeffs: int = 13) -> FeatureSeq:
    """Cepstral coefficients c1..c_n of the log-mel frames, c0 excluded."""
    cfg = cfg or MelConfig()
    if n_coeffs < 1:
        raise InvalidConfigError(f"n_coeffs must be at least 1, got {n_coeffs}")
    if n_coeffs >= cfg.n_mels:
        raise InvalidConfigError(
            f"n_coeffs {n_coeffs} must be smaller than n_mels {cfg.n_mels}"
        )
    logm = log_mel(w, cfg)
    coeffs = dct(logm.frames, type=2, norm="ortho", axis=1)[:, 1 : n_coeffs + 1]
    return FeatureSeq(coeffs, logm.frame_rate, "mfcc")


def dtw_align(a, b) -> DtwAlignment:
    """Minimum-cost monotone alignment under Euclidean frame distance.

    Accepts FeatureSeq values or plain (n_frames, dim) arrays. Steps are
    (+1, 0), (0, +1), and (+1, +1); cost is the sum of frame distances over
    every path node including both endpoints. Ties during backtrace prefer
    the diagonal step, then advancing the first sequence.
    """
    a = a.frames if isinstance(a, FeatureSeq) else np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = b.frames if isinstance(b, FeatureSeq) else np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptySequenceError("cannot align empty sequences")
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(
            f"feature dimensions differ: {a.shape[1]} vs {b.shape[1]}"
        )
    d = cdist(a, b)
    n1, n2 = d.shape
    cost = np.empty((n1, n2))
    move = np.zeros((n1, n2), dtype=np.int8)  # 0 diagonal, 1 from (i-1,j), 2 from (i,j-1)
    cost[0, 0] = d[0, 0]
    for j in range(1, n2):
        cost[0, j] = cost[0, j - 1] + d[0, j]
        move[0, j] = 2
    for i in range(1, n1):
        cost[i, 0] = cost[i - 1, 0] + d[i, 0]
        move[i, 0] = 1
    for i in range(1, n1):
        row = cost[i]
        prev = cost[i - 1]
        for j in range(1, n2):
            best = prev[j - 1]
            m = 0
            if prev[j] < best:
                best = prev[j]
                m = 1
            if row[j - 1] < best:
                best = row[j - 1]
                m = 2
            row[j] = best + d[i, j]
            move[i, j] = m
    i, j = n1 - 1, n2 - 1
    path = [(i, j)]
    while i or j:
        m = move[i, j]
        if m == 0:
            i, j = i - 1, j - 1
        elif m == 1:
            i -= 1
        else:
            j -= 1
        path.append((i, j))
    path.reverse()
    return DtwAlignment(tuple(path), float(cost[n1 - 1, n2 - 1]))


def griffin_lim(
    spec: FeatureSeq,
    cfg: StftConfig | None = None,
    n_iters: int = 32,
    seed: int = 0,
    momentum: float = 0.9,
) -> Waveform:
    """Reconstruct audio from a magnitude spectrogram by phase iteration.

    Starts from random phases drawn from the seeded generator, then
    alternates resynthesis and reanalysis with momentum extrapolation,
    keeping the target magnitude throughout. Returns the iterate with the
    smallest relative magnitude gap, so more iterations never reconstruct
    worse for a fixed seed.
    """
    cfg = cfg or StftConfig()
    if spec.kind != "magnitude_spectrogram":
        raise InvalidConfigError(f"expected a magnitude spectrogram, got {spec.kind!r}")
    if spec.dim != cfg.n_bins:
        raise DimensionMismatchError(
            f"spectrogram has {spec.dim} bins but the config implies {cfg.n_bins}"
        )
    if n_iters < 1:
        raise InvalidConfigError(f"n_iters must be at least 1, got {n_iters}")
    if not 0.0 <= momentum < 1.0:
        raise InvalidConfigError(f"momentum must lie in [0, 1), got {momentum}")
    mag = spec.frames
    if np.any(mag < 0):
        raise InvalidConfigError("magnitude spectrogram has negative entries")
    sample_rate = int(round(spec.frame_rate * cfg.hop_length))
    mag_norm = np.linalg.norm(mag)
    if mag_norm == 0.0:
        return Waveform(istft(mag.astype(np.complex128), cfg), sample_rate)
    rng = np.random.default_rng(seed)
    angles = np.exp(1j * rng.uniform(-np.pi, np.pi, mag.shape))
    prev_rebuilt = np.zeros_like(angles)
    shrink = momentum / (1.0 + momentum)
    best_err = math.inf
    best = None
    for k in range(n_iters + 1):
        y = istft(mag * angles, cfg)
        rebuilt = _stft_complex(y, cfg)
        err = np.linalg.norm(np.abs(rebuilt) - mag) / mag_norm
        if err < best_err:
            best_err = err
            best = y
        if k == n_iters:
            break
        step = rebuilt - shrink * prev_rebuilt
        prev_rebuilt = rebuilt
        angles = step / (np.abs(step) + 1e-16)
    return Waveform(best, sample_rate)


def spectral_convergence(target: FeatureSeq, w: Waveform, cfg: StftConfig | None = None) -> float:
    """Relative Frobenius gap between a target magnitude and a waveform's."""
    cfg = cfg or StftConfig()
    mag = stft(w, cfg).frames
    if mag.shape != target.frames.shape:
        raise DimensionMismatchError(
            f"spectrogram shapes differ: {mag.shape} vs {target.frames.shape}"
        )
    denom = np.linalg.norm(target.frames)
    gap = np.linalg.norm(mag - target.frames)
    if denom == 0.0:
        return 0.0 if gap == 0.0 else math.inf
    return float(gap / denom)


def resample(w: Waveform, target_rate: int) -> Waveform:
    """Band-limited resampling with a windowed-sinc polyphase filter."""
    if target_rate <= 0:
        raise InvalidRateError(f"target rate must be positive, got {target_rate}")
    if len(w) == 0:
        raise EmptySignalError("cannot resample an empty signal")
    if target_rate == w.sample_rate:
        return w
    g = math.gcd(int(target_rate), int(w.sample_rate))
    out = resample_poly(w.samples, int(target_rate) // g, int(w.sample_rate) // g)
    return Waveform(out, target_rate)
