"""Signal framing, chunking, and the windowed STFT / overlap-add pair.

Two framings of the same signal are kept in lockstep: plain overlapped
frames (``frame_size`` rows) feeding the spectral path, and padded chunks
(``frame_size + 2*pad`` rows) feeding the comb filters, whose taps need
``pad`` samples of context on both sides. Both use the same hop, produce
the same frame count, and the center slice of every chunk equals the plain
frame bit-for-bit.

Matrices are oriented samples-by-frames: column ``t`` is frame ``t`` and
starts at sample ``t * hop_size`` of the source buffer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import PIPELINE_RATE, AudioBuffer
from .errors import ShapeError

WINDOWS = ("rect", "sqrt_hann")

#: Floor for the synthesis overlap normalization at signal edges.
OVERLAP_EPS = 1e-8


@dataclass(frozen=True)
class FrameConfig:
    """Frame geometry: 32 ms frames, 8 ms hop, 16 ms filter context at 48 kHz."""

    frame_size: int = 1536
    hop_size: int = 384
    pad: int = 768
    sample_rate: int = PIPELINE_RATE

    def __post_init__(self):
        if self.frame_size <= 0 or self.hop_size <= 0:
            raise ValueError("frame_size and hop_size must be positive")
        if self.frame_size % self.hop_size != 0:
            raise ValueError(
                f"hop_size {self.hop_size} must divide frame_size {self.frame_size}"
            )
        if self.pad < 0:
            raise ValueError("pad must be nonnegative")

    @property
    def fft_size(self) -> int:
        return self.frame_size

    @property
    def n_bins(self) -> int:
        return self.frame_size // 2 + 1

    @property
    def chunk_size(self) -> int:
        return self.frame_size + 2 * self.pad

    def n_frames(self, n_samples: int) -> int:
        if n_samples < 1:
            raise ValueError("need at least one sample")
        return -(-n_samples // self.hop_size)


def window_function(name: str, size: int) -> np.ndarray:
    """Analysis/synthesis window by name: ``rect`` or ``sqrt_hann``.

    The sqrt-Hann variant is periodic, so analysis*synthesis overlap-adds
    to a constant when the hop is a quarter frame.
    """
    if name == "rect":
        return np.ones(size)
    if name == "sqrt_hann":
        n = np.arange(size)
        return np.sqrt(0.5 - 0.5 * np.cos(2.0 * np.pi * n / size))
    raise ValueError(f"unknown window {name!r}, expected one of {WINDOWS}")


def _samples(source) -> np.ndarray:
    """Accept an AudioBuffer or a plain 1-D array."""
    x = getattr(source, "samples", source)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeError(f"need a 1-D signal, got shape {x.shape}")
    return x


def frame_signal(buffer, cfg: FrameConfig) -> np.ndarray:
    """Split a signal into overlapped frames, zero-padding the tail.

    Accepts an :class:`AudioBuffer` or a plain sample array.

    Returns
    -------
    np.ndarray
        Shape ``(frame_size, n_frames)`` with ``n_frames = ceil(len / hop)``;
        column ``t`` is ``samples[t*hop : t*hop + frame_size]``.
    """
    x = _samples(buffer)
    n_frames = cfg.n_frames(x.size)
    needed = (n_frames - 1) * cfg.hop_size + cfg.frame_size
    padded = np.zeros(needed)
    padded[: x.size] = x
    starts = np.arange(n_frames) * cfg.hop_size
    return padded[starts[None, :] + np.arange(cfg.frame_size)[:, None]]


def chunk_signal(buffer, cfg: FrameConfig) -> np.ndarray:
    """Split a signal into filter-ready chunks with ``pad`` context each side.

    Same frame count and hop as :func:`frame_signal`; rows ``pad`` through
    ``pad + frame_size`` of column ``t`` reproduce frame ``t`` exactly.
    """
    x = _samples(buffer)
    n_frames = cfg.n_frames(x.size)
    needed = (n_frames - 1) * cfg.hop_size + cfg.chunk_size
    padded = np.zeros(needed)
    padded[cfg.pad : cfg.pad + x.size] = x
    starts = np.arange(n_frames) * cfg.hop_size
    return padded[starts[None, :] + np.arange(cfg.chunk_size)[:, None]]


def stft(frames: np.ndarray, window: str = "sqrt_hann") -> np.ndarray:
    """Windowed forward transform of framed data.

    Parameters
    ----------
    frames : np.ndarray
        ``(frame_size, n_frames)`` real matrix.
    window : str
        ``rect`` or ``sqrt_hann``, applied per column before the FFT.

    Returns
    -------
    np.ndarray
        Complex ``(frame_size//2 + 1, n_frames)`` spectrogram.
    """
    w = window_function(window, frames.shape[0])
    return np.fft.rfft(frames * w[:, None], axis=0)


def istft_overlap_add(
    spec: np.ndarray,
    cfg: FrameConfig,
    window: str = "sqrt_hann",
    length: int | None = None,
) -> AudioBuffer:
    """Invert :func:`stft` by windowed overlap-add.

    Each column is inverse-transformed, multiplied by the synthesis window,
    overlap-added at the hop, and the result is divided by the accumulated
    analysis*synthesis window sum (a constant in steady state; floored at
    ``OVERLAP_EPS`` near the edges where coverage is partial). ``length``
    trims the output to the original sample count.
    """
    if spec.shape[0] != cfg.n_bins:
        raise ShapeError(
            f"spectrogram has {spec.shape[0]} bins, config expects {cfg.n_bins}"
        )
    n_frames = spec.shape[1]
    w = window_function(window, cfg.frame_size)
    frames = np.fft.irfft(spec, n=cfg.frame_size, axis=0) * w[:, None]

    total = (n_frames - 1) * cfg.hop_size + cfg.frame_size
    out = np.zeros(total)
    wsum = np.zeros(total)
    wsq = w * w  # analysis and synthesis windows are identical
    for t in range(n_frames):
        start = t * cfg.hop_size
        out[start : start + cfg.frame_size] += frames[:, t]
        wsum[start : start + cfg.frame_size] += wsq
    out /= np.maximum(wsum, OVERLAP_EPS)

    if length is not None:
        trimmed = np.zeros(length)
        n = min(length, total)
        trimmed[:n] = out[:n]
        out = trimmed
    return AudioBuffer(out, cfg.sample_rate)
