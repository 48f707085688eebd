"""End-to-end enhancement: comb filtering, spectral blending, resynthesis.

The output spectrum per bin is ``(R^gamma * Y_cf + (1 - R^gamma) * Y) * G``
where ``Y`` is the noisy spectrum, ``Y_cf`` the comb-filtered one, ``R`` the
per-bin filtering strength, ``G`` the interpolated sub-band gain, and
``gamma`` an optional rescaling exponent (0.5 pushes weights toward the
filtered path; 1 leaves them untouched).

Strength and gain come from providers: the string ``"oracle"`` computes
them from a clean reference (least-squares strength, ratio-mask gain), a
scalar broadcasts, and an array is used as-is. This is the integration
point for a trained model's outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .audio import AudioBuffer
from .comb import CombFilterBank, MacCounter, build_bank, filter_inference
from .errors import ShapeError
from .estimator import EstimatorConfig, estimate_track
from .framing import FrameConfig, chunk_signal, frame_signal, istft_overlap_add, stft
from .grid import F0Grid, F0Track
from .mel import MelFilterbank, build_mel_filterbank, mel_energies

NOISE_EPS = 1e-12
STRENGTH_EPS = 1e-12

Provider = Union[str, float, np.ndarray]


@dataclass(frozen=True)
class BlendConfig:
    """Blend rescaling exponent gamma; 1.0 = plain strength weighting."""

    exponent: float = 1.0

    def __post_init__(self):
        if self.exponent <= 0:
            raise ValueError("exponent must be positive")


@dataclass
class EnhanceResult:
    audio: AudioBuffer
    track: F0Track
    strength: np.ndarray
    gain: np.ndarray
    posteriors: Optional[np.ndarray]
    #: Samples of context the pipeline needs past a frame's first sample:
    #: one frame plus the comb filter's forward reach (M * T_max).
    latency_samples: int


def oracle_gain(noisy_spec, clean_spec, fb: MelFilterbank) -> np.ndarray:
    """Ratio-mask gain from a clean reference, smoothed over mel bands.

    Band noise energy is estimated as ``max(E_noisy - E_clean, 0)``; the
    per-band mask ``sqrt(E_clean / (E_clean + E_noise))`` is interpolated
    back to bins by the filterbank's transposed weights.
    """
    if noisy_spec.shape != clean_spec.shape:
        raise ShapeError(f"spectra differ: {noisy_spec.shape} vs {clean_spec.shape}")
    e_clean = mel_energies(clean_spec, fb)
    e_noisy = mel_energies(noisy_spec, fb)
    e_noise = np.maximum(e_noisy - e_clean, 0.0) + NOISE_EPS
    g_band = np.sqrt(e_clean / (e_clean + e_noise))
    coverage = fb.weights.sum(axis=0)
    gain = (fb.weights.T @ g_band) / coverage[:, None]
    return np.clip(gain, 0.0, 1.0)


def oracle_strength(
    noisy_spec, filtered_spec, clean_spec, fb: Optional[MelFilterbank] = None
) -> np.ndarray:
    """Least-squares blend weight toward the filtered spectrum, in [0, 1].

    Per bin, minimizes ``|r*Y_cf + (1-r)*Y - S|^2``; bins the filter leaves
    untouched (denominator under 1e-12) get 0. Passing a filterbank pools
    numerator and denominator over mel bands first and interpolates the
    per-band solution back to bins, mimicking sub-band granularity.
    """
    if not (noisy_spec.shape == filtered_spec.shape == clean_spec.shape):
        raise ShapeError(
            f"spectra differ: {noisy_spec.shape}, {filtered_spec.shape}, {clean_spec.shape}"
        )
    delta = filtered_spec - noisy_spec
    num = np.real((clean_spec - noisy_spec) * np.conj(delta))
    den = np.abs(delta) ** 2
    if fb is not None:
        num = fb.weights @ num
        den = fb.weights @ den
    strength = np.zeros(num.shape)
    usable = den >= STRENGTH_EPS
    strength[usable] = num[usable] / den[usable]
    if fb is not None:
        coverage = fb.weights.sum(axis=0)
        strength = (fb.weights.T @ strength) / coverage[:, None]
    return np.clip(strength, 0.0, 1.0)


def blend(noisy_spec, filtered_spec, strength, gain, cfg: BlendConfig = BlendConfig()):
    """Strength-weighted mix of filtered and unfiltered spectra, then gain."""
    shape = noisy_spec.shape
    for name, arr in (("filtered", filtered_spec), ("strength", strength), ("gain", gain)):
        if arr.shape != shape:
            raise ShapeError(f"{name} shape {arr.shape} != spectrum shape {shape}")
    weight = strength ** cfg.exponent
    return (weight * filtered_spec + (1.0 - weight) * noisy_spec) * gain


def _resolve_map(value: Provider, oracle, name: str, shape) -> np.ndarray:
    if isinstance(value, str):
        if value != "oracle":
            raise ValueError(f"unknown {name} provider {value!r}")
        return oracle()
    if np.isscalar(value):
        return np.full(shape, float(value))
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != shape:
        raise ShapeError(f"{name} map shape {arr.shape} != expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} map contains non-finite entries")
    return arr


def enhance(
    noisy: AudioBuffer,
    clean: Optional[AudioBuffer] = None,
    track: Optional[F0Track] = None,
    gain: Provider = "oracle",
    strength: Provider = "oracle",
    frame_cfg: FrameConfig = FrameConfig(),
    blend_cfg: BlendConfig = BlendConfig(),
    est_cfg: EstimatorConfig = EstimatorConfig(),
    grid: Optional[F0Grid] = None,
    bank: Optional[CombFilterBank] = None,
    mel_bands: int = 80,
    counter: Optional[MacCounter] = None,
) -> EnhanceResult:
    """Run the whole pipeline on one buffer.

    ``track=None`` estimates the pitch track internally; otherwise the given
    track must have one entry per frame. Oracle providers need ``clean`` of
    the same length and rate. Output length equals input length.
    """
    if noisy.sample_rate != frame_cfg.sample_rate:
        raise ShapeError(
            f"buffer rate {noisy.sample_rate} != pipeline rate {frame_cfg.sample_rate}"
        )
    if grid is None:
        grid = F0Grid(sample_rate=frame_cfg.sample_rate)
    if bank is None:
        bank = build_bank(grid)
    if bank.pad != frame_cfg.pad:
        raise ShapeError(
            f"frame padding {frame_cfg.pad} != comb filter context {bank.pad}"
        )

    needs_oracle = isinstance(gain, str) or isinstance(strength, str)
    if needs_oracle:
        if clean is None:
            raise ValueError("oracle providers need a clean reference buffer")
        if len(clean) != len(noisy) or clean.sample_rate != noisy.sample_rate:
            raise ShapeError("clean reference must match the noisy buffer exactly")

    x = noisy.samples
    frames = frame_signal(x, frame_cfg)
    chunks = chunk_signal(x, frame_cfg)
    n_frames = frames.shape[1]

    posteriors = None
    if track is None:
        track, posteriors = estimate_track(noisy, grid, est_cfg, frame_cfg)
    elif len(track) != n_frames:
        raise ShapeError(f"track has {len(track)} frames, expected {n_frames}")

    filtered = filter_inference(bank, chunks, track, counter)

    noisy_spec = stft(frames)
    filtered_spec = stft(filtered)
    clean_spec = None
    if clean is not None:
        clean_spec = stft(frame_signal(clean, frame_cfg))

    fb = build_mel_filterbank(mel_bands, frame_cfg)
    shape = noisy_spec.shape
    gain_map = _resolve_map(
        gain, lambda: oracle_gain(noisy_spec, clean_spec, fb), "gain", shape
    )
    if np.any(gain_map < 0):
        raise ValueError("gain map must be nonnegative")
    strength_map = _resolve_map(
        strength,
        lambda: oracle_strength(noisy_spec, filtered_spec, clean_spec),
        "strength",
        shape,
    )
    strength_map = np.clip(strength_map, 0.0, 1.0)
    strength_map[:, ~track.voiced_mask(grid)] = 0.0

    out_spec = blend(noisy_spec, filtered_spec, strength_map, gain_map, blend_cfg)
    audio = istft_overlap_add(out_spec, frame_cfg, length=len(noisy))
    return EnhanceResult(
        audio=audio,
        track=track,
        strength=strength_map,
        gain=gain_map,
        posteriors=posteriors,
        latency_samples=frame_cfg.frame_size + bank.pad,
    )


def resynthesize(spec, frame_cfg: FrameConfig, length: Optional[int] = None) -> AudioBuffer:
    """Inverse-transform a spectrum through the standard synthesis chain."""
    return istft_overlap_add(spec, frame_cfg, length=length)
