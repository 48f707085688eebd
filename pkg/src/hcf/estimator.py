"""Classical pitch tracking quantized onto the candidate grid.

A YIN-style detector scores every candidate period per frame and a Viterbi
pass smooths the per-frame scores into one track. This stands in for a
trained estimator: the posterior it emits has the same ``N+1`` layout a
model head would produce, so everything downstream is exercised unchanged.

Per frame, the cumulative-mean-normalized difference function d'(tau) is
evaluated for lags up to the longest candidate period. Candidate salience
is ``max(0, 1 - d'(T_i))``; the dip picked by the classic threshold rule
(first lag under threshold, walked to its local minimum, refined by
parabolic interpolation) is nudged above all other saliences so that pure
tones resolve to the nearest grid index instead of a subharmonic, whose
multiple-of-T dip scores just as well. The unvoiced slot scores
``min(1, min_tau d'(tau) / threshold)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .audio import AudioBuffer
from .framing import FrameConfig
from .grid import F0Grid, F0Track, nearest_period_index

EMISSION_FLOOR = 1e-8
PRIOR_FLOOR = 1e-12

#: Relative bump applied to the threshold-rule pick; any value > 1 works,
#: it only has to beat equal-salience octave dips.
PICK_BUMP = 1.001


@dataclass(frozen=True)
class EstimatorConfig:
    yin_threshold: float = 0.15
    window: Optional[int] = None
    transition_width: float = 8.0
    voicing_prior: float = 0.5
    switch_cost: float = 2.0

    def __post_init__(self):
        if not 0.0 < self.yin_threshold < 1.0:
            raise ValueError("yin_threshold must be in (0, 1)")
        if not 0.0 <= self.voicing_prior <= 1.0:
            raise ValueError("voicing_prior must be in [0, 1]")
        if self.switch_cost < 0:
            raise ValueError("switch_cost must be nonnegative")

    def analysis_window(self, grid: F0Grid) -> int:
        """Window length in samples; defaults to twice the longest period."""
        t_max = int(grid.rounded_periods().max())
        if self.window is None:
            return 2 * t_max
        if self.window < 2 * t_max:
            raise ValueError(
                f"window {self.window} shorter than 2*T_max = {2 * t_max}"
            )
        return int(self.window)


def _cmndf(d: np.ndarray) -> np.ndarray:
    """Cumulative-mean-normalized difference; d'(0) = 1 by convention."""
    out = np.ones_like(d)
    sums = np.cumsum(d[1:])
    taus = np.arange(1, d.shape[0], dtype=np.float64)
    nonzero = sums > 0.0
    out[1:][nonzero] = d[1:][nonzero] * taus[nonzero] / sums[nonzero]
    return out


def _threshold_pick(dprime: np.ndarray, t_min: int, t_max: int, threshold: float) -> int:
    """Classic dip rule: first lag under threshold, walked to its local min.

    Falls back to the global minimum lag when nothing dips under.
    """
    below = np.nonzero(dprime[t_min:t_max + 1] < threshold)[0]
    if below.size:
        tau = t_min + int(below[0])
        while tau + 1 <= t_max and dprime[tau + 1] < dprime[tau]:
            tau += 1
        return tau
    return t_min + int(np.argmin(dprime[t_min:t_max + 1]))


def _parabolic_refine(dprime: np.ndarray, tau: int) -> float:
    """Vertex of the parabola through the dip and its neighbors."""
    if tau <= 0 or tau >= dprime.shape[0] - 1:
        return float(tau)
    left, mid, right = dprime[tau - 1], dprime[tau], dprime[tau + 1]
    denom = left - 2.0 * mid + right
    if denom <= 0.0:
        return float(tau)
    delta = 0.5 * (left - right) / denom
    return tau + float(np.clip(delta, -1.0, 1.0))


def yin_frame(samples, grid: F0Grid, cfg: EstimatorConfig) -> np.ndarray:
    """Posterior over the ``N+1`` slots for one analysis window.

    Peak-normalized to 1; an all-zero window maps to the unvoiced one-hot.
    """
    x = np.asarray(samples, dtype=np.float64)
    periods = grid.rounded_periods()
    t_max = int(periods.max())
    t_min = int(periods.min())
    if x.shape[0] < 2 * t_max:
        raise ValueError(f"window of {x.shape[0]} samples, need >= {2 * t_max}")

    posterior = np.zeros(grid.label_size)
    if not np.any(x):
        posterior[grid.unvoiced_index] = 1.0
        return posterior

    d = _kernels.yin_difference(x, x.shape[0] - t_max, t_max)
    dprime = _cmndf(d)

    posterior[:grid.size] = np.maximum(0.0, 1.0 - dprime[periods])
    dip_min = float(dprime[t_min:t_max + 1].min())
    posterior[grid.unvoiced_index] = min(1.0, dip_min / cfg.yin_threshold)

    if dip_min < cfg.yin_threshold:
        tau = _threshold_pick(dprime, t_min, t_max, cfg.yin_threshold)
        refined = _parabolic_refine(dprime, tau)
        pick = nearest_period_index(grid, refined)
        posterior[pick] = max(posterior[pick], posterior.max() * PICK_BUMP)

    peak = posterior.max()
    if peak <= 0.0:
        posterior[:] = 0.0
        posterior[grid.unvoiced_index] = 1.0
        return posterior
    return posterior / peak


def transition_weights(grid_size: int, cfg: EstimatorConfig) -> np.ndarray:
    """Additive log-weights for state moves; state ``grid_size`` is unvoiced.

    Voiced-to-voiced moves cost ``(di)^2 / (2*width^2)``, switching voicing
    costs ``switch_cost``, staying unvoiced is free.
    """
    n_states = grid_size + 1
    idx = np.arange(grid_size, dtype=np.float64)
    trans = np.zeros((n_states, n_states))
    width2 = 2.0 * cfg.transition_width ** 2
    trans[:grid_size, :grid_size] = -((idx[:, None] - idx[None, :]) ** 2) / width2
    trans[grid_size, :grid_size] = -cfg.switch_cost
    trans[:grid_size, grid_size] = -cfg.switch_cost
    return trans


def viterbi_track(posteriors, grid: F0Grid, cfg: EstimatorConfig) -> F0Track:
    """Smooth per-frame posteriors into the best state path.

    ``posteriors`` is (n_frames, N+1); emissions are log posteriors clamped
    at 1e-8 so zero entries stay finite. Decoded voiced states carry
    ``f0 = f_s / period``; voicing is the hard 0/1 decode.
    """
    post = np.atleast_2d(np.asarray(posteriors, dtype=np.float64))
    if post.shape[1] != grid.label_size:
        raise ValueError(
            f"posterior dimension {post.shape[1]} != grid label size {grid.label_size}"
        )
    emissions = np.log(np.maximum(post, EMISSION_FLOOR)).T

    prior = cfg.voicing_prior
    initial = np.empty(grid.label_size)
    initial[:grid.size] = np.log(max(prior / grid.size, PRIOR_FLOOR))
    initial[grid.size] = np.log(max(1.0 - prior, PRIOR_FLOOR))

    path = _kernels.viterbi_core(emissions, transition_weights(grid.size, cfg), initial)

    voiced = path != grid.unvoiced_index
    f0 = np.zeros(path.shape[0])
    f0[voiced] = grid.sample_rate / grid.periods[path[voiced]]
    return F0Track(indices=path, f0=f0, voicing=voiced.astype(np.float64))


def estimate_track(
    buffer: AudioBuffer,
    grid: F0Grid,
    cfg: EstimatorConfig = EstimatorConfig(),
    frame_cfg: FrameConfig = FrameConfig(),
):
    """Track a signal frame-by-frame: YIN per frame, then Viterbi.

    Analysis windows are centered on the pipeline frames (hop
    ``frame_cfg.hop_size``), so entry t lines up with frame t everywhere
    else in the pipeline. Returns ``(track, posteriors)`` with posteriors
    shaped (n_frames, N+1).
    """
    x = buffer.samples
    window = cfg.analysis_window(grid)
    n_frames = frame_cfg.n_frames(x.shape[0])
    offset = (frame_cfg.frame_size - window) // 2

    posteriors = np.empty((n_frames, grid.label_size))
    buf = np.empty(window)
    for t in range(n_frames):
        start = t * frame_cfg.hop_size + offset
        stop = start + window
        lo = max(start, 0)
        hi = min(stop, x.shape[0])
        buf[:] = 0.0
        if hi > lo:
            buf[lo - start:hi - start] = x[lo:hi]
        posteriors[t] = yin_frame(buf, grid, cfg)
    return viterbi_track(posteriors, grid, cfg), posteriors
