"""Shared signal builders for the test suite."""

import numpy as np

import hcf

FS = 48000


def tone(freq, duration, amp=0.5, fs=FS, phase=0.0):
    t = np.arange(int(round(duration * fs))) / fs
    return amp * np.sin(2.0 * np.pi * freq * t + phase)


def periodic_tone(period, n_samples, amp=0.5):
    """Sine with an exactly repeating sample pattern of the given period.

    Tiling one period makes the signal bit-exactly periodic, which plain
    ``sin(2*pi*f*t)`` is not once t grows.
    """
    base = amp * np.sin(2.0 * np.pi * np.arange(period) / period)
    reps = -(-n_samples // period)
    return np.tile(base, reps)[:n_samples]


def harmonic_complex(f0, n_harmonics, duration, amp=0.1, fs=FS):
    t = np.arange(int(round(duration * fs))) / fs
    x = np.zeros(t.size)
    for k in range(1, n_harmonics + 1):
        x += amp * np.sin(2.0 * np.pi * f0 * k * t)
    return x


def noise_at_snr(reference, snr_db, rng):
    """White noise scaled so reference-vs-noise power ratio is snr_db."""
    noise = rng.standard_normal(reference.size)
    p_ref = np.mean(reference**2)
    p_noise = np.mean(noise**2)
    return noise * np.sqrt(p_ref / (p_noise * 10.0 ** (snr_db / 10.0)))


def buffer(x, fs=FS):
    return hcf.AudioBuffer(np.asarray(x, dtype=np.float64), fs)


def interior(n_samples, cfg=None):
    """Slice unaffected by partial window overlap at either edge."""
    edge = cfg.frame_size if cfg is not None else hcf.FrameConfig().frame_size
    return slice(edge, n_samples - edge)


def rel_rms(err, reference):
    return float(np.sqrt(np.mean(err**2) / np.mean(reference**2)))


def exhaustive_best_path(emissions, transition, initial):
    """Score every state sequence; only viable at toy sizes."""
    n_states, n_frames = emissions.shape
    paths = np.array(
        np.unravel_index(np.arange(n_states**n_frames), (n_states,) * n_frames)
    ).T
    scores = initial[paths[:, 0]] + emissions[paths[:, 0], 0]
    for t in range(1, n_frames):
        scores = scores + transition[paths[:, t - 1], paths[:, t]] + emissions[paths[:, t], t]
    return paths[int(np.argmax(scores))]
