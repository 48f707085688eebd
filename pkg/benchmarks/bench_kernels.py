"""Time the numba kernels against the numpy fallbacks.

Run after installing the package:

    python3 benchmarks/bench_kernels.py [--duration 0.5] [--repeats 5]

Set HCF_DISABLE_NUMBA=1 before launching to check what the fallback-only
configuration looks like (the table then has a single column).
"""

import argparse
import time

import numpy as np

import hcf
from hcf._kernels import BACKENDS


def best_of(fn, args, repeats):
    fn(*args)  # warmup; first numba call pays compilation or cache load
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def build_cases(duration, rng):
    grid = hcf.F0Grid()
    bank = hcf.build_bank(grid)
    cfg = hcf.FrameConfig()
    x = 0.3 * rng.standard_normal(int(duration * cfg.sample_rate))
    chunks_fm = np.ascontiguousarray(hcf.chunk_signal(x, cfg).T)
    n_frames = chunks_fm.shape[0]

    periods = np.concatenate([grid.rounded_periods(), [0]]).astype(np.int64)
    sel = rng.integers(96, 769, size=n_frames).astype(np.int64)
    window = np.ascontiguousarray(x[: 2 * 768])
    emissions = np.log(rng.uniform(1e-6, 1.0, size=(grid.label_size, n_frames)))
    from hcf.estimator import transition_weights

    trans = transition_weights(grid.size, hcf.EstimatorConfig())
    initial = np.concatenate(
        [np.full(grid.size, np.log(0.5 / grid.size)), [np.log(0.5)]]
    )

    return {
        "comb_all": (chunks_fm, periods, bank.taps, bank.pad, cfg.frame_size),
        "comb_inference": (chunks_fm, sel, bank.taps, bank.pad, cfg.frame_size),
        "yin_difference": (window, 768, 768),
        "viterbi": (emissions, trans, initial),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--duration", type=float, default=0.5, help="signal length in seconds")
    parser.add_argument("--repeats", type=int, default=5, help="timed runs per kernel")
    args = parser.parse_args()

    cases = build_cases(args.duration, np.random.default_rng(0))
    names = list(BACKENDS)
    print(f"backends: {', '.join(names)} ({args.duration:g} s signal, best of {args.repeats})")
    header = f"{'kernel':<16}" + "".join(f"{n + ' (ms)':>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)

    for kernel, case_args in cases.items():
        row = f"{kernel:<16}"
        timings = {}
        for name in names:
            timings[name] = best_of(BACKENDS[name][kernel], case_args, args.repeats)
            row += f"{timings[name] * 1e3:>14.3f}"
        if len(names) == 2:
            row += f"{timings['numpy'] / timings['numba']:>10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
