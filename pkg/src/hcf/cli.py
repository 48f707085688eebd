"""Command-line front end.

Subcommands cover the full pipeline (``enhance``), pitch tracking (``f0``),
label and filter-bank dumps, the reference-vs-inference self-test
(``verify``), and loss/SDR reporting (``metrics``).

Exit codes: 0 success, 2 usage or configuration error, 3 data or shape
error (unreadable files, mismatched sizes), 4 numerical verification
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .audio import AudioBuffer, PIPELINE_RATE, read_wav, write_wav
from .comb import build_bank, filter_all_candidates, filter_inference, select_candidate
from .enhance import BlendConfig, enhance, resynthesize
from .errors import DataError, VerificationError
from .estimator import EstimatorConfig, estimate_track
from .framing import FrameConfig, chunk_signal, frame_signal, stft
from .grid import F0Grid, gaussian_label, read_track, track_from_indices, write_track
from .matrixio import read_matrix, write_matrix
from .metrics import LossConfig, sdr, se_loss, snr

VERIFY_TOLERANCE = 1e-8


def _add_grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frame-size", type=int, default=1536, help="frame length in samples")
    p.add_argument("--hop", type=int, default=384, help="hop length in samples")
    p.add_argument("--f-min", type=float, default=62.5, help="lowest candidate frequency in Hz")
    p.add_argument("--f-max", type=float, default=500.0, help="highest candidate frequency in Hz")
    p.add_argument("--grid-size", type=int, default=225, help="number of voiced candidates")
    p.add_argument("--order", type=int, default=1, help="comb filter half-width in taps")


def _add_estimator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threshold", type=float, default=0.15, help="dip threshold for voicing")
    p.add_argument("--window", type=int, default=None, help="analysis window in samples (default 2*T_max)")
    p.add_argument("--transition-width", type=float, default=8.0, help="smoothing width in grid bins")
    p.add_argument("--voicing-prior", type=float, default=0.5, help="prior probability of voicing")
    p.add_argument("--switch-cost", type=float, default=2.0, help="voicing switch cost, negative-log units")


def _grid(args) -> F0Grid:
    return F0Grid(f_min=args.f_min, f_max=args.f_max, size=args.grid_size)


def _frame_cfg(args) -> FrameConfig:
    bank_pad = args.order * int(round(PIPELINE_RATE / args.f_min))
    return FrameConfig(frame_size=args.frame_size, hop_size=args.hop, pad=bank_pad)


def _estimator_cfg(args) -> EstimatorConfig:
    return EstimatorConfig(
        yin_threshold=args.threshold,
        window=args.window,
        transition_width=args.transition_width,
        voicing_prior=args.voicing_prior,
        switch_cost=args.switch_cost,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcf",
        description="Harmonic comb-filter speech enhancement toolkit (48 kHz).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    kw = {"formatter_class": argparse.ArgumentDefaultsHelpFormatter}

    p = sub.add_parser("enhance", help="run the enhancement pipeline on a WAV file", **kw)
    p.add_argument("noisy", help="input WAV, 48 kHz")
    p.add_argument("out", help="output WAV path")
    p.add_argument("--clean", help="clean reference WAV; enables oracle gain/strength")
    p.add_argument("--gain", help="gain matrix file (.hcf), used with --strength")
    p.add_argument("--strength", help="strength matrix file (.hcf), used with --gain")
    p.add_argument("--f0", help="pitch track CSV; omit to estimate internally")
    p.add_argument("--rescale", action="store_true", help="blend with exponent 0.5 instead of 1")
    p.add_argument("--diag", help="directory for diagnostics (track, maps, report)")
    p.add_argument("--bits", default="float32", choices=["16", "24", "float32"], help="output sample format")
    _add_grid_flags(p)
    _add_estimator_flags(p)

    p = sub.add_parser("f0", help="estimate a pitch track and write it as CSV", **kw)
    p.add_argument("wav", help="input WAV, 48 kHz")
    p.add_argument("out", help="output CSV path")
    _add_grid_flags(p)
    _add_estimator_flags(p)

    p = sub.add_parser("labels", help="expand a pitch track into smoothed label vectors", **kw)
    p.add_argument("track", help="pitch track CSV")
    p.add_argument("out", help="output matrix path (.hcf)")
    _add_grid_flags(p)

    p = sub.add_parser("filterbank", help="dump the comb filter bank weight matrix", **kw)
    p.add_argument("out", help="output matrix path (.hcf)")
    _add_grid_flags(p)

    p = sub.add_parser("verify", help="check the two filtering routes against each other", **kw)
    p.add_argument("wav", nargs="?", help="input WAV; omitted -> seeded noise")
    p.add_argument("--seed", type=int, default=0, help="noise and track seed")
    p.add_argument("--duration", type=float, default=2.0, help="noise duration in seconds")
    p.add_argument("--tracks", type=int, default=10, help="number of random tracks to sweep")
    _add_grid_flags(p)

    p = sub.add_parser("metrics", help="report spectral loss and SDR for an estimate", **kw)
    p.add_argument("clean", help="clean reference WAV")
    p.add_argument("estimate", help="estimated/enhanced WAV")
    p.add_argument("gains_only", nargs="?", help="gains-only estimate WAV (defaults to estimate)")
    p.add_argument("--compression", type=float, default=0.3, help="magnitude compression exponent")
    p.add_argument("--magnitude-weight", type=float, default=0.3, help="complex-term weight")
    p.add_argument("--pitch-weight", type=float, default=0.1, help="pitch-loss weight")
    _add_grid_flags(p)

    return parser


def _cmd_enhance(args) -> int:
    file_mode = args.gain is not None or args.strength is not None
    if file_mode and (args.gain is None or args.strength is None):
        raise ValueError("--gain and --strength must be given together")
    if file_mode and args.clean is not None:
        raise ValueError("use either --clean (oracle) or --gain/--strength, not both")
    if not file_mode and args.clean is None:
        raise ValueError("need a gain/strength source: --clean or --gain/--strength")

    noisy = read_wav(args.noisy)
    clean = read_wav(args.clean) if args.clean else None
    frame_cfg = _frame_cfg(args)
    grid = _grid(args)
    track = read_track(args.f0, grid) if args.f0 else None

    gain = read_matrix(args.gain).astype(np.float64) if args.gain else "oracle"
    strength = read_matrix(args.strength).astype(np.float64) if args.strength else "oracle"

    result = enhance(
        noisy,
        clean=clean,
        track=track,
        gain=gain,
        strength=strength,
        frame_cfg=frame_cfg,
        blend_cfg=BlendConfig(exponent=0.5 if args.rescale else 1.0),
        est_cfg=_estimator_cfg(args),
        grid=grid,
        bank=build_bank(grid, order=args.order),
    )
    report = write_wav(result.audio, args.out, bit_depth=args.bits)
    print(f"enhanced {args.noisy} -> {args.out} ({len(result.track)} frames)")
    if report.clipped:
        print(f"clipped {report.clipped} samples on write", file=sys.stderr)
    if clean is not None:
        snr_in = snr(clean, noisy)
        snr_out = snr(clean, result.audio)
        print(f"snr_in_db={snr_in:.3f} snr_out_db={snr_out:.3f} snr_gain_db={snr_out - snr_in:.3f}")

    if args.diag:
        diag = Path(args.diag)
        diag.mkdir(parents=True, exist_ok=True)
        write_track(result.track, diag / "track.csv")
        write_matrix(result.strength, diag / "strength.hcf")
        write_matrix(result.gain, diag / "gain.hcf")
        if clean is not None:
            _write_report(diag / "report.txt", clean, result, frame_cfg, LossConfig())
    return 0


def _write_report(path, clean: AudioBuffer, result, frame_cfg: FrameConfig, cfg: LossConfig) -> None:
    clean_spec = stft(frame_signal(clean, frame_cfg))
    out_spec = stft(frame_signal(result.audio, frame_cfg))
    total, mag0, mag, cplx = se_loss(clean_spec, out_spec, out_spec, cfg)
    lines = [
        f"se_loss={total:.6g}",
        f"mag_gains_only={mag0:.6g}",
        f"mag_full={mag:.6g}",
        f"complex={cplx:.6g}",
        f"sdr_db={sdr(clean, result.audio):.3f}",
        f"latency_samples={result.latency_samples}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_f0(args) -> int:
    buffer = read_wav(args.wav)
    grid = _grid(args)
    track, _ = estimate_track(buffer, grid, _estimator_cfg(args), _frame_cfg(args))
    write_track(track, args.out)
    voiced = int(track.voiced_mask(grid).sum())
    print(f"wrote {len(track)} frames ({voiced} voiced) to {args.out}")
    return 0


def _cmd_labels(args) -> int:
    grid = _grid(args)
    track = read_track(args.track, grid)
    labels = np.stack([gaussian_label(grid, int(i)) for i in track.indices])
    write_matrix(labels, args.out)
    print(f"wrote {labels.shape[0]}x{labels.shape[1]} label matrix to {args.out}")
    return 0


def _cmd_filterbank(args) -> int:
    bank = build_bank(_grid(args), order=args.order)
    write_matrix(bank.weights[:, 0, :, 0], args.out)
    rows, cols = bank.weights.shape[0], bank.weights.shape[2]
    print(f"wrote {rows}x{cols} filter bank to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    grid = _grid(args)
    bank = build_bank(grid, order=args.order)
    frame_cfg = _frame_cfg(args)
    rng = np.random.default_rng(args.seed)

    if args.wav:
        samples = read_wav(args.wav).samples
    else:
        samples = 0.5 * rng.standard_normal(int(args.duration * PIPELINE_RATE))

    chunks = chunk_signal(samples, frame_cfg)
    n_frames = chunks.shape[1]
    all_candidates = filter_all_candidates(bank, chunks)

    max_dev = 0.0
    for _ in range(args.tracks):
        track = track_from_indices(grid, rng.integers(0, grid.label_size, size=n_frames))
        reference = select_candidate(all_candidates, track)
        fast = filter_inference(bank, chunks, track)
        max_dev = max(max_dev, float(np.abs(reference - fast).max()))

    print(f"max_dev={max_dev:.3e} frames={n_frames} tracks={args.tracks}")
    if max_dev > VERIFY_TOLERANCE:
        raise VerificationError(
            f"filtering routes disagree: max deviation {max_dev:.3e} > {VERIFY_TOLERANCE:.0e}"
        )
    return 0


def _cmd_metrics(args) -> int:
    clean = read_wav(args.clean)
    estimate = read_wav(args.estimate)
    gains_only = read_wav(args.gains_only) if args.gains_only else estimate
    if not (len(clean) == len(estimate) == len(gains_only)):
        raise DataError(
            f"lengths differ: clean={len(clean)}, estimate={len(estimate)}, "
            f"gains_only={len(gains_only)}"
        )
    cfg = LossConfig(
        compression=args.compression,
        magnitude_weight=args.magnitude_weight,
        pitch_weight=args.pitch_weight,
    )
    frame_cfg = _frame_cfg(args)

    def spec(buffer: AudioBuffer):
        return stft(frame_signal(buffer, frame_cfg))

    total, mag0, mag, cplx = se_loss(spec(clean), spec(estimate), spec(gains_only), cfg)
    print(f"se_loss={total:.6g}")
    print(f"mag_gains_only={mag0:.6g}")
    print(f"mag_full={mag:.6g}")
    print(f"complex={cplx:.6g}")
    print(f"sdr_db={sdr(clean, estimate):.3f}")
    return 0


_COMMANDS = {
    "enhance": _cmd_enhance,
    "f0": _cmd_f0,
    "labels": _cmd_labels,
    "filterbank": _cmd_filterbank,
    "verify": _cmd_verify,
    "metrics": _cmd_metrics,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
