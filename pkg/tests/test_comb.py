import numpy as np
import pytest

import hcf
from hcf import _kernels
from hcf.errors import ShapeError

from helpers import periodic_tone


def desk_grid():
    """Tiny integer-period grid for brute-force comparisons."""
    return hcf.F0Grid(f_min=4000.0, f_max=12000.0, size=5)


class TestBuildBank:
    def test_default_taps(self, bank):
        np.testing.assert_allclose(bank.taps, [0.25, 0.5, 0.25], atol=1e-12)
        assert bank.order == 1
        assert bank.pad == 768

    def test_weight_tensor_shape(self, bank):
        assert bank.weights.shape == (226, 1, 1537, 1)
        assert bank.kernel_length == 1537

    def test_shortest_period_row_positions(self, bank):
        # candidate 224 has period 96; taps sit at center +/- 96
        row = bank.weights[224, 0, :, 0]
        np.testing.assert_array_equal(np.nonzero(row)[0], [672, 768, 864])
        assert row[768] == 0.5
        assert row[672] == 0.25
        assert row[864] == 0.25

    def test_longest_period_row_positions(self, bank):
        row = bank.weights[0, 0, :, 0]
        np.testing.assert_array_equal(np.nonzero(row)[0], [0, 768, 1536])

    def test_every_row_sums_to_one(self, bank):
        sums = bank.weights[:, 0, :, 0].sum(axis=1)
        np.testing.assert_allclose(sums, 1.0, atol=1e-12)

    def test_unvoiced_row_is_identity(self, bank):
        row = bank.weights[225, 0, :, 0]
        assert row[768] == 1.0
        assert np.count_nonzero(row) == 1

    def test_total_nonzeros(self, bank):
        assert bank.nonzero_taps() == 225 * 3 + 1

    def test_higher_order(self, grid):
        bank2 = hcf.build_bank(grid, order=2)
        assert bank2.taps.shape == (5,)
        assert bank2.taps.sum() == pytest.approx(1.0)
        assert bank2.weights.shape == (226, 1, 2 * 2 * 768 + 1, 1)
        row = bank2.weights[224, 0, :, 0]
        center = 2 * 768
        np.testing.assert_array_equal(
            np.nonzero(row)[0], center + 96 * np.array([-2, -1, 0, 1, 2])
        )

    def test_custom_taps_accepted(self, grid):
        bank = hcf.build_bank(grid, taps=[0.2, 0.6, 0.2])
        np.testing.assert_allclose(bank.taps, [0.2, 0.6, 0.2])

    def test_custom_taps_validated(self, grid):
        with pytest.raises(ValueError, match="symmetric"):
            hcf.build_bank(grid, taps=[0.1, 0.6, 0.3])
        with pytest.raises(ValueError, match="sum"):
            hcf.build_bank(grid, taps=[0.25, 0.25, 0.25])
        with pytest.raises(ValueError, match="3 taps"):
            hcf.build_bank(grid, taps=[0.5, 0.5])
        with pytest.raises(ValueError):
            hcf.build_bank(grid, order=0)


class TestAllCandidatesAgainstDenseConvolution:
    def test_matches_np_correlate(self, rng):
        grid = desk_grid()
        bank = hcf.build_bank(grid)
        frame = 32
        n_frames = 3
        chunks = rng.standard_normal((frame + 2 * bank.pad, n_frames))
        out = hcf.filter_all_candidates(bank, chunks)
        assert out.shape == (6, frame, n_frames)
        dense = bank.weights[:, 0, :, 0]
        for i in range(6):
            for t in range(n_frames):
                expected = np.correlate(chunks[:, t], dense[i], mode="valid")
                np.testing.assert_allclose(out[i, :, t], expected, atol=1e-12)

    def test_unvoiced_row_percolates_center_exactly(self, rng):
        grid = desk_grid()
        bank = hcf.build_bank(grid)
        chunks = rng.standard_normal((40 + 2 * bank.pad, 4))
        out = hcf.filter_all_candidates(bank, chunks)
        np.testing.assert_array_equal(out[5], chunks[bank.pad : bank.pad + 40, :])

    def test_constant_input_passes_every_candidate(self, bank):
        chunks = np.ones((1536 + 2 * 768, 2))
        out = hcf.filter_all_candidates(bank, chunks)
        np.testing.assert_allclose(out, 1.0, atol=1e-12)

    def test_chunk_shape_validated(self, bank):
        with pytest.raises(ShapeError):
            hcf.filter_all_candidates(bank, np.zeros((100, 2)))
        with pytest.raises(ShapeError):
            hcf.filter_all_candidates(bank, np.zeros(3072))


class TestSelectCandidate:
    def test_equals_one_hot_contraction(self, rng):
        grid = desk_grid()
        bank = hcf.build_bank(grid)
        chunks = rng.standard_normal((24 + 2 * bank.pad, 5))
        out = hcf.filter_all_candidates(bank, chunks)
        track = hcf.track_from_indices(grid, [0, 3, 5, 2, 4])
        picked = hcf.select_candidate(out, track)
        brute = np.zeros_like(picked)
        for t in range(5):
            onehot = hcf.one_hot(grid, int(track.indices[t]))
            brute[:, t] = np.tensordot(onehot, out[:, :, t], axes=(0, 0))
        np.testing.assert_array_equal(picked, brute)

    def test_all_unvoiced_returns_frames(self, rng):
        grid = desk_grid()
        bank = hcf.build_bank(grid)
        chunks = rng.standard_normal((24 + 2 * bank.pad, 3))
        out = hcf.filter_all_candidates(bank, chunks)
        track = hcf.track_from_indices(grid, [5, 5, 5])
        np.testing.assert_array_equal(
            hcf.select_candidate(out, track), chunks[bank.pad : bank.pad + 24, :]
        )

    def test_frame_count_validated(self, rng):
        grid = desk_grid()
        bank = hcf.build_bank(grid)
        chunks = rng.standard_normal((24 + 2 * bank.pad, 3))
        out = hcf.filter_all_candidates(bank, chunks)
        with pytest.raises(ShapeError):
            hcf.select_candidate(out, hcf.track_from_indices(grid, [0, 1]))


class TestPathEquivalence:
    def test_random_signal_random_track(self, grid, bank, rng):
        x = rng.standard_normal(24000)
        chunks = hcf.chunk_signal(x, hcf.FrameConfig())
        n_frames = chunks.shape[1]
        all_out = hcf.filter_all_candidates(bank, chunks)
        for _ in range(3):
            track = hcf.track_from_indices(
                grid, rng.integers(0, grid.label_size, size=n_frames)
            )
            reference = hcf.select_candidate(all_out, track)
            fast = hcf.filter_inference(bank, chunks, track)
            assert np.abs(reference - fast).max() <= 1e-10

    def test_unvoiced_inference_is_identity(self, grid, bank, rng):
        x = rng.standard_normal(4000)
        cfg = hcf.FrameConfig()
        chunks = hcf.chunk_signal(x, cfg)
        track = hcf.track_from_indices(grid, np.full(chunks.shape[1], 225))
        out = hcf.filter_inference(bank, chunks, track)
        np.testing.assert_array_equal(out, hcf.frame_signal(x, cfg))

    def test_track_length_validated(self, grid, bank):
        chunks = np.zeros((3072, 4))
        with pytest.raises(ShapeError):
            hcf.filter_inference(bank, chunks, hcf.track_from_indices(grid, [0]))


class TestPeriodicInvariance:
    @pytest.mark.parametrize("index", [0, 32, 96, 128, 200, 224])
    def test_matched_tone_passes_unscathed(self, grid, bank, index):
        period = int(grid.rounded_periods()[index])
        frame = 1536
        x = periodic_tone(period, frame + 2 * bank.pad)
        chunks = x[:, None]
        track = hcf.track_from_indices(grid, [index])
        out = hcf.filter_inference(bank, chunks, track)[:, 0]
        center = x[bank.pad : bank.pad + frame]
        rel = np.abs(out - center).max() / np.abs(center).max()
        assert rel <= 1e-9


class TestMacCounting:
    def test_exact_counter_values(self, grid, bank, rng):
        x = rng.standard_normal(12000)
        cfg = hcf.FrameConfig()
        chunks = hcf.chunk_signal(x, cfg)
        n_frames = chunks.shape[1]
        indices = rng.integers(0, grid.label_size, size=n_frames)
        track = hcf.track_from_indices(grid, indices)
        n_voiced = int((indices != 225).sum())

        counter = hcf.MacCounter()
        hcf.filter_all_candidates(bank, chunks, counter=counter)
        hcf.filter_inference(bank, chunks, track, counter=counter)

        assert counter.parallel == (225 * 3 + 1) * 1536 * n_frames
        assert counter.inference == 3 * 1536 * n_voiced
        assert counter.inference == 4608 * n_voiced

    def test_ratio_exceeds_two_hundred(self, grid, bank, rng):
        x = rng.standard_normal(12000)
        chunks = hcf.chunk_signal(x, hcf.FrameConfig())
        track = hcf.track_from_indices(
            grid, rng.integers(0, 225, size=chunks.shape[1])  # all voiced
        )
        counter = hcf.MacCounter()
        hcf.filter_all_candidates(bank, chunks, counter=counter)
        hcf.filter_inference(bank, chunks, track, counter=counter)
        assert counter.ratio() >= 200.0

    def test_empty_inference_ratio(self):
        assert hcf.MacCounter(parallel=10, inference=0).ratio() == np.inf


class TestFrequencyResponse:
    def test_dc_harmonics_and_midpoints(self, bank):
        # candidate 96 has period 480 -> fundamental 100 Hz
        freqs, mags = hcf.frequency_response(bank, 96, n_points=481)
        assert freqs[0] == 0.0 and freqs[-1] == 24000.0
        assert mags[0] == pytest.approx(1.0, abs=1e-12)
        for harmonic in (100.0, 500.0, 12000.0):
            k = int(np.argmin(np.abs(freqs - harmonic)))
            assert freqs[k] == harmonic
            assert mags[k] == pytest.approx(1.0, abs=1e-9)
        for midpoint in (50.0, 150.0, 23950.0):
            k = int(np.argmin(np.abs(freqs - midpoint)))
            assert freqs[k] == midpoint
            assert mags[k] == pytest.approx(0.0, abs=1e-9)

    def test_candidate_range_checked(self, bank):
        with pytest.raises(ValueError):
            hcf.frequency_response(bank, 225)


class TestBackendAgreement:
    def test_comb_kernels_match_numpy_fallback(self, rng):
        grid = desk_grid()
        bank = hcf.build_bank(grid)
        frame = 16
        chunks_fm = rng.standard_normal((4, frame + 2 * bank.pad))
        periods = np.concatenate([bank.rounded_periods, [0]])
        active_all = _kernels.comb_all(chunks_fm, periods, bank.taps, bank.pad, frame)
        np_all = _kernels.BACKENDS["numpy"]["comb_all"](
            chunks_fm, periods, bank.taps, bank.pad, frame
        )
        np.testing.assert_array_equal(active_all, np_all)

        sel = np.array([12, 0, 8, 4], dtype=np.int64)
        active_inf = _kernels.comb_inference(chunks_fm, sel, bank.taps, bank.pad, frame)
        np_inf = _kernels.BACKENDS["numpy"]["comb_inference"](
            chunks_fm, sel, bank.taps, bank.pad, frame
        )
        np.testing.assert_array_equal(active_inf, np_inf)

    def test_yin_kernel_matches_numpy_fallback(self, rng):
        x = rng.standard_normal(400)
        active = _kernels.yin_difference(x, 200, 150)
        fallback = _kernels.BACKENDS["numpy"]["yin_difference"](x, 200, 150)
        np.testing.assert_allclose(active, fallback, rtol=1e-9, atol=1e-12)

    def test_viterbi_kernel_matches_numpy_fallback(self, rng):
        em = rng.standard_normal((7, 11))
        trans = rng.standard_normal((7, 7))
        init = rng.standard_normal(7)
        active = _kernels.viterbi_core(em, trans, init)
        fallback = _kernels.BACKENDS["numpy"]["viterbi"](em, trans, init)
        np.testing.assert_array_equal(active, fallback)

    def test_yin_window_length_validated(self):
        with pytest.raises(ValueError):
            _kernels.yin_difference(np.zeros(100), 80, 40)
