"""Tests for the reversed-block feedforward source coder."""

from fractions import Fraction

import numpy as np
import pytest

from siclab import finite_info as fi
from siclab import sw_codecs as sw
from siclab import wz_finite as wz


def demo_law() -> fi.WzLaw:
    # X ~ Bern(1/2), Y = X with prob 3/4 else an erasure symbol; the
    # companion word is X through a 0.1 flip.  Reconstruction follows Y
    # when it is clean and falls back on the companion word otherwise.
    p_xy = np.array([[0.375, 0.0, 0.125], [0.0, 0.375, 0.125]])
    p_ux = np.array([[0.9, 0.1], [0.1, 0.9]])
    return fi.WzLaw(p_xy, p_ux, fi.best_response_f_wz(p_xy, p_ux))


def lossless_law() -> fi.WzLaw:
    # Y reveals X exactly, so the side information does all the work
    p_xy = np.diag([0.5, 0.5])
    p_ux = np.eye(2)
    return fi.WzLaw(p_xy, p_ux, np.array([[0, 0], [1, 1]]))


DEMO_SLACKS = wz.WzSlacks(0.07, 0.5)
DEMO_CODEC = wz.WzCodecConfig(0.14, 0.25)


def demo_schedule(base_len: int = 6, k: int = 2) -> wz.WzSchedule:
    return wz.wz_plan(base_len, k, demo_law(), DEMO_SLACKS)


class LoggingStream:
    """Sequence wrapper that records every slice taken from it."""

    def __init__(self, arr):
        self.arr = np.asarray(arr)
        self.accesses = []

    def __len__(self):
        return len(self.arr)

    def __getitem__(self, key):
        self.accesses.append((key.start, key.stop))
        return self.arr[key]


class TestPlanExact:
    def test_geometric_chain_exact(self):
        s = wz.wz_plan_rates(4, 3, Fraction(1, 4), Fraction(1, 2))
        assert s.block_lens == (4, 8, 16)
        assert s.sw_bits == (2, 4, 8)
        assert s.total_n == 28
        assert s.emitted_bits == 8
        assert s.ratio_r == Fraction(2)
        assert s.rate == Fraction(2, 7)
        assert s.rate_limit == Fraction(1, 4)

    def test_single_stage_rate_is_the_compression_rate(self):
        s = wz.wz_plan_rates(4, 1, Fraction(1, 4), Fraction(1, 2))
        assert s.block_lens == (4,)
        assert s.sw_bits == (2,)
        assert s.rate == Fraction(1, 2)

    def test_unit_ratio_keeps_blocks_constant(self):
        s = wz.wz_plan_rates(4, 4, Fraction(1, 2), Fraction(1, 2))
        assert s.block_lens == (4, 4, 4, 4)
        assert s.sw_bits == (2, 2, 2, 2)
        assert s.rate == Fraction(1, 8)
        assert s.rate_limit == 0

    def test_deep_chains_approach_the_rate_gap(self):
        # with zero slack the emitted rate lands within 25% of the
        # rate_y - rate_x gap once the chain has three or more stages
        for k in (3, 4):
            s = wz.wz_plan_rates(4, k, Fraction(1, 4), Fraction(1, 2))
            assert s.rate >= s.rate_limit
            assert s.rate <= s.rate_limit * Fraction(5, 4)
        s3 = wz.wz_plan_rates(4, 3, Fraction(1, 4), Fraction(1, 2))
        s4 = wz.wz_plan_rates(4, 4, Fraction(1, 4), Fraction(1, 2))
        assert s4.rate < s3.rate

    def test_float_plan_matches_fraction_plan(self):
        exact = wz.wz_plan_rates(4, 3, Fraction(1, 4), Fraction(1, 2))
        rough = wz.wz_plan_rates(4, 3, 0.25, 0.5)
        assert rough.block_lens == exact.block_lens
        assert rough.sw_bits == exact.sw_bits


class TestPlanValidation:
    def test_rejects_ratio_below_one(self):
        with pytest.raises(ValueError, match="ratio below one"):
            wz.wz_plan_rates(4, 2, Fraction(1, 3), Fraction(1, 4))

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            wz.wz_plan_rates(0, 2, Fraction(1, 4), Fraction(1, 2))
        with pytest.raises(ValueError):
            wz.wz_plan_rates(4, 0, Fraction(1, 4), Fraction(1, 2))

    def test_rejects_negative_compression_rate(self):
        with pytest.raises(ValueError):
            wz.wz_plan_rates(4, 2, Fraction(1, 4), Fraction(-1, 2))

    def test_rejects_nonpositive_shaper_rate(self):
        with pytest.raises(ValueError):
            wz.wz_plan_rates(4, 2, 0.0, Fraction(1, 2))

    def test_stage_budget_fail_fast(self):
        # stage 1 must absorb ceil(4/3) = 2 payload bits but only has
        # floor(5/4) = 1 bit of shaper capacity
        with pytest.raises(ValueError, match="shaper capacity"):
            wz.wz_plan_rates(4, 2, Fraction(1, 4), Fraction(1, 3))


class TestPlanLawWrapper:
    def test_demo_plan_values(self):
        law = demo_law()
        m = fi.info_measures(law)
        s = demo_schedule()
        assert s.block_lens == (6, 17)
        assert s.sw_bits == (7, 19)
        assert s.total_n == 23
        # the budget check runs at the unslacked shaper entropy
        assert s.capacity_rate == pytest.approx(m.h_u_given_x)
        assert s.rate_limit == pytest.approx(
            m.h_u_given_y + 0.5 - (m.h_u_given_x - 0.07))

    def test_lossless_law_collapses_to_zero_rate(self):
        s = wz.wz_plan(5, 3, lossless_law(), wz.WzSlacks(0.0, 0.0))
        assert s.block_lens == (5, 5, 5)
        assert s.sw_bits == (0, 0, 0)
        assert s.ratio_r == Fraction(1)
        assert s.rate == 0
        assert s.emitted_bits == 0

    def test_rejects_slack_eating_the_shaper_entropy(self):
        with pytest.raises(ValueError, match="consumes"):
            wz.wz_plan(6, 2, demo_law(), wz.WzSlacks(0.6, 0.5))


class TestEncode:
    def test_transcript_shapes_and_distortion(self):
        law = demo_law()
        sched = demo_schedule()
        rng = np.random.default_rng(sw.derive_seed(0, 21))
        transcript, reason = wz.run_wz_trial(sched, law, DEMO_CODEC, 0, rng)
        assert reason is None
        assert transcript.reversed_source.shape == (sched.total_n,)
        assert tuple(len(u) for u in transcript.u_blocks) == sched.block_lens
        assert tuple(len(b) for b in transcript.stage_bits) == sched.sw_bits
        assert np.array_equal(transcript.emitted_bits,
                              transcript.stage_bits[-1])
        x = transcript.reversed_source[::-1]
        assert transcript.distortion == pytest.approx(
            wz.realized_distortion(law, x, transcript.x_hat))

    def test_rejects_wrong_source_length(self):
        sched = demo_schedule()
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="total_n"):
            wz.wz_ff_encode(np.zeros(sched.total_n + 1, dtype=np.int64),
                            sched, demo_law(), DEMO_CODEC, 0, rng)

    def test_shaping_failure_reports_the_stage(self):
        # an overtight shaper slack leaves stage 1 with no usable word
        law = demo_law()
        sched = demo_schedule()
        tight = wz.WzCodecConfig(0.02, 0.25)
        rng = np.random.default_rng(sw.derive_seed(0, 41))
        x, _ = fi.sample_wz_source(law, sched.total_n, rng)
        with pytest.raises(wz.WzEncodeError, match="stage 1"):
            wz.wz_ff_encode(x, sched, law, tight, 0, rng)


class TestDecode:
    def test_stage_inverse_recovers_previous_bits(self):
        law = demo_law()
        sched = demo_schedule()
        rng = np.random.default_rng(sw.derive_seed(0, 21))
        x, y = fi.sample_wz_source(law, sched.total_n, rng)
        u_blocks, stage_bits = wz.wz_ff_encode_stages(
            x, sched, law, DEMO_CODEC, 0, rng)
        x_hat, u_hat, recovered = wz.wz_ff_decode_stages(
            stage_bits[-1], y, x, sched, law, DEMO_CODEC, 0)
        assert recovered[0] is None
        assert np.array_equal(recovered[1], stage_bits[0])
        for got, sent in zip(u_hat, u_blocks):
            assert np.array_equal(got, sent)
        # reconstruction is symbol-wise through the map against Y
        rev_y = y[::-1]
        rev_hat = np.concatenate(
            [law.f_uy[u, rev_y[start:start + len(u)]]
             for u, start in zip(u_hat, np.cumsum((0,) + sched.block_lens[:-1]))])
        assert np.array_equal(x_hat, rev_hat[::-1])

    def test_single_stage_composes_plain_codec_calls(self):
        law = demo_law()
        sched = wz.wz_plan(6, 1, law, DEMO_SLACKS)
        rng = np.random.default_rng(sw.derive_seed(2, 55))
        x, y = fi.sample_wz_source(law, sched.total_n, rng)
        bits = wz.wz_ff_encode(x, sched, law, DEMO_CODEC, 9,
                               np.random.default_rng(77))
        u_manual = fi.sample_u_given_x(law, x[::-1],
                                       np.random.default_rng(77))
        codes, _ = wz.build_wz_codes(sched, law, DEMO_CODEC, 9)
        assert np.array_equal(bits, sw.sw_encode(u_manual, codes[0]))
        x_hat = wz.wz_ff_decode(bits, y, x, sched, law, DEMO_CODEC, 9)
        u_hat = sw.sw_decode(bits, y[::-1], codes[0]).u_seq
        assert np.array_equal(x_hat, law.f_uy[u_hat, y[::-1]][::-1])

    def test_feedforward_touches_only_settled_blocks(self):
        # the decoder may read a source block off the feedforward
        # stream only after reconstructing it, so the slices must march
        # through original-order positions of stages k-1 .. 1 and never
        # reach the stage-0 block at the end of the stream
        law = lossless_law()
        sched = wz.wz_plan(5, 3, law, wz.WzSlacks(0.0, 0.0))
        codec = wz.WzCodecConfig(0.3, 0.3)
        rng = np.random.default_rng(3)
        x, y = fi.sample_wz_source(law, sched.total_n, rng)
        bits = wz.wz_ff_encode(x, sched, law, codec, 5, rng)
        stream = LoggingStream(x)
        wz.wz_ff_decode(bits, y, stream, sched, law, codec, 5)
        assert stream.accesses == [(0, 5), (5, 10)]

    def test_feedforward_access_two_stage(self):
        law = demo_law()
        sched = demo_schedule()
        rng = np.random.default_rng(sw.derive_seed(0, 21))
        x, y = fi.sample_wz_source(law, sched.total_n, rng)
        _, stage_bits = wz.wz_ff_encode_stages(x, sched, law, DEMO_CODEC,
                                               0, rng)
        stream = LoggingStream(x)
        wz.wz_ff_decode(stage_bits[-1], y, stream, sched, law, DEMO_CODEC, 0)
        # stage 1 sits at reversed offsets [6, 23), i.e. the first 17
        # original-order symbols; the remaining 6 are never read
        assert stream.accesses == [(0, 17)]

    def test_rejects_wrong_lengths(self):
        law = demo_law()
        sched = demo_schedule()
        bits = np.zeros(sched.emitted_bits, dtype=np.int64)
        good = np.zeros(sched.total_n, dtype=np.int64)
        with pytest.raises(ValueError, match="total_n"):
            wz.wz_ff_decode(bits, np.zeros(2, dtype=np.int64), good, sched,
                            law, DEMO_CODEC, 0)
        with pytest.raises(ValueError, match="total_n"):
            wz.wz_ff_decode(bits, good, np.zeros(2, dtype=np.int64), sched,
                            law, DEMO_CODEC, 0)

    def test_tampered_output_fails_or_changes_the_answer(self):
        law = demo_law()
        sched = demo_schedule()
        rng = np.random.default_rng(sw.derive_seed(0, 21))
        x, y = fi.sample_wz_source(law, sched.total_n, rng)
        _, stage_bits = wz.wz_ff_encode_stages(x, sched, law, DEMO_CODEC,
                                               0, rng)
        clean = wz.wz_ff_decode(stage_bits[-1], y, x, sched, law,
                                DEMO_CODEC, 0)
        bad_y = y.copy()
        swap = bad_y < 2
        bad_y[swap] = 1 - bad_y[swap]
        try:
            tampered = wz.wz_ff_decode(stage_bits[-1], bad_y, x, sched,
                                       law, DEMO_CODEC, 0)
        except wz.WzDecodeError:
            return
        assert not np.array_equal(tampered, clean)


class TestLosslessCollapse:
    def test_exact_roundtrip_with_zero_emitted_bits(self):
        law = lossless_law()
        sched = wz.wz_plan(5, 3, law, wz.WzSlacks(0.0, 0.0))
        codec = wz.WzCodecConfig(0.3, 0.3)
        for t in range(10):
            rng = np.random.default_rng(t)
            transcript, reason = wz.run_wz_trial(sched, law, codec, t, rng)
            assert reason is None
            assert transcript.emitted_bits.size == 0
            assert transcript.distortion == 0.0
            x = transcript.reversed_source[::-1]
            assert np.array_equal(transcript.x_hat, x)


class TestMonteCarlo:
    def test_two_stage_completion_and_distortion(self):
        law = demo_law()
        sched = demo_schedule()
        done = 0
        dists = []
        for t in range(60):
            rng = np.random.default_rng(sw.derive_seed(t, 21))
            transcript, _ = wz.run_wz_trial(sched, law, DEMO_CODEC, t, rng)
            if transcript is not None:
                done += 1
                dists.append(transcript.distortion)
        # measured 59/60 complete with mean distortion 0.052; the short
        # blocks sit above the 0.025 single-letter value because the
        # shaped companion words are biased toward the typicality edge
        assert done >= 54
        assert 0.02 <= float(np.mean(dists)) <= 0.09

    def test_distortion_approaches_exact_as_blocks_grow(self):
        # stage-0-only chains keep the companion word honestly drawn,
        # so the realized distortion must sit within sampling error of
        # the single-letter value and stop degrading as L grows; the
        # decode slack shrinks like 1/sqrt(L) to keep the silent-error
        # mass from growing with the shell size
        law = demo_law()
        errs = {}
        ses = {}
        for base_len in (6, 10, 14):
            sched = wz.wz_plan(base_len, 1, law, DEMO_SLACKS)
            codec = wz.WzCodecConfig(0.14, 0.6 / np.sqrt(base_len))
            dists = []
            for t in range(400):
                rng = np.random.default_rng(sw.derive_seed(t, 31, base_len))
                transcript, _ = wz.run_wz_trial(sched, law, codec,
                                                1000 + t, rng)
                if transcript is not None:
                    dists.append(transcript.distortion)
            d = np.asarray(dists)
            assert d.size >= 340
            errs[base_len] = abs(float(d.mean()) - 0.025)
            ses[base_len] = float(d.std(ddof=1)) / np.sqrt(d.size)
        for base_len in (6, 10, 14):
            assert errs[base_len] <= 3.5 * ses[base_len]
        assert errs[6] >= errs[10] - 2.0 * ses[10]
        assert errs[10] >= errs[14] - 2.0 * ses[14]
        assert errs[14] <= errs[6]
