"""Unit tests for the feedback scheme on the known-interference channel."""

import math

import numpy as np
import pytest

from siclab import dirty_paper as dp


def std_params(n=10, P=1.0, noise_var=1.0, R=0.4, s_var=0.0):
    return dp.derive_params(P, noise_var, n, R, interference_var=s_var)


class TestDeriveParams:
    def test_unit_snr(self):
        p = std_params(n=10, P=1.0, noise_var=1.0, R=0.4)
        assert p.alpha == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert p.gain_g == pytest.approx(1.0, rel=1e-15)
        assert p.capacity_C == pytest.approx(0.5, rel=1e-15)
        assert p.num_messages_M == math.ceil(2.0 ** 4.0)

    def test_snr_three(self):
        p = std_params(P=3.0, noise_var=1.0)
        assert p.alpha == pytest.approx(2.0, rel=1e-15)
        assert p.gain_g == pytest.approx(math.sqrt(3.0), rel=1e-15)
        assert p.capacity_C == pytest.approx(1.0, rel=1e-15)

    def test_zero_power(self):
        p = std_params(P=0.0)
        assert p.alpha == 1.0
        assert p.gain_g == 0.0
        assert p.capacity_C == 0.0

    def test_invariants(self):
        p = std_params(P=2.7, noise_var=0.9, n=12, R=0.3)
        assert p.alpha ** 2 == pytest.approx(1.0 + p.power_P / p.noise_var, rel=1e-12)
        assert p.gain_g ** 2 * p.noise_var == pytest.approx(p.power_P, rel=1e-12)
        assert p.num_messages_M >= 2

    @pytest.mark.parametrize("bad", [
        dict(P=-1.0, noise_var=1.0, n=10, R=0.4),
        dict(P=1.0, noise_var=0.0, n=10, R=0.4),
        dict(P=1.0, noise_var=1.0, n=1, R=0.4),
        dict(P=1.0, noise_var=1.0, n=10, R=0.0),
        dict(P=float("nan"), noise_var=1.0, n=10, R=0.4),
        dict(P=float("inf"), noise_var=1.0, n=10, R=0.4),
    ])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            dp.derive_params(bad["P"], bad["noise_var"], bad["n"], bad["R"])


class TestMessageToTheta:
    def test_values(self):
        assert dp.message_to_theta(0, 4) == 0.125
        assert dp.message_to_theta(3, 4) == 0.875
        assert dp.message_to_theta(0, 1) == 0.5

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            dp.message_to_theta(4, 4)
        with pytest.raises(ValueError):
            dp.message_to_theta(-1, 4)


class TestComputeShift:
    def test_zero_interference(self):
        p = std_params(n=6)
        st = dp.compute_shift(np.zeros(6), p, 0.3)
        assert np.all(st.psi == 0.0)
        assert st.theta_prime == 0.3

    def test_two_step_values(self):
        p = std_params(n=2)
        st = dp.compute_shift([1.0, 1.0], p, 0.0)
        assert st.psi[2] == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)
        # next term adds 0.5 * 1 / (alpha * g) = 0.5/sqrt(2)
        assert st.psi[3] == pytest.approx(1.06066, abs=5e-6)

    def test_single_late_term(self):
        p = std_params(n=3)
        st = dp.compute_shift([0.0, 0.0, 1.0], p, 0.1)
        assert st.psi[2] == 0.0
        assert st.psi[3] == 0.0
        assert st.psi[4] == pytest.approx(0.25, rel=1e-12)
        assert st.theta_prime - st.theta == pytest.approx(st.psi[p.horizon_n + 1], abs=1e-15)

    def test_zero_gain_rejects_nonzero_tail(self):
        p = std_params(P=0.0, n=3)
        with pytest.raises(ValueError):
            dp.compute_shift([0.0, 1.0, 0.0], p, 0.2)
        st = dp.compute_shift([2.0, 0.0, 0.0], p, 0.2)  # only S_1 nonzero is fine
        assert st.psi[4] == 2.0

    def test_length_mismatch(self):
        p = std_params(n=4)
        with pytest.raises(ValueError):
            dp.compute_shift([0.0, 0.0], p, 0.2)


class TestSteps:
    def test_encode_first_step_cancels(self):
        p = std_params(n=4)
        shift = dp.compute_shift(np.zeros(4), p, 0.5)
        enc = dp.SkEncoderState()
        assert dp.encode_step(1, enc, shift, p) == 0.0

    def test_encode_second_step_perfect_estimate(self):
        p = std_params(n=4)
        shift = dp.compute_shift([1.0, 0.0, 0.0, 0.0], p, 0.4)
        enc = dp.SkEncoderState(step_i=2, estimate_x1=shift.theta_prime - shift.psi[2])
        assert dp.encode_step(2, enc, shift, p) == pytest.approx(0.0, abs=1e-15)

    def test_encode_second_step_value(self):
        p = std_params(n=4)
        shift = dp.compute_shift(np.zeros(4), p, 0.0)
        enc = dp.SkEncoderState(step_i=2, estimate_x1=shift.theta_prime + 0.1)
        assert dp.encode_step(2, enc, shift, p) == pytest.approx(math.sqrt(2) * 0.1, rel=1e-12)

    def test_encode_out_of_order(self):
        p = std_params(n=4)
        shift = dp.compute_shift(np.zeros(4), p, 0.5)
        enc = dp.SkEncoderState()
        with pytest.raises(ValueError):
            dp.encode_step(2, enc, shift, p)

    def test_receive_first_step(self):
        p = std_params(n=4)
        rx = dp.SkReceiverState()
        assert dp.receive_step(1, 0.0, rx, p) == 0.5
        assert rx.step_i == 2

    def test_receive_equal_weights(self):
        # alpha^2 = 2 averages the previous estimate with the correction
        p = std_params(n=4)
        a, y = 0.3, 0.7
        rx = dp.SkReceiverState(step_i=2, estimate_x1=a)
        b = a - y / (p.alpha * p.gain_g)
        assert dp.receive_step(2, y, rx, p) == pytest.approx((a + b) / 2, rel=1e-12)

    def test_receive_out_of_order(self):
        p = std_params(n=4)
        rx = dp.SkReceiverState()
        with pytest.raises(ValueError):
            dp.receive_step(3, 0.0, rx, p)


class TestDecode:
    def test_interval(self):
        assert dp.decode_message(0.13, 4) == 0
        assert dp.decode_message(0.26, 4) == 1

    def test_centers_roundtrip(self):
        for M in (1, 2, 4, 16, 64):
            for m in range(M):
                assert dp.decode_message(dp.message_to_theta(m, M), M) == m

    def test_clamping(self):
        assert dp.decode_message(-0.2, 4) == 0
        assert dp.decode_message(1.7, 4) == 3


class TestEpisodes:
    def test_noise_free_recovers_theta(self):
        p = std_params(n=8, s_var=4.0)
        rng = np.random.default_rng(0)
        for m in (0, 1, 2):
            s = rng.normal(0.0, 2.0, size=8)
            t = dp.run_episode(p, m, s, np.zeros(8))
            assert t.final_estimate == pytest.approx(t.theta, abs=1e-10)
            assert t.decoded_message == m
            assert t.phi_final == 0.0

    def test_zero_power_rejected(self):
        p = std_params(P=0.0, n=4)
        with pytest.raises(ValueError):
            dp.run_episode(p, 0, np.zeros(4), np.zeros(4))

    def test_interference_invariance_paired(self):
        # shared noise, interference on/off: same decision, same final error
        p = std_params(n=15, s_var=4.0)
        rng = np.random.default_rng(11)
        for _ in range(200):
            m = int(rng.integers(p.num_messages_M))
            z = rng.normal(0.0, 1.0, size=15)
            s = rng.normal(0.0, 2.0, size=15)
            with_s = dp.run_episode(p, m, s, z)
            without = dp.run_episode(p, m, np.zeros(15), z)
            assert with_s.decoded_message == without.decoded_message
            gap = abs((with_s.theta - with_s.final_estimate)
                      - (without.theta - without.final_estimate))
            assert gap < 1e-9

    def test_final_estimate_matches_error_recursion(self):
        p = std_params(n=12, s_var=1.0)
        rng = np.random.default_rng(5)
        for _ in range(25):
            m = int(rng.integers(p.num_messages_M))
            s = rng.normal(0.0, 1.0, size=12)
            z = rng.normal(0.0, 1.0, size=12)
            t = dp.run_episode(p, m, s, z)
            assert t.final_estimate == pytest.approx(t.theta - t.phi_final, abs=1e-10)

    def test_transcript_lengths(self):
        p = std_params(n=7)
        t = dp.run_episode(p, 1, np.zeros(7), np.zeros(7))
        for arr in (t.inputs, t.outputs, t.feedback, t.noise, t.interference):
            assert arr.shape == (7,)

    def test_feedback_is_receiver_estimate_path(self):
        # the value handed to the encoder is the exact float the receiver computed
        p = std_params(n=6, s_var=1.0)
        rng = np.random.default_rng(3)
        t = dp.run_episode(p, 2, rng.normal(size=6), rng.normal(size=6))
        rx = dp.SkReceiverState()
        for i in range(1, 7):
            fb = dp.receive_step(i, t.outputs[i - 1], rx, p)
            assert fb == t.feedback[i - 1]


class TestBatch:
    def test_matches_scalar_bit_exact(self):
        p = std_params(n=9, s_var=2.0)
        rng = np.random.default_rng(42)
        trials = 50
        msgs = rng.integers(p.num_messages_M, size=trials)
        s = rng.normal(0.0, math.sqrt(2.0), size=(trials, 9))
        z = rng.normal(0.0, 1.0, size=(trials, 9))
        batch = dp.run_episodes_batch(p, msgs, s, z)
        for t in range(trials):
            one = dp.run_episode(p, int(msgs[t]), s[t], z[t])
            assert batch.final_estimates[t] == one.final_estimate
            assert batch.decoded[t] == one.decoded_message
            assert batch.phi_final[t] == one.phi_final
            assert np.array_equal(batch.inputs[t], one.inputs)
            assert np.array_equal(batch.outputs[t], one.outputs)

    def test_determinism_same_seed(self):
        p = std_params(n=10, s_var=4.0)

        def run(seed):
            rng = np.random.default_rng(seed)
            msgs = rng.integers(p.num_messages_M, size=64)
            s = rng.normal(0.0, 2.0, size=(64, 10))
            z = rng.normal(0.0, 1.0, size=(64, 10))
            return dp.run_episodes_batch(p, msgs, s, z)

        a, b = run(123), run(123)
        assert np.array_equal(a.inputs, b.inputs)
        assert np.array_equal(a.outputs, b.outputs)
        assert np.array_equal(a.final_estimates, b.final_estimates)
        assert np.array_equal(a.decoded, b.decoded)


class TestStatistics:
    def test_analytic_power_identity(self):
        p = std_params(n=15, P=1.7, noise_var=0.8)
        second_moments = dp.analytic_error_power(p)
        for i in range(2, p.horizon_n + 2):
            tx_power = p.alpha ** (2 * (i - 1)) * p.gain_g ** 2 * second_moments[i - 2]
            assert tx_power == pytest.approx(p.power_P, rel=1e-10)

    def test_final_error_variance(self):
        p = std_params(n=10, s_var=1.0)
        rng = np.random.default_rng(7)
        trials = 20000
        msgs = rng.integers(p.num_messages_M, size=trials)
        s = rng.normal(0.0, 1.0, size=(trials, 10))
        z = rng.normal(0.0, 1.0, size=(trials, 10))
        batch = dp.run_episodes_batch(p, msgs, s, z)
        target = p.noise_var / p.alpha_sq ** p.horizon_n
        var = batch.phi_final.var(ddof=1)
        se = target * math.sqrt(2.0 / (trials - 1))
        assert abs(var - target) < 4 * se

    def test_transmit_power_per_symbol(self):
        p = std_params(n=10, s_var=4.0)
        rng = np.random.default_rng(8)
        trials = 20000
        msgs = rng.integers(p.num_messages_M, size=trials)
        s = rng.normal(0.0, 2.0, size=(trials, 10))
        z = rng.normal(0.0, 1.0, size=(trials, 10))
        batch = dp.run_episodes_batch(p, msgs, s, z)
        for i in range(2, 11):
            sq = batch.inputs[:, i - 1] ** 2
            mean = sq.mean()
            se = sq.std(ddof=1) / math.sqrt(trials)
            assert abs(mean - p.power_P) < 4 * se

    def test_error_rate_monotone_in_horizon(self):
        rng = np.random.default_rng(9)
        rates = []
        for n in (5, 10, 15):
            p = dp.derive_params(1.0, 1.0, n, 0.4, interference_var=1.0)
            trials = 10000
            msgs = rng.integers(p.num_messages_M, size=trials)
            s = rng.normal(0.0, 1.0, size=(trials, n))
            z = rng.normal(0.0, 1.0, size=(trials, n))
            batch = dp.run_episodes_batch(p, msgs, s, z)
            rates.append(np.mean(batch.decoded != batch.messages))
        assert rates[0] > rates[1] > rates[2]
