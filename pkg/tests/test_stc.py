import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcs_sim.plant import DiscreteModel
from wcs_sim.stc import (ErrorMoments, TriggerState, expected_sq_norm, find_next_trigger,
                         instantaneous_trigger, iter_error_moments, predict_error_moments,
                         register_send)
from wcs_sim.validate import mc_expected_sq_norm, random_trigger_instance

from conftest import scalar_model


def make_trigger(delta, m_max=40, n_out=1, m_in=1):
    return TriggerState(delta=delta, m_max=m_max,
                        u_sent_held=np.zeros(n_out), u_remote_held=np.zeros(m_in))


class TestPredictErrorMoments:
    def test_frozen_deterministic_system_has_no_error(self):
        model = scalar_model(1.0, 0.0, sigma=0.0)
        x = np.array([0.7])
        f_out = np.array([[2.0]])
        u_sent = f_out @ x
        for horizon in (1, 2, 5, 17):
            moments = predict_error_moments(model, model.a_d, f_out, x,
                                            np.zeros(1), u_sent, horizon)
            assert abs(moments.mean[0]) < 1e-12
            assert abs(moments.cov[0, 0]) < 1e-15

    def test_scalar_variance_recursion(self):
        # A_cl = 1, F = 1, B = 0, Sigma = 0.01: S(M) = M sigma^2
        model = scalar_model(1.0, 0.0, sigma=0.01)
        moments = predict_error_moments(model, np.array([[1.0]]), np.array([[1.0]]),
                                        np.zeros(1), np.zeros(1), np.zeros(1), 3)
        assert abs(moments.mean[0]) < 1e-15
        assert abs(moments.cov[0, 0] - 0.03) < 1e-12

    def test_horizon_below_one_rejected(self):
        model = scalar_model(1.0, 0.0)
        with pytest.raises(ValueError):
            predict_error_moments(model, model.a_d, np.eye(1), np.zeros(1),
                                  np.zeros(1), np.zeros(1), 0)

    def test_monte_carlo_oracle_agreement(self):
        rng = np.random.default_rng(2024)
        model, a_cl, f_out, x_now, u_remote, u_sent = random_trigger_instance(rng)
        for horizon in (2, 5, 10):
            analytic = expected_sq_norm(predict_error_moments(
                model, a_cl, f_out, x_now, u_remote, u_sent, horizon))
            mc_mean, mc_se = mc_expected_sq_norm(model, a_cl, f_out, x_now, u_remote,
                                                 u_sent, horizon, 100_000, rng)
            assert abs(mc_mean - analytic) <= 3.0 * mc_se

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_covariance_symmetric_psd_at_every_horizon(self, seed):
        rng = np.random.default_rng(seed)
        model, a_cl, f_out, x_now, u_remote, u_sent = random_trigger_instance(rng)
        moments_iter = iter_error_moments(model, a_cl, f_out, x_now, u_remote, u_sent)
        for _ in range(20):
            moments = next(moments_iter)
            assert np.allclose(moments.cov, moments.cov.T, atol=1e-12)
            assert np.linalg.eigvalsh(moments.cov)[0] >= -1e-12

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_trace_matches_direct_power_sum(self, seed):
        rng = np.random.default_rng(seed)
        model, a_cl, f_out, x_now, u_remote, u_sent = random_trigger_instance(rng)
        for horizon in (1, 3, 8):
            moments = predict_error_moments(model, a_cl, f_out, x_now,
                                            u_remote, u_sent, horizon)
            direct = 0.0
            for j in range(horizon):
                a_pow = np.linalg.matrix_power(a_cl, j)
                direct += np.trace(f_out @ a_pow @ model.sigma @ a_pow.T @ f_out.T)
            assert abs(np.trace(moments.cov) - direct) <= 1e-9 * max(1.0, direct)


class TestExpectedSqNorm:
    def test_mean_plus_trace(self):
        moments = ErrorMoments(mean=np.array([3.0, 4.0]), cov=np.eye(2))
        assert abs(expected_sq_norm(moments) - 27.0) < 1e-12

    def test_zero(self):
        assert expected_sq_norm(ErrorMoments(mean=np.zeros(3), cov=np.zeros((3, 3)))) == 0.0

    def test_sampling_oracle(self):
        rng = np.random.default_rng(99)
        mean = rng.uniform(-1.0, 1.0, size=4)
        root = rng.uniform(-0.5, 0.5, size=(4, 4))
        cov = root @ root.T
        analytic = expected_sq_norm(ErrorMoments(mean=mean, cov=cov))
        samples = rng.multivariate_normal(mean, cov, size=1_000_000)
        sq = np.sum(samples * samples, axis=1)
        se = sq.std(ddof=1) / np.sqrt(len(sq))
        assert abs(sq.mean() - analytic) <= 3.0 * se


class TestFindNextTrigger:
    def test_zero_delta_fires_at_two(self):
        model = scalar_model(1.0, 0.0, sigma=0.01)
        ts = make_trigger(delta=0.0)
        m = find_next_trigger(ts, model, model.a_d, np.array([[1.0]]), np.zeros(1))
        assert m == 2

    def test_scalar_noise_accumulation_case(self):
        # M sigma^2 > 0.035 first at M = 4
        model = scalar_model(1.0, 0.0, sigma=0.01)
        ts = make_trigger(delta=0.035)
        m = find_next_trigger(ts, model, model.a_d, np.array([[1.0]]), np.zeros(1))
        assert m == 4

    def test_quiet_stable_system_hits_cap(self):
        # decay from a small state: the error approaches (F x)^2 = 0.0025,
        # which never exceeds delta
        model = scalar_model(0.5, 0.0, sigma=0.0)
        ts = make_trigger(delta=0.01, m_max=12)
        m = find_next_trigger(ts, model, np.array([[0.5]]), np.array([[1.0]]),
                              np.array([0.05]))
        assert m == 12

    @given(st.integers(0, 2 ** 32 - 1),
           st.floats(0.0, 0.5), st.floats(0.0, 0.5))
    @settings(max_examples=25, deadline=None)
    def test_monotone_in_delta(self, seed, d1, d2):
        rng = np.random.default_rng(seed)
        model, a_cl, f_out, x_now, u_remote, _ = random_trigger_instance(rng)
        lo, hi = sorted((d1, d2))
        ts_lo = make_trigger(delta=lo, m_max=30)
        ts_hi = make_trigger(delta=hi, m_max=30)
        ts_lo.u_remote_held = u_remote
        ts_hi.u_remote_held = u_remote
        m_lo = find_next_trigger(ts_lo, model, a_cl, f_out, x_now)
        m_hi = find_next_trigger(ts_hi, model, a_cl, f_out, x_now)
        assert m_hi >= m_lo

    def test_register_send_updates_bookkeeping(self):
        ts = make_trigger(delta=0.1)
        register_send(ts, round_index=7, u_sent=np.array([1.5]), horizon=5)
        assert ts.last_send_step == 7
        assert ts.next_due == 11
        assert ts.next_due > 7
        assert np.array_equal(ts.u_sent_held, [1.5])

    def test_trigger_state_validation(self):
        with pytest.raises(ValueError):
            make_trigger(delta=-0.1)
        with pytest.raises(ValueError):
            make_trigger(delta=0.1, m_max=1)


class TestInstantaneousTrigger:
    def test_zero_error_zero_delta_is_quiet(self):
        assert instantaneous_trigger(np.zeros(2), 0.0) is False

    def test_fires_above_threshold(self):
        assert instantaneous_trigger(np.array([0.2]), 0.03) is True

    def test_boundary_is_strict(self):
        # 0.125 is exact in binary, so e'e == delta exactly at the boundary
        assert instantaneous_trigger(np.array([0.125, 0.125]), 0.03125) is False
