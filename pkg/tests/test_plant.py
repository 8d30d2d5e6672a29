import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcs_sim.numerics import solve_dare, spectral_radius
from wcs_sim.plant import (CartPoleParams, ContinuousModel, DiscreteModel, Disturbance,
                           cartpole_linear, discretize_model, disturbance_value, step,
                           velocity_noise_density, with_noise)


class TestCartpoleLinear:
    def test_no_gravity_no_fall(self):
        model = cartpole_linear(CartPoleParams(gravity=0.0))
        assert model.a_c[3, 2] == 0.0
        assert model.a_c[1, 2] == 0.0

    def test_velocity_coupling_rows(self):
        model = cartpole_linear(CartPoleParams())
        assert np.array_equal(model.a_c[0], [0.0, 1.0, 0.0, 0.0])
        assert np.array_equal(model.a_c[2], [0.0, 0.0, 0.0, 1.0])

    def test_open_loop_unstable_when_discretized(self):
        model = cartpole_linear(CartPoleParams())
        disc = discretize_model(model, 0.05)
        assert spectral_radius(disc.a_d) > 1.0

    def test_longer_pole_falls_slower(self):
        base = discretize_model(cartpole_linear(CartPoleParams()), 0.05)
        longer = discretize_model(
            cartpole_linear(CartPoleParams(pole_length=1.0)), 0.05)
        assert spectral_radius(longer.a_d) < spectral_radius(base.a_d)

    def test_non_positive_parameters_rejected(self):
        with pytest.raises(ValueError):
            cartpole_linear(CartPoleParams(cart_mass=0.0))
        with pytest.raises(ValueError):
            cartpole_linear(CartPoleParams(pole_length=-0.5))


class TestDiscretizeModel:
    def test_zero_density_zero_sigma(self):
        model = cartpole_linear(CartPoleParams())
        assert np.array_equal(discretize_model(model, 0.05).sigma, np.zeros((4, 4)))

    def test_sigma_scales_linearly_with_dt(self):
        model = with_noise(cartpole_linear(CartPoleParams()), velocity_noise_density(1e-4))
        full = discretize_model(model, 0.05)
        half = discretize_model(model, 0.025)
        assert np.allclose(half.sigma * 2.0, full.sigma)

    def test_integrator(self):
        model = ContinuousModel(a_c=[[0.0]], b_c=[[1.0]], noise_density=[[0.0]])
        disc = discretize_model(model, 0.05)
        assert np.allclose(disc.a_d, [[1.0]])
        assert np.allclose(disc.b_d, [[0.05]])

    def test_two_half_steps_match_one_full_step(self):
        model = cartpole_linear(CartPoleParams())
        full = discretize_model(model, 0.05)
        half = discretize_model(model, 0.025)
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, size=4)
        one = step(full, x, np.zeros(1), rng)
        two = step(half, step(half, x, np.zeros(1), rng), np.zeros(1), rng)
        assert np.linalg.norm(one - two) < 1e-9


class TestStep:
    def test_equilibrium_stays_put(self):
        model = DiscreteModel(a_d=np.eye(4), b_d=np.zeros((4, 1)),
                              sigma=np.zeros((4, 4)), dt=0.05)
        out = step(model, np.zeros(4), np.zeros(1), np.random.default_rng(0))
        assert np.array_equal(out, np.zeros(4))

    def test_scalar_arithmetic(self):
        model = DiscreteModel(a_d=[[1.0]], b_d=[[0.05]], sigma=[[0.0]], dt=0.05)
        out = step(model, np.array([1.0]), np.array([2.0]), np.random.default_rng(0))
        assert abs(out[0] - 1.1) < 1e-15

    def test_dimension_mismatch_rejected(self):
        model = DiscreteModel(a_d=np.eye(2), b_d=np.zeros((2, 1)),
                              sigma=np.zeros((2, 2)), dt=0.05)
        with pytest.raises(ValueError):
            step(model, np.zeros(3), np.zeros(1), np.random.default_rng(0))

    def test_noise_sample_covariance(self):
        model = DiscreteModel(a_d=np.zeros((3, 3)), b_d=np.zeros((3, 1)),
                              sigma=np.eye(3), dt=0.05)
        rng = np.random.default_rng(123)
        draws = np.array([step(model, np.zeros(3), np.zeros(1), rng)
                          for _ in range(100_000)])
        cov = np.cov(draws.T)
        assert np.linalg.norm(cov - np.eye(3), "fro") < 0.05 * np.linalg.norm(np.eye(3), "fro")

    def test_identical_seed_replays_identically(self):
        model = DiscreteModel(a_d=np.eye(4) * 0.9, b_d=np.zeros((4, 1)),
                              sigma=np.eye(4) * 0.01, dt=0.05)

        def rollout(seed):
            rng = np.random.default_rng(seed)
            x = np.ones(4)
            return [x := step(model, x, np.zeros(1), rng) for _ in range(50)]

        assert np.array_equal(np.array(rollout(5)), np.array(rollout(5)))

    def test_lyapunov_decrease_under_stabilizing_gain(self):
        cont = cartpole_linear(CartPoleParams())
        model = discretize_model(cont, 0.05)
        p, f = solve_dare(model.a_d, model.b_d,
                          np.diag([10.0, 1.0, 10.0, 1.0]), np.array([[0.01]]))
        rng = np.random.default_rng(0)
        x = np.array([0.1, 0.0, 0.05, 0.0])
        v_prev = float(x @ p @ x)
        for _ in range(60):
            x = step(model, x, f @ x, rng)
            v = float(x @ p @ x)
            assert v < v_prev or v < 1e-18
            v_prev = v


class TestDisturbance:
    def test_zero_at_time_zero(self):
        d = Disturbance(kind="sine", amplitude=5.0, period=3.6, target_agent=1)
        assert disturbance_value(d, 0.0) == 0.0

    def test_quarter_period_peak(self):
        d = Disturbance(kind="sine", amplitude=5.0, period=3.6, target_agent=1)
        assert abs(disturbance_value(d, 0.9) - 5.0) < 1e-12

    def test_half_period_zero(self):
        d = Disturbance(kind="sine", amplitude=5.0, period=3.6, target_agent=1)
        assert abs(disturbance_value(d, 1.8)) < 1e-12

    def test_none_kind_is_zero(self):
        assert disturbance_value(Disturbance(kind="none"), 17.3) == 0.0

    def test_invalid_kind_rejected(self):
        with pytest.raises(ValueError):
            Disturbance(kind="square")

    def test_sine_needs_positive_period(self):
        with pytest.raises(ValueError):
            Disturbance(kind="sine", amplitude=1.0, period=0.0)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_noise_factor_reproduces_sigma(seed):
    rng = np.random.default_rng(seed)
    root = rng.uniform(-1.0, 1.0, size=(4, 4))
    sigma = root @ root.T
    model = DiscreteModel(a_d=np.eye(4), b_d=np.zeros((4, 1)), sigma=sigma, dt=0.1)
    assert np.allclose(model.noise_factor @ model.noise_factor.T, sigma, atol=1e-10)
