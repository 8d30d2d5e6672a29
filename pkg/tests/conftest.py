import numpy as np
import pytest

from wcs_sim.lqr import CostSpec, synthesize
from wcs_sim.plant import (CartPoleParams, DiscreteModel, cartpole_linear,
                           discretize_model, velocity_noise_density, with_noise)


def scalar_model(a: float, b: float, sigma: float = 0.0, dt: float = 1.0) -> DiscreteModel:
    return DiscreteModel(a_d=[[a]], b_d=[[b]], sigma=[[sigma]], dt=dt)


@pytest.fixture(scope="session")
def cartpole_net_model() -> DiscreteModel:
    cont = with_noise(cartpole_linear(CartPoleParams()), velocity_noise_density(1e-4))
    return discretize_model(cont, 0.05)


@pytest.fixture(scope="session")
def two_agent_gains(cartpole_net_model):
    cost = CostSpec(
        q_local=(np.diag([10.0, 1.0, 10.0, 1.0]),) * 2,
        r_local=(np.array([[0.01]]),) * 2,
        q_sync=np.diag([20.0, 0.0, 0.0, 0.0]),
    )
    return synthesize([cartpole_net_model] * 2, cost), cost
