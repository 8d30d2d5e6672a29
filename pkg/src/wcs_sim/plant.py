"""Agent plant models: cart-pole linearization, discretization, stochastic stepping.

Each agent follows the discrete-time law x(k+1) = A_d x(k) + B_d u(k) + v(k)
with v ~ N(0, Sigma).  Models are built once per experiment and never mutated;
the only stateful object in a simulation is the seeded random generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import as_matrix, as_square, symmetrize_psd_project, zoh_discretize

STATE_LABELS = ("s", "s_dot", "theta", "theta_dot")


@dataclass(frozen=True)
class CartPoleParams:
    """Physical cart-pole parameters (SI units, upright equilibrium).

    The input is the drive voltage; ``input_gain`` converts it to the force
    applied to the cart.
    """

    cart_mass: float = 0.5
    pole_mass: float = 0.2
    pole_length: float = 0.5
    gravity: float = 9.81
    cart_friction: float = 0.1
    input_gain: float = 1.0


@dataclass(frozen=True)
class ContinuousModel:
    """Continuous LTI plant with a process-noise spectral density."""

    a_c: np.ndarray
    b_c: np.ndarray
    noise_density: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        a = as_square(self.a_c, "A_c")
        b = as_matrix(self.b_c, "B_c")
        if b.shape[0] != a.shape[0]:
            raise ValueError("B_c row count does not match A_c")
        nd = symmetrize_psd_project(np.asarray(self.noise_density, dtype=float))
        if nd.shape[0] != a.shape[0]:
            raise ValueError("noise_density dimension does not match A_c")
        object.__setattr__(self, "a_c", a)
        object.__setattr__(self, "b_c", b)
        object.__setattr__(self, "noise_density", nd)

    @property
    def n_states(self) -> int:
        return self.a_c.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b_c.shape[1]


@dataclass(frozen=True)
class DiscreteModel:
    """ZOH-discretized plant with per-step noise covariance Sigma."""

    a_d: np.ndarray
    b_d: np.ndarray
    sigma: np.ndarray
    dt: float
    # Factor L with L L' = Sigma, used to draw process noise.
    noise_factor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = as_square(self.a_d, "A_d")
        b = as_matrix(self.b_d, "B_d")
        if b.shape[0] != a.shape[0]:
            raise ValueError("B_d row count does not match A_d")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        sigma = symmetrize_psd_project(np.asarray(self.sigma, dtype=float))
        if sigma.shape[0] != a.shape[0]:
            raise ValueError("Sigma dimension does not match A_d")
        w, v = np.linalg.eigh(sigma)
        factor = v * np.sqrt(np.clip(w, 0.0, None))
        object.__setattr__(self, "a_d", a)
        object.__setattr__(self, "b_d", b)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "noise_factor", factor)

    @property
    def n_states(self) -> int:
        return self.a_d.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b_d.shape[1]


@dataclass(frozen=True)
class Disturbance:
    """Additive input disturbance applied to one agent."""

    kind: str = "none"  # "none" | "sine"
    amplitude: float = 0.0
    period: float = 1.0
    target_agent: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "sine"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.kind == "sine" and self.period <= 0.0:
            raise ValueError("sine disturbance requires a positive period")


def cartpole_linear(params: CartPoleParams) -> ContinuousModel:
    """Cart-pole linearized about the upright equilibrium.

    State order is (cart position, cart velocity, pole angle, pole angular
    velocity); the single input is the force applied to the cart (treated
    as proportional to the drive voltage with unit gain).  Uses the
    point-mass pendulum model, which keeps rows 1 and 3 as pure velocity
    couplings.
    """
    mc, mp = params.cart_mass, params.pole_mass
    length, g, b = params.pole_length, params.gravity, params.cart_friction
    if mc <= 0.0 or mp <= 0.0 or length <= 0.0:
        raise ValueError("masses and pole length must be positive")
    if params.input_gain <= 0.0:
        raise ValueError("input gain must be positive")
    a_c = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [0.0, -b / mc, -mp * g / mc, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, b / (mc * length), (mc + mp) * g / (mc * length), 0.0],
    ])
    kv = params.input_gain
    b_c = np.array([[0.0], [kv / mc], [0.0], [-kv / (mc * length)]])
    noise = np.zeros((4, 4))
    return ContinuousModel(a_c=a_c, b_c=b_c, noise_density=noise, labels=STATE_LABELS)


def velocity_noise_density(density: float, n_states: int = 4) -> np.ndarray:
    """Diagonal noise spectral density acting on the velocity states."""
    nd = np.zeros((n_states, n_states))
    for i in range(1, n_states, 2):
        nd[i, i] = density
    return nd


def with_noise(model: ContinuousModel, noise_density: np.ndarray) -> ContinuousModel:
    return ContinuousModel(a_c=model.a_c, b_c=model.b_c,
                           noise_density=noise_density, labels=model.labels)


def discretize_model(model: ContinuousModel, dt: float) -> DiscreteModel:
    """ZOH discretization; per-step noise covariance scales linearly with dt."""
    a_d, b_d = zoh_discretize(model.a_c, model.b_c, dt)
    return DiscreteModel(a_d=a_d, b_d=b_d, sigma=model.noise_density * dt, dt=dt)


def step(model: DiscreteModel, x: np.ndarray, u: np.ndarray,
         rng: np.random.Generator) -> np.ndarray:
    """Advance one step: A_d x + B_d u + v, v ~ N(0, Sigma) drawn from rng."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (model.n_states,):
        raise ValueError(f"state must have shape ({model.n_states},), got {x.shape}")
    if u.shape != (model.n_inputs,):
        raise ValueError(f"input must have shape ({model.n_inputs},), got {u.shape}")
    noise = model.noise_factor @ rng.standard_normal(model.n_states)
    return model.a_d @ x + model.b_d @ u + noise


def disturbance_value(d: Disturbance, t: float) -> float:
    """Disturbance input offset at time t (applied to the target agent only)."""
    if d.kind == "none":
        return 0.0
    return d.amplitude * np.sin(2.0 * np.pi * t / d.period)
