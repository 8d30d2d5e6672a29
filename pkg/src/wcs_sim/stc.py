"""Self-triggered transmission law.

At every send instant an agent predicts how the error between the inputs it
just shipped and the inputs it would ship in the future grows, assuming its
own incoming remote input stays frozen at its current value, and picks the
first horizon M at which the expected squared error exceeds the threshold.
The agent then asks the network for a slot M-1 rounds ahead so the fresh
values arrive exactly when the error is expected to cross the threshold
(network data takes effect one round after it is sent).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .plant import DiscreteModel


@dataclass
class TriggerState:
    """Per-agent triggering bookkeeping (owned by one simulation context)."""

    delta: float
    m_max: int
    u_sent_held: np.ndarray
    u_remote_held: np.ndarray
    last_send_step: int = -1
    next_due: int = 0

    def __post_init__(self):
        if self.delta < 0.0:
            raise ValueError("delta must be nonnegative")
        if self.m_max < 2:
            raise ValueError("m_max must be at least 2")
        self.u_sent_held = np.asarray(self.u_sent_held, dtype=float)
        self.u_remote_held = np.asarray(self.u_remote_held, dtype=float)


@dataclass(frozen=True)
class ErrorMoments:
    """Mean and covariance of the outgoing-input error at one horizon."""

    mean: np.ndarray
    cov: np.ndarray


def iter_error_moments(model: DiscreteModel, a_cl: np.ndarray, f_out: np.ndarray,
                       x_now: np.ndarray, u_remote_frozen: np.ndarray,
                       u_sent_now: np.ndarray) -> Iterator[ErrorMoments]:
    """Yield error moments for horizons M = 1, 2, 3, ... incrementally.

    The state prediction is the open loop of the locally closed system
    driven by the frozen remote input,

        x_hat(k+M) = A_cl^M x(k) + (sum_{j<M} A_cl^j) B u_frozen,

    and the state covariance follows S(j+1) = A_cl S(j) A_cl' + Sigma from
    S(0) = 0.  Both are mapped into the outgoing-input space by f_out.
    """
    a = np.asarray(a_cl, dtype=float)
    f_out = np.asarray(f_out, dtype=float)
    x_now = np.asarray(x_now, dtype=float)
    u_remote_frozen = np.asarray(u_remote_frozen, dtype=float)
    u_sent_now = np.asarray(u_sent_now, dtype=float)
    n = a.shape[0]
    drive = model.b_d @ u_remote_frozen
    a_pow = np.eye(n)          # A_cl^j, starts at j = 0
    geom = np.zeros((n, n))    # sum of A_cl^j for j < M
    s_cov = np.zeros((n, n))   # S(M)
    while True:
        geom = geom + a_pow
        s_cov = a @ s_cov @ a.T + model.sigma
        s_cov = 0.5 * (s_cov + s_cov.T)
        a_pow = a @ a_pow
        x_hat = a_pow @ x_now + geom @ drive
        mean = f_out @ x_hat - u_sent_now
        cov = f_out @ s_cov @ f_out.T
        yield ErrorMoments(mean=mean, cov=0.5 * (cov + cov.T))


def predict_error_moments(model: DiscreteModel, a_cl: np.ndarray, f_out: np.ndarray,
                          x_now: np.ndarray, u_remote_frozen: np.ndarray,
                          u_sent_now: np.ndarray, horizon: int) -> ErrorMoments:
    """Error moments at one fixed horizon M >= 1."""
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    it = iter_error_moments(model, a_cl, f_out, x_now, u_remote_frozen, u_sent_now)
    for _ in range(horizon - 1):
        next(it)
    return next(it)


def expected_sq_norm(moments: ErrorMoments) -> float:
    """E[e'e] = ||E[e]||^2 + trace(Var[e])."""
    mean = np.asarray(moments.mean, dtype=float)
    return float(mean @ mean + np.trace(moments.cov))


def find_next_trigger(ts: TriggerState, model: DiscreteModel, a_cl: np.ndarray,
                      f_out: np.ndarray, x_now: np.ndarray) -> int:
    """Smallest M in [2, m_max] whose expected squared error exceeds delta.

    Must be called at a send instant: the error reference is the outgoing
    vector f_out @ x_now that is being transmitted right now, and the frozen
    remote input is whatever the agent currently holds.  Returns m_max when
    the threshold is never predicted to be exceeded.
    """
    u_sent_now = np.asarray(f_out, dtype=float) @ np.asarray(x_now, dtype=float)
    moments = iter_error_moments(model, a_cl, f_out, x_now,
                                 ts.u_remote_held, u_sent_now)
    next(moments)  # M = 1 is not a candidate: the update could not arrive in time
    for m in range(2, ts.m_max + 1):
        if expected_sq_norm(next(moments)) > ts.delta:
            return m
    return ts.m_max


def register_send(ts: TriggerState, round_index: int, u_sent: np.ndarray,
                  horizon: int) -> None:
    """Commit an actual transmission into the trigger state."""
    ts.u_sent_held = np.asarray(u_sent, dtype=float)
    ts.last_send_step = round_index
    ts.next_due = round_index + horizon - 1


def instantaneous_trigger(e: np.ndarray, delta: float) -> bool:
    """Event-triggered reference rule: fire iff e'e strictly exceeds delta."""
    e = np.asarray(e, dtype=float)
    return bool(e @ e > delta)
