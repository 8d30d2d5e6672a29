"""Synchronizing LQR synthesis on the augmented multi-agent system.

The N agents are stacked into one block system; the synchronization penalty
couples every pair of agents, producing a state cost with graph-Laplacian
structure.  The optimal gain F is then cut into per-agent blocks: F[i][i]
runs locally, F[i][j] (j != i) is the piece agent j computes from its own
state and ships to agent i over the network.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import as_square, is_symmetric, solve_dare
from .plant import DiscreteModel


@dataclass(frozen=True)
class CostSpec:
    """Per-agent state/input weights plus the pairwise synchronization weight."""

    q_local: tuple[np.ndarray, ...]
    r_local: tuple[np.ndarray, ...]
    q_sync: np.ndarray

    def __post_init__(self):
        q_local = tuple(np.asarray(q, dtype=float) for q in self.q_local)
        r_local = tuple(np.asarray(r, dtype=float) for r in self.r_local)
        q_sync = as_square(self.q_sync, "Q_sync")
        if len(q_local) != len(r_local):
            raise ValueError("q_local and r_local must have one entry per agent")
        if not q_local:
            raise ValueError("cost must cover at least one agent")
        n = q_local[0].shape[0]
        for q in q_local:
            as_square(q, "Q_i")
            if q.shape[0] != n or not is_symmetric(q):
                raise ValueError("every Q_i must be symmetric with a common dimension")
        for r in r_local:
            as_square(r, "R_i")
            if not is_symmetric(r) or np.linalg.eigvalsh(0.5 * (r + r.T))[0] <= 0.0:
                raise ValueError("every R_i must be symmetric positive definite")
        if q_sync.shape[0] != n or not is_symmetric(q_sync):
            raise ValueError("Q_sync must be symmetric and match the state dimension")
        if np.linalg.eigvalsh(0.5 * (q_sync + q_sync.T))[0] < -1e-10:
            raise ValueError("Q_sync must be positive semidefinite")
        object.__setattr__(self, "q_local", q_local)
        object.__setattr__(self, "r_local", r_local)
        object.__setattr__(self, "q_sync", q_sync)

    @property
    def n_agents(self) -> int:
        return len(self.q_local)


@dataclass(frozen=True)
class GainPartition:
    """Full feedback matrix and its per-agent blocks.

    blocks[i][j] is the m-by-n gain mapping agent j's state into agent i's
    input; a_cl[i] = A_i + B_i blocks[i][i] is agent i's local closed loop.
    """

    f_full: np.ndarray
    blocks: tuple[tuple[np.ndarray, ...], ...]
    a_cl: tuple[np.ndarray, ...]

    @property
    def n_agents(self) -> int:
        return len(self.blocks)


def _check_homogeneous(models: list[DiscreteModel] | tuple[DiscreteModel, ...]):
    if len(models) < 2:
        raise ValueError("need at least two agents")
    n, m = models[0].n_states, models[0].n_inputs
    for mod in models:
        if mod.n_states != n or mod.n_inputs != m:
            raise ValueError("agents must share state and input dimensions")
    return n, m


def build_augmented(models, cost: CostSpec):
    """Stack agent models and expand the synchronization cost.

    Returns (A_aug, B_aug, Q_aug, R_aug).  Q_aug carries Q_i + (N-1) Q_sync
    on the diagonal blocks and -Q_sync off the diagonal: the all-pairs
    penalty sum has graph-Laplacian structure.
    """
    n, m = _check_homogeneous(models)
    n_agents = len(models)
    if cost.n_agents != n_agents:
        raise ValueError("cost weights must cover every agent")
    if cost.q_local[0].shape[0] != n or cost.r_local[0].shape[0] != m:
        raise ValueError("cost dimensions do not match the agent models")

    a_aug = np.zeros((n_agents * n, n_agents * n))
    b_aug = np.zeros((n_agents * n, n_agents * m))
    q_aug = np.zeros((n_agents * n, n_agents * n))
    r_aug = np.zeros((n_agents * m, n_agents * m))
    for i, mod in enumerate(models):
        rows = slice(i * n, (i + 1) * n)
        cols = slice(i * m, (i + 1) * m)
        a_aug[rows, rows] = mod.a_d
        b_aug[rows, cols] = mod.b_d
        q_aug[rows, rows] = cost.q_local[i] + (n_agents - 1) * cost.q_sync
        r_aug[cols, cols] = cost.r_local[i]
        for j in range(n_agents):
            if j != i:
                q_aug[rows, j * n:(j + 1) * n] = -cost.q_sync
    return a_aug, b_aug, q_aug, r_aug


def synthesize(models, cost: CostSpec) -> GainPartition:
    """Solve the augmented LQR problem and partition the gain."""
    n, m = _check_homogeneous(models)
    n_agents = len(models)
    a_aug, b_aug, q_aug, r_aug = build_augmented(models, cost)
    _, f_full = solve_dare(a_aug, b_aug, q_aug, r_aug)
    blocks = tuple(
        tuple(f_full[i * m:(i + 1) * m, j * n:(j + 1) * n].copy() for j in range(n_agents))
        for i in range(n_agents)
    )
    a_cl = tuple(models[i].a_d + models[i].b_d @ blocks[i][i] for i in range(n_agents))
    return GainPartition(f_full=f_full, blocks=blocks, a_cl=a_cl)


def remote_input(f_ji: np.ndarray, x_i: np.ndarray) -> np.ndarray:
    """Component of agent j's input contributed by agent i's state."""
    f_ji = np.asarray(f_ji, dtype=float)
    x_i = np.asarray(x_i, dtype=float)
    if f_ji.shape[1] != x_i.shape[0]:
        raise ValueError("gain block and state dimensions do not match")
    return f_ji @ x_i


def receivers_of(gains: GainPartition, sender: int) -> tuple[int, ...]:
    """Agents consuming the sender's state, in stacked-message order."""
    return tuple(j for j in range(gains.n_agents) if j != sender)


def stacked_outgoing_gain(gains: GainPartition, sender: int) -> np.ndarray:
    """All blocks F[j][sender] (j != sender) stacked into one outgoing map.

    Row order matches :func:`receivers_of`, which is also the layout of the
    stacked input vector an agent puts on the wire.
    """
    return np.vstack([gains.blocks[j][sender] for j in receivers_of(gains, sender)])
