"""Statistical and numerical self-checks behind the `validate` command.

Three independent oracles: Monte Carlo rollouts against the trigger's
analytic error moments, the Riccati residual / gain-consistency check on
the full augmented system, and a binomial test of the flood loss rate.
Each check reports "pass", "fail", or "inconclusive" (sample size too small
for the 3-sigma test to mean anything).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .net import flood
from .numerics import riccati_map, solve_dare, spectral_radius
from .plant import DiscreteModel
from .sim import ExperimentConfig, cost_spec, stream_rng
from .stc import ErrorMoments, expected_sq_norm, predict_error_moments

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    detail: str


def random_trigger_instance(rng: np.random.Generator, n: int = 4, m_out: int = 4):
    """A random prediction instance: closed loop, outgoing map, noise, state."""
    a_cl = rng.uniform(-1.0, 1.0, size=(n, n))
    a_cl *= rng.uniform(0.5, 1.05) / max(spectral_radius(a_cl), 1e-9)
    f_out = rng.uniform(-2.0, 2.0, size=(m_out, n))
    root = rng.uniform(-0.3, 0.3, size=(n, n))
    sigma = root @ root.T + 1e-4 * np.eye(n)
    b = rng.uniform(-1.0, 1.0, size=(n, 1))
    model = DiscreteModel(a_d=a_cl.copy(), b_d=b, sigma=sigma, dt=0.05)
    x_now = rng.uniform(-1.0, 1.0, size=n)
    u_remote = rng.uniform(-1.0, 1.0, size=1)
    u_sent = f_out @ x_now
    return model, a_cl, f_out, x_now, u_remote, u_sent


def mc_expected_sq_norm(model: DiscreteModel, a_cl, f_out, x_now, u_remote, u_sent,
                        horizon: int, samples: int,
                        rng: np.random.Generator) -> tuple[float, float]:
    """Frozen-input rollouts of E[e'e] at one horizon: (mean, standard error)."""
    n = model.n_states
    drive = model.b_d @ np.asarray(u_remote, dtype=float)
    x = np.tile(np.asarray(x_now, dtype=float), (samples, 1))
    for _ in range(horizon):
        noise = rng.standard_normal((samples, n)) @ model.noise_factor.T
        x = x @ np.asarray(a_cl, dtype=float).T + drive + noise
    err = x @ np.asarray(f_out, dtype=float).T - np.asarray(u_sent, dtype=float)
    sq = np.sum(err * err, axis=1)
    return float(sq.mean()), float(sq.std(ddof=1) / np.sqrt(samples))


def check_trigger_oracle(cfg: ExperimentConfig, samples: int,
                         instances: int = 20,
                         horizons: tuple[int, ...] = (2, 5, 10)) -> CheckResult:
    """Monte Carlo rollouts must match the analytic moments within 3 SE."""
    rng = stream_rng(cfg.seed, "validate-trigger")
    worst = 0.0
    for k in range(instances):
        inst = random_trigger_instance(rng)
        model, a_cl, f_out, x_now, u_remote, u_sent = inst
        for horizon in horizons:
            analytic = expected_sq_norm(predict_error_moments(
                model, a_cl, f_out, x_now, u_remote, u_sent, horizon))
            mc_mean, mc_se = mc_expected_sq_norm(model, a_cl, f_out, x_now, u_remote,
                                                 u_sent, horizon, samples, rng)
            if 3.0 * mc_se > 0.25 * max(analytic, 1e-12):
                return CheckResult("trigger-oracle", INCONCLUSIVE,
                                   f"3*SE={3 * mc_se:.3g} too wide vs E[e'e]={analytic:.3g} "
                                   f"at {samples} samples")
            sigmas = abs(mc_mean - analytic) / mc_se
            worst = max(worst, sigmas)
            if sigmas > 3.0:
                return CheckResult("trigger-oracle", FAIL,
                                   f"instance {k} M={horizon}: |MC-analytic| = "
                                   f"{sigmas:.2f} SE (MC {mc_mean:.6g}, analytic {analytic:.6g})")
    return CheckResult("trigger-oracle", PASS,
                       f"{instances} instances x {len(horizons)} horizons, "
                       f"worst deviation {worst:.2f} SE")


def check_dare(cfg: ExperimentConfig, perturb_gain: bool = False) -> CheckResult:
    """Riccati residual, gain consistency, and closed-loop stability."""
    from .lqr import build_augmented
    from .plant import cartpole_linear, discretize_model

    model_net = discretize_model(cartpole_linear(cfg.params), cfg.period)
    a, b, q, r = build_augmented([model_net] * cfg.agents, cost_spec(cfg))
    p, f = solve_dare(a, b, q, r)
    if perturb_gain:
        f = f.copy()
        f[0, 0] += 0.05
    residual = float(np.linalg.norm(riccati_map(a, b, q, r, p) - p, ord="fro"))
    f_expected = -np.linalg.solve(r + b.T @ p @ b, b.T @ p @ a)
    gain_err = float(np.linalg.norm(f - f_expected, ord="fro"))
    radius = spectral_radius(a + b @ f)
    detail = (f"residual {residual:.3e}, gain error {gain_err:.3e}, "
              f"closed-loop spectral radius {radius:.6f}")
    ok = residual <= 1e-9 and gain_err <= 1e-9 and radius < 1.0
    return CheckResult("dare-residual", PASS if ok else FAIL, detail)


def check_flood_rate(cfg: ExperimentConfig, samples: int) -> CheckResult:
    """Per-receiver flood loss frequency must sit within 3 sigma of 1 - p_rx."""
    proto = cfg.protocol
    p_loss = 1.0 - proto.p_rx
    rng = stream_rng(cfg.seed, "validate-flood")
    if p_loss == 0.0:
        # lossless network: delivery must be deterministic
        for _ in range(min(samples, 1000)):
            if not all(flood(0, None, rng, proto).values()):
                return CheckResult("flood-rate", FAIL, "loss observed at p_rx = 1")
        return CheckResult("flood-rate", PASS, "p_rx = 1: delivery is deterministic")
    if samples * proto.p_rx * p_loss < 9.0:
        return CheckResult("flood-rate", INCONCLUSIVE,
                           f"{samples} floods give n*p*(1-p) < 9; binomial test unreliable")
    sender = 0
    losses = np.zeros(proto.num_nodes)
    for _ in range(samples):
        got = flood(sender, None, rng, proto)
        for node, ok in got.items():
            if not ok:
                losses[node] += 1
    sigma = np.sqrt(proto.p_rx * p_loss / samples)
    worst_node, worst_dev = -1, 0.0
    for node in range(proto.num_nodes):
        if node == sender:
            continue
        rate = losses[node] / samples
        dev = abs(rate - p_loss) / sigma if sigma > 0 else 0.0
        if dev > worst_dev:
            worst_node, worst_dev = node, dev
        if dev > 3.0:
            return CheckResult("flood-rate", FAIL,
                               f"node {node}: loss rate {rate:.6f} deviates "
                               f"{dev:.2f} sigma from {p_loss:.6f}")
    return CheckResult("flood-rate", PASS,
                       f"{samples} floods, worst node {worst_node} at {worst_dev:.2f} sigma")


def run_all_checks(cfg: ExperimentConfig, samples: int,
                   perturb_gain: bool = False) -> list[CheckResult]:
    return [
        check_dare(cfg, perturb_gain=perturb_gain),
        check_trigger_oracle(cfg, samples),
        check_flood_rate(cfg, samples),
    ]
