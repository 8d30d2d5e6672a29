"""Dense linear-algebra kernels shared by every other module.

Everything here operates on plain ``numpy.ndarray`` matrices.  The systems
in this project are tiny (at most ~20 states), so all algorithms are the
simple dense variants: truncated-series matrix exponential, fixed-point
Riccati iteration, LU solves with a condition-number guard.
"""

from __future__ import annotations

import numpy as np

# Refuse linear solves on matrices worse-conditioned than this.
COND_LIMIT = 1e12

DARE_TOL = 1e-9
DARE_MAX_ITER = 10_000


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class NumericalError(RuntimeError):
    """A matrix violated a numerical-conditioning guard."""


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d float array."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def as_square(a, name: str = "matrix") -> np.ndarray:
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def guarded_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b``, rejecting ill-conditioned systems."""
    a = as_square(a)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(f"condition number {cond:.3e} exceeds {COND_LIMIT:.0e}")
    return np.linalg.solve(a, b)


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue magnitude of a square matrix."""
    return float(np.max(np.abs(np.linalg.eigvals(as_square(a)))))


def is_symmetric(a: np.ndarray, tol: float = 1e-9) -> bool:
    a = as_square(a)
    return bool(np.linalg.norm(a - a.T, ord="fro") <= tol * (1.0 + np.linalg.norm(a, ord="fro")))


def mat_exp(a: np.ndarray) -> np.ndarray:
    """Matrix exponential e^A by scaling-and-squaring with a truncated series.

    The input is scaled down until its infinity norm is below 1/2, the
    series is summed to machine precision, and the result is squared back
    up.  Relative accuracy on well-conditioned inputs is well below 1e-10.
    """
    a = as_square(a, "A")
    n = a.shape[0]
    norm = np.linalg.norm(a, ord=np.inf)
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
        a = a / (2.0 ** squarings)
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 40):
        term = term @ a / k
        result = result + term
        if np.linalg.norm(term, ord=np.inf) <= 1e-18 * np.linalg.norm(result, ord=np.inf):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def zoh_discretize(a_c: np.ndarray, b_c: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Zero-order-hold discretization of (A_c, B_c) at step ``dt``.

    Returns A_d = e^{A_c dt} and B_d = (integral of e^{A_c s} ds) B_c, both
    read off the exponential of the block matrix [[A_c, B_c], [0, 0]] * dt.
    """
    a_c = as_square(a_c, "A_c")
    b_c = as_matrix(b_c, "B_c")
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    n = a_c.shape[0]
    m = b_c.shape[1]
    if b_c.shape[0] != n:
        raise ValueError(f"B_c must have {n} rows, got {b_c.shape[0]}")
    block = np.zeros((n + m, n + m))
    block[:n, :n] = a_c
    block[:n, n:] = b_c
    exp_block = mat_exp(block * dt)
    return exp_block[:n, :n].copy(), exp_block[:n, n:].copy()


def riccati_map(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray,
                p: np.ndarray) -> np.ndarray:
    """One step of the discrete Riccati value recursion applied to P."""
    btp_a = b.T @ p @ a
    gain = guarded_solve(r + b.T @ p @ b, btp_a)
    return a.T @ p @ a - btp_a.T @ gain + q


def _check_weight(w: np.ndarray, name: str, definite: bool) -> np.ndarray:
    w = as_square(w, name)
    if not is_symmetric(w):
        raise ValueError(f"{name} must be symmetric")
    w = 0.5 * (w + w.T)
    eigs = np.linalg.eigvalsh(w)
    if definite and eigs[0] <= 0.0:
        raise ValueError(f"{name} must be positive definite (min eig {eigs[0]:.3e})")
    if not definite and eigs[0] < -1e-10 * max(1.0, eigs[-1]):
        raise ValueError(f"{name} must be positive semidefinite (min eig {eigs[0]:.3e})")
    return w


def solve_dare(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray,
               tol: float = DARE_TOL,
               max_iter: int = DARE_MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Fixed point of the discrete algebraic Riccati equation and LQR gain.

    Iterates the value recursion from P0 = Q until the Frobenius residual
    of the returned P under the Riccati map is at most ``tol``.  Returns
    (P, F) with F = -(R + B'PB)^-1 B'PA, so u = F x is the optimal input.
    """
    a = as_square(a, "A")
    b = as_matrix(b, "B")
    if b.shape[0] != a.shape[0]:
        raise ValueError("A and B row counts differ")
    q = _check_weight(q, "Q", definite=False)
    r = _check_weight(r, "R", definite=True)
    if q.shape[0] != a.shape[0]:
        raise ValueError("Q dimension does not match A")
    if r.shape[0] != b.shape[1]:
        raise ValueError("R dimension does not match B")

    p = q.copy()
    for _ in range(max_iter):
        with np.errstate(over="ignore", invalid="ignore"):
            p_next = riccati_map(a, b, q, r, p)
        if not np.all(np.isfinite(p_next)):
            raise ConvergenceError("Riccati iteration diverged; pair (A, B) is "
                                   "likely not stabilizable")
        residual = np.linalg.norm(p_next - p, ord="fro")
        if residual <= tol:
            # p itself satisfies the fixed-point equation within tol
            gain = -guarded_solve(r + b.T @ p @ b, b.T @ p @ a)
            if spectral_radius(a + b @ gain) >= 1.0:
                raise ConvergenceError("Riccati iteration converged to a non-stabilizing gain")
            return p, gain
        p = 0.5 * (p_next + p_next.T)
    raise ConvergenceError(f"Riccati iteration did not reach residual {tol:.1e} "
                           f"within {max_iter} iterations")


def symmetrize_psd_project(m: np.ndarray, clip_tol: float = 1e-12) -> np.ndarray:
    """Symmetrize M and clip round-off-level negative eigenvalues to zero.

    Eigenvalues below ``-clip_tol`` mean the matrix is genuinely indefinite
    and raise :class:`NumericalError` instead of being silently repaired.
    """
    m = as_square(m, "M")
    sym = 0.5 * (m + m.T)
    eigs = np.linalg.eigvalsh(sym)
    if eigs[0] >= 0.0:
        return sym
    if eigs[0] < -clip_tol:
        raise NumericalError(f"matrix is indefinite (min eig {eigs[0]:.3e})")
    w, v = np.linalg.eigh(sym)
    return (v * np.clip(w, 0.0, None)) @ v.T
