"""Minimizers of the constrained H^s energy for p = 1, p = 2 and general subcritical p."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .constants import FracParams
from .operator import GridField, OperatorMatrix, seminorm_sq

log = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    """Raised when an iteration fails to meet its stopping criterion."""


@dataclass
class MinimizerResult:
    lam: float
    u: GridField
    p: float
    iterations: int
    residual: float
    seed: str = "torsion"

    @property
    def values(self) -> np.ndarray:
        return self.u.values


def el_residual(op: OperatorMatrix, u: np.ndarray, lam: float, p: float) -> float:
    """``max |A u - lam u^{p-1}|`` over interior nodes."""
    return float(np.max(np.abs(op.matrix @ u - lam * np.abs(u) ** (p - 1))))


def _lp(u: np.ndarray, p: float, cell: float) -> float:
    return float((np.sum(np.abs(u) ** p) * cell) ** (1 / p))


def solve_torsion(op: OperatorMatrix) -> MinimizerResult:
    """p = 1: solve ``A w = 1``; ``lambda = 1/||w||_1`` and ``u = lambda w``."""
    cell = op.h**op.dim
    try:
        w = op.solve(np.ones(op.grid.size))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("operator matrix is not positive definite") from exc
    norm = np.sum(w) * cell
    lam = 1.0 / norm
    u = lam * w
    return MinimizerResult(lam, GridField(op.grid, u), 1.0, 1, el_residual(op, u, lam, 1.0))


def solve_eigen(op: OperatorMatrix, tol: float = 1e-10, max_iter: int = 500,
                seed: np.ndarray | None = None) -> MinimizerResult:
    """p = 2: first eigenpair by inverse power iteration on the Cholesky factor.

    The eigenfield is normalized in discrete L^2 and made positive.
    """
    cell = op.h**op.dim
    u = np.ones(op.grid.size) if seed is None else np.asarray(seed, dtype=float).copy()
    u /= _lp(u, 2, cell)
    lam_old = np.inf
    for it in range(1, max_iter + 1):
        v = op.solve(u)
        u = v / _lp(v, 2, cell)
        lam = float(u @ (op.matrix @ u) * cell)
        if abs(lam - lam_old) <= tol * abs(lam):
            break
        lam_old = lam
    else:
        raise ConvergenceError(f"inverse iteration did not converge in {max_iter} steps")
    # a few extra sweeps tighten the vector once the Rayleigh quotient has settled
    for _ in range(5):
        v = op.solve(u)
        u = v / _lp(v, 2, cell)
    if u.sum() < 0:
        u = -u
    lam = seminorm_sq(op, u)
    return MinimizerResult(lam, GridField(op.grid, u), 2.0, it, el_residual(op, u, lam, 2.0))


def solve_general_p(op: OperatorMatrix, params: FracParams, seed=None, tol: float = 1e-9,
                    max_iter: int = 2000, damping: float = 0.5) -> MinimizerResult:
    """Normalized fixed point ``A v = u_k^{p-1}``, ``u_{k+1} = v / ||v||_p``.

    Starts from the torsion solution unless ``seed`` is given. When the
    sequence of energies stops decreasing the step is damped with weight
    ``damping``; if that does not help either, :class:`ConvergenceError`.
    """
    if params.dim != op.dim or abs(params.s - op.s) > 1e-15:
        raise ValueError("params do not match the assembled operator")
    p = params.p
    cell = op.h**op.dim
    if seed is None:
        u = op.solve(np.ones(op.grid.size))
        seed_name = "torsion"
    else:
        u = np.asarray(seed.values if isinstance(seed, GridField) else seed, dtype=float).copy()
        seed_name = "user"
        if np.any(u <= 0):
            raise ValueError("seed field must be positive at interior nodes")
    u /= _lp(u, p, cell)
    omega = 1.0
    energies = []
    strikes = 0
    for it in range(1, max_iter + 1):
        v = op.solve(np.abs(u) ** (p - 1))
        step = v / _lp(v, p, cell)
        new = (1 - omega) * u + omega * step
        new /= _lp(new, p, cell)
        change = float(np.max(np.abs(new - u)))
        u = new
        energies.append(float(u @ (op.matrix @ u) * cell))
        if change < tol:
            break
        if len(energies) > 2 and energies[-1] > energies[-2] * (1 + 1e-10):
            if omega == 1.0:
                log.info("energy increased at step %d; damping with omega=%g", it, damping)
                omega = damping
            else:
                strikes += 1
                if strikes > 20:
                    raise ConvergenceError(
                        f"fixed point oscillates for p={p}: last energies {energies[-4:]}")
    else:
        raise ConvergenceError(f"fixed point did not converge in {max_iter} steps (p={p})")
    lam = seminorm_sq(op, u)
    res = MinimizerResult(lam, GridField(op.grid, u), p, it, el_residual(op, u, lam, p))
    res.seed = seed_name
    return res


def solve(op: OperatorMatrix, p: float) -> MinimizerResult:
    """Dispatch on ``p``: direct solve for 1, inverse iteration for 2, fixed point otherwise."""
    if p == 1:
        return solve_torsion(op)
    if p == 2:
        return solve_eigen(op)
    return solve_general_p(op, FracParams(op.s, p, op.dim))
