"""Shape derivatives of lambda_{s,p} three ways, and the comparisons between them.

* ``boundary_derivative``: ``Gamma(1+s)^2 int (u/delta^s)^2 X.nu`` from a trace,
  with ``nu`` the interior normal.
* ``fd_one_sided``: forward quotients of lambda on deformed domains with one
  Richardson step (first-order error model).
* closed forms for dilated intervals and balls at p = 1.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import FracParams, ball_torsion_lambda, gamma
from .geometry import Ball, BallMinusBall, Deformation, Dilation, Domain, Interval, NormalField
from .geometry import Translation
from .kappa import CUTOFFS, KappaResult, kappa_numeric  # noqa: F401  (re-exported)
from .operator import Grid, assemble
from .solver import MinimizerResult, solve, solve_torsion
from .trace import TraceResult, extract_psi

log = logging.getLogger(__name__)

DEFAULT_LADDER = (0.08, 0.04, 0.02)
ON_BOUNDARY = 1e-9


def rel_gap(value: float, reference: float) -> float:
    """``|value - reference| / |reference|``; inf when the reference is zero and the value is not."""
    if reference == 0:
        return 0.0 if value == 0 else math.inf
    return abs(value - reference) / abs(reference)


# ------------------------------------------------------------ boundary formula


def boundary_derivative(trace: TraceResult, deformation: Deformation, domain: Domain,
                        s: float, psi: np.ndarray | None = None) -> float:
    """``Gamma(1+s)^2 sum_k w_k psi_k^2 X(sigma_k).nu_k`` over the trace's quadrature.

    ``psi`` overrides ``trace.psi`` (e.g. after filling failed points).
    Points with no estimate are skipped; callers decide whether to fill them.
    """
    quad = trace.quad
    delta = np.asarray(domain.signed_distance(quad.points), dtype=float).reshape(-1)
    if np.max(np.abs(delta)) > ON_BOUNDARY * max(1.0, domain.diameter):
        raise ValueError("trace quadrature points do not lie on the boundary of this domain")
    psi = trace.psi if psi is None else np.asarray(psi, dtype=float)
    if psi.shape != (len(quad),):
        raise ValueError(f"psi has shape {psi.shape}, quadrature has {len(quad)} points")
    X = np.asarray(deformation.velocity(quad.points), dtype=float).reshape(len(quad), -1)
    flux = np.sum(X * quad.normals, axis=1)
    ok = np.isfinite(psi)
    return float(gamma(1 + s) ** 2 * np.sum(quad.weights[ok] * psi[ok] ** 2 * flux[ok]))


# ------------------------------------------------------------ finite differences


@dataclass
class FDResult:
    derivative: float
    quotients: list
    richardson: list
    confident: bool


def fd_one_sided(lam_of_eps: Callable[[float], float] | Mapping, ladder=DEFAULT_LADDER,
                 lam0: float | None = None, tol: float = 1e-2) -> FDResult:
    """Right derivative at 0 from ``(lam(eps) - lam(0)) / eps`` on a halving ladder.

    ``ladder`` is ``(e0, e0/2, e0/4, ...)``; pass negative values for the left
    derivative. Each pair of neighbouring quotients gives one Richardson value
    ``2 q(e/2) - q(e)``; the last one is returned. The estimate is marked
    low-confidence when the quotients are not monotone in ``eps`` or the last
    two Richardson values differ by more than ``tol`` relative.
    """
    ladder = [float(e) for e in ladder]
    if len(ladder) < 2:
        raise ValueError("need at least two ladder steps")
    if any(e == 0 for e in ladder) or len({math.copysign(1, e) for e in ladder}) != 1:
        raise ValueError("ladder steps must be nonzero and of one sign")
    for a, b in zip(ladder, ladder[1:]):
        if not math.isclose(b, a / 2, rel_tol=1e-9):
            raise ValueError("ladder steps must halve")
    lookup = lam_of_eps.__getitem__ if isinstance(lam_of_eps, Mapping) else lam_of_eps
    base = float(lookup(0.0)) if lam0 is None else float(lam0)
    q = [(float(lookup(e)) - base) / e for e in ladder]
    rich = [2 * q[k + 1] - q[k] for k in range(len(q) - 1)]
    scale = max(abs(v) for v in q + rich)
    floor = 1e-10 * max(scale, abs(base))
    diffs = np.diff(q)
    monotone = bool(np.all(diffs >= -floor) or np.all(diffs <= floor))
    settled = len(rich) < 2 or abs(rich[-1] - rich[-2]) <= tol * abs(rich[-1]) + floor
    return FDResult(rich[-1], q, rich, monotone and settled)


# ------------------------------------------------------------ closed forms


def closed_form_derivative(domain: Domain, deformation: Deformation, params: FracParams):
    """Exact ``d lambda / d eps`` where one is known, else ``None``.

    Torsion (p = 1) on an interval or ball dilated about its centre:
    ``lambda(R) = R^{-(N+2s)} lambda(1)``, so the derivative is ``-(N+2s) lambda``.
    """
    if params.p != 1 or not isinstance(deformation, Dilation):
        return None
    if isinstance(domain, Interval):
        center, radius = domain.center, (domain.b - domain.a) / 2
    elif isinstance(domain, Ball):
        center, radius = domain.c, domain.radius
    else:
        return None
    if not np.allclose(deformation.center, np.atleast_1d(center)):
        return None
    n = domain.dim
    return -(n + 2 * params.s) * ball_torsion_lambda(n, params.s, radius)


# ------------------------------------------------------------ reports


@dataclass
class DerivReport:
    """Shape derivative of lambda along one deformation family, by every available route.

    The relative gaps are recomputed from the stored values on access.
    """

    domain: str
    deformation: str
    s: float
    p: float
    n: int
    lam0: float
    boundary_formula: float
    fd_plus: float
    fd_minus: float | None
    closed_form: float | None
    eps_ladder: list
    lambdas: dict  # eps -> lambda on the deformed domain
    quotients_plus: list
    quotients_minus: list
    fd_confident: bool
    trace_flagged: int
    trace_residual: float
    seed: str
    status: dict = field(default_factory=dict)

    @property
    def rel_gap_fd_vs_formula(self) -> float:
        return rel_gap(self.boundary_formula, self.fd_plus)

    @property
    def rel_gap_fd_vs_closed(self) -> float | None:
        return None if self.closed_form is None else rel_gap(self.fd_plus, self.closed_form)

    @property
    def rel_gap_formula_vs_closed(self) -> float | None:
        if self.closed_form is None:
            return None
        return rel_gap(self.boundary_formula, self.closed_form)

    @property
    def rel_gap_sides(self) -> float | None:
        return None if self.fd_minus is None else rel_gap(self.fd_minus, self.fd_plus)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambdas"] = {repr(k): v for k, v in self.lambdas.items()}
        for name in ("rel_gap_fd_vs_formula", "rel_gap_fd_vs_closed",
                     "rel_gap_formula_vs_closed", "rel_gap_sides"):
            out[name] = getattr(self, name)
        return out


def _grid_for(domain: Domain, n: int, deformation: Deformation | None = None,
              reference: Grid | None = None) -> Grid:
    """Grid on a (possibly deformed) domain.

    A dilated domain gets the same node count, so the lattice is the dilated
    lattice; other families keep the reference spacing and lattice.
    """
    if reference is None or isinstance(deformation, Dilation):
        return Grid.for_domain(domain, n)
    lo, hi = reference.domain.bounding_box()
    return Grid.with_spacing(domain, reference.h, center=(lo + hi) / 2)


def minimize_on(domain: Domain, params: FracParams, n: int, grid: Grid | None = None):
    """Assemble and solve on ``domain``; returns ``(op, minimizer, torsion)``."""
    grid = Grid.for_domain(domain, n) if grid is None else grid
    op = assemble(grid, None, params.s)
    torsion = solve_torsion(op)
    res = torsion if params.p == 1 else solve(op, params.p)
    return op, res, torsion


def trace_of(res: MinimizerResult, torsion: MinimizerResult, domain: Domain, s: float,
             resolution: int = 256) -> TraceResult:
    """Boundary quotient of a minimizer, normalised through the discrete torsion function."""
    quad = domain.boundary_quadrature(resolution)
    return extract_psi(res.u, domain, s, quad, method="ratio", reference=torsion.u)


def hadamard_report(domain: Domain, deformation: Deformation, params: FracParams, n: int,
                    ladder=DEFAULT_LADDER, two_sided: bool = True,
                    resolution: int = 256) -> DerivReport:
    """Boundary formula, one-sided differences and (if known) closed form for one family."""
    if params.p not in (1, 2):
        raise ValueError("hadamard_report needs p in {1, 2}, where the positive minimizer is unique")
    if params.dim != domain.dim:
        raise ValueError("params.dim does not match the domain")
    status = {}
    op, res, torsion = minimize_on(domain, params, n)
    status["solve"] = "ok"
    trace = trace_of(res, torsion, domain, params.s, resolution)
    status["trace"] = "ok" if trace.n_failed == 0 else f"{trace.n_failed} points failed"
    bf = boundary_derivative(trace, deformation, domain, params.s)

    lambdas = {0.0: res.lam}
    eps_all = list(ladder) + ([-e for e in ladder] if two_sided else [])
    for eps in eps_all:
        moved = deformation.apply_to_domain(domain, eps)
        grid = _grid_for(moved, n, deformation, op.grid)
        lambdas[eps] = minimize_on(moved, params, n, grid)[1].lam
    plus = fd_one_sided(lambdas, ladder)
    minus = fd_one_sided(lambdas, [-e for e in ladder]) if two_sided else None
    confident = plus.confident and (minus is None or minus.confident)
    status["fd"] = "ok" if confident else "low-confidence"

    return DerivReport(
        domain=repr(domain), deformation=repr(deformation), s=params.s, p=params.p, n=n,
        lam0=res.lam, boundary_formula=bf, fd_plus=plus.derivative,
        fd_minus=None if minus is None else minus.derivative,
        closed_form=closed_form_derivative(domain, deformation, params),
        eps_ladder=list(ladder), lambdas=lambdas, quotients_plus=plus.quotients,
        quotients_minus=[] if minus is None else minus.quotients, fd_confident=confident,
        trace_flagged=trace.n_flagged, trace_residual=float(np.nanmax(trace.residual)),
        seed=res.seed, status=status)


# ------------------------------------------------------------ annulus sweep


@dataclass
class SweepPoint:
    t: float
    lam: float
    dlam: float  # boundary-formula derivative in t
    trace_flagged: int
    trace_failed: int


def annulus_domain(tau: float, t: float) -> BallMinusBall:
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    if tau + abs(t) >= 1:
        raise ValueError(f"inner ball of radius {tau} at t={t} touches the outer boundary")
    return BallMinusBall(Ball((0.0, 0.0), 1.0), Ball((float(t), 0.0), tau))


def annulus_sweep(tau: float, ts, params: FracParams, n: int,
                  resolution: int = 256) -> list[SweepPoint]:
    """lambda and its boundary-formula t-derivative for ``B_1 \\ B_tau(t e_1)``.

    The lattice passes through the origin with ``h = 2/n`` for every ``t``, so
    when ``t`` is a multiple of ``h`` the inner ball sits on the same staircase.
    The velocity is ``e_1`` on the inner sphere and zero on the outer one.
    """
    if params.p not in (1, 2):
        raise ValueError("annulus_sweep needs p in {1, 2}")
    out = []
    for t in ts:
        dom = annulus_domain(tau, t)
        grid = Grid.with_spacing(dom, 2.0 / n, center=(0.0, 0.0))
        _, res, torsion = minimize_on(dom, params, n, grid)
        trace = trace_of(res, torsion, dom, params.s, resolution)
        d = boundary_derivative(trace, Translation.for_domain(dom), dom, params.s)
        log.info("t=%.3f lambda=%.8f dlambda=%.5f flagged=%d", t, res.lam, d, trace.n_flagged)
        out.append(SweepPoint(float(t), res.lam, d, trace.n_flagged, trace.n_failed))
    return out


# ------------------------------------------------------------ ball stationarity


def zero_mean_fields() -> dict:
    """Three independent boundary functions on the unit circle with zero mean."""
    def angle(pts):
        return np.arctan2(pts[:, 1], pts[:, 0])

    # generic phases, so no field is odd under a symmetry of the lattice
    return {
        "cos(theta - 0.4)": lambda pts: np.cos(angle(pts) - 0.4),
        "sin(2 theta + 0.3)": lambda pts: np.sin(2 * angle(pts) + 0.3),
        "cos(3 theta - 1.1) + sin(theta)/2": lambda pts: (np.cos(3 * angle(pts) - 1.1)
                                                          + 0.5 * np.sin(angle(pts))),
    }


@dataclass
class StationarityRow:
    field: str
    derivative: float
    bound: float  # 1e-2 * ||h||_inf * max psi^2
    mean_flux: float


def ball_stationarity(s: float, n: int, fields: dict | None = None, resolution: int = 256,
                      lattice_shift=(0.31, 0.17)) -> list[StationarityRow]:
    """Boundary derivative of the disc torsion value under zero-mean normal fields.

    The lattice is shifted off the disc centre by ``lattice_shift`` cells so
    the discrete solution has no reflection symmetry that would zero the
    derivative trivially.
    """
    disc = Ball((0.0, 0.0), 1.0)
    h = disc.diameter / n
    grid = Grid.with_spacing(disc, h, center=h * np.asarray(lattice_shift, dtype=float))
    _, res, torsion = minimize_on(disc, FracParams(s, 1.0, 2), n, grid)
    trace = trace_of(res, torsion, disc, s, resolution)
    psi2 = float(np.nanmax(trace.psi**2))
    rows = []
    for name, h in (fields or zero_mean_fields()).items():
        X = NormalField(disc, h)
        hinf = float(np.max(np.abs(X.boundary_values(trace.quad.points))))
        rows.append(StationarityRow(name, boundary_derivative(trace, X, disc, s),
                                    1e-2 * hinf * psi2, X.mean_flux(trace.quad)))
    return rows
