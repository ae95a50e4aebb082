"""Boundary quotient ``psi = u / delta^s`` of a discrete minimizer.

Near the boundary the discrete solution behaves like ``psi (delta - a h)^s``:
the grid sees the boundary shifted by a fraction ``a`` of a cell. Sampling
along the inner normal and fitting ``u^{1/s}`` by a low-degree polynomial in
the distance recovers both ``psi`` (linear coefficient to the power ``s``)
and that offset; the higher terms absorb the curvature of the profile across
the sampling window, which is strong next to concave boundary pieces.
The older two-parameter model ``u/r^s = psi + c r^beta`` is kept as
``method="power"`` for comparison.

For minimizers other than the torsion function the profile ``u^{1/s}`` is
no longer close to a polynomial over a window of several cells, so
``method="ratio"`` divides by the discrete torsion function ``w`` of the
same grid instead. The ratio ``u/w`` carries no boundary layer; it is fitted
at the grid nodes around each boundary point by ``1, delta, delta^s`` plus
low tangential terms, and ``psi_u = psi_w * (u/w)(sigma)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial import cKDTree

from .geometry import BoundaryQuad, Domain
from .operator import GridField

OK, COMPRESSED, FAILED = 0, 1, 2


@dataclass
class TraceResult:
    quad: BoundaryQuad
    psi: np.ndarray
    residual: np.ndarray
    offset: np.ndarray  # effective boundary shift in units of h (shift fit only)
    flags: np.ndarray
    method: str = "shift"

    @property
    def n_flagged(self) -> int:
        return int(np.sum(self.flags != OK))

    @property
    def n_failed(self) -> int:
        return int(np.sum(self.flags == FAILED))

    def spread(self, label: int | None = None) -> float:
        """``(max - min) / mean`` of psi over one boundary component (all if None)."""
        psi = self.psi if label is None else self.psi[self.quad.labels == label]
        psi = psi[np.isfinite(psi)]
        return float((psi.max() - psi.min()) / psi.mean())


def _sampler(u: GridField, s: float, transform: bool):
    grid = u.grid
    full = np.clip(grid.to_array(u.values), 0.0, None)
    if transform:
        full = full ** (1.0 / s)
    if grid.dim == 1:
        ax = grid.axes[0]
        return lambda pts: np.interp(pts[:, 0], ax, full)
    interp = RegularGridInterpolator(grid.axes, full, method="linear",
                                     bounds_error=False, fill_value=0.0)
    return interp


def _reach(domain: Domain, sigma: np.ndarray, nu: np.ndarray, r_max: float) -> float:
    """Largest ``r <= r_max`` for which ``sigma`` stays the closest boundary point."""
    def ok(r):
        d = float(np.asarray(domain.signed_distance(sigma + r * nu)).reshape(-1)[0])
        return abs(d - r) <= 1e-9 * max(1.0, r)

    if ok(r_max):
        return r_max
    lo, hi = 0.0, r_max
    for _ in range(50):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


def _fit_shift(r: np.ndarray, U: np.ndarray, s: float, h: float, degree: int = 2):
    A = np.stack([r**k for k in range(degree + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(A, U, rcond=None)
    alpha, slope = coef[:2]
    fit = A @ coef
    res = float(np.sqrt(np.mean((fit - U) ** 2)) / max(np.max(np.abs(U)), 1e-300))
    if slope <= 0:
        return np.nan, res, np.nan
    return slope**s, res, -alpha / slope / h


def _fit_power(r: np.ndarray, q: np.ndarray, beta: float):
    A = np.stack([np.ones_like(r), r**beta], axis=1)
    coef, *_ = np.linalg.lstsq(A, q, rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - q) ** 2)) / max(np.max(np.abs(q)), 1e-300))
    return coef[0], res


def _ratio_at_boundary(ratio: GridField, domain: Domain, s: float, quad: BoundaryQuad,
                       radius: float):
    """Extrapolate a field that is smooth up to the boundary onto ``quad`` points."""
    grid = ratio.grid
    h = grid.h
    pts = grid.points
    dist = np.asarray(domain.signed_distance(pts), dtype=float).reshape(-1) / h
    comp = domain.boundary_label(pts)
    tree = cKDTree(pts)
    m = len(quad)
    value = np.full(m, np.nan)
    flags = np.zeros(m, dtype=int)
    for k in range(m):
        idx = np.array(tree.query_ball_point(quad.points[k], radius * h), dtype=int)
        idx = idx[comp[idx] == quad.labels[k]]
        d = dist[idx]
        cols = [np.ones(len(idx)), d, d**s]
        if grid.dim == 2:
            nu = quad.normals[k]
            tang = (pts[idx] - quad.points[k]) @ np.array([-nu[1], nu[0]]) / h
            cols += [tang, tang * tang, tang * d]
        if len(idx) < 2 * len(cols) or d.max() < 3.0:
            flags[k] = COMPRESSED
            cols = cols[:2] + cols[3:]  # drop delta^s, which a thin strip cannot resolve
            if len(idx) < len(cols) + 1 or d.max() < 1.5:
                flags[k] = FAILED
                continue
        coef, *_ = np.linalg.lstsq(np.stack(cols, axis=1), ratio.values[idx], rcond=None)
        value[k] = coef[0]
    return value, flags


def extract_psi(u: GridField, domain: Domain, s: float, quad: BoundaryQuad,
                method: str = "shift", first: int | None = None, count: int | None = None,
                alpha0: float = 0.5, degree: int | None = None, reference: GridField | None = None,
                radius: float = 6.0) -> TraceResult:
    """Estimate ``psi`` at every boundary quadrature point.

    Samples ``u`` at ``sigma + r_i nu`` with ``r_i = (first + i) h``,
    ``i < count``. The default window is 2h..7h in 1D and 3h..12h in 2D,
    where interpolation noise across the staircase boundary needs the
    longer baseline; the fit degree defaults to 2 in 1D and 3 in 2D, where
    the window is long enough to see the boundary curvature. A point whose sampling line leaves the region where
    ``sigma`` is the nearest boundary point before ``degree + 3`` samples
    are taken is refitted by at most a quadratic on five samples inside its
    reach (flag ``COMPRESSED``); if the reach is below ``1.5 h`` it is ``FAILED`` and
    gets ``nan``.

    ``method="ratio"`` needs ``reference``, the discrete torsion function on
    the same grid; ``u/w`` is fitted over interior nodes within ``radius``
    cells of each boundary point.
    """
    if method not in ("shift", "power", "ratio"):
        raise ValueError(f"unknown method {method!r}")
    if method == "ratio":
        if reference is None:
            raise ValueError("method='ratio' needs the discrete torsion function as reference")
        if reference.grid is not u.grid:
            raise ValueError("reference field lives on a different grid")
        base = extract_psi(reference, domain, s, quad, "shift", first, count, alpha0, degree)
        factor, flags = _ratio_at_boundary(GridField(u.grid, u.values / reference.values),
                                           domain, s, quad, radius)
        return TraceResult(quad, base.psi * factor, base.residual, base.offset,
                           np.maximum(base.flags, flags), "ratio")
    h = u.grid.h
    if first is None:
        first = 2 if u.grid.dim == 1 else 3
    if count is None:
        count = 6 if u.grid.dim == 1 else 10
    if degree is None:
        degree = 2 if u.grid.dim == 1 else 3
    sample = _sampler(u, s, transform=(method == "shift"))
    beta = min(s, 1 - s, alpha0)
    radii = (first + np.arange(count)) * h
    m = len(quad)
    psi = np.full(m, np.nan)
    residual = np.full(m, np.nan)
    offset = np.full(m, np.nan)
    flags = np.zeros(m, dtype=int)
    for k in range(m):
        sigma, nu = quad.points[k], quad.normals[k]
        reach = _reach(domain, sigma, nu, radii[-1])
        r = radii[radii <= reach]
        deg = degree
        if len(r) < degree + 3:
            if reach < 1.5 * h:
                flags[k] = FAILED
                continue
            flags[k] = COMPRESSED
            r = np.linspace(0.5 * reach, reach, 5)
            deg = min(degree, 2)
        vals = np.asarray(sample(sigma + r[:, None] * nu)).reshape(-1)
        if method == "shift":
            psi[k], residual[k], offset[k] = _fit_shift(r, vals, s, h, deg)
        else:
            psi[k], residual[k] = _fit_power(r, vals / r**s, beta)
        if not np.isfinite(psi[k]):
            flags[k] = FAILED
    return TraceResult(quad, psi, residual, offset, flags, method)


def fill_failed(trace: TraceResult) -> np.ndarray:
    """psi with failed points replaced by periodic interpolation along their component.

    Boundary components are assumed to be sampled in angular order, as
    :meth:`Ball.boundary_quadrature` does.
    """
    psi = trace.psi.copy()
    for label in np.unique(trace.quad.labels):
        sel = np.flatnonzero(trace.quad.labels == label)
        vals = psi[sel]
        good = np.isfinite(vals)
        if good.all():
            continue
        if not good.any():
            raise ValueError(f"no usable trace point on boundary component {label}")
        pos = np.arange(len(sel))
        psi[sel[~good]] = np.interp(pos[~good], pos[good], vals[good], period=len(sel))
    return psi
