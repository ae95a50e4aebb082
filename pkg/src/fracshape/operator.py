"""Dense finite-difference discretization of the integral fractional Laplacian.

The operator is written as a lattice sum

    (-Delta)^s u(x_i) ~ sum_{j != i} W_ij (u_i - u_j),

over the infinite uniform lattice, where ``W_ij`` is ``b_{N,s}`` times the
exact integral of ``|y|^{-N-2s}`` over the lattice cell of the offset
``x_j - x_i`` with the ball ``|y| < h`` removed. The removed ball is
handled by a Taylor expansion, which adds ``c_h / h^2`` to the nearest
neighbour weights. Nodes outside the domain carry zero, so they only enter
through the diagonal; the sum over the whole lattice is known in closed
form, which gives the exterior tail without any truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate, linalg

from .constants import b_const
from .geometry import Deformation, Dilation, Domain, Rotation

_BLOCK = 1024


def _sphere_area(dim: int) -> float:
    return 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)


# ------------------------------------------------------------------ weights


def _ray_box(theta: float, lo: np.ndarray, hi: np.ndarray) -> tuple[float, float]:
    """Entry/exit distances of the ray at angle ``theta`` through an axis-aligned box."""
    d = np.array([math.cos(theta), math.sin(theta)])
    t0, t1 = 0.0, math.inf
    for k in range(2):
        if abs(d[k]) < 1e-15:
            if not lo[k] <= 0.0 <= hi[k]:
                return 0.0, 0.0
            continue
        a, b = lo[k] / d[k], hi[k] / d[k]
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
    return (t0, t1) if t1 > t0 else (0.0, 0.0)


def _polar_cell_weight(i: int, j: int, radius: float, s: float) -> float:
    """``int |y|^{-2-2s}`` over the unit cell at (i, j) minus the ball of ``radius``."""
    lo = np.array([i - 0.5, j - 0.5])
    hi = np.array([i + 0.5, j + 0.5])
    corners = [math.atan2(y, x) for x in (lo[0], hi[0]) for y in (lo[1], hi[1])]
    a, b = min(corners), max(corners)

    def radial(theta):
        t0, t1 = _ray_box(theta, lo, hi)
        t0 = max(t0, radius)
        if t1 <= t0:
            return 0.0
        return (t0 ** (-2 * s) - t1 ** (-2 * s)) / (2 * s)

    # angles where the circle crosses the cell edges are kinks of the integrand
    pts = []
    for x in (lo[0], hi[0]):
        if abs(x) < radius:
            y = math.sqrt(radius**2 - x * x)
            pts += [math.atan2(y, x), math.atan2(-y, x)]
    for y in (lo[1], hi[1]):
        if abs(y) < radius:
            x = math.sqrt(radius**2 - y * y)
            pts += [math.atan2(y, x), math.atan2(y, -x)]
    pts = sorted(p for p in pts if a < p < b)
    val, _ = integrate.quad(radial, a, b, points=pts or None, limit=200,
                            epsabs=1e-14, epsrel=1e-12)
    return val


@lru_cache(maxsize=32)
def cell_weights(dim: int, s: float, kmax: int, radius: float = 1.0) -> np.ndarray:
    """Kernel mass of every lattice cell with non-negative offset, in units where h = 1.

    Entry ``[k]`` (1D) or ``[i, j]`` (2D) is ``int_{cell ∖ B_radius} |y|^{-dim-2s} dy``;
    multiply by ``h^{-2s}`` for physical units. ``radius`` must be at least 0.5
    so the cell at the origin is excluded entirely. The returned array is read-only.
    """
    if radius < 0.5 * math.sqrt(dim):
        raise ValueError("radius must cover the central cell")
    k = np.arange(kmax + 1, dtype=float)
    if dim == 1:
        lower = np.maximum(k - 0.5, radius)
        upper = k + 0.5
        w = np.where(upper > lower, (lower ** (-2 * s) - upper ** (-2 * s)) / (2 * s), 0.0)
        w[0] = 0.0
    elif dim == 2:
        gx, gw = np.polynomial.legendre.leggauss(6)
        gx, gw = gx / 2, gw / 2
        I, J = np.meshgrid(k, k, indexing="ij")
        X = I[..., None, None] + gx[:, None]
        Y = J[..., None, None] + gx[None, :]
        w = np.einsum("ijab,a,b->ij", (X * X + Y * Y) ** (-1 - s), gw, gw)
        near = int(math.ceil(radius + 1.5))
        for i in range(min(near, kmax) + 1):
            for j in range(i, min(near, kmax) + 1):
                val = 0.0 if i == j == 0 else _polar_cell_weight(i, j, radius, s)
                w[i, j] = w[j, i] = val
    else:
        raise ValueError("dim must be 1 or 2")
    w.setflags(write=False)
    return w


def lattice_total(dim: int, s: float, radius: float = 1.0) -> float:
    """Sum of :func:`cell_weights` over the whole lattice: ``|S^{N-1}| radius^{-2s} / (2s)``.

    In 1D the sphere "area" is 2, i.e. both signs of the offset are counted.
    """
    return _sphere_area(dim) * radius ** (-2 * s) / (2 * s)


def singular_shell_coefficient(dim: int, s: float, h: float) -> float:
    """``c_h = b int_{|y|<h} |y|^{2-N-2s} dy / (2N)``, multiplies the discrete Laplacian."""
    return b_const(dim, s) * _sphere_area(dim) * h ** (2 - 2 * s) / (2 - 2 * s) / (2 * dim)


# --------------------------------------------------------------------- grid


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform lattice ``origin + h k`` covering the domain with a margin of empty nodes."""

    domain: Domain
    h: float
    origin: np.ndarray
    shape: tuple
    interior_index: np.ndarray  # (m, dim) integer lattice indices of interior nodes

    @classmethod
    def for_domain(cls, domain: Domain, n: int, margin: int = 2, center=None) -> "Grid":
        """Grid with ``h = diameter / n``; the lattice passes through ``center``.

        ``center`` defaults to the centre of the domain's bounding box, so
        ``n`` intervals span the domain exactly.
        """
        if n < 2:
            raise ValueError("need at least two intervals")
        return cls.with_spacing(domain, domain.diameter / n, margin, center)

    @classmethod
    def with_spacing(cls, domain: Domain, h: float, margin: int = 2, center=None) -> "Grid":
        lo, hi = domain.bounding_box()
        c = (lo + hi) / 2 if center is None else np.asarray(center, dtype=float)
        kmin = np.floor((lo - c) / h).astype(int) - margin
        kmax = np.ceil((hi - c) / h).astype(int) + margin
        origin = c + kmin * h
        shape = tuple(int(v) for v in kmax - kmin + 1)
        idx = np.indices(shape).reshape(domain.dim, -1).T
        pts = origin + h * idx
        delta = np.asarray(domain.signed_distance(pts)).reshape(-1)
        inside = delta > 1e-12 * h
        return cls(domain, float(h), origin, shape, idx[inside])

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def size(self) -> int:
        return len(self.interior_index)

    @cached_property
    def points(self) -> np.ndarray:
        """Interior node coordinates, shape ``(m, dim)``."""
        return self.origin + self.h * self.interior_index

    @cached_property
    def axes(self) -> list:
        return [self.origin[k] + self.h * np.arange(self.shape[k]) for k in range(self.dim)]

    def to_array(self, values: np.ndarray) -> np.ndarray:
        """Scatter interior values into a full lattice array (zero elsewhere)."""
        full = np.zeros(self.shape)
        full[tuple(self.interior_index.T)] = values
        return full

    def node_of(self, x) -> int:
        """Row index of the interior node at position ``x``."""
        x = np.asarray(x, dtype=float).reshape(-1)
        k = np.rint((x - self.origin) / self.h).astype(int)
        if np.max(np.abs(self.origin + k * self.h - x)) > 1e-9 * self.h:
            raise ValueError(f"{x} is not a grid node")
        hit = np.flatnonzero(np.all(self.interior_index == k, axis=1))
        if len(hit) == 0:
            raise ValueError(f"{x} is not an interior node")
        return int(hit[0])


@dataclass(eq=False)
class GridField:
    """Values at interior nodes; the field is zero everywhere else."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got {self.values.shape}")

    @classmethod
    def from_function(cls, grid: Grid, f) -> "GridField":
        pts = grid.points
        return cls(grid, np.asarray(f(pts[:, 0] if grid.dim == 1 else pts), dtype=float))

    def lp_norm(self, p: float) -> float:
        return float((np.sum(np.abs(self.values) ** p) * self.grid.h**self.grid.dim) ** (1 / p))

    def integral(self) -> float:
        return float(np.sum(self.values) * self.grid.h**self.grid.dim)

    def __mul__(self, c: float) -> "GridField":
        return GridField(self.grid, self.values * c)

    __rmul__ = __mul__

    def full(self) -> np.ndarray:
        return self.grid.to_array(self.values)


# ----------------------------------------------------------------- operator


@dataclass(eq=False)
class OperatorMatrix:
    """Assembled operator restricted to interior nodes.

    ``matrix @ u`` approximates ``(-Delta)^s u`` at the interior nodes for a
    field vanishing outside the domain; ``tail[i]`` is the row sum, i.e. the
    coupling of node ``i`` to everything outside.
    """

    grid: Grid
    s: float
    matrix: np.ndarray
    tail: np.ndarray
    b: float
    c_h: float
    weights: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def dim(self) -> int:
        return self.grid.dim

    @cached_property
    def cholesky(self):
        return linalg.cho_factor(self.matrix, lower=True, check_finite=False)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return linalg.cho_solve(self.cholesky, rhs, check_finite=False)

    def apply(self, u) -> np.ndarray:
        vals = u.values if isinstance(u, GridField) else np.asarray(u, dtype=float)
        return self.matrix @ vals

    def pair_weight(self, offsets: np.ndarray) -> np.ndarray:
        """Lattice weight ``W`` for integer offsets of shape ``(..., dim)`` (offset 0 gives 0)."""
        a = np.abs(offsets)
        w = self.b * self.h ** (-2 * self.s) * self.weights[tuple(np.moveaxis(a, -1, 0))]
        nn = np.sum(a, axis=-1) == 1
        return w + nn * (self.c_h / self.h**2)

    def weight_table_covers(self, extent: int) -> bool:
        return self.weights.shape[0] > extent


def assemble(grid: Grid, domain: Domain | None, s: float) -> OperatorMatrix:
    """Dense symmetric operator on the interior nodes of ``grid``."""
    if domain is not None and domain != grid.domain:
        raise ValueError("grid was built for a different domain")
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    dim, h = grid.dim, grid.h
    b = b_const(dim, s)
    c_h = singular_shell_coefficient(dim, s, h)
    idx = grid.interior_index
    # table also covers the padded exterior lattice used by the pullback quadrature
    kmax = 2 * int(max(grid.shape))
    W = cell_weights(dim, s, kmax)
    scale = b * h ** (-2 * s)
    m = len(idx)
    A = np.empty((m, m))
    for start in range(0, m, _BLOCK):
        stop = min(start + _BLOCK, m)
        off = np.abs(idx[start:stop, None, :] - idx[None, :, :])
        block = -scale * W[tuple(np.moveaxis(off, -1, 0))]
        block[off.sum(axis=-1) == 1] -= c_h / h**2
        A[start:stop] = block
    diag = scale * lattice_total(dim, s) + 2 * dim * c_h / h**2
    A[np.diag_indices(m)] = diag
    tail = A.sum(axis=1)
    return OperatorMatrix(grid, s, A, tail, b, c_h, W)


# ------------------------------------------------------- derived quantities


def _vals(u) -> np.ndarray:
    return u.values if isinstance(u, GridField) else np.asarray(u, dtype=float)


def seminorm_sq(op: OperatorMatrix, u) -> float:
    """``[u]^2_{H^s}`` from the pair form ``1/2 sum W_ij (u_i-u_j)^2`` plus the exterior tail."""
    v = _vals(u)
    off = op.matrix - np.diag(np.diag(op.matrix))  # = -W on interior pairs
    inner_rows = -off.sum(axis=1)
    pairs = np.dot(inner_rows, v * v) + v @ (off @ v)
    return float((pairs + np.dot(op.tail, v * v)) * op.h**op.dim)


def interaction(op: OperatorMatrix, u, v, x=None, v_exterior: float = 0.0):
    """``I(u, v)(x) = b int (u(x)-u(y))(v(x)-v(y)) |x-y|^{-N-2s} dy`` at interior nodes.

    ``u`` vanishes outside the domain; ``v`` takes the constant value
    ``v_exterior`` there. Returns all nodes when ``x`` is None.
    """
    uu, vv = _vals(u), _vals(v)
    if uu.shape != vv.shape or uu.shape != (op.grid.size,):
        raise ValueError("u and v must live on the operator's grid")
    Wm = -(op.matrix - np.diag(np.diag(op.matrix)))
    D = Wm.sum(axis=1)
    out = uu * vv * D - uu * (Wm @ vv) - vv * (Wm @ uu) + Wm @ (uu * vv)
    out += uu * (vv - v_exterior) * op.tail
    if x is None:
        return out
    return float(out[op.grid.node_of(x)])


def apply_truncated(op: OperatorMatrix, u, mu: float, x=None):
    """``b int_{|x-y| >= mu} (u(x) - u(y)) |x-y|^{-N-2s} dy`` at interior nodes.

    Cells straddling the sphere ``|y| = mu`` are cut exactly.
    """
    if mu < 2 * op.h:
        raise ValueError(f"mu={mu} is below twice the grid spacing {op.h}")
    grid = op.grid
    vals = _vals(u)
    radius = mu / op.h
    kmax = int(max(grid.shape))
    W = cell_weights(grid.dim, op.s, kmax, float(radius))
    total = lattice_total(grid.dim, op.s, radius)
    scale = op.b * op.h ** (-2 * op.s)
    rows = range(grid.size) if x is None else [grid.node_of(x)]
    idx = grid.interior_index
    out = []
    for i in rows:
        off = np.abs(idx - idx[i])
        out.append(scale * (vals[i] * total - np.dot(W[tuple(off.T)], vals)))
    out = np.array(out)
    return out if x is None else float(out[0])


# --------------------------------------------------- pulled-back energy


def _exterior_lattice(op: OperatorMatrix, pad: int) -> np.ndarray:
    """Integer indices of exterior lattice nodes in the grid box enlarged by ``pad``."""
    grid = op.grid
    shape = tuple(n + 2 * pad for n in grid.shape)
    idx = np.indices(shape).reshape(grid.dim, -1).T - pad
    interior = set(map(tuple, grid.interior_index))
    keep = np.array([tuple(k) not in interior for k in idx])
    return idx[keep]


def _pullback_terms(op: OperatorMatrix, v, deformation: Deformation, eps: float | None,
                    pad: int | None):
    """Shared quadrature for the pulled-back energy (``eps``) or its derivative (``eps=None``)."""
    grid = op.grid
    dim, h, s = grid.dim, op.h, op.s
    vals = _vals(v)
    idx = grid.interior_index
    x = grid.points
    if pad is None:
        pad = max(grid.shape) // 2

    if isinstance(deformation, (Dilation, Rotation)):
        # ratio K_eps / K_0 is constant on all of R^N x R^N
        if isinstance(deformation, Rotation):
            factor = 1.0 if eps is not None else 0.0
        else:
            factor = (1 + eps) ** (dim - 2 * s) if eps is not None else dim - 2 * s
        return factor * seminorm_sq(op, v)

    if eps is not None:
        phi = np.asarray(deformation.deform(eps, x)).reshape(-1, dim)
        jac = np.asarray(deformation.jacobian(eps, x)).reshape(-1)
    else:
        X = np.asarray(deformation.velocity(x)).reshape(-1, dim)
        div = np.asarray(deformation.divergence(x)).reshape(-1)

    def ratio(i, ypos, phi_y=None, jac_y=None, X_y=None, div_y=None):
        d = x[i] - ypos
        r2 = np.sum(d * d, axis=1)
        if eps is not None:
            dphi = phi[i] - phi_y
            return jac[i] * jac_y * (r2 / np.sum(dphi * dphi, axis=1)) ** ((dim + 2 * s) / 2)
        return div[i] + div_y - (dim + 2 * s) * np.sum(d * (X[i] - X_y), axis=1) / r2

    ext = _exterior_lattice(op, pad)
    ext_pos = grid.origin + h * ext
    if eps is not None:
        phi_e = np.asarray(deformation.deform(eps, ext_pos)).reshape(-1, dim)
        jac_e = np.asarray(deformation.jacobian(eps, ext_pos)).reshape(-1)
    else:
        X_e = np.asarray(deformation.velocity(ext_pos)).reshape(-1, dim)
        div_e = np.asarray(deformation.divergence(ext_pos)).reshape(-1)
        edge = np.any((ext < -pad + 1) | (ext > np.array(grid.shape) + pad - 2), axis=1)
        if np.max(np.abs(X_e[edge]), initial=0.0) > 1e-12:
            raise ValueError("velocity must vanish on the padded lattice boundary")

    total = 0.0
    for i in range(len(idx)):
        # interior pairs j > i
        j = np.arange(i + 1, len(idx))
        if len(j):
            w = op.pair_weight(idx[j] - idx[i])
            if eps is not None:
                r = ratio(i, x[j], phi[j], jac[j])
            else:
                r = ratio(i, x[j], X_y=X[j], div_y=div[j])
            total += np.sum(w * r * (vals[i] - vals[j]) ** 2)
        if vals[i] == 0.0:
            continue
        # exterior lattice inside the padded box
        we = op.pair_weight(ext - idx[i])
        if eps is not None:
            re = ratio(i, ext_pos, phi_e, jac_e)
            far, shift = jac[i], jac[i] * (phi[i] - x[i])
        else:
            re = ratio(i, ext_pos, X_y=X_e, div_y=div_e)
            far, shift = div[i], X[i]
        remainder = op.tail[i] - np.sum(we)
        # beyond the box the ratio is far - (N+2s) (x-y).shift / |x-y|^2 to first
        # order; the lattice sum of W d/|d|^2 vanishes, so the far part is minus the box part
        others = np.delete(np.arange(len(idx)), i)
        d_in = x[i] - x[others]
        d_ex = x[i] - ext_pos
        moment = (np.sum((op.pair_weight(idx[others] - idx[i]) / np.sum(d_in * d_in, axis=1))[:, None]
                         * d_in, axis=0)
                  + np.sum((we / np.sum(d_ex * d_ex, axis=1))[:, None] * d_ex, axis=0))
        far_sum = far * remainder + (dim + 2 * s) * np.dot(shift, moment)
        total += vals[i] ** 2 * (np.sum(we * re) + far_sum)
    return total * h**dim


def pullback_value(op: OperatorMatrix, v, deformation: Deformation, eps: float,
                   pad: int | None = None) -> float:
    """Discrete ``V_v(eps) = 1/2 int int (v(x)-v(y))^2 K_eps(x, y)``.

    Every lattice weight is multiplied by ``K_eps / K_0`` at the node pair.
    Beyond the padded box, where the velocity must vanish, the ratio is
    expanded to first order in the displacement of ``x``.
    """
    deformation._check_eps(eps)
    return float(_pullback_terms(op, v, deformation, eps, pad))


def pullback_deriv0(op: OperatorMatrix, v, deformation: Deformation,
                    pad: int | None = None) -> float:
    """``V_v'(0)`` with the kernel derivative

    ``[div X(x) + div X(y) - (N+2s)(x-y).(X(x)-X(y))/|x-y|^2] K_0(x, y)``.
    """
    return float(_pullback_terms(op, v, deformation, None, pad))
