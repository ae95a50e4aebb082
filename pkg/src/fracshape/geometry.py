"""Analytic domains, boundary quadrature and deformation families.

Positions are numpy arrays whose last axis has length ``dim``; in 1D a bare
scalar or a 1-D array of abscissae is also accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._smooth import bump, bump_deriv, smoothstep

ON_BOUNDARY_TOL = 1e-10


def as_points(x, dim: int) -> np.ndarray:
    """Return ``x`` as an ``(m, dim)`` float array."""
    x = np.asarray(x, dtype=float)
    if dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return x.reshape(-1, 1)
    return x.reshape(-1, dim)


def _like(values: np.ndarray, x):
    """Reshape an ``(m, dim)`` result to the shape of the input positions."""
    if np.ndim(x) == 0:
        return float(values.reshape(-1)[0])
    return values.reshape(np.shape(x))


def _restore(values: np.ndarray, x, dim: int):
    """Give per-point results the leading shape of the input positions."""
    x = np.asarray(x, dtype=float)
    if dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        shape = x.shape
    else:
        shape = x.shape[:-1]
    if shape == ():
        return float(values[0])
    return values.reshape(shape)


@dataclass(frozen=True)
class BoundaryQuad:
    """Boundary nodes with unit interior normals and positive surface weights.

    ``labels`` tells the boundary components apart (0 for the outer one).
    """

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return len(self.weights)

    @property
    def total_measure(self) -> float:
        return float(self.weights.sum())

    def subset(self, label: int) -> "BoundaryQuad":
        keep = self.labels == label
        return BoundaryQuad(self.points[keep], self.normals[keep],
                            self.weights[keep], self.labels[keep])


class Domain:
    """Common interface of the three analytic domain kinds."""

    dim: int

    def signed_distance(self, x):
        raise NotImplementedError

    def normal(self, point) -> np.ndarray:
        raise NotImplementedError

    def boundary_label(self, x) -> np.ndarray:
        """Label of the nearest boundary component, matching the quadrature labels."""
        return np.zeros(len(as_points(x, self.dim)), dtype=int)

    def boundary_quadrature(self, resolution: int) -> BoundaryQuad:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains(self, x):
        return np.asarray(self.signed_distance(x)) > 0

    @property
    def volume(self) -> float:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.max(hi - lo))


@dataclass(frozen=True)
class Interval(Domain):
    a: float
    b: float

    dim = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got ({self.a}, {self.b})")

    def signed_distance(self, x):
        pts = as_points(x, 1)[:, 0]
        return _restore(np.minimum(pts - self.a, self.b - pts), x, 1)

    def normal(self, point) -> np.ndarray:
        p = float(np.asarray(point, dtype=float).reshape(-1)[0])
        if abs(p - self.a) <= ON_BOUNDARY_TOL:
            return np.array([1.0])
        if abs(p - self.b) <= ON_BOUNDARY_TOL:
            return np.array([-1.0])
        raise ValueError(f"{p} is not on the boundary of {self}")

    def boundary_quadrature(self, resolution: int = 2) -> BoundaryQuad:
        if resolution < 2:
            raise ValueError("resolution must be >= 2")
        return BoundaryQuad(
            points=np.array([[self.a], [self.b]]),
            normals=np.array([[1.0], [-1.0]]),
            weights=np.array([1.0, 1.0]),
            labels=np.array([0, 0]),
        )

    def bounding_box(self):
        return np.array([self.a]), np.array([self.b])

    @property
    def volume(self) -> float:
        return self.b - self.a

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.a + self.b) / 2])

    def scaled(self, factor: float, center=0.0) -> "Interval":
        c = float(np.asarray(center).reshape(-1)[0])
        return Interval(c + factor * (self.a - c), c + factor * (self.b - c))


@dataclass(frozen=True)
class Ball(Domain):
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if len(self.center) not in (1, 2):
            raise ValueError("only 1D and 2D balls are supported")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.center)

    def signed_distance(self, x):
        pts = as_points(x, self.dim)
        d = self.radius - np.linalg.norm(pts - self.c, axis=1)
        return _restore(d, x, self.dim)

    def normal(self, point) -> np.ndarray:
        p = as_points(point, self.dim)[0]
        r = np.linalg.norm(p - self.c)
        if abs(r - self.radius) > ON_BOUNDARY_TOL:
            raise ValueError(f"{p} is not on the sphere of radius {self.radius}")
        return -(p - self.c) / r

    def boundary_quadrature(self, resolution: int = 256) -> BoundaryQuad:
        if resolution < 2:
            raise ValueError("resolution must be >= 2")
        if self.dim == 1:
            c, r = self.center[0], self.radius
            return Interval(c - r, c + r).boundary_quadrature(resolution)
        theta = 2 * np.pi * np.arange(resolution) / resolution
        u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return BoundaryQuad(
            points=self.c + self.radius * u,
            normals=-u,
            weights=np.full(resolution, 2 * np.pi * self.radius / resolution),
            labels=np.zeros(resolution, dtype=int),
        )

    def bounding_box(self):
        return self.c - self.radius, self.c + self.radius

    @property
    def volume(self) -> float:
        if self.dim == 1:
            return 2 * self.radius
        return math.pi * self.radius**2

    def scaled(self, factor: float, center=None) -> "Ball":
        c0 = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        return Ball(tuple(c0 + factor * (self.c - c0)), factor * self.radius)

    def shifted(self, offset) -> "Ball":
        return Ball(tuple(self.c + np.asarray(offset, dtype=float)), self.radius)


@dataclass(frozen=True)
class BallMinusBall(Domain):
    """Outer ball with a closed inner ball removed (2D annulus-like domain)."""

    outer: Ball
    inner: Ball

    def __post_init__(self):
        if self.outer.dim != self.inner.dim:
            raise ValueError("balls must live in the same dimension")
        gap = self.outer.radius - np.linalg.norm(self.inner.c - self.outer.c) - self.inner.radius
        if gap <= ON_BOUNDARY_TOL:
            raise ValueError("inner ball must lie strictly inside the outer ball")

    @property
    def dim(self) -> int:
        return self.outer.dim

    @property
    def gap(self) -> float:
        """Smallest distance between the two spheres."""
        return float(self.outer.radius - np.linalg.norm(self.inner.c - self.outer.c)
                     - self.inner.radius)

    def signed_distance(self, x):
        pts = as_points(x, self.dim)
        d_out = self.outer.radius - np.linalg.norm(pts - self.outer.c, axis=1)
        d_in = np.linalg.norm(pts - self.inner.c, axis=1) - self.inner.radius
        return _restore(np.minimum(d_out, d_in), x, self.dim)

    def boundary_label(self, x) -> np.ndarray:
        pts = as_points(x, self.dim)
        d_out = self.outer.radius - np.linalg.norm(pts - self.outer.c, axis=1)
        d_in = np.linalg.norm(pts - self.inner.c, axis=1) - self.inner.radius
        return (d_in < d_out).astype(int)

    def normal(self, point) -> np.ndarray:
        p = as_points(point, self.dim)[0]
        r_in = np.linalg.norm(p - self.inner.c)
        if abs(r_in - self.inner.radius) <= ON_BOUNDARY_TOL:
            # interior of the domain lies outside the inner ball
            return (p - self.inner.c) / r_in
        return self.outer.normal(p)

    def boundary_quadrature(self, resolution: int = 256) -> BoundaryQuad:
        outer = self.outer.boundary_quadrature(resolution)
        n_in = max(2, int(round(resolution * self.inner.radius / self.outer.radius)))
        inner = self.inner.boundary_quadrature(n_in)
        return BoundaryQuad(
            points=np.concatenate([outer.points, inner.points]),
            normals=np.concatenate([outer.normals, -inner.normals]),
            weights=np.concatenate([outer.weights, inner.weights]),
            labels=np.concatenate([outer.labels, np.ones(n_in, dtype=int)]),
        )

    def bounding_box(self):
        return self.outer.bounding_box()

    @property
    def volume(self) -> float:
        return self.outer.volume - self.inner.volume

    def with_inner_center(self, center) -> "BallMinusBall":
        return BallMinusBall(self.outer, Ball(tuple(np.asarray(center, dtype=float)),
                                              self.inner.radius))


def signed_distance(domain: Domain, x):
    return domain.signed_distance(x)


def normal(domain: Domain, point) -> np.ndarray:
    return domain.normal(point)


def boundary_quadrature(domain: Domain, resolution: int) -> BoundaryQuad:
    return domain.boundary_quadrature(resolution)


# ---------------------------------------------------------------- deformations


class Deformation:
    """Family ``Phi_eps = id + eps X`` (or an exact flow) with velocity ``X``."""

    dim: int
    eps_max: float

    def velocity(self, x) -> np.ndarray:
        raise NotImplementedError

    def divergence(self, x) -> np.ndarray:
        raise NotImplementedError

    def _check_eps(self, eps: float) -> None:
        if abs(eps) >= self.eps_max:
            raise ValueError(f"|eps|={abs(eps)} must be < eps_max={self.eps_max}")

    def deform(self, eps: float, x) -> np.ndarray:
        self._check_eps(eps)
        pts = as_points(x, self.dim)
        return _like(pts + eps * self.velocity(pts), x)

    def jacobian(self, eps: float, x):
        """Determinant of ``D Phi_eps`` by centered differences (overridden where exact)."""
        self._check_eps(eps)
        pts = as_points(x, self.dim)
        step = 1e-6
        jac = np.empty((len(pts), self.dim, self.dim))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = step
            fp = as_points(self.deform(eps, pts + e), self.dim)
            fm = as_points(self.deform(eps, pts - e), self.dim)
            jac[:, :, k] = (fp - fm) / (2 * step)
        return _restore(np.linalg.det(jac), x, self.dim)

    def apply_to_domain(self, domain: Domain, eps: float) -> Domain:
        raise NotImplementedError(f"{type(self).__name__} has no analytic image domain")


@dataclass(frozen=True)
class Dilation(Deformation):
    """``Phi_eps(x) = c + (1 + eps)(x - c)``, so ``X(x) = x - c``."""

    dim: int = 1
    center: tuple = ()
    eps_max: float = 1.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", tuple(c) if c.size else (0.0,) * self.dim)

    def velocity(self, x):
        pts = as_points(x, self.dim)
        return _like(pts - np.asarray(self.center), x)

    def divergence(self, x):
        pts = as_points(x, self.dim)
        return _restore(np.full(len(pts), float(self.dim)), x, self.dim)

    def deform(self, eps, x):
        self._check_eps(eps)
        c = np.asarray(self.center)
        pts = as_points(x, self.dim)
        return _like(c + (1 + eps) * (pts - c), x)

    def jacobian(self, eps, x):
        self._check_eps(eps)
        pts = as_points(x, self.dim)
        return _restore(np.full(len(pts), (1 + eps) ** self.dim), x, self.dim)

    def apply_to_domain(self, domain, eps):
        self._check_eps(eps)
        if isinstance(domain, Interval):
            return domain.scaled(1 + eps, self.center)
        if isinstance(domain, Ball):
            return domain.scaled(1 + eps, self.center)
        if isinstance(domain, BallMinusBall):
            return BallMinusBall(domain.outer.scaled(1 + eps, self.center),
                                 domain.inner.scaled(1 + eps, self.center))
        raise TypeError(f"unsupported domain {domain!r}")


@dataclass(frozen=True)
class Translation(Deformation):
    """``X(x) = rho(x) e``, rho radial about ``center``, 1 inside ``r_inner``, 0 beyond ``r_outer``.

    Built for a ball-minus-ball: the inner ball moves rigidly, the outer sphere stays put.
    """

    center: tuple
    r_inner: float
    r_outer: float
    direction: tuple = (1.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in np.atleast_1d(self.center)))
        d = np.asarray(self.direction, dtype=float)
        object.__setattr__(self, "direction", tuple(d / np.linalg.norm(d)))
        if not 0 < self.r_inner < self.r_outer:
            raise ValueError("need 0 < r_inner < r_outer")

    @classmethod
    def for_domain(cls, domain: BallMinusBall, direction=(1.0, 0.0)) -> "Translation":
        """Cutoff ramp between ``tau + m`` and ``R - |t| - m`` with ``m = (R - tau - |t|)/4``."""
        t = float(np.linalg.norm(domain.inner.c - domain.outer.c))
        margin = (domain.outer.radius - domain.inner.radius - t) / 4
        return cls(domain.inner.center, domain.inner.radius + margin,
                   domain.outer.radius - t - margin, direction)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def eps_max(self) -> float:
        # |d rho/dr| <= max|bump'| / width keeps id + eps X injective
        width = self.r_outer - self.r_inner
        grid = np.linspace(0, 1, 2001)
        return float(width / np.max(np.abs(bump_deriv(grid))))

    def _ramp(self, pts):
        r = np.linalg.norm(pts - np.asarray(self.center), axis=1)
        t = np.clip((r - self.r_inner) / (self.r_outer - self.r_inner), 0.0, 1.0)
        return r, t

    def rho(self, x):
        pts = as_points(x, self.dim)
        _, t = self._ramp(pts)
        return _restore(bump(t), x, self.dim)

    def velocity(self, x):
        pts = as_points(x, self.dim)
        _, t = self._ramp(pts)
        return _like(bump(t)[:, None] * np.asarray(self.direction), x)

    def divergence(self, x):
        pts = as_points(x, self.dim)
        r, t = self._ramp(pts)
        width = self.r_outer - self.r_inner
        inside = (t > 0) & (t < 1)
        drho = np.zeros(len(pts))
        radial = np.zeros_like(pts)
        radial[inside] = (pts[inside] - np.asarray(self.center)) / r[inside, None]
        drho[inside] = bump_deriv(t[inside]) / width
        return _restore(drho * (radial @ np.asarray(self.direction)), x, self.dim)

    def jacobian(self, eps, x):
        # D Phi = I + eps e (grad rho)^T, det = 1 + eps e . grad rho
        self._check_eps(eps)
        return 1.0 + eps * np.asarray(self.divergence(x))

    def apply_to_domain(self, domain, eps):
        self._check_eps(eps)
        if not isinstance(domain, BallMinusBall):
            raise TypeError("Translation is defined for ball-minus-ball domains")
        return domain.with_inner_center(domain.inner.c + eps * np.asarray(self.direction))


@dataclass(frozen=True)
class Rotation(Deformation):
    """Rigid rotation by angle ``eps`` about ``center`` (2D); tangent to every centered circle."""

    center: tuple = (0.0, 0.0)
    eps_max: float = math.pi

    dim = 2

    def velocity(self, x):
        pts = as_points(x, 2) - np.asarray(self.center)
        return _like(np.stack([-pts[:, 1], pts[:, 0]], axis=1), x)

    def divergence(self, x):
        pts = as_points(x, 2)
        return _restore(np.zeros(len(pts)), x, 2)

    def deform(self, eps, x):
        self._check_eps(eps)
        c = np.asarray(self.center)
        pts = as_points(x, 2) - c
        cs, sn = math.cos(eps), math.sin(eps)
        out = c + np.stack([cs * pts[:, 0] - sn * pts[:, 1], sn * pts[:, 0] + cs * pts[:, 1]], axis=1)
        return _like(out, x)

    def jacobian(self, eps, x):
        self._check_eps(eps)
        pts = as_points(x, 2)
        return _restore(np.ones(len(pts)), x, 2)

    def apply_to_domain(self, domain, eps):
        self._check_eps(eps)
        if isinstance(domain, Ball) and np.allclose(domain.c, self.center):
            return domain
        raise TypeError("only centered balls are mapped to themselves analytically")


@dataclass(frozen=True)
class NormalField(Deformation):
    """``X = h nu`` on the boundary, extended constantly along normal lines into a collar.

    ``h`` maps boundary points ``(m, dim)`` to values ``(m,)``. The extension is
    multiplied by a smooth cutoff of ``|delta|/collar`` so X vanishes away from the boundary.
    """

    domain: Domain
    h: Callable = field(compare=False)
    collar: float = 0.25

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def eps_max(self) -> float:
        return 0.25 * self.collar

    def _project(self, pts):
        dom = self.domain
        if isinstance(dom, Interval):
            sigma = np.where(np.abs(pts - dom.a) <= np.abs(pts - dom.b), dom.a, dom.b)
            nu = np.where(sigma == dom.a, 1.0, -1.0)
            return sigma, nu
        if isinstance(dom, Ball):
            rel = pts - dom.c
            r = np.linalg.norm(rel, axis=1, keepdims=True)
            r = np.where(r == 0, 1.0, r)
            sigma = dom.c + dom.radius * rel / r
            return sigma, -rel / r
        raise TypeError("NormalField supports Interval and Ball domains")

    def boundary_values(self, points) -> np.ndarray:
        return np.asarray(self.h(as_points(points, self.dim)), dtype=float)

    def velocity(self, x):
        pts = as_points(x, self.dim)
        sigma, nu = self._project(pts)
        d = np.abs(np.asarray(self.domain.signed_distance(pts))).reshape(-1)
        cut = 1.0 - smoothstep(d / self.collar)
        return _like((self.boundary_values(sigma) * cut)[:, None] * nu, x)

    def divergence(self, x):
        pts = as_points(x, self.dim)
        step = 1e-6
        div = np.zeros(len(pts))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = step
            vp = as_points(self.velocity(pts + e), self.dim)[:, k]
            vm = as_points(self.velocity(pts - e), self.dim)[:, k]
            div += (vp - vm) / (2 * step)
        return _restore(div, x, self.dim)

    def mean_flux(self, quad: BoundaryQuad) -> float:
        """``int_{dOmega} h dsigma`` on the given quadrature."""
        return float(np.sum(quad.weights * self.boundary_values(quad.points)))


def velocity(deformation: Deformation, x):
    return deformation.velocity(x)


def deform(deformation: Deformation, eps: float, x):
    return deformation.deform(eps, x)


def jacobian(deformation: Deformation, eps: float, x):
    return deformation.jacobian(eps, x)
