"""Operator identities checked on smooth compactly supported fields in 1D.

* product rule ``(-Delta)^s(uv) = u (-Delta)^s v + v (-Delta)^s u - I(u, v)``:
  exact for the lattice sum, so the useful comparison is the discrete
  ``I(u, v)`` against a continuum quadrature of its defining integral;
* ``V_U'(0) = -2 int grad U . X (-Delta)^s U`` for the pulled-back energy;
* ``V_v(0) = [v]^2``;
* ``b_{N,s} a_{N,s} = b_{1,s}``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._smooth import bump, bump_deriv
from .constants import a_const, b_const
from .geometry import Deformation, Dilation, Interval, Translation
from .operator import Grid, OperatorMatrix, assemble, interaction, pullback_deriv0
from .operator import pullback_value, seminorm_sq


@dataclass(frozen=True)
class SmoothField:
    """``bump(x/a) (1 + c1 x + c2 x^2)``: smooth, supported in (-a, a)."""

    a: float = 0.7
    c1: float = 0.3
    c2: float = 0.0

    @classmethod
    def random(cls, rng: np.random.Generator, a: float = 0.7) -> "SmoothField":
        c1, c2 = rng.uniform(-0.5, 0.5, size=2)
        return cls(a, float(c1), float(c2))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return bump(x / self.a) * (1 + self.c1 * x + self.c2 * x * x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        poly = 1 + self.c1 * x + self.c2 * x * x
        return bump_deriv(x / self.a) / self.a * poly + bump(x / self.a) * (self.c1 + 2 * self.c2 * x)


def interaction_continuum(u: SmoothField, v: SmoothField, x: float, s: float) -> float:
    """``I(u, v)(x)`` in 1D by adaptive quadrature, for fields supported in (-a, a)."""
    a = max(u.a, v.a)
    ux, vx = float(u(x)), float(v(x))
    b = b_const(1, s)

    def f(y):
        return (ux - float(u(y))) * (vx - float(v(y))) * abs(x - y) ** (-1 - 2 * s)

    lo, hi = min(-a, x), max(a, x)
    pieces = [p for p in (lo, x, hi) if lo <= p <= hi]
    total = 0.0
    with warnings.catch_warnings():
        # the integrand is only Hoelder at y = x; quadpack reports roundoff there
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for p, q in zip(pieces, pieces[1:]):
            if q > p:
                total += integrate.quad(f, p, q, limit=200, epsabs=1e-13, epsrel=1e-11)[0]
    if ux * vx != 0.0:
        # both fields vanish outside [lo, hi], which then contains x strictly
        total += ux * vx * ((hi - x) ** (-2 * s) + (x - lo) ** (-2 * s)) / (2 * s)
    return b * total


@dataclass
class ProductRuleResult:
    algebraic_residual: float  # max |A(uv) - u Av - v Au + I_h| / max |A(uv)|
    interaction_error: float  # max |I_h - I| / max |I| over the sampled nodes
    samples: int


def product_rule(op: OperatorMatrix, u: SmoothField, v: SmoothField, stride: int = 8) -> ProductRuleResult:
    x = op.grid.points[:, 0]
    uu, vv = u(x), v(x)
    Ih = interaction(op, uu, vv)
    lhs = op.apply(uu * vv)
    rhs = uu * op.apply(vv) + vv * op.apply(uu) - Ih
    alg = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
    nodes = np.arange(0, len(x), stride)
    exact = np.array([interaction_continuum(u, v, float(x[k]), op.s) for k in nodes])
    err = float(np.max(np.abs(Ih[nodes] - exact)) / np.max(np.abs(exact)))
    return ProductRuleResult(alg, err, len(nodes))


@dataclass
class LemmaResult:
    field: str
    pullback_derivative: float
    gradient_form: float  # -2 int U' X (-Delta)^s U
    scale: float  # denominator of the relative gap
    gap: float


def lemma_check(op: OperatorMatrix, U: SmoothField, deformation: Deformation, name: str) -> LemmaResult:
    """Compare ``V_U'(0)`` from the differentiated kernel with the gradient form.

    For a dilation the gap is measured relative to ``[U]^2`` because the
    derivative ``(N - 2s)[U]^2`` vanishes at ``N = 2s``; otherwise relative to
    the gradient form.
    """
    grid = op.grid
    x = grid.points
    lhs = pullback_deriv0(op, U(x[:, 0]), deformation)
    X = np.asarray(deformation.velocity(x)).reshape(-1)
    rhs = -2 * grid.h * float(np.sum(U.deriv(x[:, 0]) * X * op.apply(U(x[:, 0]))))
    scale = seminorm_sq(op, U(x[:, 0])) if isinstance(deformation, Dilation) else abs(rhs)
    return LemmaResult(name, float(lhs), rhs, scale, abs(lhs - rhs) / scale)


def default_ramps() -> dict:
    """Compactly supported 1D velocity fields for the identity checks."""
    return {
        "dilation": Dilation(1),
        "ramp(0.2, 0.8)": Translation((0.0,), 0.2, 0.8, (1.0,)),
        "ramp(0.1, 0.6) about 0.15": Translation((0.15,), 0.1, 0.6, (1.0,)),
    }


def identity_suite(s: float, n: int = 512, seed: int = 0) -> dict:
    """All identity checks on ``(-1, 1)``; fields are drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    u, v = SmoothField.random(rng, 0.7), SmoothField.random(rng, 0.6)
    grid = Grid.for_domain(Interval(-1.0, 1.0), n)
    op = assemble(grid, None, s)
    prod = product_rule(op, u, v)
    lemmas = [lemma_check(op, u, D, name) for name, D in default_ramps().items()]
    ramp = default_ramps()["ramp(0.2, 0.8)"]
    uu = u(grid.points[:, 0])
    v0 = pullback_value(op, uu, ramp, 0.0)
    sem = seminorm_sq(op, uu)
    ba = {dim: b_const(dim, s) * a_const(dim, s) for dim in (2, 3)}
    return {
        "fields": {"u": u, "v": v},
        "product_rule": prod,
        "lemma": lemmas,
        "pullback_at_zero": (v0, sem),
        "b_times_a": ba,
        "b1": b_const(1, s),
    }
