"""Special functions and normalization constants.

Everything here is a pure scalar function of ``s`` (and the dimension), so
callers can use them freely from worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class FracParams:
    """Order ``s``, exponent ``p`` and dimension of the variational problem.

    Raises ``ValueError`` on construction when ``p`` is not subcritical.
    """

    s: float
    p: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.p < 1.0:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.p >= self.critical_exponent:
            raise ValueError(
                f"p={self.p} is not subcritical for dim={self.dim}, s={self.s} "
                f"(need p < {self.critical_exponent})"
            )

    @property
    def critical_exponent(self) -> float:
        """``2N/(N-2s)`` when ``2s < N``, otherwise infinity."""
        if 2 * self.s < self.dim:
            return 2 * self.dim / (self.dim - 2 * self.s)
        return math.inf


def _check_s(s: float) -> None:
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")


def gamma(x: float) -> float:
    """Gamma function for real ``x > 0`` (Lanczos, ~1e-15 relative)."""
    if x <= 0:
        raise ValueError(f"gamma is only defined here for x > 0, got {x}")
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def b_const(dim: int, s: float) -> float:
    """Normalization ``b_{N,s}`` making the Fourier symbol of the operator ``|xi|^{2s}``."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    _check_s(s)
    return (
        s * (1 - s) * math.pi ** (-dim / 2) * 4.0**s
        * gamma(dim / 2 + s) / gamma(2 - s)
    )


def ell_s(s: float) -> float:
    """Constant of the 1D torsion function ``ell_s (1 - x^2)_+^s`` on (-1, 1)."""
    _check_s(s)
    return 2.0 ** (-2 * s) * gamma(0.5) / (gamma(s + 0.5) * gamma(1 + s))


def kappa_exact(s: float) -> float:
    """Closed form ``Gamma(1+s)^2 / 2`` of the boundary constant kappa_s."""
    _check_s(s)
    return gamma(1 + s) ** 2 / 2


def torsion_l1_norm_interval(s: float) -> float:
    """``||w_0||_{L^1}`` for the torsion function of (-1, 1)."""
    ell = ell_s(s)
    return 2.0 ** (2 * s) * ell**2 * gamma(s + 1) ** 2 / (s + 0.5)


def ball_torsion_constant(dim: int, s: float) -> float:
    """``c`` such that ``c (1 - |x|^2)_+^s`` solves the torsion problem in the unit ball."""
    _check_s(s)
    return gamma(dim / 2) / (4.0**s * gamma(1 + s) * gamma(dim / 2 + s))


def ball_torsion_lambda(dim: int, s: float, radius: float = 1.0) -> float:
    """Exact ``lambda_{s,1}`` of a ball, i.e. the reciprocal L^1 norm of its torsion function."""
    c = ball_torsion_constant(dim, s)
    # |S^{N-1}| * int_0^1 (1-r^2)^s r^{N-1} dr = pi^{N/2} Gamma(s+1) / Gamma(N/2+s+1)
    mass = math.pi ** (dim / 2) * gamma(s + 1) / gamma(dim / 2 + s + 1)
    return radius ** (-(dim + 2 * s)) / (c * mass)


def ball_torsion_psi(dim: int, s: float, radius: float = 1.0) -> float:
    """Boundary quotient ``u/delta^s`` of the normalized torsion minimizer of a ball."""
    c = ball_torsion_constant(dim, s)
    lam = ball_torsion_lambda(dim, s, radius)
    # w_R = c (R^2 - |x|^2)^s ~ c (2R)^s delta^s near the sphere
    return lam * c * 2.0**s * radius**s


def a_const(dim: int, s: float) -> float:
    """``a_{N,s} = int_{R^{N-1}} (1 + |z|^2)^{-(N+2s)/2} dz`` by radial quadrature."""
    _check_s(s)
    if dim == 1:
        return 1.0
    m = dim - 1
    sphere = 2 * math.pi ** (m / 2) / gamma(m / 2)
    val, _ = integrate.quad(
        lambda r: r ** (m - 1) * (1 + r * r) ** (-(dim + 2 * s) / 2),
        0.0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200,
    )
    return sphere * val
