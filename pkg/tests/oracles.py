"""Independent reference values computed with mpmath, sharing no code with the package."""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 30


def b_1d(s):
    return s * (1 - s) * mp.pi ** mp.mpf(-0.5) * 4**s * mp.gamma(mp.mpf(0.5) + s) / mp.gamma(2 - s)


def frac_laplacian_1d(f, x, s, breaks=(), support=(-1, 1)):
    """``b int_0^inf (2 f(x) - f(x+y) - f(x-y)) y^{-1-2s} dy`` with f vanishing outside ``support``.

    ``breaks`` are extra y-values where the integrand is not smooth.
    """
    x, s = mp.mpf(x), mp.mpf(s)
    fx = f(x)
    far = max(x - support[0], support[1] - x)  # both shifts leave the support beyond this
    # on (0, y0) the second difference is -f''(x) y^2 + O(y^4); quadrature nodes
    # closer to 0 would only see cancellation noise
    y0 = min([mp.mpf("1e-4")] + [mp.mpf(b) / 4 for b in breaks if b > 0])
    pts = sorted({y0, far, *[mp.mpf(b) for b in breaks if y0 < b < far]})
    g = lambda y: (2 * fx - f(x + y) - f(x - y)) * y ** (-1 - 2 * s)
    f2, f4 = mp.diff(f, x, 2), mp.diff(f, x, 4)
    near = mp.quad(g, pts) - f2 * y0 ** (2 - 2 * s) / (2 - 2 * s) \
        - f4 / 12 * y0 ** (4 - 2 * s) / (4 - 2 * s)
    tail = 2 * fx * far ** (-2 * s) / (2 * s)
    return b_1d(s) * (near + tail)


def smooth_field(a, c1=0.0, c2=0.0):
    """``exp(1 - 1/(1 - (x/a)^2)) (1 + c1 x + c2 x^2)`` on |x| < a, zero elsewhere."""
    def f(x):
        t = mp.mpf(x) / a
        if abs(t) >= 1:
            return mp.mpf(0)
        return mp.exp(1 - 1 / (1 - t * t)) * (1 + c1 * x + c2 * x * x)
    return f


def torsion_profile(s):
    """``ell (1 - x^2)_+^s`` with ``ell = 4^{-s} sqrt(pi) / (Gamma(1/2+s) Gamma(1+s))``."""
    ell = 4 ** (-mp.mpf(s)) * mp.sqrt(mp.pi) / (mp.gamma(mp.mpf(0.5) + s) * mp.gamma(1 + s))
    return lambda x: ell * (1 - x * x) ** s if abs(x) < 1 else mp.mpf(0)


def frac_laplacian_gaussian_at_0(s):
    """``(-Delta)^s exp(-x^2/2)`` at 0 from the Fourier side: ``(1/pi) int_0^inf xi^{2s} sqrt(2 pi) e^{-xi^2/2}``.

    The moment is ``2^s Gamma(1/2+s) / sqrt(pi)`` in closed form.
    """
    return 2**s * mp.gamma(mp.mpf(0.5) + s) / mp.sqrt(mp.pi)


def torsion_lambda_interval(s):
    """``1 / int (torsion profile)`` for (-1, 1)."""
    w = torsion_profile(s)
    return 1 / mp.quad(w, [-1, 1])


def kappa_closed(s):
    return mp.gamma(1 + s) ** 2 / 2


def a_closed(dim, s):
    """``int_{R^{N-1}} (1+|z|^2)^{-(N+2s)/2} dz`` by the Beta-function closed form."""
    return mp.pi ** (mp.mpf(dim - 1) / 2) * mp.gamma(mp.mpf(0.5) + s) / mp.gamma(mp.mpf(dim) / 2 + s)


def ball_lambda_2d(s):
    """Torsion value of the unit disc: ``w = c (1-r^2)^s``, ``c = 1 / (4^s Gamma(1+s)^2)``."""
    c = 1 / (4**s * mp.gamma(1 + s) ** 2)
    mass = 2 * mp.pi * mp.quad(lambda r: (1 - r * r) ** s * r, [0, 1])
    return 1 / (c * mass)


def interaction_1d(u, v, x, s, support=1.0):
    """``b int (u(x)-u(y))(v(x)-v(y)) |x-y|^{-1-2s} dy`` for u, v vanishing outside (-support, support)."""
    x = mp.mpf(x)
    ux, vx = u(x), v(x)
    f = lambda y: (ux - u(y)) * (vx - v(y)) * abs(x - y) ** (-1 - 2 * mp.mpf(s))
    lo, hi = -mp.mpf(support), mp.mpf(support)
    total = mp.quad(f, [lo, x, hi])
    if ux * vx != 0:
        total += ux * vx * ((hi - x) ** (-2 * s) + (x - lo) ** (-2 * s)) / (2 * s)
    return b_1d(s) * total
