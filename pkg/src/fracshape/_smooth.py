"""Smooth transition profiles shared by deformations and the kappa cutoffs."""

from __future__ import annotations

import numpy as np
from scipy import special


def _f(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _df(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = np.exp(-1.0 / tp) / tp**2
    return out


def smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    a, b = _f(t), _f(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


def smoothstep_deriv(t):
    t = np.asarray(t, dtype=float)
    a, b = _f(t), _f(1.0 - t)
    da, db = _df(t), -_df(1.0 - t)
    return (da * b - a * db) / (a + b) ** 2


def bump(t):
    """``exp(1 - 1/(1 - t^2))`` on |t| < 1, zero elsewhere; equals 1 at t = 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


def bump_deriv(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti)) * (-2 * ti / (1 - ti * ti) ** 2)
    return out


def beta_step(t, k: int = 5):
    """Polynomial step: CDF of the Beta(k, k) mollifier, C^{k-1} at both ends."""
    return special.betainc(k, k, np.clip(t, 0.0, 1.0))


def beta_step_deriv(t, k: int = 5):
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return t ** (k - 1) * (1 - t) ** (k - 1) / special.beta(k, k)
