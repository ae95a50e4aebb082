import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from fracshape.constants import b_const
from fracshape.kappa import CUTOFFS, Cutoff, _frac_g_far, _frac_g_near, kappa_numeric


@pytest.mark.parametrize("name", CUTOFFS)
def test_cutoff_shape(name):
    cut = Cutoff(name)
    r = np.linspace(-3, 3, 601)
    rho = cut.rho(r)
    assert np.all(rho[np.abs(r) <= 1] == 1.0)
    assert np.all(rho[np.abs(r) >= 2] == 0.0)
    assert np.all(np.diff(rho[r >= 0]) <= 1e-15)
    assert np.allclose(rho, rho[::-1])
    assert np.allclose([cut.rho_scalar(x) for x in r], rho, atol=1e-14)


@pytest.mark.parametrize("name", CUTOFFS)
@given(st.floats(min_value=-1.95, max_value=1.95))
@settings(max_examples=40)
def test_cutoff_derivative(name, r):
    cut = Cutoff(name)
    e = 1e-6
    num = (cut.rho_scalar(r + e) - cut.rho_scalar(r - e)) / (2 * e)
    assert float(cut.drho(r)) == pytest.approx(num, abs=1e-6)


def test_unknown_cutoff():
    with pytest.raises(ValueError):
        Cutoff("gaussian")


@pytest.mark.parametrize("s", [0.3, 0.7])
def test_near_and_far_forms_agree_beyond_support(s):
    # the second-difference form is valid everywhere, the convolution only past r = 2
    cut, b = Cutoff("bump"), b_const(1, s)
    for r in (2.2, 3.0):
        assert _frac_g_near(r, s, cut, b) == pytest.approx(_frac_g_far(r, s, cut, b), rel=1e-7)


def test_near_form_against_mpmath():
    s = 0.5
    cut = Cutoff("beta")

    def g(x):
        x = mp.mpf(x)
        if x <= 0 or x >= 2:
            return mp.mpf(0)
        t = 2 - x
        rho = 1 if t >= 1 else sum(mp.binomial(9, j) * t**j * (1 - t) ** (9 - j)
                                   for j in range(5, 10))
        return -(x**s) * rho

    r = 1.4
    # kinks of the shifted cutoff sit where r +- y crosses 0, 1 and 2
    brute = oracles.frac_laplacian_1d(g, r, s, breaks=(0.4, 0.6, 1.4), support=(0, 2))
    assert _frac_g_near(r, s, cut, b_const(1, s)) == pytest.approx(float(brute), rel=1e-6)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_kappa_matches_gamma_identity(s):
    for name in CUTOFFS:
        res = kappa_numeric(s, name)
        assert res.value == pytest.approx(float(oracles.kappa_closed(s)), rel=1e-5)
        assert res.value == pytest.approx(res.near + res.mid + res.tail, rel=1e-14)
        assert res.tail_bound < 1e-8


def test_kappa_independent_of_truncation_radius():
    a = kappa_numeric(0.4, "bump", r_max=20.0)
    b = kappa_numeric(0.4, "bump", r_max=80.0)
    assert a.value == pytest.approx(b.value, rel=1e-7)
    assert a.tail != pytest.approx(b.tail)


def test_kappa_argument_errors():
    with pytest.raises(ValueError):
        kappa_numeric(1.0)
    with pytest.raises(ValueError):
        kappa_numeric(0.5, r_max=2.0)
    with pytest.raises(ValueError):
        kappa_numeric(0.5, "box")
