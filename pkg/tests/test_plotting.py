import pytest

pytest.importorskip("matplotlib")

from fracshape import plotting  # noqa: E402

HADAMARD = {"reports": [{"s": 0.5, "p": 1.0, "eps_ladder": [0.08, 0.04, 0.02],
                         "quotients_plus": [-1.2, -1.25, -1.26],
                         "quotients_minus": [-1.32, -1.29, -1.28],
                         "boundary_formula": -1.27, "closed_form": -1.273}]}

TABLES = {
    "torsion1d": {"profile": [{"x": x / 10, "exact": 1 - (x / 10) ** 2, "discrete": 1 - (x / 10) ** 2}
                              for x in range(-9, 10)],
                  "convergence": [{"h": 0.004, "max_error": 0.01}, {"h": 0.001, "max_error": 0.005}]},
    "kappa": {"kappa": [{"s": s, "rel_err_bump": 1e-8, "rel_err_beta": 0.0} for s in (0.25, 0.5)]},
    "hadamard-interval": HADAMARD,
    "hadamard-disc": HADAMARD,
    "annulus-sweep": {"sweep_p1_s0.5": [{"t": t / 10, "lam": 1 - t / 100, "dlam": -t / 50}
                                        for t in range(7)]},
    "ball-stationarity": {"stationarity": [{"s": 0.5, "field": "f", "derivative": -1e-3,
                                            "bound": 5e-3}]},
    "identities": {"lemma": [{"s": 0.5, "field": "dilation", "gap": 1e-4}]},
}


@pytest.mark.parametrize("name", sorted(plotting.FIGURES))
def test_every_figure_renders_deterministically(name, tmp_path):
    a = plotting.render(name, TABLES[name], tmp_path / "a")
    b = plotting.render(name, TABLES[name], tmp_path / "b")
    assert [p.name for p in a] == ["a.png"]
    assert a[0].read_bytes() == b[0].read_bytes()
    assert a[0].read_bytes()[:4] == b"\x89PNG"
