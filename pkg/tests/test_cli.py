import csv
import io
import json

import pytest

from fracshape import cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_kappa_single_order(capsys):
    code, out = run(["kappa", "--s", "0.5"], capsys)
    assert code == 0
    data = json.loads(out.out)
    row = data["tables"]["kappa"][0]
    assert row["s"] == 0.5
    assert row["numeric"] == pytest.approx(0.39270, abs=1e-5)
    assert row["exact"] == pytest.approx(0.39270, abs=1e-5)
    assert row["rel_err_bump"] <= 1e-3
    assert data["config"]["subcommand"] == "kappa" and data["timing"] is None
    assert all(c["pass"] for c in data["checks"])


def test_torsion_reports_lambda(capsys):
    code, out = run(["torsion1d", "--s", "0.5", "--n", "2048"], capsys)
    assert code == 0
    checks = {c["name"]: c for c in json.loads(out.out)["checks"]}
    lam = checks["lambda s=0.5 n=2048"]
    assert lam["pass"] and lam["reference"] == pytest.approx(0.6366198, abs=1e-7)


def test_tolerance_failure_still_writes_report(tmp_path, capsys):
    # n = 64 is too coarse for the 1% lambda tolerance at s = 0.25
    out = tmp_path / "t.csv"
    code, _ = run(["torsion1d", "--s", "0.25", "--n", "64", "--format", "csv", "--out", str(out)],
                  capsys)
    assert code == 1
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert any(r["pass"] == "0" for r in rows)


@pytest.mark.parametrize("argv", [
    ["hadamard-disc", "--p", "3"],
    ["hadamard-disc", "--s", "0.25", "--p", "3"],
    ["kappa", "--s", "1.5"],
    ["hadamard-interval", "--eps-ladder", "0.1,0.03"],
    ["annulus-sweep", "--tau", "0.5", "--t-max", "0.6"],
    ["identities", "--n", "4"],
    ["kappa", "--figures"],
])
def test_config_errors_exit_2(argv, capsys):
    code, out = run(argv, capsys)
    assert code == 2
    assert "configuration error" in out.err


def test_bad_number_list_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["kappa", "--s", "half"])
    assert exc.value.code == 2


def test_reports_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["identities", "--s", "0.5", "--n", "128", "--seed", "7", "--out", str(path)],
                   capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    other = tmp_path / "c.json"
    run(["identities", "--s", "0.5", "--n", "128", "--seed", "8", "--out", str(other)], capsys)
    assert other.read_bytes() != a.read_bytes()


def test_timing_is_opt_in(capsys):
    _, out = run(["kappa", "--s", "0.5", "--timing"], capsys)
    timing = json.loads(out.out)["timing"]
    assert "total" in timing and "s=0.5 bump" in timing


def test_hadamard_interval_defaults_resolved(capsys):
    code, out = run(["hadamard-interval", "--s", "0.5", "--n", "512"], capsys)
    data = json.loads(out.out)
    assert code == 0
    assert data["config"]["eps_ladder"] == [0.08, 0.04, 0.02]
    assert data["config"]["p"] == [1.0]
    names = [c["name"] for c in data["checks"]]
    assert "fd vs closed form s=0.5 p=1.0" in names
    assert "one-sided agreement s=0.5 p=1.0" in names


def test_figures_written_next_to_report(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    out = tmp_path / "kappa.json"
    code, _ = run(["kappa", "--s", "0.5", "--out", str(out), "--figures"], capsys)
    assert code == 0
    png = tmp_path / "kappa.png"
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
