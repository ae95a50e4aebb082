"""Acceptance run: one PASS/FAIL line per criterion, printed uncaptured.

Each criterion drives the same runner as the command line, so the checks
and tolerances here are exactly the ones a user gets from `fracshape`.
"""
import time

import pytest

from fracshape import cli

CRITERIA = {
    1: ("kappa identity and cutoff invariance",
        ["kappa", "--s", "0.25,0.5,0.75"], 10.0),
    2: ("interval torsion closed form and convergence",
        ["torsion1d", "--s", "0.5", "--n", "2048"], 30.0),
    3: ("interval dilation three-way derivative",
        ["hadamard-interval", "--s", "0.25,0.5,0.75", "--p", "1", "--n", "2048"], 120.0),
    4: ("disc dilation fd vs boundary formula",
        ["hadamard-disc", "--s", "0.5", "--p", "1,2", "--n", "61"], 600.0),
    5: ("annulus maximum at the centred hole",
        ["annulus-sweep", "--tau", "0.3", "--s", "0.5", "--p", "1,2", "--t-steps", "7",
         "--t-max", "0.6", "--n", "80"], 1800.0),
    6: ("ball stationarity under zero-mean normal fields",
        ["ball-stationarity", "--s", "0.5", "--n", "61"], 300.0),
    7: ("identity suite",
        ["identities", "--s", "0.25,0.5,0.75", "--n", "512"], 60.0),
}


def _say(capsys, line):
    with capsys.disabled():
        print(line)


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    title, argv, limit = CRITERIA[number]
    cfg = cli.resolve(cli.build_parser().parse_args(argv))
    start = time.perf_counter()
    rep = cli.run(cfg)
    elapsed = time.perf_counter() - start
    failed = [c.name for c in rep.checks if not c.passed]
    ok = not failed and elapsed <= limit
    detail = f"{len(rep.checks)} checks, {elapsed:.1f}s of {limit:.0f}s"
    if failed:
        detail += "; failed: " + ", ".join(failed)
    _say(capsys, f"\ncriterion {number} {title}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert not failed
    assert elapsed <= limit


def test_criterion_8_no_printed_numbers(capsys):
    # informational: every target above is a closed form or a property check
    _say(capsys, "\ncriterion 8 reproducibility caveat: PASS (informational, no printed "
                 "reference numbers to match)")
