import csv
import io
import json
import math

import numpy as np
import pytest

from fracshape.report import Check, Report


@pytest.mark.parametrize("check, expected", [
    (Check("a", 1.005, 1.0, 1e-2, "rel"), True),
    (Check("a", 1.02, 1.0, 1e-2, "rel"), False),
    (Check("a", 0.3, 0.0, 0.5, "abs"), True),
    (Check("a", 0.0, None, 0.0, "max"), True),
    (Check("a", 0.0, None, 0.0, "max", strict=True), False),
    (Check("a", 2.0, None, 2.0, "min"), True),
    (Check("a", 2.0, None, 2.0, "min", strict=True), False),
    (Check("a", True, None, None, "true"), True),
    (Check("a", np.bool_(False), None, None, "true"), False),
    (Check("a", math.nan, None, 1.0, "max"), False),
    (Check("a", None, 1.0, 1.0, "rel"), False),
])
def test_check_kinds(check, expected):
    assert check.passed is expected


def test_unknown_kind():
    with pytest.raises(ValueError):
        Check("a", 1.0, 1.0, 1.0, "approx")


def test_report_json_and_csv():
    rep = Report(config={"s": [0.5], "n": np.int64(8)})
    rep.add("x", np.float64(1.0), 1.0, 1e-3, "rel")
    rep.add("y", math.inf, None, 1.0, "max")
    rep.table("rows").append({"v": np.arange(2)})
    assert not rep.passed
    data = json.loads(rep.to_json())
    assert set(data) == {"config", "checks", "tables", "timing"}
    assert data["config"]["n"] == 8
    assert data["checks"][0]["pass"] is True
    assert data["checks"][1]["value"] == "inf"
    assert data["tables"]["rows"][0]["v"] == [0, 1]
    assert rep.to_json().endswith("}\n")
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert [r["name"] for r in rows] == ["x", "y"]
    assert rows[0]["pass"] == "1" and rows[1]["pass"] == "0"
    assert rows[1]["reference"] == ""


def test_report_json_is_deterministic():
    def build():
        rep = Report(config={"a": 1})
        rep.add("x", 0.1 + 0.2, 0.3, 1e-12, "rel")
        return rep.to_json()

    assert build() == build()
