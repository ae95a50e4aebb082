"""Named checks and the JSON/CSV report written by every CLI subcommand."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

KINDS = ("rel", "abs", "max", "min", "true")


@dataclass
class Check:
    """One verified number.

    ``kind`` fixes how ``value`` is judged:

    rel   ``|value - reference| <= tolerance * |reference|``
    abs   ``|value - reference| <= tolerance``
    max   ``value <= tolerance`` (strict ``<`` when ``strict``)
    min   ``value >= tolerance`` (strict ``>`` when ``strict``)
    true  ``value`` is a boolean that must hold
    """

    name: str
    value: float | bool
    reference: float | None
    tolerance: float | None
    kind: str
    strict: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown check kind {self.kind!r}")

    @property
    def passed(self) -> bool:
        v = self.value
        if self.kind == "true":
            return bool(v)
        if v is None or not math.isfinite(v):
            return False
        if self.kind == "rel":
            return abs(v - self.reference) <= self.tolerance * abs(self.reference)
        if self.kind == "abs":
            return abs(v - self.reference) <= self.tolerance
        if self.kind == "max":
            return v < self.tolerance if self.strict else v <= self.tolerance
        return v > self.tolerance if self.strict else v >= self.tolerance

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "reference": self.reference,
                "tolerance": self.tolerance, "kind": self.kind, "strict": self.strict,
                "pass": self.passed}


@dataclass
class Report:
    config: dict
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    timing: dict | None = None

    def add(self, *args, **kwargs) -> Check:
        check = Check(*args, **kwargs)
        self.checks.append(check)
        return check

    def table(self, name: str) -> list:
        return self.tables.setdefault(name, [])

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"config": self.config, "checks": [c.to_dict() for c in self.checks],
                "tables": self.tables, "timing": self.timing}

    def to_json(self) -> str:
        return json.dumps(_plain(self.to_dict()), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "value", "reference", "tolerance", "kind", "pass"])
        for c in self.checks:
            writer.writerow([c.name, _fmt(c.value), _fmt(c.reference), _fmt(c.tolerance),
                             c.kind, int(c.passed)])
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    return repr(float(v))


def _plain(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj
