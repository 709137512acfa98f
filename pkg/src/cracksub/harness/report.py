"""Report objects produced by scenario runs."""
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Verdict:
    name: str
    value: float
    tolerance: float
    comparison: str  # "<=", ">=" or "in [lo, hi]" style text
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.6g} ({self.comparison} {self.tolerance:.3g})"


def check_le(name, value, tol):
    value = float(value)
    return Verdict(name, value, float(tol), "<=", bool(value <= tol))


def check_ge(name, value, tol):
    value = float(value)
    return Verdict(name, value, float(tol), ">=", bool(value >= tol))


def check_near(name, value, target, tol):
    """|value - target| <= tol."""
    value = float(value)
    return Verdict(name, value, float(tol), f"|x - {float(target):.6g}| <=", bool(abs(value - target) <= tol))


@dataclass
class Series:
    """A quantity sampled along a radius or step-size sequence."""

    quantity: str
    parameter: str  # "radius" or "h"
    xs: list
    values: list
    extrapolant: float = float("nan")
    tolerance: float = float("nan")
    verdict: str = ""


@dataclass
class Report:
    scenario: str
    echo: dict
    series: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)  # name -> (columns, rows)
    extrapolants: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)

    def add(self, *verdicts):
        self.verdicts.extend(verdicts)

    def verdict(self, name):
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def summary(self):
        lines = [f"scenario {self.scenario}"]
        lines += ["  " + v.line() for v in self.verdicts]
        return "\n".join(lines)


def as_float(x):
    if isinstance(x, (np.floating, np.integer)):
        return float(x)
    return x
