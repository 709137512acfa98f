"""Scenario execution and convergence studies."""
import warnings
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..errors import ConfigError, ConvergenceWarning, InvalidArgument
from .config import config_hash, resolve
from .report import Report
from .scenarios import CATALOG, CATALOG_VERSION

FLOOR = 1e-11


def _as_config(config):
    if isinstance(config, str):
        return {"scenario": config}
    if not isinstance(config, dict):
        raise ConfigError("<config>", "expected a scenario name or a mapping")
    return config


def run_scenario(config, catalog=None):
    """Run one scenario; ``config`` is a scenario name or a parsed config mapping."""
    catalog = CATALOG if catalog is None else catalog
    scenario, params = resolve(_as_config(config), catalog)
    report = Report(
        scenario=scenario.name,
        echo={"scenario": scenario.name, **params},
        provenance={
            "config_hash": config_hash(scenario.name, params),
            "catalog_version": CATALOG_VERSION,
            "package_version": __version__,
            "seed": params["seed"],
        },
    )
    scenario.run(params, report)
    return report


@dataclass
class ConvergenceTable:
    parameter: str
    values: list
    quantities: dict  # name -> list of values at each parameter value
    slopes: dict = field(default_factory=dict)  # name -> slope (nan when below floor)
    status: dict = field(default_factory=dict)  # name -> "ok" | "converged below floor" | "non-convergent"

    @property
    def warnings(self):
        return [k for k, s in self.status.items() if s == "non-convergent"]

    def rows(self):
        return [(k, self.slopes[k], self.status[k]) for k in self.quantities]


def analyse(parameter, xs, series, floor=FLOOR, min_slope=0.5):
    """Slope and status of one quantity.

    For ``h`` the quantity itself is the error measure (a residual). For
    ``radius`` successive differences |Q_k - Q_(k+1)| measure how fast the
    sequence settles, placed at the larger of the two radii.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(series, dtype=float)
    if parameter == "radius":
        err, where = np.abs(np.diff(ys)), xs[:-1]
        scale = max(float(np.max(np.abs(ys))), 1.0)
    else:
        err, where = np.abs(ys), xs
        scale = 1.0
    if np.all(err <= floor * scale):
        return float("nan"), "converged below floor"
    if np.any(err <= 0):
        keep = err > 0
        err, where = err[keep], where[keep]
        if len(err) < 2:
            return float("nan"), "converged below floor"
    slope = float(np.polyfit(np.log(where), np.log(err), 1)[0])
    return slope, ("ok" if slope >= min_slope else "non-convergent")


def convergence_study(scenario, parameter, values, config=None, catalog=None):
    """Log-log slopes of a scenario's probe quantities over a parameter sweep."""
    catalog = CATALOG if catalog is None else catalog
    if parameter not in ("radius", "h"):
        raise InvalidArgument(f"parameter must be 'radius' or 'h', got {parameter!r}")
    values = [float(v) for v in values]
    if len(values) < 3:
        raise InvalidArgument("a convergence study needs at least three values")
    d = np.diff(values)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise InvalidArgument("values must be strictly monotone")
    cfg = dict(config or {})
    cfg["scenario"] = scenario.name if hasattr(scenario, "name") else scenario
    sc, params = resolve(cfg, catalog)
    if parameter not in sc.probes:
        raise InvalidArgument(f"{sc.name} does not support a {parameter} study")
    samples = [sc.probe(params, parameter, v) for v in values]
    quantities = {k: [s[k] for s in samples] for k in samples[0]}
    table = ConvergenceTable(parameter, values, quantities)
    for k, ys in quantities.items():
        table.slopes[k], table.status[k] = analyse(parameter, values, ys)
    for k in table.warnings:
        warnings.warn(f"{sc.name}: {k} does not converge (slope {table.slopes[k]:.3g})",
                      ConvergenceWarning, stacklevel=2)
    return table
