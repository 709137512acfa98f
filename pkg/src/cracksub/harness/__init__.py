"""Scenario catalog, configuration, convergence studies, export and CLI."""
from .config import load_config, parse_config
from .export import export, to_csv, to_json
from .report import Report, Series, Verdict
from .runner import ConvergenceTable, convergence_study, run_scenario
from .scenarios import CATALOG, CATALOG_VERSION

__all__ = [
    "CATALOG", "CATALOG_VERSION", "ConvergenceTable", "Report", "Series", "Verdict", "convergence_study",
    "export", "load_config", "parse_config", "run_scenario", "to_csv", "to_json",
]
