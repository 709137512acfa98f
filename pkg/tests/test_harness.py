import csv
import json
import math

import numpy as np
import pytest

from cracksub.errors import ConfigError, ConvergenceWarning, InvalidArgument
from cracksub.harness import CATALOG, convergence_study, export, parse_config, run_scenario, to_csv, to_json
from cracksub.harness.cli import main
from cracksub.harness.export import CSV_COLUMNS, SCHEMA_VERSION, TIP_COLUMNS, fmt
from cracksub.harness.report import check_le
from cracksub.harness.runner import analyse
from cracksub.harness.scenarios import Scenario

REQUIRED = {
    "antiplane_mode3", "gl_scalar_manufactured", "gl_vector_frame_indifferent", "ferroelectric_uniform_E",
    "strain_gradient_quadratic", "process_zone_translation",
}


def test_catalog_has_required_scenarios():
    assert REQUIRED <= set(CATALOG)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_every_scenario_passes(name):
    report = run_scenario(name)
    assert report.verdicts and report.passed, report.summary()
    for v in report.verdicts:
        assert math.isfinite(v.tolerance) and v.comparison


def test_antiplane_classical_limit():
    v = run_scenario("antiplane_mode3").verdict("J_qs relative error vs K^2/(2 mu)")
    assert v.value <= 0.005 and v.tolerance == 0.005


def test_gl_scalar_slope():
    v = run_scenario("gl_scalar_manufactured").verdict("micro balance residual h-slope")
    assert abs(v.value - 2.0) <= 0.2


def test_empty_outputs_echo_only():
    report = run_scenario({"scenario": "antiplane_mode3", "outputs": []})
    assert report.verdicts == [] and report.series == [] and report.tables == {}
    assert report.echo["scenario"] == "antiplane_mode3" and report.echo["outputs"] == []
    assert report.provenance["config_hash"]


@pytest.mark.parametrize("config, key", [
    ({"scenario": "nope"}, "scenario"),
    ({}, "scenario"),
    ({"scenario": "antiplane_mode3", "model": {"mu": "soft"}}, "model.mu"),
    ({"scenario": "antiplane_mode3", "model": {"shear": 1.0}}, "model.shear"),
    ({"scenario": "antiplane_mode3", "model": {"mu": -1.0}}, "model.mu"),
    ({"scenario": "antiplane_mode3", "outputs": ["bogus"]}, "outputs"),
    ({"scenario": "antiplane_mode3", "contours": {"n_nodes": 4}}, "contours.n_nodes"),
])
def test_config_errors_carry_key_path(config, key):
    with pytest.raises(ConfigError) as exc:
        run_scenario(config)
    assert exc.value.key == key


def test_toml_config_overrides():
    cfg = parse_config('scenario = "antiplane_mode3"\noutputs = ["j_qs"]\n[field]\nK = 2.0\n[model]\nmu = 3\n')
    report = run_scenario(cfg)
    assert report.echo["field"]["K"] == 2.0 and report.echo["model"]["mu"] == 3.0
    assert [v.name for v in report.verdicts] == ["J_qs relative error vs K^2/(2 mu)"]
    assert report.passed
    with pytest.raises(ConfigError):
        parse_config("scenario = ")


def test_config_hash_tracks_parameters():
    a = run_scenario("antiplane_mode3").provenance
    b = run_scenario({"scenario": "antiplane_mode3", "field": {"K": 2.0}}).provenance
    assert a["config_hash"] != b["config_hash"]
    assert a["catalog_version"] and a["package_version"] and a["seed"] == 42


# -- convergence ---------------------------------------------------------------------------


def test_exact_quantity_converged_below_floor():
    table = convergence_study("antiplane_mode3", "radius", [0.4, 0.2, 0.1])
    assert table.status["J_qs"] == "converged below floor" and math.isnan(table.slopes["J_qs"])
    assert table.warnings == []


def test_residual_slope_two():
    table = convergence_study("gl_scalar_manufactured", "h", [0.1, 0.05, 0.025])
    for k in table.quantities:
        assert abs(table.slopes[k] - 2.0) <= 0.2 and table.status[k] == "ok"


class Stalling(Scenario):
    name = "stalling"
    description = "a quantity that never settles"
    defaults = {"seed": 42, "outputs": []}
    probes = ("h",)

    def probe(self, params, parameter, value):
        return {"stuck": 0.3 + 0.01 * np.sin(7 * value), "quadratic": value**2}


def test_non_convergent_flagged():
    with pytest.warns(ConvergenceWarning):
        table = convergence_study("stalling", "h", [0.4, 0.2, 0.1, 0.05], catalog={"stalling": Stalling()})
    assert table.status["stuck"] == "non-convergent" and math.isfinite(table.slopes["stuck"])
    assert table.status["quadratic"] == "ok" and table.slopes["quadratic"] == pytest.approx(2.0)
    assert table.warnings == ["stuck"]


@pytest.mark.parametrize("values", [[0.1, 0.05], [0.1, 0.2, 0.15]])
def test_convergence_rejects_bad_values(values):
    with pytest.raises(InvalidArgument):
        convergence_study("gl_scalar_manufactured", "h", values)


def test_convergence_rejects_unknown_parameter():
    with pytest.raises(InvalidArgument):
        convergence_study("gl_scalar_manufactured", "time", [1, 2, 3])
    with pytest.raises(InvalidArgument):
        convergence_study("gl_vector_frame_indifferent", "h", [0.1, 0.05, 0.025])


def test_analyse_radius_differences():
    slope, status = analyse("radius", [0.4, 0.2, 0.1, 0.05], [1 + 0.4**2, 1 + 0.2**2, 1 + 0.1**2, 1 + 0.05**2])
    assert status == "ok" and slope == pytest.approx(2.0)


# -- export ---------------------------------------------------------------------------------


def test_fmt_twelve_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(2) == "2" and fmt(True) == "true" and fmt(float("nan")) == "nan" and fmt(None) == ""


def test_export_byte_identical(tmp_path):
    a = export(run_scenario("antiplane_mode3"), tmp_path / "a")
    b = export(run_scenario("antiplane_mode3"), tmp_path / "b")
    assert [p.name for p in a] == [p.name for p in b] == ["antiplane_mode3.csv", "antiplane_mode3_tip.csv",
                                                          "antiplane_mode3.json"]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_csv_header(tmp_path):
    paths = export(run_scenario("antiplane_mode3"), tmp_path)
    with open(paths[0], newline="") as fh:
        assert next(csv.reader(fh)) == ["quantity", "radius_or_h", "value", "extrapolant", "tolerance", "verdict"]
    assert CSV_COLUMNS == ["quantity", "radius_or_h", "value", "extrapolant", "tolerance", "verdict"]
    assert paths[1].read_text().splitlines()[0] == ",".join(TIP_COLUMNS)


def test_json_round_trip():
    report = run_scenario("gl_scalar_manufactured")
    text = to_json(report)
    data = json.loads(text)
    assert data["schema_version"] == SCHEMA_VERSION and data["scenario"] == "gl_scalar_manufactured"
    assert json.dumps(data, indent=2, sort_keys=True) + "\n" == text
    for v, d in zip(report.verdicts, data["verdicts"]):
        assert d["name"] == v.name and d["passed"] == v.passed
        assert d["value"] == float(format(v.value, ".12g"))
    for s, d in zip(report.series, data["series"]):
        assert d["values"] == [float(format(x, ".12g")) for x in s.values]


def test_csv_rows_cover_verdicts():
    report = run_scenario("process_zone_translation")
    rows = list(csv.reader(to_csv(report).splitlines()))[1:]
    assert [r[0] for r in rows] == [v.name for v in report.verdicts]
    assert all(r[5] == "pass" for r in rows)


def test_export_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        export(run_scenario("process_zone_translation"), blocker / "sub")


# -- CLI --------------------------------------------------------------------------------------


def test_cli_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in REQUIRED)


def test_cli_run(tmp_path, capsys):
    assert main(["run", "--scenario", "antiplane_mode3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "antiplane_mode3.json").exists()
    assert "PASS" in capsys.readouterr().out


class Failing(Scenario):
    name = "failing"
    description = "always fails one verdict"
    defaults = {"seed": 42, "outputs": ["check"]}
    outputs = ("check",)

    def run(self, params, report):
        if "check" in params["outputs"]:
            report.add(check_le("deliberately too large", 1.0, 0.5))


def test_cli_exit_code_follows_verdicts(monkeypatch, tmp_path, capsys):
    monkeypatch.setitem(CATALOG, "failing", Failing())
    assert main(["run", "--scenario", "failing"]) == 1
    assert "FAIL deliberately too large" in capsys.readouterr().out
    cfg = tmp_path / "c.toml"
    cfg.write_text('scenario = "failing"\noutputs = []\n')
    assert main(["run", "--config", str(cfg)]) == 0


def test_cli_bad_config(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('scenario = "antiplane_mode3"\n[model]\nmu = "x"\n')
    assert main(["run", "--config", str(cfg)]) == 2
    assert "model.mu" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.toml")]) == 2


def test_cli_verify(capsys):
    assert main(["verify"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_cli_converge(capsys):
    assert main(["converge", "--scenario", "gl_scalar_manufactured", "--param", "h",
                 "--values", "0.1,0.05,0.025"]) == 0
    assert "ok" in capsys.readouterr().out
    assert main(["converge", "--scenario", "gl_scalar_manufactured", "--param", "h", "--values", "0.1,0.05"]) == 2
