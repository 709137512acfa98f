"""CSV and JSON serialization of reports (12 significant digits, fixed column order)."""
import csv
import io
import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"
CSV_COLUMNS = ["quantity", "radius_or_h", "value", "extrapolant", "tolerance", "verdict"]
TIP_COLUMNS = ["radius", "J_qs", "J_dyn", "f", "spread", "flags"]


def fmt(x):
    if x is None or x == "":
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return format(x, ".12g")
    return str(x)


def round12(x):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(x, dict):
        return {str(k): round12(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round12(v) for v in x]
    if isinstance(x, np.ndarray):
        return round12(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(format(x, ".12g"))
    return x


def csv_rows(report):
    rows = []
    for s in report.series:
        for x, v in zip(s.xs, s.values):
            rows.append([s.quantity, fmt(x), fmt(v), fmt(s.extrapolant), fmt(s.tolerance), s.verdict])
    for v in report.verdicts:
        rows.append([v.name, "", fmt(v.value), "", fmt(v.tolerance), "pass" if v.passed else "fail"])
    return rows


def _csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def report_dict(report):
    return round12({
        "schema_version": SCHEMA_VERSION,
        "scenario": report.scenario,
        "echo": report.echo,
        "series": [
            {"quantity": s.quantity, "parameter": s.parameter, "xs": list(s.xs), "values": list(s.values),
             "extrapolant": s.extrapolant, "tolerance": s.tolerance, "verdict": s.verdict}
            for s in report.series
        ],
        "tables": {k: {"columns": list(c), "rows": [list(r) for r in rows]} for k, (c, rows) in report.tables.items()},
        "extrapolants": report.extrapolants,
        "verdicts": [
            {"name": v.name, "value": v.value, "tolerance": v.tolerance, "comparison": v.comparison,
             "passed": v.passed}
            for v in report.verdicts
        ],
        "passed": report.passed,
        "provenance": report.provenance,
    })


def to_json(report):
    return json.dumps(report_dict(report), indent=2, sort_keys=True) + "\n"


def to_csv(report):
    return _csv_text(CSV_COLUMNS, csv_rows(report))


def tip_csv(report):
    if "tip" not in report.tables:
        return None
    _, rows = report.tables["tip"]
    return _csv_text(TIP_COLUMNS, [[fmt(c) for c in r] for r in rows])


def export(report, out_dir, formats=("csv", "json")):
    """Write <scenario>.csv, <scenario>.json and <scenario>_tip.csv; return the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    payloads = []
    if "csv" in formats:
        payloads.append((out / f"{report.scenario}.csv", to_csv(report)))
        tip = tip_csv(report)
        if tip is not None:
            payloads.append((out / f"{report.scenario}_tip.csv", tip))
    if "json" in formats:
        payloads.append((out / f"{report.scenario}.json", to_json(report)))
    for path, text in payloads:
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    return written
