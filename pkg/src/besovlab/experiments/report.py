"""Report assembly and emission (JSON and CSV)."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .. import __version__
from .config import ExperimentConfig
from .suites import SuiteResult

SERIES_HEAD = ("E", "E1", "E2", "minrho")


def _plain(x: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, tuples to lists, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, complex):
        return [_plain(x.real), _plain(x.imag)]
    return x


def build_report(cfg: ExperimentConfig, result: SuiteResult) -> dict:
    return _plain({
        "version": __version__,
        "kind": cfg.kind,
        "config": cfg.echo(),
        "passed": result.passed,
        "checks": [c.to_dict() for c in result.checks],
        "inequalities": [r.to_dict() for r in result.inequalities],
        "series": result.series,
        "tables": result.tables,
    })


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def report_hash(report: dict) -> str:
    return hashlib.sha256(to_json(report).encode()).hexdigest()


def series_columns(series: dict[str, list[float]], extras: list[str]) -> list[str]:
    return list(SERIES_HEAD) + list(extras)


def series_csv(series: dict[str, list[float]], extras: list[str]) -> str:
    """One row per snapshot; the header names E, E1, E2, minrho and then the extras."""
    cols = series_columns(series, extras)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    n = len(series.get("E", []))
    for i in range(n):
        w.writerow([repr(float(series[c][i])) for c in cols])
    return buf.getvalue()


def checks_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "passed", "value", "limit", "grids"])
    for c in report["checks"]:
        w.writerow([c["name"], c["passed"], c["value"], c["limit"], " ".join(str(g) for g in c["grids"])])
    return buf.getvalue()


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit(report: dict, out_dir: str | Path, fmt: str, extras: list[str]) -> list[Path]:
    """Write the report files and return their paths."""
    out = Path(out_dir)
    if fmt == "json":
        return [_write(out / "report.json", to_json(report))]
    if fmt == "csv":
        return [
            _write(out / "series.csv", series_csv(report["series"], extras)),
            _write(out / "checks.csv", checks_csv(report)),
        ]
    raise ValueError(f"unknown format {fmt!r}")


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
