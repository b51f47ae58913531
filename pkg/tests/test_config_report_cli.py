import csv
import json

import pytest

from besovlab import __version__
from besovlab.experiments.cli import main
from besovlab.experiments.config import ConfigError, ExperimentConfig, load_config, parse_config_text
from besovlab.experiments.report import build_report, emit, load_report, report_hash, series_csv, to_json
from besovlab.experiments.suites import BracketInvalid, SuiteResult, run_suite, threshold_search


def test_parse_config():
    v = parse_config_text("# comment\nkind = simulate\ngrid=64  # trailing\nformulation='effective'\nstructure = no\np = inf\n")
    assert v == {"kind": "simulate", "grid": 64, "formulation": "effective", "structure": False, "p": float("inf")}


@pytest.mark.parametrize("text", ["bogus = 1", "grid", "grid = abc"])
def test_parse_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_validation_collects_field_errors():
    with pytest.raises(ConfigError) as e:
        ExperimentConfig(grid=30, dim=4, eps=2.0)
    msg = str(e.value)
    assert "grid" in msg and "dim" in msg and "eps" in msg


def test_load_config_overrides(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("kind = lp_suite\ngrid = 32\n")
    cfg = load_config(p, grid=64, seed=None)
    assert cfg.grid == 64 and cfg.kind == "lp_suite"
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_empty_series_gives_header_only_csv():
    assert series_csv({}, ["t", "mass"]) == "E,E1,E2,minrho,t,mass\n"


def _simulate_cfg(tmp_path, **kw):
    base = dict(kind="simulate", grid=16, T=0.5, steps=20, structure=False, out=str(tmp_path))
    base.update(kw)
    return ExperimentConfig(**base)


def test_csv_column_count(tmp_path):
    cfg = _simulate_cfg(tmp_path, format="csv", extras="t,mass,l2u")
    rep = build_report(cfg, run_suite(cfg))
    paths = emit(rep, cfg.out, cfg.format, cfg.extra_list)
    rows = list(csv.reader(paths[0].open()))
    assert rows[0] == ["E", "E1", "E2", "minrho", "t", "mass", "l2u"]
    assert all(len(r) == 4 + 3 for r in rows)
    assert len(rows) == 1 + len(rep["series"]["E"])


def test_zero_amplitude_run(tmp_path):
    cfg = _simulate_cfg(tmp_path, eps=0.0)
    res = run_suite(cfg)
    for name in ("E", "E1", "E2"):
        assert all(v == 0 for v in res.series[name])
    assert all(v == 1.0 for v in res.series["minrho"])


def test_json_roundtrip_and_determinism(tmp_path):
    cfg = _simulate_cfg(tmp_path)
    a = build_report(cfg, run_suite(cfg))
    b = build_report(cfg, run_suite(cfg))
    assert report_hash(a) == report_hash(b)
    path = emit(a, tmp_path, "json", [])[0]
    back = load_report(path)
    assert back == a
    assert to_json(back) == path.read_text()
    assert a["version"] == __version__
    assert a["config"]["grid"] == 16


def test_inequality_records_carry_grid(tmp_path):
    cfg = ExperimentConfig(kind="linear_suite", grid=16, grids="16,32", out=str(tmp_path))
    rep = build_report(cfg, run_suite(cfg))
    assert rep["inequalities"]
    for r in rep["inequalities"]:
        assert set(r) >= {"lhs", "rhs", "ratio", "grid"}
    assert all("grids" in c for c in rep["checks"])


def test_report_sanitizes_non_finite():
    res = SuiteResult(tables={"x": float("inf")})
    rep = build_report(ExperimentConfig(), res)
    assert json.loads(to_json(rep))["tables"]["x"] == "inf"


def test_threshold_search_bracket_invalid():
    cfg = ExperimentConfig(kind="threshold_search", grid=16, T=1.0, steps=40, eps_low=0.95, eps_high=0.99)
    with pytest.raises(BracketInvalid):
        threshold_search(cfg)


def test_threshold_search_no_failure():
    cfg = ExperimentConfig(kind="threshold_search", grid=16, T=0.2, steps=20, eps_low=1e-4, eps_high=1e-3)
    res = threshold_search(cfg)
    assert res.tables["threshold"]["status"] == "NoFailureFound"
    assert res.passed


def test_threshold_search_bracket():
    cfg = ExperimentConfig(kind="threshold_search", grid=16, T=1.0, steps=50, eps_low=0.05, eps_high=0.95)
    res = threshold_search(cfg)
    lo, hi = res.tables["threshold"]["bracket"]
    assert hi / lo - 1 <= 0.10
    assert res.passed


def test_scaling_examples():
    import numpy as np

    from besovlab.experiments.measure import scaling_ratios
    from besovlab.spectral import SpectralField, TorusGrid, VectorField

    g = TorusGrid(2, 32)
    c = np.zeros(g.shape, dtype=complex)
    c[2, 0] = c[-2, 0] = 0.5
    mode = SpectralField(g, c)
    r = scaling_ratios(mode, VectorField((mode, mode)), 2.0)
    assert r["q_cell"] == pytest.approx(1.0, rel=1e-14)
    assert r["u_cell"] == pytest.approx(1.0, rel=1e-14)
    assert r["q_torus"] == pytest.approx(2.0, rel=1e-14)
    zero = SpectralField.constant(g, 1.0)
    r = scaling_ratios(zero, VectorField((zero, zero)), 2.0)
    assert r["q_norm"] == 0 and r["u_norm"] == 0


def test_cli_exit_codes(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "lp.cfg"
    cfg.write_text("kind = lp_suite\ngrid = 32\n")
    monkeypatch.setenv("BESOVLAB_OUT_DIR", str(tmp_path / "env"))
    assert main(["run", str(cfg)]) == 0
    assert (tmp_path / "env" / "report.json").exists()
    assert main(["run", str(cfg), "--out", str(tmp_path / "flag"), "--format", "csv"]) == 0
    assert (tmp_path / "flag" / "checks.csv").exists()
    bad = tmp_path / "bad.cfg"
    bad.write_text("kind = lp_suite\ncolour = red\n")
    assert main(["run", str(bad)]) == 2
    assert "unknown key" in capsys.readouterr().err


def test_cli_nonzero_on_failed_check(tmp_path):
    cfg = tmp_path / "lin.cfg"
    cfg.write_text("kind = linear_suite\ngrid = 16\ngrids = 16,32\n")
    # the high-frequency damping limit check misses its 0.01% bound
    assert main(["run", str(cfg), "--out", str(tmp_path), "--quiet"]) == 1
    rep = json.loads((tmp_path / "report.json").read_text())
    failed = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert failed == ["high-frequency damping limit"]
