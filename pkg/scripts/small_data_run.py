"""Small-data run of the full system; writes the functional series as CSV."""
import argparse
import sys

from besovlab.experiments.config import ExperimentConfig
from besovlab.experiments.report import build_report, emit
from besovlab.experiments.suites import run_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=32)
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--gamma", type=float, default=1.4)
    ap.add_argument("--T", type=float, default=10.0)
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--formulation", default="original")
    ap.add_argument("--viscosity", default="constant")
    ap.add_argument("--out", default="results/small_data")
    a = ap.parse_args()
    cfg = ExperimentConfig(kind="simulate", grid=a.grid, eps=a.eps, gamma=a.gamma, T=a.T, steps=a.steps,
                           formulation=a.formulation, viscosity=a.viscosity, extras="t,mass,maxu",
                           structure=False, out=a.out, format="csv")
    res = run_suite(cfg)
    paths = emit(build_report(cfg, res), cfg.out, "csv", cfg.extra_list)
    E, t = res.series["E"], res.series["t"]
    for i in range(0, len(t), max(1, len(t) // 10)):
        print(f"t={t[i]:6.2f}  E={E[i]:.6e}  minrho={res.series['minrho'][i]:.6f}")
    for c in res.checks:
        print(c.line())
    print("wrote", *paths)
    return 0 if res.passed else 1


if __name__ == "__main__":
    sys.exit(main())
