"""Empirical smallness threshold for two pressure exponents (no reference value exists)."""
import argparse

from besovlab.experiments.config import ExperimentConfig
from besovlab.experiments.suites import threshold_search


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=32)
    ap.add_argument("--T", type=float, default=2.0)
    ap.add_argument("--steps", type=int, default=100)
    ap.add_argument("--gammas", type=float, nargs="+", default=[1.0, 1.4])
    a = ap.parse_args()
    for gamma in a.gammas:
        cfg = ExperimentConfig(kind="threshold_search", grid=a.grid, T=a.T, steps=a.steps, gamma=gamma,
                               eps_low=1e-2, eps_high=0.9)
        res = threshold_search(cfg)
        tab = res.tables["threshold"]
        lo, hi = tab["bracket"]
        print(f"gamma={gamma:g}: {tab['status']}, bracket [{lo:.4f}, {hi:.4f}]")
        for h in tab["history"]:
            print(f"    eps={h['eps']:.4f} {'fails' if h['fails'] else 'stable'} ({h['reason']})")
    print(tab["note"])


if __name__ == "__main__":
    main()
