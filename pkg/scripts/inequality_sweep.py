"""Maximum measured constants of the product estimates per grid, for both test corpora."""
import argparse

from besovlab.checks import max_ratio_by_grid, variation
from besovlab.experiments.config import ExperimentConfig
from besovlab.experiments.measure import PRODUCT_NAMES
from besovlab.experiments.suites import paraproduct_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grids", default="32,64,128")
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    res = paraproduct_suite(ExperimentConfig(kind="paraproduct_suite", grids=a.grids, samples=a.samples, seed=a.seed))
    grids = [int(g) for g in a.grids.split(",")]
    print(f"{'estimate':34}" + "".join(f"{g:>12}" for g in grids) + f"{'variation':>11}")
    for name in PRODUCT_NAMES:
        by = max_ratio_by_grid(res.inequalities, name)
        print(f"{name:34}" + "".join(f"{by[g]:12.4g}" for g in grids) + f"{variation(list(by.values())):11.3f}")
    print("\nband-filling power spectrum (information only):")
    for name, by in res.tables["power_spectrum_ratios"].items():
        vals = [by[str(g)] for g in grids]
        print(f"{name:34}" + "".join(f"{v:12.4g}" for v in vals) + f"{variation(vals):11.3f}")


if __name__ == "__main__":
    main()
