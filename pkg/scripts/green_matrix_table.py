"""Spectrum of the linearized operator per wavenumber, against a 50-digit oracle."""
import argparse

from besovlab.experiments.measure import green_table
from besovlab.pde.linear import critical_wavenumber


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nu", type=float, default=1.0)
    ap.add_argument("--dP1", type=float, default=1.0)
    ap.add_argument("--xi", type=float, nargs="+", default=[0.5, 1.0, 2.0, 4.0, 10.0, 100.0])
    a = ap.parse_args()
    print(f"critical |xi| = {critical_wavenumber(a.nu, a.dP1):g}")
    print(f"{'|xi|':>8} {'regime':>12} {'root 1':>28} {'root 2':>28} {'rel err':>9}")
    for r in green_table(a.xi, a.nu / 2, 0.0, a.dP1):
        z1, z2 = (complex(*z) for z in r["roots"])
        print(f"{r['xi']:8g} {r['regime']:>12} {z1:28.12g} {z2:28.12g} {r['relative_error']:9.1e}")


if __name__ == "__main__":
    main()
