"""Energy-type functionals of a trajectory, evaluated on [0, t] for every snapshot t.

With indices N (dimension), p and p1:

    E  = |q|_{Linf(Bh^{N/2-1, N/p}_{2,p})} + |u|_{Linf(Bh^{N/2-1, N/p1-1}_{2,p1} + Bh^{N/2-1, N/p}_{2,p})}
         + |q|_{L1(Bh^{N/2+1, N/p}_{2,p})} + |u|_{L1(Bh^{N/2+1, N/p+1}_{2,p})}
    E1 = |(q,u)|_{Linf(B^{N/2-1}_{2,1})} + |(q,u)|_{L1(B^{N/2+1}_{2,1})}
    E2 = |q|_{Linf(B^{N/p}_{p,1})} + |u|_{Linf(B^{N/p1-1}_{p1,1} + B^{N/p}_{p,1})}
         + |q|_{L1(B^{N/p}_{p,1})} + |u|_{L1(B^{N/p1+1}_{p1,1} + B^{N/p+2}_{p,1})}

where Bh^{s,t}_{a,b} is the hybrid space (regularity s and L^a for levels
<= 0, t and L^b above) and every time norm is taken per block before the
sum over blocks. Sums of spaces use the blockwise minimum.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .littlewood_paley import level_range
from .norms import HybridIndex, block_norm, hybrid_norm
from .spectral import Field, SpectralField, VectorField

LINF = "inf"
L1 = "1"

# a term is (field name, time exponent, list of alternatives); each
# alternative is (s_low, p_low, s_high, p_high)


@dataclass(frozen=True)
class FunctionalIndices:
    dim: int
    p: float = 2.0
    p1: float = 2.0

    def terms(self) -> dict[str, list]:
        N, p, p1 = self.dim, self.p, self.p1
        h = N / 2
        return {
            "E": [
                ("q", LINF, [(h - 1, 2, N / p, p)]),
                ("u", LINF, [(h - 1, 2, N / p1 - 1, p1), (h - 1, 2, N / p, p)]),
                ("q", L1, [(h + 1, 2, N / p, p)]),
                ("u", L1, [(h + 1, 2, N / p + 1, p)]),
            ],
            "E1": [
                ("q", LINF, [(h - 1, 2, h - 1, 2)]),
                ("u", LINF, [(h - 1, 2, h - 1, 2)]),
                ("q", L1, [(h + 1, 2, h + 1, 2)]),
                ("u", L1, [(h + 1, 2, h + 1, 2)]),
            ],
            "E2": [
                ("q", LINF, [(N / p, p, N / p, p)]),
                ("u", LINF, [(N / p1 - 1, p1, N / p1 - 1, p1), (N / p, p, N / p, p)]),
                ("q", L1, [(N / p, p, N / p, p)]),
                ("u", L1, [(N / p1 + 1, p1, N / p1 + 1, p1), (N / p + 2, p, N / p + 2, p)]),
            ],
        }


class _BlockTable:
    """Per-snapshot block norms, computed once per (field, level, exponent)."""

    def __init__(self, fields: dict[str, Sequence[Field]]):
        self.fields = fields
        self._cache: dict[tuple[str, int, float], np.ndarray] = {}

    def get(self, name: str, j: int, p: float) -> np.ndarray:
        key = (name, j, float(p))
        if key not in self._cache:
            self._cache[key] = np.array([block_norm(f, j, p) for f in self.fields[name]])
        return self._cache[key]


def _running(values: np.ndarray, times: np.ndarray, kind: str) -> np.ndarray:
    if kind == LINF:
        return np.maximum.accumulate(values)
    return cumulative_trapezoid(values, times, initial=0.0)


def functional_series(
    times: Sequence[float],
    q: Sequence[SpectralField],
    u: Sequence[VectorField],
    indices: FunctionalIndices,
    threshold: int = 0,
) -> dict[str, np.ndarray]:
    """E, E1, E2 evaluated on [t0, t_i] for each snapshot i."""
    t = np.asarray(times, dtype=float)
    grid = q[0].grid
    levels = list(level_range(grid))
    table = _BlockTable({"q": q, "u": u})
    out = {}
    for name, terms in indices.terms().items():
        total = np.zeros(len(t))
        for field_name, kind, alts in terms:
            for j in levels:
                best = None
                for s_lo, p_lo, s_hi, p_hi in alts:
                    s, p = (s_lo, p_lo) if j <= threshold else (s_hi, p_hi)
                    val = 2.0 ** (j * s) * _running(table.get(field_name, j, p), t, kind)
                    best = val if best is None else np.minimum(best, val)
                total = total + best
        out[name] = total
    return out


def data_functional(q0: SpectralField, u0: VectorField, indices: FunctionalIndices, forcing_norm: float = 0.0) -> float:
    """|q0|_{Bh^{N/2-1, N/p}_{2,p}} + |u0|_{Bh^{N/2-1, N/p1-1}_{2,p1}} + the forcing term."""
    N, p, p1 = indices.dim, indices.p, indices.p1
    return (
        hybrid_norm(q0, HybridIndex(N / 2 - 1, N / p, 2, p))
        + hybrid_norm(u0, HybridIndex(N / 2 - 1, N / p1 - 1, 2, p1))
        + forcing_norm
    )


def forcing_functional(f: Optional[VectorField], T: float, indices: FunctionalIndices) -> float:
    """L^1 in time of a constant-in-time forcing in Bh^{N/2-1, N/p1-1}_{2,p1}."""
    if f is None:
        return 0.0
    N, p1 = indices.dim, indices.p1
    return T * hybrid_norm(f, HybridIndex(N / 2 - 1, N / p1 - 1, 2, p1))


def per_level_norms(f: Field, p: float = 2.0, levels: Optional[Iterable[int]] = None) -> dict[int, float]:
    grid = f.grid
    levels = level_range(grid) if levels is None else levels
    return {j: block_norm(f, j, p) for j in levels}
