"""Records for measured inequalities and pass/fail checks, plus small fitting helpers."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class InequalityRecord:
    """One evaluation lhs <= C rhs; the measured constant is lhs/rhs."""

    name: str
    lhs: float
    rhs: float
    grid: int
    case: int = 0

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else math.inf)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio"] = self.ratio
        return d


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    limit: str
    grids: tuple[int, ...] = ()
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grids"] = list(self.grids)
        return d

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.value:.6g} ({self.limit})"


def max_ratio_by_grid(records: Iterable[InequalityRecord], name: str) -> dict[int, float]:
    out: dict[int, float] = {}
    for r in records:
        if r.name == name:
            out[r.grid] = max(out.get(r.grid, 0.0), r.ratio)
    return dict(sorted(out.items()))


def variation(values: Sequence[float]) -> float:
    """max/min - 1 of positive numbers."""
    v = np.asarray(values, dtype=float)
    return float(np.max(v) / np.min(v) - 1.0)


def stability_check(records: Sequence[InequalityRecord], name: str, tol: float) -> Check:
    """Pass when the per-grid maximum ratio varies by less than ``tol`` across grids."""
    by_grid = max_ratio_by_grid(records, name)
    var = variation(list(by_grid.values()))
    return Check(
        f"{name} ratio stability",
        bool(var < tol),
        var,
        f"variation < {tol:g}",
        tuple(by_grid),
        {"max_ratio": {str(k): v for k, v in by_grid.items()}},
    )


def fitted_order(h: Sequence[float], err: Sequence[float]) -> float:
    """Least-squares slope of log(err) against log(h)."""
    return float(np.polyfit(np.log(np.asarray(h, float)), np.log(np.asarray(err, float)), 1)[0])


def within(name: str, value: float, lo: float, hi: float, grids: tuple[int, ...] = (), **detail) -> Check:
    return Check(name, bool(lo <= value <= hi), value, f"in [{lo:g}, {hi:g}]", grids, detail)


def at_most(name: str, value: float, limit: float, grids: tuple[int, ...] = (), **detail) -> Check:
    return Check(name, bool(value <= limit), value, f"<= {limit:g}", grids, detail)


def at_least(name: str, value: float, limit: float, grids: tuple[int, ...] = (), **detail) -> Check:
    return Check(name, bool(value >= limit), value, f">= {limit:g}", grids, detail)
