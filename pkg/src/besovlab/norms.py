"""Homogeneous Besov, hybrid Besov and Chemin-Lerner norms.

All norms drop the mean mode. Infinite exponents are ``math.inf``.
Vector fields are measured through the pointwise Euclidean norm, so for
p = 2 the block norm is the root of the summed component energies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .littlewood_paley import block_weights, level_range
from .spectral import Field, SpectralField, TorusGrid, VectorField, lp_of_samples

INF = math.inf


class InsufficientSnapshots(ValueError):
    pass


def _check_exponent(name: str, value: float):
    if not (value >= 1):
        raise ValueError(f"{name} must be >= 1 or math.inf, got {value}")


@dataclass(frozen=True)
class BesovIndex:
    s: float
    p: float = 2.0
    r: float = 1.0

    def __post_init__(self):
        _check_exponent("p", self.p)
        _check_exponent("r", self.r)


@dataclass(frozen=True)
class HybridIndex:
    """Regularity s and integrability p below the split level, t and q above."""

    s: float
    t: float
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        _check_exponent("p", self.p)
        _check_exponent("q", self.q)


def _components(u: Field) -> list[SpectralField]:
    return list(u.components) if isinstance(u, VectorField) else [u]


def block_norm(u: Field, j: int, p: float) -> float:
    """||Delta_j u||_{L^p} on the normalized torus."""
    comps = _components(u)
    w = block_weights(comps[0].grid, j)
    if p == 2:
        return float(math.sqrt(sum(float(np.sum(np.abs(c.coeffs * w) ** 2)) for c in comps)))
    vals = [np.fft.ifftn(c.coeffs * w, norm="forward") for c in comps]
    mag2 = sum((v.real**2 if c.is_real else np.abs(v) ** 2) for v, c in zip(vals, comps))
    return lp_of_samples(np.sqrt(mag2), p)


def block_norms(u: Field, p: float, levels: Iterable[int] | None = None) -> dict[int, float]:
    grid = _components(u)[0].grid
    levels = level_range(grid) if levels is None else levels
    return {j: block_norm(u, j, p) for j in levels}


def lr_sum(values: Sequence[float], r: float) -> float:
    vals = np.asarray(list(values), dtype=float)
    if vals.size == 0:
        return 0.0
    if math.isinf(r):
        return float(np.max(vals))
    if r == 1:
        return float(np.sum(vals))
    return float(np.sum(vals**r) ** (1.0 / r))


def besov_norm(u: Field, idx: BesovIndex, levels: Iterable[int] | None = None) -> float:
    """(sum_j (2^{js} ||Delta_j u||_p)^r)^{1/r} over the resolved levels."""
    norms = block_norms(u, idx.p, levels)
    return lr_sum([2.0 ** (j * idx.s) * n for j, n in norms.items()], idx.r)


def hybrid_weights(idx: HybridIndex, levels: Iterable[int], threshold: int = 0) -> dict[int, tuple[float, float]]:
    """Level -> (weight, exponent) for the two-branch hybrid sum."""
    return {j: (2.0 ** (j * idx.s), idx.p) if j <= threshold else (2.0 ** (j * idx.t), idx.q) for j in levels}


def hybrid_norm(u: Field, idx: HybridIndex, threshold: int = 0) -> float:
    """sum_{l<=0} 2^{ls} ||Delta_l u||_p + sum_{l>0} 2^{lt} ||Delta_l u||_q."""
    grid = _components(u)[0].grid
    total = 0.0
    for j, (w, p) in hybrid_weights(idx, level_range(grid), threshold).items():
        total += w * block_norm(u, j, p)
    return total


def sum_space_norm(u: Field, indices: Sequence[HybridIndex], threshold: int = 0) -> float:
    """Upper bound for the norm of u in a sum of hybrid spaces.

    Each block is assigned whole to whichever space measures it smallest,
    so the value is sum_l min_i (weight_i ||Delta_l u||_{p_i}). This is
    equivalent to the infimum over decompositions up to the overlap of
    neighbouring blocks.
    """
    grid = _components(u)[0].grid
    tables = [hybrid_weights(idx, level_range(grid), threshold) for idx in indices]
    cache: dict[tuple[int, float], float] = {}
    total = 0.0
    for j in level_range(grid):
        best = INF
        for tab in tables:
            w, p = tab[j]
            if (j, p) not in cache:
                cache[(j, p)] = block_norm(u, j, p)
            best = min(best, w * cache[(j, p)])
        total += best
    return total


@dataclass(frozen=True, eq=False)
class TimeNormSpec:
    """Time exponent rho and snapshots (t_i, u_i) on one grid, t strictly increasing."""

    rho: float
    times: tuple[float, ...]
    fields: tuple[Field, ...]

    def __post_init__(self):
        _check_exponent("rho", self.rho)
        times = tuple(float(t) for t in self.times)
        fields = tuple(self.fields)
        if len(times) != len(fields):
            raise ValueError("times and fields differ in length")
        if len(times) < 2:
            raise InsufficientSnapshots(f"need at least 2 snapshots, got {len(times)}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("snapshot times must be strictly increasing")
        grids = {_components(f)[0].grid for f in fields}
        if len(grids) != 1:
            raise ValueError("snapshots must share one grid")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "fields", fields)

    @property
    def grid(self) -> TorusGrid:
        return _components(self.fields[0])[0].grid

    def with_rho(self, rho: float) -> "TimeNormSpec":
        return TimeNormSpec(rho, self.times, self.fields)


def time_norm(times: Sequence[float], values: Sequence[float], rho: float) -> float:
    """L^rho(0,T) of sampled nonnegative values, trapezoid rule; rho = inf is the max."""
    v = np.asarray(values, dtype=float)
    if math.isinf(rho):
        return float(np.max(v))
    return float(trapezoid(v**rho, np.asarray(times, dtype=float)) ** (1.0 / rho))


def level_time_norms(series: TimeNormSpec, p: float, levels: Iterable[int] | None = None) -> dict[int, float]:
    """Level j -> ||Delta_j u||_{L^rho_T(L^p)}."""
    levels = level_range(series.grid) if levels is None else levels
    out = {}
    for j in levels:
        vals = [block_norm(f, j, p) for f in series.fields]
        out[j] = time_norm(series.times, vals, series.rho)
    return out


def chemin_lerner_norm(series: TimeNormSpec, s: float, p: float, r: float) -> float:
    """Time norm per block first, then the weighted l^r sum over blocks."""
    _check_exponent("p", p)
    _check_exponent("r", r)
    tn = level_time_norms(series, p)
    return lr_sum([2.0 ** (j * s) * v for j, v in tn.items()], r)


def lebesgue_besov_norm(series: TimeNormSpec, s: float, p: float, r: float) -> float:
    """Besov norm at each time first, then the L^rho norm in time."""
    idx = BesovIndex(s, p, r)
    vals = [besov_norm(f, idx) for f in series.fields]
    return time_norm(series.times, vals, series.rho)


def hybrid_chemin_lerner_norm(series: TimeNormSpec, idx: HybridIndex, threshold: int = 0) -> float:
    total = 0.0
    for j, (w, p) in hybrid_weights(idx, level_range(series.grid), threshold).items():
        vals = [block_norm(f, j, p) for f in series.fields]
        total += w * time_norm(series.times, vals, series.rho)
    return total


def sum_space_chemin_lerner_norm(series: TimeNormSpec, indices: Sequence[HybridIndex], threshold: int = 0) -> float:
    """Chemin-Lerner analogue of sum_space_norm: blockwise minimum of time norms."""
    grid = series.grid
    tables = [hybrid_weights(idx, level_range(grid), threshold) for idx in indices]
    total = 0.0
    for j in level_range(grid):
        best = INF
        for tab in tables:
            w, p = tab[j]
            vals = [block_norm(f, j, p) for f in series.fields]
            best = min(best, w * time_norm(series.times, vals, series.rho))
        total += best
    return total


def sobolev_seminorm(u: Field, s: float) -> float:
    """(sum_{k != 0} |k|^{2s} |c_k|^2)^{1/2}."""
    comps = _components(u)
    k = comps[0].grid.kmag
    w = np.zeros_like(k)
    nz = k > 0
    w[nz] = k[nz] ** (2 * s)
    return float(math.sqrt(sum(float(np.sum(w * np.abs(c.coeffs) ** 2)) for c in comps)))
