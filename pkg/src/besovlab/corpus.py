"""Random real test fields with prescribed spectra.

Two families:

* ``smooth``: envelope exp(-|k|/k0), generated once on the finest grid
  and restricted to coarser ones, so every grid sees the same function up
  to its own truncation.
* ``power``: envelope |k|^-slope filling the 2/3 band of each grid, so the
  field class grows with the resolution.

Fields are mean-free, 2/3-truncated and scaled to unit L^2 norm unless a
different amplitude is requested.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .spectral import SpectralField, TorusGrid, VectorField, dealias, resample

SMOOTH = "smooth"
POWER = "power"


def envelope(grid: TorusGrid, kind: str = SMOOTH, k0: float = 3.0, slope: float = 2.0) -> np.ndarray:
    k = grid.kmag
    env = np.zeros_like(k)
    nz = k > 0
    if kind == SMOOTH:
        env[nz] = np.exp(-k[nz] / k0)
    elif kind == POWER:
        env[nz] = k[nz] ** -slope
    else:
        raise ValueError(f"unknown spectrum kind {kind!r}")
    return env


def random_field(grid: TorusGrid, rng: np.random.Generator, kind: str = SMOOTH, k0: float = 3.0,
                 slope: float = 2.0, amplitude: float = 1.0) -> SpectralField:
    """White noise on the grid shaped by the chosen envelope, truncated and normalized."""
    noise = rng.standard_normal(grid.shape)
    c = np.fft.fftn(noise, norm="forward") * envelope(grid, kind, k0, slope)
    u = dealias(SpectralField(grid, c, True))
    n = u.l2()
    return u * (amplitude / n) if n > 0 else u


def random_vector(grid: TorusGrid, rng: np.random.Generator, n: int | None = None, **kw) -> VectorField:
    n = grid.dim if n is None else n
    return VectorField(tuple(random_field(grid, rng, **kw) for _ in range(n)))


def nested_fields(grids: Sequence[TorusGrid], count: int, seed: int, k0: float = 3.0,
                  amplitude: float = 1.0) -> dict[int, list[SpectralField]]:
    """Smooth fields drawn on the finest grid and restricted to every grid (keyed by points)."""
    fine = max(grids, key=lambda g: g.points)
    rng = np.random.default_rng(seed)
    base = [random_field(fine, rng, SMOOTH, k0=k0, amplitude=amplitude) for _ in range(count)]
    return {g.points: [dealias(resample(u, g)) for u in base] for g in grids}


def nested_vectors(grids: Sequence[TorusGrid], count: int, seed: int, k0: float = 3.0,
                   amplitude: float = 1.0) -> dict[int, list[VectorField]]:
    fine = max(grids, key=lambda g: g.points)
    per = nested_fields([fine], count * fine.dim, seed, k0, amplitude)[fine.points]
    out = {}
    for g in grids:
        comps = [dealias(resample(u, g)) for u in per]
        out[g.points] = [VectorField(tuple(comps[i * fine.dim:(i + 1) * fine.dim])) for i in range(count)]
    return out


def grid_fields(grid: TorusGrid, count: int, seed: int, kind: str = POWER, **kw) -> list[SpectralField]:
    """Independent fields filling the band of one grid."""
    rng = np.random.default_rng(seed)
    return [random_field(grid, rng, kind, **kw) for _ in range(count)]
