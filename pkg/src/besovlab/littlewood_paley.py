"""Homogeneous dyadic decomposition on the torus.

The radial profile is phi(r) = chi(r/2) - chi(r) where chi is a smooth
cutoff equal to 1 on [0, 3/4] and 0 on [4/3, inf). Then phi is supported
in [3/4, 8/3] and sum_l phi(2^-l r) telescopes to 1 for every r > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
from scipy.special import expit

from .spectral import SpectralField, TorusGrid

CHI_FLAT = 0.75
CHI_ZERO = 4.0 / 3.0
SUPPORT = (0.75, 8.0 / 3.0)
J_MIN = -1


def smooth_cutoff(r: np.ndarray | float) -> np.ndarray:
    """chi(r): 1 for r <= 3/4, 0 for r >= 4/3, C-infinity in between.

    In between chi = f(1-t) / (f(t) + f(1-t)) with f(t) = exp(-1/t) and
    t the position inside the transition interval, written as a logistic
    function of 1/t - 1/(1-t) so it never under- or overflows.
    """
    r = np.asarray(r, dtype=float)
    t = (r - CHI_FLAT) / (CHI_ZERO - CHI_FLAT)
    out = np.where(t <= 0, 1.0, 0.0)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    out[inside] = expit(1.0 / ti - 1.0 / (1.0 - ti))
    return out


def _phi(r: np.ndarray | float) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return smooth_cutoff(r / 2) - smooth_cutoff(r)


@dataclass(frozen=True)
class DyadicSymbol:
    """Radial profile phi with its support interval."""

    profile: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float] = SUPPORT

    def __call__(self, r):
        return self.profile(r)

    def partition(self, r: np.ndarray, levels: range | None = None) -> np.ndarray:
        """sum_l phi(2^-l r) over the levels that can be active for these radii."""
        r = np.asarray(r, dtype=float)
        if levels is None:
            lo = math.floor(math.log2(np.min(r) / self.support[1])) - 1
            hi = math.ceil(math.log2(np.max(r) / self.support[0])) + 1
            levels = range(lo, hi + 1)
        return sum(self.profile(r * 2.0**-l) for l in levels)


def build_phi() -> DyadicSymbol:
    return DyadicSymbol(_phi)


PHI = build_phi()


def level_range(grid: TorusGrid) -> range:
    """Levels j whose annulus meets the resolved wavenumbers."""
    j_max = math.ceil(math.log2(grid.max_wavenumber)) + 1
    return range(J_MIN, j_max + 1)


@lru_cache(maxsize=None)
def _weights(dim: int, m: int, j: int) -> np.ndarray:
    grid = TorusGrid(dim, m)
    w = _phi(grid.kmag * 2.0**-j)
    w.flags.writeable = False
    return w


@lru_cache(maxsize=None)
def _cutoff_weights(dim: int, m: int, j: int) -> np.ndarray:
    """Symbol of S_j without the mean: sum of block weights for levels < j."""
    grid = TorusGrid(dim, m)
    w = np.zeros(grid.shape)
    for l in level_range(grid):
        if l <= j - 1:
            w = w + _weights(dim, m, l)
    w.flags.writeable = False
    return w


def block_weights(grid: TorusGrid, j: int) -> np.ndarray:
    """phi(2^-j |k|) on the wavenumber grid."""
    return _weights(grid.dim, grid.points, j)


def dyadic_block(u: SpectralField, j: int) -> SpectralField:
    return SpectralField(u.grid, u.coeffs * block_weights(u.grid, j), u.is_real)


def low_freq_cutoff(u: SpectralField, j: int) -> SpectralField:
    """S_j u: blocks of level <= j-1 plus the mean."""
    g = u.grid
    c = u.coeffs * _cutoff_weights(g.dim, g.points, j)
    c[(0,) * g.dim] = u.coeffs[(0,) * g.dim]
    return SpectralField(g, c, u.is_real)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    grid: TorusGrid
    blocks: Mapping[int, SpectralField]
    mean: complex

    @property
    def levels(self) -> list[int]:
        return sorted(self.blocks)

    def reconstruct(self) -> SpectralField:
        c = np.zeros(self.grid.shape, dtype=np.complex128)
        for j in self.levels:
            c = c + self.blocks[j].coeffs
        c[(0,) * self.grid.dim] += self.mean
        is_real = all(b.is_real for b in self.blocks.values())
        return SpectralField(self.grid, c, is_real)


def decompose(u: SpectralField) -> BlockDecomposition:
    blocks = {j: dyadic_block(u, j) for j in level_range(u.grid)}
    return BlockDecomposition(u.grid, blocks, u.mean)


def split_bf_hf(u: SpectralField, threshold: int = 0) -> tuple[SpectralField, SpectralField]:
    """(sum_{l <= threshold} Delta_l u, sum_{l > threshold} Delta_l u); the mean is in neither."""
    g = u.grid
    low = _cutoff_weights(g.dim, g.points, threshold + 1)
    high = _cutoff_weights(g.dim, g.points, level_range(g).stop) - low
    return (
        SpectralField(g, u.coeffs * low, u.is_real),
        SpectralField(g, u.coeffs * high, u.is_real),
    )
