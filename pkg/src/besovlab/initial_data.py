"""Deterministic initial data of prescribed sup-norm amplitude."""
from __future__ import annotations

import numpy as np

from .pde.models import FluidState
from .spectral import SpectralField, TorusGrid, VectorField, dealias, forward_transform


def _normalized(samples: np.ndarray, grid: TorusGrid, amplitude: float) -> SpectralField:
    f = dealias(forward_transform(samples, grid))
    peak = float(np.max(np.abs(f.values())))
    return f * (amplitude / peak)


def density_shape(grid: TorusGrid, amplitude: float) -> SpectralField:
    """Mean-free q0 with max|q0| = amplitude."""
    x = grid.coordinates()
    s = np.cos(x[0]) * np.sin(2 * x[1]) + 0.5 * np.sin(x[0] + x[1])
    if grid.dim == 3:
        s = s + 0.5 * np.cos(x[1] - x[2]) * np.sin(x[0])
    return _normalized(s, grid, amplitude)


def velocity_shape(grid: TorusGrid, amplitude: float) -> VectorField:
    """u0 mixing a gradient and a rotational part, each component with max = amplitude."""
    x = grid.coordinates()
    if grid.dim == 2:
        comps = [np.sin(x[1] + 1.0), np.cos(2 * x[0] - x[1])]
    else:
        comps = [np.sin(x[1] + 1.0) * np.cos(x[2]), np.cos(2 * x[0] - x[1]), np.sin(x[0] + x[2])]
    return VectorField(tuple(_normalized(c, grid, amplitude) for c in comps))


def small_data(grid: TorusGrid, amplitude: float) -> FluidState:
    if amplitude == 0:
        return FluidState(SpectralField.zeros(grid), VectorField.zeros(grid))
    return FluidState(density_shape(grid, amplitude), velocity_shape(grid, amplitude))
