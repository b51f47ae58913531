"""The effective velocity: the gradient field v whose Laplacian is grad P(rho).

Composite quantities such as P(rho) are evaluated on the collocation grid
and truncated to the 2/3 band before use, so every identity below holds
per mode with the truncated pressure deviation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..spectral import (
    SpectralField,
    VectorField,
    divergence,
    gradient,
    grad_inverse_laplacian,
    jacobian,
    lame_inverse,
    lame_operator,
    product,
    truncate_samples,
)
from .models import FixedPointDiverged, PressureLaw, ViscosityModel


@dataclass(frozen=True, eq=False)
class EffectiveVelocity:
    """v with div v = g, and v1 = u - v/nu when u was supplied."""

    v: VectorField
    pressure_deviation: SpectralField
    nu: float
    v1: Optional[VectorField] = None
    iterations: int = 0


def pressure_deviation(rho: SpectralField, pressure: PressureLaw) -> SpectralField:
    """Truncated P(rho) - P(1) with its mean removed."""
    g = truncate_samples(pressure.deviation(rho.values()), rho.grid)
    return g.without_mean()


def effective_velocity(rho: SpectralField, pressure: PressureLaw, nu: float, u: Optional[VectorField] = None) -> EffectiveVelocity:
    """v = grad Laplacian^-1 (P(rho) - P(1) - mean)."""
    g = pressure_deviation(rho, pressure)
    v = grad_inverse_laplacian(g)
    v1 = None if u is None else u - v / nu
    return EffectiveVelocity(v, g, nu, v1)


def strain(w: VectorField) -> list[list[SpectralField]]:
    """D w = grad w + grad w^T as an N x N table."""
    n = w.grid.dim
    J = jacobian(w)
    return [[J[i * n + j] + J[j * n + i] for j in range(n)] for i in range(n)]


def perturbation_terms(w: VectorField, f1: SpectralField, f2: SpectralField) -> VectorField:
    """div(f1 D w) - grad(f2 div w) with dealiased products."""
    n = w.grid.dim
    D = strain(w)
    flux = [[product(f1, D[i][j]) for j in range(n)] for i in range(n)]
    rows = VectorField(tuple(divergence(VectorField(tuple(flux[i]))) for i in range(n)))
    return rows - gradient(product(f2, divergence(w)))


def variable_lame(w: VectorField, rho: SpectralField, model: ViscosityModel) -> VectorField:
    """div(mu(rho) D w) + grad(lambda(rho) div w), written as A_1 w plus perturbations."""
    f1, f2 = _coefficients(rho, model)
    base = lame_operator(w, model.mu1, model.lam1)
    if f1 is None:
        return base
    return base + perturbation_terms(w, f1, f2)


def _coefficients(rho: SpectralField, model: ViscosityModel):
    """f1 = mu(rho) - mu(1), f2 = lambda(1) - lambda(rho), truncated; None for constant viscosity."""
    if not getattr(model, "variable", False):
        return None, None
    r = rho.values()
    f1 = truncate_samples(model.mu_of(r) - model.mu1, rho.grid)
    f2 = truncate_samples(model.lam1 - model.lam_of(r), rho.grid)
    return f1, f2


def solve_variable_lame(
    rho: SpectralField,
    model: ViscosityModel,
    rhs: VectorField,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> tuple[VectorField, int]:
    """Solve div(mu(rho) D w) + grad(lambda(rho) div w) = rhs by fixed point.

    Iterates A_1 w_{n+1} = rhs - div(f1 D w_n) + grad(f2 div w_n) until
    successive iterates differ by less than ``tol`` in L^2.
    """
    mu1, lam1 = model.mu1, model.lam1
    w = lame_inverse(rhs, mu1, lam1)
    f1, f2 = _coefficients(rho, model)
    if f1 is None:
        return w, 1
    prev_dist = np.inf
    for it in range(1, max_iter + 1):
        w_next = lame_inverse(rhs - perturbation_terms(w, f1, f2), mu1, lam1)
        dist = (w_next - w).l2()
        w = w_next
        if not np.isfinite(dist) or (it > 3 and dist > 10 * prev_dist):
            raise FixedPointDiverged(f"iteration {it}: successive distance {dist:.3e} growing")
        if dist < tol:
            return w, it
        prev_dist = dist
    raise FixedPointDiverged(f"no convergence after {max_iter} iterations (last distance {dist:.3e})")


def effective_velocity_bd(
    rho: SpectralField,
    model: ViscosityModel,
    pressure: PressureLaw,
    u: Optional[VectorField] = None,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> EffectiveVelocity:
    """Variable-viscosity analogue: solve the Lame equation with right side grad P(rho).

    Returns v = nu(1) w so that it coincides with ``effective_velocity``
    when the viscosity is constant.
    """
    g = pressure_deviation(rho, pressure)
    w, its = solve_variable_lame(rho, model, gradient(g), tol, max_iter)
    nu = model.nu
    v = w * nu
    v1 = None if u is None else u - w
    return EffectiveVelocity(v, g, nu, v1, its)


def lame_residual(rho: SpectralField, model: ViscosityModel, pressure: PressureLaw, v: VectorField, nu: float) -> tuple[float, float]:
    """Absolute and relative L^2 residual of the elliptic equation for w = v/nu."""
    g = pressure_deviation(rho, pressure)
    target = gradient(g)
    res = variable_lame(v / nu, rho, model) - target
    scale = target.l2()
    return res.l2(), (res.l2() / scale if scale > 0 else res.l2())

