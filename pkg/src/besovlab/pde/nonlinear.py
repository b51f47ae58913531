"""Right-hand sides of the barotropic system in the (q, u) and (q, v1) variables.

Original variables, rho = 1 + q:

    q_t = -div(q u) - div u + S
    u_t = -u.grad u + (1/rho) L(rho) u - (1/rho) grad P(rho) + f

with L(rho) u = div(mu(rho) D u) + grad(lambda(rho) div u), which is
A u = mu Lap u + (lambda + mu) grad div u for constant viscosity.

Effective variables: u = v1 + w where L(rho) w = grad(P(rho) - P(1)).
The pressure then cancels against (1/rho) L(rho) w and

    v1_t = -u.grad u + (1/rho) L(rho) v1 + f - w_t

where w_t solves the time-differentiated elliptic equation; for constant
viscosity w_t = (1/nu) grad Lap^-1 (P'(rho) q_t). The q equation is
unchanged; its linear part near rho = 1 is the damping -(P'(1)/nu) q.

Every function exists in two layers: a public one on states and fields,
and an ``explicit_*`` one on coefficient stacks that returns the full
right-hand side minus the part integrated exactly.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..spectral import (
    SpectralField,
    TorusGrid,
    VectorField,
    advect_vector,
    divergence,
    grad_inverse_laplacian,
    gradient,
    lame_operator,
    product,
    truncate_samples,
)
from .effective import perturbation_terms, pressure_deviation, solve_variable_lame, variable_lame
from .models import EffectiveState, FluidModel, FluidState, at_time, check_density


def _mass_rhs(q: SpectralField, u: VectorField, model: FluidModel, t: float) -> SpectralField:
    flux = VectorField(tuple(product(q, c) for c in u))
    dq = -divergence(flux) - divergence(u)
    s = at_time(model.mass_source, t)
    return dq if s is None else dq + s


def _momentum_common(u: VectorField, model: FluidModel, t: float) -> VectorField:
    out = -advect_vector(u, u)
    f = at_time(model.forcing, t)
    return out if f is None else out + f


def _scaled_viscous(z: VectorField, rho_samples: np.ndarray, rho: SpectralField, model: FluidModel) -> tuple[VectorField, VectorField]:
    """((1/rho) L(rho) z, A_1 z)."""
    vis = model.viscosity
    lz = variable_lame(z, rho, vis)
    a1 = lame_operator(z, vis.mu1, vis.lam1)
    inv_rho = truncate_samples(1.0 / rho_samples, rho.grid)
    return VectorField(tuple(product(inv_rho, c) for c in lz)), a1


def _rho_field(q: SpectralField) -> SpectralField:
    return q + SpectralField.constant(q.grid, 1.0)


def _original_parts(q: SpectralField, u: VectorField, model: FluidModel, t: float):
    """(dq, du, A_1 u)."""
    rho_s = check_density(q)
    rho = _rho_field(q)
    dq = _mass_rhs(q, u, model, t)
    visc, a1 = _scaled_viscous(u, rho_s, rho, model)
    g = pressure_deviation(rho, model.pressure)
    inv_rho = truncate_samples(1.0 / rho_s, q.grid)
    press = VectorField(tuple(product(inv_rho, c) for c in gradient(g)))
    du = _momentum_common(u, model, t) + visc - press
    return dq, du, a1


def nonlinear_rhs(state: FluidState, model: FluidModel) -> tuple[SpectralField, VectorField]:
    """(q_t, u_t) in the original variables."""
    dq, du, _ = _original_parts(state.q, state.u, model, state.t)
    return dq, du


def linearized_rhs(state: FluidState, model: FluidModel) -> tuple[SpectralField, VectorField]:
    """Linearization at (1, 0): (-div u, A_1 u - P'(1) grad q)."""
    vis = model.viscosity
    du = lame_operator(state.u, vis.mu1, vis.lam1) - gradient(state.q) * model.pressure.dP1
    return -divergence(state.u), du


def pressure_velocity(q: SpectralField, model: FluidModel) -> VectorField:
    """w = v/nu, the gradient part removed from u in the effective variables."""
    rho = _rho_field(q)
    g = pressure_deviation(rho, model.pressure)
    if getattr(model.viscosity, "variable", False):
        w, _ = solve_variable_lame(rho, model.viscosity, gradient(g))
        return w
    return grad_inverse_laplacian(g) / model.nu


def pressure_velocity_rate(q: SpectralField, w: VectorField, q_t: SpectralField, model: FluidModel) -> VectorField:
    """Time derivative of w along a trajectory with density rate q_t."""
    rho_s = 1.0 + q.values()
    rt = q_t.values()
    grid = q.grid
    src = truncate_samples(model.pressure.dP(rho_s) * rt, grid)
    vis = model.viscosity
    if not getattr(vis, "variable", False):
        return grad_inverse_laplacian(src) / model.nu
    b1 = truncate_samples(vis.dmu_of(rho_s) * rt, grid)
    b2 = truncate_samples(-vis.dlam_of(rho_s) * rt, grid)
    rhs = gradient(src) - perturbation_terms(w, b1, b2)
    wt, _ = solve_variable_lame(_rho_field(q), vis, rhs)
    return wt


def to_effective(state: FluidState, model: FluidModel) -> EffectiveState:
    return EffectiveState(state.q, state.u - pressure_velocity(state.q, model), state.t)


def from_effective(state: EffectiveState, model: FluidModel) -> FluidState:
    return FluidState(state.q, state.v1 + pressure_velocity(state.q, model), state.t)


def _effective_parts(q: SpectralField, v1: VectorField, model: FluidModel, t: float, w: Optional[VectorField] = None):
    """(dq, dv1, A_1 v1, u)."""
    rho_s = check_density(q)
    rho = _rho_field(q)
    if w is None:
        w = pressure_velocity(q, model)
    u = v1 + w
    dq = _mass_rhs(q, u, model, t)
    visc, a1 = _scaled_viscous(v1, rho_s, rho, model)
    wt = pressure_velocity_rate(q, w, dq, model)
    dv1 = _momentum_common(u, model, t) + visc - wt
    return dq, dv1, a1, u


def reformulated_rhs(state: EffectiveState, model: FluidModel) -> tuple[SpectralField, VectorField]:
    """(q_t, v1_t) in the effective variables."""
    dq, dv1, _, _ = _effective_parts(state.q, state.v1, model, state.t)
    return dq, dv1


def pressure_coupling_residual(state: FluidState, model: FluidModel) -> VectorField:
    """Coupling left in the v1 equation once the linear velocity response is removed.

    Equals -u.grad u - w_t - (P'(1)/nu) grad Lap^-1 div u: everything on the
    right of the v1 equation except (1/rho) L(rho) v1 and f, minus its part
    linear in u. It is quadratic in the data amplitude.
    """
    q, u = state.q, state.u
    check_density(q)
    w = pressure_velocity(q, model)
    flux = VectorField(tuple(product(q, c) for c in u))
    q_t = -divergence(flux) - divergence(u)
    wt = pressure_velocity_rate(q, w, q_t, model)
    lin = grad_inverse_laplacian(divergence(u)) * model.damping
    return -advect_vector(u, u) - wt - lin


def _split(y: np.ndarray, grid: TorusGrid) -> tuple[SpectralField, VectorField]:
    return SpectralField(grid, y[0]), VectorField.from_stack(grid, y[1:])


def explicit_original(y: np.ndarray, t: float, model: FluidModel, grid: TorusGrid) -> np.ndarray:
    """Stack of (q_t, u_t - A_1 u)."""
    q, u = _split(y, grid)
    dq, du, a1 = _original_parts(q, u, model, t)
    return np.concatenate([dq.coeffs[None], (du - a1).stack()])


def explicit_effective(y: np.ndarray, t: float, model: FluidModel, grid: TorusGrid) -> np.ndarray:
    """Stack of (q_t + d q', v1_t - A_1 v1) with d = P'(1)/nu and q' = q - mean."""
    q, v1 = _split(y, grid)
    dq, dv1, a1, _ = _effective_parts(q, v1, model, t)
    damp = q.without_mean() * model.damping
    return np.concatenate([(dq + damp).coeffs[None], (dv1 - a1).stack()])
