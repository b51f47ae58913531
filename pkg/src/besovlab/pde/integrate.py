"""Time integration of the full system in either set of variables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..spectral import SpectralField, VectorField
from .models import EffectiveState, FluidModel, FluidState
from .nonlinear import explicit_effective, explicit_original, from_effective, pressure_velocity, to_effective
from .stepping import apply_lame_propagator, check_cfl, damping_factor, default_snapshot_every, if_rk2, max_speed

ORIGINAL = "original"
EFFECTIVE = "effective"
FORMULATIONS = (ORIGINAL, EFFECTIVE)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots in the original variables; ``effective`` holds (q, v1) when that formulation ran."""

    times: tuple[float, ...]
    states: tuple[FluidState, ...]
    formulation: str
    dt: float
    effective: Optional[tuple[EffectiveState, ...]] = None

    @property
    def final(self) -> FluidState:
        return self.states[-1]

    def min_density(self) -> list[float]:
        return [s.min_density() for s in self.states]

    def masses(self) -> list[float]:
        """mean(rho) per snapshot."""
        return [1.0 + s.q.mean.real for s in self.states]


def simulate(
    state0: FluidState,
    model: FluidModel,
    T: float,
    steps: int,
    formulation: str = ORIGINAL,
    snapshot_every: Optional[int] = None,
) -> Trajectory:
    """Second-order integrating-factor stepping from ``state0`` over [t0, t0 + T].

    The exactly integrated part is A with viscosities frozen at rho = 1 on
    the velocity-like unknown, plus the damping P'(1)/nu on the nonzero
    modes of q in the effective variables. Raises VacuumApproach or
    CFLViolation when the run leaves the admissible regime.
    """
    if formulation not in FORMULATIONS:
        raise ValueError(f"formulation must be one of {FORMULATIONS}, got {formulation!r}")
    grid = state0.grid
    dt = T / steps
    vis = model.viscosity
    every = snapshot_every or default_snapshot_every(steps)

    if formulation == ORIGINAL:
        y0 = np.concatenate([state0.q.coeffs[None], state0.u.stack()])

        def propagate(y):
            return np.concatenate([y[:1], apply_lame_propagator(y[1:], grid, vis.mu1, vis.lam1, dt)])

        def explicit(y, t):
            return explicit_original(y, t, model, grid)

        def before(y, t):
            check_cfl(max_speed(y[1:]), dt, grid)

    else:
        eff0 = to_effective(state0, model)
        y0 = np.concatenate([eff0.q.coeffs[None], eff0.v1.stack()])
        qfac = damping_factor(grid.dim, grid.points, model.damping, dt)

        def propagate(y):
            return np.concatenate([qfac[None] * y[:1], apply_lame_propagator(y[1:], grid, vis.mu1, vis.lam1, dt)])

        def explicit(y, t):
            return explicit_effective(y, t, model, grid)

        def before(y, t):
            w = pressure_velocity(SpectralField(grid, y[0]), model)
            check_cfl(max_speed(y[1:] + w.stack()), dt, grid)

    times, ys = if_rk2(y0, propagate, explicit, dt, steps, t0=state0.t, snapshot_every=every, before_step=before)
    if formulation == ORIGINAL:
        states = tuple(FluidState(SpectralField(grid, y[0]), VectorField.from_stack(grid, y[1:]), t) for t, y in zip(times, ys))
        return Trajectory(tuple(times), states, formulation, dt)
    effs = tuple(EffectiveState(SpectralField(grid, y[0]), VectorField.from_stack(grid, y[1:]), t) for t, y in zip(times, ys))
    states = tuple(from_effective(e, model) for e in effs)
    return Trajectory(tuple(times), states, formulation, dt, effs)
