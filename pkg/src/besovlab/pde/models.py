"""Constitutive laws, fluid states and solver errors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from ..spectral import EllipticityViolation, SpectralField, VectorField


class SolverError(RuntimeError):
    pass


class NonPositiveViscosity(ValueError):
    pass


class CFLViolation(SolverError):
    """max|u| dt M / (2 pi) exceeded 1; use more steps."""


class ZeroWavenumber(ValueError):
    pass


class FixedPointDiverged(SolverError):
    """The variable-viscosity fixed point did not contract; the density deviation is too large."""


class VacuumApproach(SolverError):
    """min(1 + q) dropped to 0.1 or below."""


VACUUM_FLOOR = 0.1


@dataclass(frozen=True)
class PressureLaw:
    """P(rho) = K rho^gamma."""

    gamma: float = 1.4
    K: float = 1.0

    def __post_init__(self):
        if not self.dP(1.0) > 0:
            raise ValueError(f"need P'(1) > 0, got {self.dP(1.0)}")

    def P(self, rho):
        return self.K * np.power(rho, self.gamma)

    def dP(self, rho):
        return self.K * self.gamma * np.power(rho, self.gamma - 1.0)

    @property
    def dP1(self) -> float:
        return float(self.dP(1.0))

    def deviation(self, rho):
        """g = P(rho) - P(1)."""
        return self.P(rho) - self.K


@dataclass(frozen=True)
class ConstantViscosity:
    mu: float = 1.0
    lam: float = 0.0

    def __post_init__(self):
        if not (self.mu > 0 and self.lam + 2 * self.mu > 0):
            raise EllipticityViolation(f"need mu > 0 and lambda + 2 mu > 0, got mu={self.mu}, lambda={self.lam}")

    variable = False

    def mu_of(self, rho):
        return np.full_like(np.asarray(rho, dtype=float), self.mu)

    def lam_of(self, rho):
        return np.full_like(np.asarray(rho, dtype=float), self.lam)

    def dmu_of(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))

    def dlam_of(self, rho):
        return np.zeros_like(np.asarray(rho, dtype=float))

    @property
    def mu1(self) -> float:
        return self.mu

    @property
    def lam1(self) -> float:
        return self.lam

    @property
    def nu(self) -> float:
        return 2 * self.mu + self.lam


@dataclass(frozen=True)
class BDViscosity:
    """mu(rho) = c rho^alpha with lambda(rho) = rho mu'(rho) - mu(rho) = c (alpha - 1) rho^alpha."""

    c: float = 1.0
    alpha: float = 1.0

    variable = True

    def __post_init__(self):
        if not (self.mu1 > 0 and self.mu1 + self.lam1 > 0):
            raise EllipticityViolation(f"need mu(1) > 0 and mu(1) + lambda(1) > 0, got {self.mu1}, {self.lam1}")

    def mu_of(self, rho):
        return self.c * np.power(rho, self.alpha)

    def dmu_of(self, rho):
        return self.c * self.alpha * np.power(rho, self.alpha - 1.0)

    def lam_of(self, rho):
        return rho * self.dmu_of(rho) - self.mu_of(rho)

    def dlam_of(self, rho):
        # d/drho (rho mu' - mu) = rho mu''
        return self.c * self.alpha * (self.alpha - 1.0) * np.power(rho, self.alpha - 1.0)

    @property
    def mu1(self) -> float:
        return float(self.mu_of(1.0))

    @property
    def lam1(self) -> float:
        return float(self.lam_of(1.0))

    @property
    def nu(self) -> float:
        return 2 * self.mu1 + self.lam1


ViscosityModel = Union[ConstantViscosity, BDViscosity]

TimeField = Union[None, SpectralField, VectorField, Callable[[float], object]]


def at_time(f: TimeField, t: float):
    """Evaluate a forcing given as None, a constant field, or a callable of t."""
    if f is None or isinstance(f, (SpectralField, VectorField)):
        return f
    return f(t)


@dataclass(frozen=True)
class FluidModel:
    """Pressure law, viscosity, momentum forcing f and an optional mass source S."""

    pressure: PressureLaw = field(default_factory=PressureLaw)
    viscosity: ViscosityModel = field(default_factory=ConstantViscosity)
    forcing: TimeField = None
    mass_source: TimeField = None

    @property
    def nu(self) -> float:
        return self.viscosity.nu

    @property
    def damping(self) -> float:
        """P'(1)/nu, the rate at which high frequencies of q relax."""
        return self.pressure.dP1 / self.nu


@dataclass(frozen=True, eq=False)
class FluidState:
    q: SpectralField
    u: VectorField
    t: float = 0.0

    def __post_init__(self):
        if self.u.grid != self.q.grid or len(self.u) != self.q.grid.dim:
            raise ValueError("q and u must share one grid and u must have dim components")

    @property
    def grid(self):
        return self.q.grid

    def min_density(self) -> float:
        return 1.0 + float(np.min(self.q.values()))


@dataclass(frozen=True, eq=False)
class EffectiveState:
    """(q, v1) with v1 = u - v/nu."""

    q: SpectralField
    v1: VectorField
    t: float = 0.0

    @property
    def grid(self):
        return self.q.grid


@dataclass(frozen=True, eq=False)
class SnapshotSeries:
    """Snapshots of a run: times and matching fields or states."""

    times: tuple[float, ...]
    states: tuple

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self):
        return self.states[-1]


def check_density(q: SpectralField) -> np.ndarray:
    """Return rho samples, raising VacuumApproach if min(rho) <= 0.1."""
    rho = 1.0 + q.values()
    m = float(np.min(rho))
    if not m > VACUUM_FLOOR:
        raise VacuumApproach(f"min(1+q) = {m:.6g} <= {VACUUM_FLOOR}")
    return rho

