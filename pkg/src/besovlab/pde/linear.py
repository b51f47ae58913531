"""Linear model problems: heat, damped transport and the linearized
density/velocity system with its per-mode generator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..spectral import (
    EllipticityViolation,
    SpectralField,
    TorusGrid,
    VectorField,
    advect,
)
from .models import (
    NonPositiveViscosity,
    SnapshotSeries,
    TimeField,
    ZeroWavenumber,
    at_time,
)
from .stepping import (
    check_cfl,
    default_snapshot_every,
    expm2,
    heat_factor,
    if_rk2,
    max_speed,
)

Field = Union[SpectralField, VectorField]


def _stack(f: Field) -> np.ndarray:
    return f.stack() if isinstance(f, VectorField) else f.coeffs[None]


def _unstack(a: np.ndarray, like: Field) -> Field:
    if isinstance(like, VectorField):
        return VectorField.from_stack(like.grid, a, like.is_real)
    return SpectralField(like.grid, a[0], like.is_real)


def _forcing_stack(f: TimeField, t: float, shape) -> np.ndarray:
    val = at_time(f, t)
    if val is None:
        return np.zeros(shape, dtype=np.complex128)
    return _stack(val)


def heat_solve(u0: Field, f: TimeField, mu: float, T: float, steps: int, snapshot_every: Optional[int] = None) -> SnapshotSeries:
    """u_t - mu Laplacian(u) = f, exact per-mode decay plus trapezoid Duhamel."""
    if not mu > 0:
        raise NonPositiveViscosity(f"mu must be positive, got {mu}")
    g = u0.grid
    dt = T / steps
    fac = heat_factor(g.dim, g.points, float(mu), dt)
    y0 = _stack(u0)
    times, ys = if_rk2(
        y0,
        lambda y: fac * y,
        lambda y, t: _forcing_stack(f, t, y0.shape),
        dt,
        steps,
        snapshot_every=snapshot_every or default_snapshot_every(steps),
    )
    return SnapshotSeries(tuple(times), tuple(_unstack(y, u0) for y in ys))


def damped_transport_solve(
    q0: SpectralField,
    u: TimeField,
    alpha: float,
    F: TimeField,
    T: float,
    steps: int,
    snapshot_every: Optional[int] = None,
) -> SnapshotSeries:
    """q_t + u.grad q + alpha q = F.

    The damping is integrated exactly (including the mean mode); the
    dealiased advection and the forcing go through the explicit stage.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    g = q0.grid
    dt = T / steps
    fac = math.exp(-alpha * dt)

    def explicit(y, t):
        q = SpectralField(g, y[0], q0.is_real)
        out = _forcing_stack(F, t, y.shape)
        vel = at_time(u, t)
        if vel is not None:
            out = out - advect(vel, q).coeffs[None]
        return out

    def before(y, t):
        vel = at_time(u, t)
        if vel is not None:
            check_cfl(max_speed(vel.stack()), dt, g)

    times, ys = if_rk2(
        _stack(q0),
        lambda y: fac * y,
        explicit,
        dt,
        steps,
        snapshot_every=snapshot_every or default_snapshot_every(steps),
        before_step=before,
    )
    return SnapshotSeries(tuple(times), tuple(_unstack(y, q0) for y in ys))


class LinearizedPropagator:
    """exp(h L) for L(q, u) = (-div u, A u - P'(1) grad q), applied per mode.

    Splits u into its component along the derivative wavenumber and the
    rest. The rest decays as heat with rate mu|k|^2; the pair (q, a) with
    a = khat.u evolves by the 2x2 block
        [[0, -i|k|], [-i P'(1)|k|, -(mu|k|^2 + (lambda + mu)|k|^2)]].
    """

    def __init__(self, grid: TorusGrid, mu: float, lam: float, dP1: float, h: float):
        if not (mu > 0 and lam + 2 * mu > 0):
            raise EllipticityViolation(f"need mu > 0 and lambda + 2 mu > 0, got mu={mu}, lambda={lam}")
        if not dP1 > 0:
            raise ValueError("need P'(1) > 0")
        self.grid = grid
        ks = grid.derivative_wavenumbers
        kd2 = sum(k * k for k in ks)
        kd = np.sqrt(kd2)
        self.has_dir = kd2 > 0
        inv = np.where(self.has_dir, 1.0 / np.where(self.has_dir, kd, 1.0), 0.0)
        self.khat = [k * inv for k in ks]
        sigma = mu * grid.kmag2 + (lam + mu) * kd2
        zero = np.zeros_like(kd)
        self.e = expm2(zero, -1j * kd, -1j * dP1 * kd, -sigma, h)
        self.heat = np.exp(-mu * grid.kmag2 * h)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        q, u = y[0], y[1:]
        a = sum(kh * c for kh, c in zip(self.khat, u))
        e11, e12, e21, e22 = self.e
        q_new = e11 * q + e12 * a
        a_new = e21 * q + e22 * a
        u_new = [self.heat * (c - kh * a) + kh * a_new for kh, c in zip(self.khat, u)]
        # modes without a derivative direction: q frozen, u as heat
        q_new = np.where(self.has_dir, q_new, q)
        return np.concatenate([q_new[None], np.stack(u_new)])


def linearized_solve(
    q0: SpectralField,
    u0: VectorField,
    mu: float,
    lam: float,
    dP1: float,
    T: float,
    steps: int,
    F: TimeField = None,
    G: TimeField = None,
    convection: TimeField = None,
    snapshot_every: Optional[int] = None,
) -> SnapshotSeries:
    """q_t + div u = F - v.grad q,  u_t - A u + P'(1) grad q = G - v.grad u.

    With no forcing and no convection field v the propagation is exact per
    mode; otherwise the right-hand side goes through the explicit stage.
    Snapshots are (q, u) tuples.
    """
    g = q0.grid
    dt = T / steps
    prop = LinearizedPropagator(g, mu, lam, dP1, dt)
    n = g.dim

    def explicit(y, t):
        out = np.zeros_like(y)
        fq, fu = at_time(F, t), at_time(G, t)
        if fq is not None:
            out[0] += fq.coeffs
        if fu is not None:
            out[1:] += fu.stack()
        vel = at_time(convection, t)
        if vel is not None:
            out[0] -= advect(vel, SpectralField(g, y[0])).coeffs
            for i in range(n):
                out[1 + i] -= advect(vel, SpectralField(g, y[1 + i])).coeffs
        return out

    y0 = np.concatenate([q0.coeffs[None], u0.stack()])
    times, ys = if_rk2(y0, prop, explicit, dt, steps, snapshot_every=snapshot_every or default_snapshot_every(steps))
    states = tuple((SpectralField(g, y[0]), VectorField.from_stack(g, y[1:])) for y in ys)
    return SnapshotSeries(tuple(times), states)


@dataclass(frozen=True)
class LinearModeMatrix:
    """Per-mode generator of the linearized system and its spectrum.

    ``compressible`` holds the two roots of z^2 + nu|xi|^2 z + P'(1)|xi|^2,
    ``incompressible`` the N-1 copies of -mu|xi|^2, ``eigenvalues`` all N+1.
    """

    xi: tuple[float, ...]
    generator: np.ndarray
    compressible: tuple[complex, complex]
    incompressible: tuple[float, ...]
    regime: str

    @property
    def eigenvalues(self) -> tuple[complex, ...]:
        return tuple(self.compressible) + tuple(complex(x) for x in self.incompressible)

    @property
    def modulus(self) -> float:
        return math.sqrt(sum(x * x for x in self.xi))


def compressible_roots(xi_mod: float, nu: float, dP1: float) -> tuple[complex, complex]:
    """Roots of z^2 + nu|xi|^2 z + P'(1)|xi|^2, (fast, slow) when real.

    The fast real root is formed without cancellation and the slow one
    from the product of the roots.
    """
    tau = -nu * xi_mod * xi_mod
    det = dP1 * xi_mod * xi_mod
    disc = tau * tau / 4 - det
    if disc >= 0:
        fast = tau / 2 - math.sqrt(disc)
        return complex(fast), complex(det / fast)
    w = math.sqrt(-disc)
    return complex(tau / 2, w), complex(tau / 2, -w)


def critical_wavenumber(nu: float, dP1: float) -> float:
    """|xi*| = 2 sqrt(P'(1))/nu where the compressible pair turns from complex to real."""
    return 2 * math.sqrt(dP1) / nu


def green_matrix_eigen(xi, mu: float, lam: float, dP1: float, dim: int = 2) -> LinearModeMatrix:
    """Generator and spectrum at wavenumber xi (a vector, or a modulus placed on the first axis)."""
    if not (mu > 0 and lam + 2 * mu > 0):
        raise EllipticityViolation(f"need mu > 0 and lambda + 2 mu > 0, got mu={mu}, lambda={lam}")
    vec = np.atleast_1d(np.asarray(xi, dtype=float))
    if vec.size == 1:
        vec = np.concatenate([vec, np.zeros(dim - 1)])
    mod = float(np.linalg.norm(vec))
    if mod == 0:
        raise ZeroWavenumber("the generator is singular at xi = 0")
    n = vec.size
    gen = np.zeros((n + 1, n + 1), dtype=complex)
    gen[0, 1:] = -1j * vec
    gen[1:, 0] = -1j * dP1 * vec
    gen[1:, 1:] = -mu * mod * mod * np.eye(n) - (lam + mu) * np.outer(vec, vec)
    nu = 2 * mu + lam
    roots = compressible_roots(mod, nu, dP1)
    crit = critical_wavenumber(nu, dP1)
    if mod < crit:
        regime = "oscillatory"
    elif mod == crit:
        regime = "critical"
    else:
        regime = "overdamped"
    return LinearModeMatrix(tuple(float(x) for x in vec), gen, roots, (-mu * mod * mod,) * (n - 1), regime)
