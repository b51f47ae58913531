"""Second-order integrating-factor Runge-Kutta and per-mode propagators.

For y' = L y + N(y, t) with L diagonal (or block diagonal) in Fourier
space, one step of size h is

    k1 = N(y, t)
    y_pred = E (y + h k1)
    y_next = E (y + h/2 k1) + h/2 N(y_pred, t + h)

with E = exp(h L) applied exactly. When N does not depend on y this is
the trapezoid rule applied to the Duhamel integral.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from ..spectral import TorusGrid
from .models import CFLViolation

Array = np.ndarray


def if_rk2(
    y0: Array,
    propagate: Callable[[Array], Array],
    explicit: Callable[[Array, float], Array],
    dt: float,
    steps: int,
    t0: float = 0.0,
    snapshot_every: int = 1,
    before_step: Optional[Callable[[Array, float], None]] = None,
    after_step: Optional[Callable[[Array, float], None]] = None,
) -> tuple[list[float], list[Array]]:
    """Advance y0 by ``steps`` steps; return snapshot times and states (t0 included)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    y = y0
    times, states = [t0], [y0]
    for n in range(steps):
        t = t0 + n * dt
        if before_step is not None:
            before_step(y, t)
        k1 = explicit(y, t)
        y_pred = propagate(y + dt * k1)
        k2 = explicit(y_pred, t + dt)
        y = propagate(y + 0.5 * dt * k1) + 0.5 * dt * k2
        t_next = t0 + (n + 1) * dt
        if after_step is not None:
            after_step(y, t_next)
        if (n + 1) % snapshot_every == 0 or n + 1 == steps:
            times.append(t_next)
            states.append(y)
    return times, states


def default_snapshot_every(steps: int) -> int:
    return max(1, steps // 100)


def check_cfl(umax: float, dt: float, grid: TorusGrid):
    """Raise CFLViolation when max|u| dt M / (2 pi) > 1."""
    c = umax * dt * grid.points / (2 * math.pi)
    if c > 1:
        raise CFLViolation(f"CFL number {c:.4g} > 1 (max|u|={umax:.4g}, dt={dt:.4g}, M={grid.points})")


def max_speed(u_stack: Array) -> float:
    """max over the grid of |u| for a stack of velocity coefficient arrays."""
    vals = np.fft.ifftn(u_stack, axes=tuple(range(1, u_stack.ndim)), norm="forward").real
    return float(np.sqrt(np.max(np.sum(vals * vals, axis=0))))


@lru_cache(maxsize=64)
def heat_factor(dim: int, m: int, mu: float, dt: float) -> Array:
    f = np.exp(-mu * TorusGrid(dim, m).kmag2 * dt)
    f.flags.writeable = False
    return f


@lru_cache(maxsize=64)
def damping_factor(dim: int, m: int, rate: float, dt: float) -> Array:
    """exp(-rate dt) on every mode except k = 0, which is left alone."""
    f = np.full((m,) * dim, math.exp(-rate * dt))
    f[(0,) * dim] = 1.0
    f.flags.writeable = False
    return f


@lru_cache(maxsize=64)
def _lame_factors(dim: int, m: int, mu: float, lam: float, dt: float):
    g = TorusGrid(dim, m)
    ks = g.derivative_wavenumbers
    kd2 = sum(k * k for k in ks)
    et = np.exp(-mu * g.kmag2 * dt)
    el = np.exp((-mu * g.kmag2 - (lam + mu) * kd2) * dt)
    inv = np.zeros_like(kd2)
    nz = kd2 > 0
    inv[nz] = 1.0 / kd2[nz]
    return et, (el - et) * inv


def apply_lame_propagator(u_stack: Array, grid: TorusGrid, mu: float, lam: float, dt: float) -> Array:
    """exp(dt A) per mode: transverse part decays at mu|k|^2, longitudinal at nu|k|^2."""
    et, corr = _lame_factors(grid.dim, grid.points, mu, lam, dt)
    ks = grid.derivative_wavenumbers
    kdotu = sum(k * u for k, u in zip(ks, u_stack))
    return np.stack([et * u + corr * k * kdotu for k, u in zip(ks, u_stack)])


def expm2(b11, b12, b21, b22, t: float):
    """Entrywise exp(t B) for a field of 2x2 matrices B given by their entries.

    With s^2 = tau^2/4 - det the exponential is
        e^{tau t/2} (cosh(s t) I + sinh(s t)/s (B - tau/2 I)),
    evaluated through e^{(tau/2 +- s) t} when |s t| > 1 so nothing
    overflows for large negative eigenvalues, and through a series in s t
    near the double root.
    """
    tau = b11 + b22
    det = b11 * b22 - b12 * b21
    s = np.sqrt(np.asarray(tau * tau / 4 - det, dtype=complex))
    st = s * t
    half = tau / 2
    small = np.abs(st) < 1e-6
    safe_s = np.where(small, 1.0, s)
    # eigenvalues half +- s, the smaller one from det / larger to avoid cancellation
    lp, lm = half + s, half - s
    plus_big = np.abs(lp) >= np.abs(lm)
    big = np.where(plus_big, lp, lm)
    other = np.where(big != 0, det / np.where(big != 0, big, 1.0), 0)
    lp, lm = np.where(plus_big, lp, other), np.where(plus_big, other, lm)
    ep = np.exp(lp * t)
    em = np.exp(lm * t)
    pre = np.exp(half * t)
    near = np.abs(st) <= 1
    st_near = np.where(near, st, 0)
    ch = np.where(near, pre * np.cosh(st_near), (ep + em) / 2)
    sh_over_s = np.where(near, pre * np.sinh(st_near) / safe_s, (ep - em) / (2 * safe_s))
    ch = np.where(small, pre * (1 + st * st / 2), ch)
    sh_over_s = np.where(small, pre * t * (1 + st * st / 6), sh_over_s)
    return (
        ch + sh_over_s * (b11 - half),
        sh_over_s * b12,
        sh_over_s * b21,
        ch + sh_over_s * (b22 - half),
    )
