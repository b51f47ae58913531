"""Measurements behind every suite: each returns plain numbers or records."""
from __future__ import annotations

import math
from decimal import Decimal, getcontext
from typing import Iterable, Sequence

import numpy as np

from ..checks import InequalityRecord, fitted_order
from ..diagnostics import FunctionalIndices, data_functional, functional_series
from ..initial_data import small_data
from ..littlewood_paley import PHI, decompose, dyadic_block, level_range
from ..norms import (
    INF,
    BesovIndex,
    HybridIndex,
    TimeNormSpec,
    besov_norm,
    block_norm,
    chemin_lerner_norm,
    hybrid_norm,
    lebesgue_besov_norm,
    level_time_norms,
    sobolev_seminorm,
)
from ..paraproduct import bony_product, commutator_sum, paraproduct, remainder
from ..pde.effective import effective_velocity, effective_velocity_bd, lame_residual
from ..pde.integrate import EFFECTIVE, ORIGINAL, simulate
from ..pde.linear import (
    damped_transport_solve,
    green_matrix_eigen,
    heat_solve,
    linearized_solve,
)
from ..pde.models import BDViscosity, ConstantViscosity, FluidModel, FluidState, PressureLaw
from ..pde.nonlinear import pressure_coupling_residual
from ..spectral import (
    SpectralField,
    TorusGrid,
    VectorField,
    advect,
    curl,
    dilate,
    dealias,
    derivative,
    divergence,
    forward_transform,
    gradient,
    jacobian,
    lp_norm,
    product,
)

# ---------------------------------------------------------------- dyadic blocks


def partition_defect(count: int = 1000, lo: float = 1e-3, hi: float = 1e3) -> float:
    r = np.logspace(math.log10(lo), math.log10(hi), count)
    return float(np.max(np.abs(PHI.partition(r) - 1.0)))


def reconstruction_defect(u: SpectralField) -> float:
    """sup|sum_j Delta_j u + mean - u| / sup|u|."""
    rec = decompose(u).reconstruct()
    scale = float(np.max(np.abs(u.values())))
    return float(np.max(np.abs((rec - u).values()))) / scale


def orthogonality_defect(u: SpectralField) -> float:
    """max |Delta_j Delta_k u| over all pairs with |j - k| >= 2."""
    worst = 0.0
    levels = list(level_range(u.grid))
    for j in levels:
        bj = dyadic_block(u, j)
        for k in levels:
            if abs(j - k) >= 2:
                worst = max(worst, float(np.max(np.abs(dyadic_block(bj, k).coeffs))))
    return worst


def bernstein_ratios(u: SpectralField) -> list[tuple[int, float]]:
    """(j, ||grad Delta_j u||_2 / (2^j ||Delta_j u||_2)) for every nonzero block."""
    out = []
    for j in level_range(u.grid):
        b = dyadic_block(u, j)
        n = b.l2()
        if n > 0:
            out.append((j, gradient(b).l2() / (2.0**j * n)))
    return out


# ---------------------------------------------------------------- norms


def sobolev_factors(fields: Iterable[SpectralField], s: float) -> list[float]:
    """B^s_{2,2} norm over the spectral Sobolev seminorm."""
    return [besov_norm(u, BesovIndex(s, 2, 2)) / sobolev_seminorm(u, s) for u in fields]


def sobolev_symbol_bounds(s: float, count: int = 20001) -> tuple[float, float]:
    """Range of (sum_j 2^{2js} phi(r/2^j)^2)^{1/2} / r^s over r in [1, 2): the exact equivalence constants."""
    r = np.linspace(1.0, 2.0, count, endpoint=False)
    total = np.zeros_like(r)
    for j in range(-2, 3):
        total += 2.0 ** (2 * j * s) * PHI(r / 2.0**j) ** 2
    f = np.sqrt(total) / r**s
    return float(f.min()), float(f.max())


def log_interpolation_constant(u: SpectralField, s: float, eps: float, p: float = 2.0) -> float:
    """Smallest C with |u|_{B^s_{p,1}} <= C (1+eps)/eps |u|_{B^s_{p,inf}} (1 + log(|u|_{B^{s+eps}_{p,inf}} / |u|_{B^s_{p,inf}}))."""
    b1 = besov_norm(u, BesovIndex(s, p, 1))
    binf = besov_norm(u, BesovIndex(s, p, INF))
    beps = besov_norm(u, BesovIndex(s + eps, p, INF))
    return b1 / ((1 + eps) / eps * binf * (1 + math.log(beps / binf)))


def composition_quartering(u: SpectralField, s: float, p: float = 2.0) -> float:
    """|F(u)| / |F(u/2)| in B^s_{p,1} for F(x) = x^2/(1+x); close to 4 for small u."""
    def F(x):
        return x * x / (1 + x)

    def comp(a: SpectralField) -> SpectralField:
        return dealias(forward_transform(F(a.values()), a.grid))

    idx = BesovIndex(s, p, 1)
    return besov_norm(comp(u), idx) / besov_norm(comp(u * 0.5), idx)


def hybrid_reduction_defect(u: SpectralField, s: float, p: float) -> float:
    a = hybrid_norm(u, HybridIndex(s, s, p, p))
    b = besov_norm(u, BesovIndex(s, p, 1))
    return abs(a - b) / b


def minkowski_orderings(series: TimeNormSpec, s: float, p: float, rs: Sequence[float]) -> list[dict]:
    """Compare the per-block and per-time orderings of the time and level sums."""
    out = []
    for r in rs:
        cl = chemin_lerner_norm(series, s, p, r)
        lb = lebesgue_besov_norm(series, s, p, r)
        rho = series.rho
        if r >= rho:
            ok = cl <= lb * (1 + 1e-12)
        else:
            ok = cl >= lb * (1 - 1e-12)
        out.append({"r": r, "rho": rho, "tilde": cl, "plain": lb, "ordered": bool(ok)})
    return out


# ---------------------------------------------------------------- products


def _split_sums(f: SpectralField, s_lo: float, p_lo: float, s_hi: float, p_hi: float, cut: int = 0):
    lo = sum(2.0 ** (j * s_lo) * block_norm(f, j, p_lo) for j in level_range(f.grid) if j <= cut)
    hi = sum(2.0 ** (j * s_hi) * block_norm(f, j, p_hi) for j in level_range(f.grid) if j > cut)
    return lo, hi


def product_inequalities(u: SpectralField, v: SpectralField, case: int) -> list[InequalityRecord]:
    """All product, paraproduct, remainder and commutator ratios for one pair."""
    g = u.grid
    N = g.dim
    M = g.points
    recs = []
    uinf, vinf = lp_norm(u, INF), lp_norm(v, INF)
    uv = product(u, v)
    for s in (0.5, 1.0):
        b = BesovIndex(s, 2, 1)
        recs.append(InequalityRecord(f"product law s={s:g}", besov_norm(uv, b),
                                     uinf * besov_norm(v, b) + vinf * besov_norm(u, b), M, case))
    T = paraproduct(u, v)
    # all-L2 tuple: s1 = s3 = N/2, s2 = s4 = 0 -> target regularity 0 on both sides
    h = N / 2
    lo, hi = _split_sums(T, 0, 2, 0, 2)
    rhs = hybrid_norm(u, HybridIndex(h, h, 2, 2)) * hybrid_norm(v, HybridIndex(0, 0, 2, 2))
    recs.append(InequalityRecord("paraproduct hybrid L2 low", lo, rhs, M, case))
    recs.append(InequalityRecord("paraproduct hybrid L2 high", hi, rhs, M, case))
    # mixed tuple: p = p1 = p2 = 2, q = p3 = p4 = 4, s1 = N/2, s3 = N/4, s2 = 0, s4 = N/4
    lo, hi = _split_sums(T, 0, 2, N / 4, 4)
    rhs = hybrid_norm(u, HybridIndex(h, N / 4, 2, 4)) * hybrid_norm(v, HybridIndex(0, N / 4, 2, 4))
    recs.append(InequalityRecord("paraproduct hybrid mixed low", lo, rhs, M, case))
    recs.append(InequalityRecord("paraproduct hybrid mixed high", hi, rhs, M, case))
    idx = HybridIndex(0, 1, 2, 2)
    recs.append(InequalityRecord("paraproduct bounded factor", hybrid_norm(T, idx), uinf * hybrid_norm(v, idx), M, case))
    R = remainder(u, v)
    idx = HybridIndex(0.5, 1, 2, 2)
    recs.append(InequalityRecord("remainder bounded factor", hybrid_norm(R, idx), uinf * hybrid_norm(v, idx), M, case))
    # remainder branches with all exponents 2 and s1 = s2 = s3 = s4 = 1/2
    e = 1 - N / 2
    hi_r = sum(2.0 ** (l * e) * block_norm(R, l, 2) for l in level_range(g) if l >= 4)
    lo_r = sum(2.0 ** (l * e) * block_norm(R, l, 2) for l in level_range(g) if l <= 4)
    rhs = hybrid_norm(u, HybridIndex(0.5, 0.5, 2, 2)) * hybrid_norm(v, HybridIndex(0.5, 0.5, 2, 2))
    recs.append(InequalityRecord("remainder high levels", hi_r, rhs, M, case))
    recs.append(InequalityRecord("remainder low levels", lo_r, rhs, M, case))
    # commutator with sigma = 1, p = p1 = 2; velocity built from the pair
    vel = VectorField(tuple([u, v] + [u - v] * (N - 2)))
    lhs = commutator_sum(vel, v, 1.0)
    rhs = besov_norm(jacobian(vel), BesovIndex(N / 2, 2, 1)) * besov_norm(v, BesovIndex(1, 2, 1))
    recs.append(InequalityRecord("commutator sigma=1", lhs, rhs, M, case))
    return recs


# names whose per-grid maximum ratio must be resolution-stable
STABLE_NAMES = (
    "product law s=0.5",
    "product law s=1",
    "paraproduct hybrid L2 low",
    "paraproduct hybrid L2 high",
    "paraproduct hybrid mixed low",
    "paraproduct hybrid mixed high",
    "paraproduct bounded factor",
    "commutator sigma=1",
)
PRODUCT_NAMES = (
    "product law s=0.5",
    "product law s=1",
    "paraproduct hybrid L2 low",
    "paraproduct hybrid L2 high",
    "paraproduct hybrid mixed low",
    "paraproduct hybrid mixed high",
    "paraproduct bounded factor",
    "remainder bounded factor",
    "remainder high levels",
    "remainder low levels",
    "commutator sigma=1",
)


def bony_defect(u: SpectralField, v: SpectralField) -> float:
    """||Tuv + Tvu + R + mean product - (uv)||_2 / ||uv||_2 with uv the truncated product."""
    split = bony_product(u, v)
    uv = product(u, v)
    return (split.total() - uv).l2() / uv.l2()


# ---------------------------------------------------------------- linear problems


def heat_eigenmode_error(grid: TorusGrid, mu: float = 1.0, T: float = 1.0, steps: int = 50) -> float:
    """max over snapshots of |u(t) - e^{-4 mu t} e^{2 i x1}| for the mode k = (2, 0, ...)."""
    c = np.zeros(grid.shape, dtype=complex)
    c[(2,) + (0,) * (grid.dim - 1)] = 1.0
    u0 = SpectralField(grid, c, is_real=False)
    series = heat_solve(u0, None, mu, T, steps, snapshot_every=1)
    return max(float(np.max(np.abs(u.coeffs - c * math.exp(-4 * mu * t)))) for t, u in zip(series.times, series.states))


def heat_bound_constant(u0: SpectralField, f: SpectralField, mu: float, T: float, steps: int) -> InequalityRecord:
    """|u|_{L~1_T(B^2_{2,1})} against |u0|_{B^0_{2,1}} + |f|_{L~1_T(B^0_{2,1})} for constant f."""
    series = heat_solve(u0, f, mu, T, steps, snapshot_every=1)
    spec = TimeNormSpec(1.0, series.times, series.states)
    lhs = chemin_lerner_norm(spec, 2.0, 2.0, 1.0)
    rhs = besov_norm(u0, BesovIndex(0, 2, 1)) + T * besov_norm(f, BesovIndex(0, 2, 1))
    return InequalityRecord("heat smoothing", lhs, rhs, u0.grid.points)


def transport_decay_error(q0: SpectralField, alpha: float = 0.7, T: float = 1.0, steps: int = 40) -> float:
    series = damped_transport_solve(q0, None, alpha, None, T, steps, snapshot_every=1)
    scale = float(np.max(np.abs(q0.coeffs)))
    return max(float(np.max(np.abs(q.coeffs - q0.coeffs * math.exp(-alpha * t)))) / scale
               for t, q in zip(series.times, series.states))


def uniform_velocity(grid: TorusGrid, c: Sequence[float]) -> VectorField:
    return VectorField(tuple(SpectralField.constant(grid, float(ci)) for ci in c))


def translation_errors(q0: SpectralField, c: Sequence[float], T: float, steps_list: Sequence[int]) -> list[float]:
    """L2 error against q0(x - c T) for each step count."""
    g = q0.grid
    vel = uniform_velocity(g, c)
    phase = np.exp(-1j * T * sum(ci * k for ci, k in zip(c, g.derivative_wavenumbers)))
    exact = SpectralField(g, q0.coeffs * phase, q0.is_real)
    errs = []
    for n in steps_list:
        q = damped_transport_solve(q0, vel, 0.0, None, T, n).final
        errs.append((q - exact).l2())
    return errs


def transport_bound_ratio(q0: SpectralField, u: VectorField, F: SpectralField, alpha: float, T: float, steps: int,
                          s: float) -> InequalityRecord:
    """lhs = |q|_{L~inf(B^s_{2,1})} + |q|_{L~1(B^s_{2,1})}; rhs = e^U (|q0| + int e^{-U} |F|), C = 1."""
    series = damped_transport_solve(q0, u, alpha, F, T, steps, snapshot_every=1)
    spec = TimeNormSpec(INF, series.times, series.states)
    lhs = chemin_lerner_norm(spec, s, 2, 1) + chemin_lerner_norm(spec.with_rho(1.0), s, 2, 1)
    N = q0.grid.dim
    J = jacobian(u)
    du = besov_norm(J, BesovIndex(N / 2, 2, INF)) + lp_norm(J, INF)
    U = du * T
    fnorm = besov_norm(F, BesovIndex(s, 2, 1))
    forcing = fnorm * (1 - math.exp(-U)) / du if du > 0 else fnorm * T
    rhs = math.exp(U) * (besov_norm(q0, BesovIndex(s, 2, 1)) + forcing)
    return InequalityRecord("damped transport", lhs, rhs, q0.grid.points)


def decimal_roots(xi: float, nu: float, dP1: float, digits: int = 50) -> tuple[complex, complex]:
    """Quadratic-formula roots in 50-digit decimal arithmetic, (fast, slow) when real."""
    getcontext().prec = digits
    x, n, p = Decimal(repr(xi)), Decimal(repr(nu)), Decimal(repr(dP1))
    tau = -n * x * x
    disc = tau * tau / 4 - p * x * x
    if disc >= 0:
        r = disc.sqrt()
        return complex(float(tau / 2 - r)), complex(float(tau / 2 + r))
    r = (-disc).sqrt()
    return complex(float(tau / 2), float(r)), complex(float(tau / 2), float(-r))


def green_table(xis: Sequence[float], mu: float, lam: float, dP1: float, dim: int = 2) -> list[dict]:
    nu = 2 * mu + lam
    rows = []
    for xi in xis:
        m = green_matrix_eigen(xi, mu, lam, dP1, dim)
        oracle = decimal_roots(xi, nu, dP1)
        err = max(abs(a - b) / abs(b) for a, b in zip(m.compressible, oracle))
        rows.append({
            "xi": xi,
            "regime": m.regime,
            "roots": [[z.real, z.imag] for z in m.compressible],
            "oracle": [[z.real, z.imag] for z in oracle],
            "relative_error": err,
            "incompressible": list(m.incompressible),
        })
    return rows


def decoupling_defect(grid: TorusGrid, mu: float = 1.0, lam: float = 0.0, dP1: float = 1.0, T: float = 1.0,
                      steps: int = 20) -> tuple[float, float]:
    """Solenoidal data with q0 = 0: (max |q| over the run, max relative distance of u from the heat flow)."""
    x = grid.coordinates()
    psi = dealias(forward_transform(np.sin(x[0] + 2 * x[1]) + 0.3 * np.cos(3 * x[0] - x[1]), grid))
    comps = [derivative(psi, 1), -derivative(psi, 0)] + [SpectralField.zeros(grid)] * (grid.dim - 2)
    u0 = VectorField(tuple(comps))
    q0 = SpectralField.zeros(grid)
    series = linearized_solve(q0, u0, mu, lam, dP1, T, steps, snapshot_every=1)
    qmax = max(float(np.max(np.abs(q.coeffs))) for q, _ in series.states)
    umax = 0.0
    scale = u0.l2()
    for t, (_, u) in zip(series.times, series.states):
        heat = VectorField(tuple(SpectralField(grid, c.coeffs * np.exp(-mu * grid.kmag2 * t)) for c in u0))
        umax = max(umax, (u - heat).l2() / scale)
    return qmax, umax


def low_frequency_bound(q0: SpectralField, u0: VectorField, vel: VectorField, mu: float, lam: float, dP1: float,
                        T: float, steps: int, s: float) -> InequalityRecord:
    """Low-frequency norms of the linearized flow with a convection field, against data and convection terms."""
    g = q0.grid
    series = linearized_solve(q0, u0, mu, lam, dP1, T, steps, convection=vel, snapshot_every=1)
    bf = [j for j in level_range(g) if j <= 0]

    def cl(fields, s_, rho):
        spec = TimeNormSpec(rho, series.times, fields)
        return sum(2.0 ** (j * s_) * v for j, v in level_time_norms(spec, 2.0, bf).items())

    qs = [q for q, _ in series.states]
    us = [u for _, u in series.states]
    lhs = cl(qs, s, INF) + cl(us, s, INF) + cl(qs, s + 2, 1.0) + cl(us, s + 2, 1.0)
    conv_q = [advect(vel, q) for q in qs]
    conv_u = [VectorField(tuple(advect(vel, c) for c in u)) for u in us]
    data = sum(2.0 ** (j * s) * (block_norm(q0, j, 2) + block_norm(u0, j, 2)) for j in bf)
    rhs = data + cl(conv_q, s, 1.0) + cl(conv_u, s, 1.0)
    return InequalityRecord("linearized low frequencies", lhs, rhs, g.points)


# ---------------------------------------------------------------- nonlinear problems


def constant_model(gamma: float = 1.4, mu: float = 1.0, lam: float = 0.0) -> FluidModel:
    return FluidModel(PressureLaw(gamma), ConstantViscosity(mu, lam))


def effective_velocity_checks(grid: TorusGrid, eps: float = 1e-2, gamma: float = 1.4) -> dict[str, float]:
    """Per-mode divergence defect, curl size, and the variable-viscosity residual."""
    state = small_data(grid, eps)
    rho = state.q + SpectralField.constant(grid, 1.0)
    P = PressureLaw(gamma)
    ev = effective_velocity(rho, P, 2.0)
    gdev = ev.pressure_deviation
    div_defect = float(np.max(np.abs(divergence(ev.v).coeffs - gdev.coeffs))) / float(np.max(np.abs(gdev.coeffs)))
    c = curl(ev.v)
    curl_size = c.l2() if isinstance(c, SpectralField) else c.l2()
    curl_rel = curl_size / ev.v.l2()
    bd = BDViscosity(1.0, 1.0)
    evb = effective_velocity_bd(rho, bd, P)
    res_abs, res_rel = lame_residual(rho, bd, P, evb.v, evb.nu)
    return {
        "divergence_defect": div_defect,
        "curl_abs": curl_size,
        "curl_rel": curl_rel,
        "bd_residual_abs": res_abs,
        "bd_residual_rel": res_rel,
        "bd_iterations": evb.iterations,
    }


def formulation_gap(grid: TorusGrid, eps: float, T: float, steps_list: Sequence[int], gamma: float = 1.4) -> list[float]:
    """L2 distance of u at time T between the two formulations, per step count."""
    model = constant_model(gamma)
    s0 = small_data(grid, eps)
    out = []
    for n in steps_list:
        a = simulate(s0, model, T, n, ORIGINAL, snapshot_every=n)
        b = simulate(s0, model, T, n, EFFECTIVE, snapshot_every=n)
        out.append((a.final.u - b.final.u).l2())
    return out


def coupling_residuals(grid: TorusGrid, eps_list: Sequence[float], gamma: float = 1.4) -> list[float]:
    model = constant_model(gamma)
    out = []
    for e in eps_list:
        s = small_data(grid, e)
        out.append(pressure_coupling_residual(s, model).l2())
    return out


def slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    return fitted_order(xs, ys)


def trajectory_functionals(traj, indices: FunctionalIndices) -> dict[str, np.ndarray]:
    return functional_series(traj.times, [s.q for s in traj.states], [s.u for s in traj.states], indices)


def data_value(state: FluidState, indices: FunctionalIndices) -> float:
    return data_functional(state.q, state.u, indices)


# ---------------------------------------------------------------- scaling


def scaling_ratios(q0: SpectralField, u0: VectorField, p: float, factor: int = 2) -> dict[str, float]:
    """Critical norms before and after (q, u)(x) -> (q(l x), l u(l x)).

    ``cell`` ratios measure the rescaled field over its own period cell,
    which divides every L^p norm by l^{N/p}; ``torus`` ratios keep the
    normalized measure of the fixed torus.
    """
    N = q0.grid.dim
    cell = factor ** (-N / p)
    iq = BesovIndex(N / p, p, 1)
    iu = BesovIndex(N / p - 1, p, 1)
    q_l = dilate(q0, factor)
    u_l = VectorField(tuple(dilate(c, factor) * factor for c in u0))
    nq, nu_ = besov_norm(q0, iq), besov_norm(u0, iu)
    nq_l, nu_l = besov_norm(q_l, iq), besov_norm(u_l, iu)
    return {
        "q_cell": nq_l * cell / nq if nq > 0 else 1.0,
        "u_cell": nu_l * cell / nu_ if nu_ > 0 else 1.0,
        "q_torus": nq_l / nq if nq > 0 else 1.0,
        "u_torus": nu_l / nu_ if nu_ > 0 else 1.0,
        "q_norm": nq,
        "u_norm": nu_,
    }


def band_limited_field(grid: TorusGrid, rng: np.random.Generator, kmax: int) -> SpectralField:
    """Random real field with modes |k_j| <= kmax and unit L2 norm."""
    c = np.fft.fftn(rng.standard_normal(grid.shape), norm="forward")
    mask = np.ones(grid.shape, dtype=bool)
    for k in grid.wavenumbers:
        mask &= np.abs(k) <= kmax
    c = np.where(mask, c, 0)
    c[(0,) * grid.dim] = 0
    u = SpectralField(grid, c)
    return u / u.l2()

