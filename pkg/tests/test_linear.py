import math

import numpy as np
import pytest
import sympy as sp
from scipy.linalg import expm
from scipy.optimize import brentq

from besovlab.checks import fitted_order
from besovlab.corpus import random_field
from besovlab.pde.linear import (
    LinearizedPropagator,
    compressible_roots,
    critical_wavenumber,
    damped_transport_solve,
    green_matrix_eigen,
    heat_solve,
    linearized_solve,
)
from besovlab.pde.models import CFLViolation, NonPositiveViscosity, ZeroWavenumber
from besovlab.pde.stepping import expm2
from besovlab.spectral import EllipticityViolation, SpectralField, TorusGrid, VectorField, forward_transform

# roots of z^2 + |xi|^2 z + |xi|^2 (nu = 1, P'(1) = 1), 40-digit mpmath values
GREEN_ORACLE = {
    1.0: (complex(-0.5, -0.8660254037844386467637232), complex(-0.5, 0.8660254037844386467637232)),
    2.0: (complex(-2.0), complex(-2.0)),
    100.0: (complex(-9998.99989997999499859958), complex(-1.000100020005001400420132)),
}


@pytest.mark.parametrize("xi", sorted(GREEN_ORACLE))
def test_green_roots_against_oracle(xi):
    m = green_matrix_eigen(xi, 0.5, 0.0, 1.0)
    got = sorted(m.compressible, key=lambda z: (z.real, z.imag))
    want = sorted(GREEN_ORACLE[xi], key=lambda z: (z.real, z.imag))
    for a, b in zip(got, want):
        assert abs(a - b) <= 1e-12 * abs(b)
    assert m.incompressible == (-0.5 * xi * xi,)


def test_generator_spectrum_matches_roots():
    m = green_matrix_eigen([1.0, 2.0], 0.7, 0.3, 1.4)
    ev = np.sort_complex(np.linalg.eigvals(m.generator))
    assert np.allclose(ev, np.sort_complex(np.array(m.eigenvalues)), atol=1e-12)


def test_regimes_and_critical_wavenumber():
    assert critical_wavenumber(1.0, 1.0) == 2.0
    disc = lambda x: (x * x / 2) ** 2 - x * x  # noqa: E731
    assert brentq(disc, 1.0, 3.0) == pytest.approx(2.0, rel=1e-12)
    assert green_matrix_eigen(1.0, 0.5, 0, 1).regime == "oscillatory"
    assert green_matrix_eigen(2.0, 0.5, 0, 1).regime == "critical"
    assert green_matrix_eigen(3.0, 0.5, 0, 1).regime == "overdamped"


def test_high_frequency_limit():
    slow = compressible_roots(1e4, 1.0, 1.0)[1].real
    assert slow == pytest.approx(-1.0, rel=1e-7)


def test_green_errors():
    with pytest.raises(ZeroWavenumber):
        green_matrix_eigen(0.0, 1, 0, 1)
    with pytest.raises(EllipticityViolation):
        green_matrix_eigen(1.0, 1, -3, 1)


@pytest.mark.parametrize("k,dt", [(0.5, 0.1), (2.0, 0.3), (2.001, 0.3), (100.0, 0.1), (1000.0, 1.0)])
def test_expm2_against_scipy(k, dt):
    B = np.array([[0, -1j * k], [-1j * k, -k * k]])
    e = np.array(expm2(*[np.array(x) for x in B.ravel()], dt)).reshape(2, 2)
    assert np.allclose(e, expm(B * dt), atol=1e-12, rtol=1e-12)


def test_propagator_matches_matrix_exponential():
    g = TorusGrid(2, 8)
    prop = LinearizedPropagator(g, 0.7, 0.2, 1.3, 0.05)
    y = np.zeros((3,) + g.shape, dtype=complex)
    y[:, 1, 2] = [0.3, -0.2 + 0.1j, 0.5]
    out = prop(y)[:, 1, 2]
    gen = green_matrix_eigen([1.0, 2.0], 0.7, 0.2, 1.3).generator
    assert np.allclose(out, expm(gen * 0.05) @ y[:, 1, 2], atol=1e-14)


def test_heat_eigenmode():
    g = TorusGrid(2, 16)
    c = np.zeros(g.shape, dtype=complex)
    c[2, 0] = 1.0
    u0 = SpectralField(g, c, is_real=False)
    s = heat_solve(u0, None, 1.0, 1.0, 10, snapshot_every=1)
    for t, u in zip(s.times, s.states):
        assert np.max(np.abs(u.coeffs - c * math.exp(-4 * t))) <= 1e-12


def test_heat_rejects_nonpositive_viscosity():
    with pytest.raises(NonPositiveViscosity):
        heat_solve(SpectralField.zeros(TorusGrid(2, 8)), None, 0.0, 1.0, 1)


def test_heat_manufactured_solution_second_order():
    """u = sin(t) sin(x0) cos(2 x1) with the forcing sympy derives from it."""
    t, x0, x1 = sp.symbols("t x0 x1")
    mu = sp.Rational(1, 2)
    exact = sp.sin(t) * sp.sin(x0) * sp.cos(2 * x1)
    f_expr = sp.diff(exact, t) - mu * (sp.diff(exact, x0, 2) + sp.diff(exact, x1, 2))
    f_num = sp.lambdify((t, x0, x1), f_expr, "numpy")
    u_num = sp.lambdify((t, x0, x1), exact, "numpy")
    g = TorusGrid(2, 16)
    x = g.coordinates()

    def forcing(s):
        return forward_transform(np.broadcast_to(f_num(s, x[0], x[1]), g.shape), g)

    steps = (100, 200, 400)
    errs = []
    for n in steps:
        u = heat_solve(SpectralField.zeros(g), forcing, 0.5, 2.0, n).final
        errs.append(float(np.max(np.abs(u.values() - u_num(2.0, x[0], x[1])))))
    assert 1.8 <= fitted_order([1 / n for n in steps], errs) <= 2.2


def test_transport_decay_and_cfl(rng):
    g = TorusGrid(2, 16)
    q0 = random_field(g, rng) + SpectralField.constant(g, 1.0)
    q = damped_transport_solve(q0, None, 0.5, None, 2.0, 10).final
    assert np.max(np.abs(q.coeffs - q0.coeffs * math.exp(-1.0))) <= 1e-14
    fast = VectorField((SpectralField.constant(g, 100.0), SpectralField.constant(g, 0.0)))
    with pytest.raises(CFLViolation):
        damped_transport_solve(q0, fast, 0.0, None, 1.0, 10)


def test_transport_translation_order(rng):
    g = TorusGrid(2, 32)
    q0 = random_field(g, rng)
    c = (1.0, 0.5)
    vel = VectorField(tuple(SpectralField.constant(g, ci) for ci in c))
    phase = np.exp(-1j * sum(ci * k for ci, k in zip(c, g.derivative_wavenumbers)))
    exact = SpectralField(g, q0.coeffs * phase)
    steps = (20, 40, 80)
    errs = [(damped_transport_solve(q0, vel, 0.0, None, 1.0, n).final - exact).l2() for n in steps]
    assert 1.8 <= fitted_order([1 / n for n in steps], errs) <= 2.2


def test_linearized_solve_without_convection_is_exact():
    g = TorusGrid(2, 8)
    c = np.zeros(g.shape, dtype=complex)
    c[1, 2] = 0.3
    c[-1, -2] = 0.3
    q0 = SpectralField(g, c)
    u0 = VectorField.zeros(g)
    s = linearized_solve(q0, u0, 0.7, 0.2, 1.3, 0.5, 7)
    y0 = np.array([0.3, 0, 0], dtype=complex)
    gen = green_matrix_eigen([1.0, 2.0], 0.7, 0.2, 1.3).generator
    want = expm(gen * 0.5) @ y0
    q, u = s.final
    assert np.allclose([q.coeffs[1, 2], u[0].coeffs[1, 2], u[1].coeffs[1, 2]], want, atol=1e-14)
