import numpy as np
import pytest

from besovlab.initial_data import small_data
from besovlab.pde.effective import (
    effective_velocity,
    effective_velocity_bd,
    lame_residual,
    pressure_deviation,
    solve_variable_lame,
)
from besovlab.pde.models import BDViscosity, ConstantViscosity, FixedPointDiverged, PressureLaw
from besovlab.spectral import SpectralField, TorusGrid, curl, divergence, gradient, lame_inverse


def _rho(grid, eps):
    return small_data(grid, eps).q + SpectralField.constant(grid, 1.0)


def test_pressure_law():
    P = PressureLaw(1.4)
    assert P.P(1.0) == 1.0
    assert P.dP1 == pytest.approx(1.4)
    assert P.deviation(1.0) == 0.0


def test_divergence_and_curl(grid):
    rho = _rho(grid, 1e-2)
    ev = effective_velocity(rho, PressureLaw(1.4), 2.0)
    g = ev.pressure_deviation
    assert abs(g.mean) == 0
    assert np.max(np.abs(divergence(ev.v).coeffs - g.coeffs)) <= 1e-12 * np.max(np.abs(g.coeffs))
    assert curl(ev.v).l2() <= 1e-12 * ev.v.l2()


def test_pressure_deviation_is_mean_free():
    g = TorusGrid(2, 32)
    d = pressure_deviation(_rho(g, 0.1), PressureLaw(2.0))
    assert d.mean == 0


def test_constant_viscosity_paths_agree():
    g = TorusGrid(2, 32)
    rho = _rho(g, 1e-2)
    P = PressureLaw(1.4)
    vis = ConstantViscosity(1.0, 0.0)
    a = effective_velocity(rho, P, vis.nu)
    b = effective_velocity_bd(rho, vis, P)
    assert (a.v - b.v).l2() <= 1e-14 * a.v.l2()


def test_bd_fixed_point_residual():
    g = TorusGrid(2, 32)
    rho = _rho(g, 1e-2)
    model = BDViscosity(1.0, 1.0)
    P = PressureLaw(1.4)
    ev = effective_velocity_bd(rho, model, P)
    _, rel = lame_residual(rho, model, P, ev.v, ev.nu)
    assert rel <= 1e-8
    assert ev.iterations >= 1


def test_bd_reduces_to_constant_coefficient_inverse_at_rho_one():
    g = TorusGrid(2, 16)
    rho = SpectralField.constant(g, 1.0)
    model = BDViscosity(1.0, 1.0)
    rhs = gradient(small_data(g, 0.1).q)
    w, its = solve_variable_lame(rho, model, rhs)
    assert (w - lame_inverse(rhs, model.mu1, model.lam1)).l2() < 1e-14


def test_fixed_point_gives_up():
    g = TorusGrid(2, 32)
    rho = _rho(g, 0.5)
    with pytest.raises(FixedPointDiverged):
        solve_variable_lame(rho, BDViscosity(1.0, 3.0), gradient(rho), tol=1e-15, max_iter=2)
