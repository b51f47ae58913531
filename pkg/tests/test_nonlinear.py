import pytest

from besovlab.checks import fitted_order
from besovlab.initial_data import small_data
from besovlab.pde.integrate import EFFECTIVE, ORIGINAL, simulate
from besovlab.pde.models import (
    BDViscosity,
    CFLViolation,
    ConstantViscosity,
    FluidModel,
    FluidState,
    PressureLaw,
    VacuumApproach,
)
from besovlab.pde.nonlinear import (
    from_effective,
    linearized_rhs,
    nonlinear_rhs,
    pressure_coupling_residual,
    reformulated_rhs,
    to_effective,
)
from besovlab.spectral import SpectralField, TorusGrid, VectorField

MODEL = FluidModel(PressureLaw(1.4), ConstantViscosity(1.0, 0.0))


def test_rest_state_is_stationary(grid):
    s = FluidState(SpectralField.zeros(grid), VectorField.zeros(grid))
    dq, du = nonlinear_rhs(s, MODEL)
    assert dq.l2() == 0 and du.l2() == 0
    traj = simulate(s, MODEL, 1.0, 10)
    assert traj.final.q.l2() == 0 and traj.final.u.l2() == 0


@pytest.mark.parametrize("model", [MODEL, FluidModel(PressureLaw(2.0), BDViscosity(1.0, 1.0))], ids=["const", "bd"])
def test_linearization_error_is_quadratic(model):
    g = TorusGrid(2, 32)
    eps = (1e-2, 1e-3, 1e-4)
    errs = []
    for e in eps:
        s = small_data(g, e)
        dq, du = nonlinear_rhs(s, model)
        lq, lu = linearized_rhs(s, model)
        errs.append((dq - lq).l2() + (du - lu).l2())
    assert 1.9 <= fitted_order(eps, errs) <= 2.1


def test_effective_variables_roundtrip():
    g = TorusGrid(2, 32)
    s = small_data(g, 1e-2)
    back = from_effective(to_effective(s, MODEL), MODEL)
    assert (back.u - s.u).l2() < 1e-15 and (back.q - s.q).l2() == 0


def test_reformulated_rhs_is_consistent():
    """d/dt (v1 + w) must reproduce the original momentum right side."""
    g = TorusGrid(2, 32)
    s = small_data(g, 1e-2)
    e = to_effective(s, MODEL)
    dq, du = nonlinear_rhs(s, MODEL)
    dq2, dv1 = reformulated_rhs(e, MODEL)
    assert (dq - dq2).l2() <= 1e-14 * dq.l2()
    h = 1e-6
    w_plus = (to_effective(FluidState(s.q + dq * h, s.u), MODEL).v1 - e.v1) * (-1 / h)
    assert (dv1 + w_plus - du).l2() <= 1e-5 * du.l2()


def test_coupling_residual_scales_quadratically():
    g = TorusGrid(2, 32)
    eps = (1e-2, 1e-3, 1e-4)
    r = [pressure_coupling_residual(small_data(g, e), MODEL).l2() for e in eps]
    assert 1.9 <= fitted_order(eps, r) <= 2.1


def test_mass_is_conserved():
    g = TorusGrid(2, 32)
    traj = simulate(small_data(g, 0.05), MODEL, 1.0, 50)
    assert max(abs(m - 1) for m in traj.masses()) <= 1e-14


def test_formulations_agree_to_second_order():
    g = TorusGrid(2, 32)
    s = small_data(g, 1e-3)
    steps = (50, 100, 200)
    gaps = []
    for n in steps:
        a = simulate(s, MODEL, 1.0, n, ORIGINAL, snapshot_every=n)
        b = simulate(s, MODEL, 1.0, n, EFFECTIVE, snapshot_every=n)
        gaps.append((a.final.u - b.final.u).l2())
    assert 1.8 <= fitted_order([1 / n for n in steps], gaps) <= 2.2


def test_vacuum_and_cfl_are_detected():
    g = TorusGrid(2, 32)
    with pytest.raises(VacuumApproach):
        simulate(small_data(g, 0.95), MODEL, 1.0, 20)
    with pytest.raises(CFLViolation):
        simulate(small_data(g, 0.5), MODEL, 10.0, 2)


def test_unknown_formulation():
    g = TorusGrid(2, 8)
    with pytest.raises(ValueError):
        simulate(small_data(g, 0.0), MODEL, 1.0, 1, "lagrangian")
