import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from besovlab.corpus import random_field, random_vector
from besovlab.spectral import (
    DimensionMismatch,
    EllipticityViolation,
    GridMismatch,
    NonZeroMean,
    SpectralField,
    TorusGrid,
    VectorField,
    curl,
    dealias,
    derivative,
    dilate,
    divergence,
    forward_transform,
    grad_inverse_laplacian,
    gradient,
    hermitian_defect,
    inverse_laplacian,
    inverse_transform,
    lame_inverse,
    lame_operator,
    laplacian,
    lp_norm,
    product,
    resample,
)


def direct_dft(samples):
    """Naive O(M^4) sum c_k = M^-2 sum_x u(x) e^{-i k.x}, the independent oracle."""
    m = samples.shape[0]
    x = 2 * np.pi * np.arange(m) / m
    k = np.fft.fftfreq(m, 1 / m)
    e = np.exp(-1j * np.outer(k, x))
    return e @ samples @ e.T / m**2


def test_forward_transform_matches_direct_sum(rng):
    g = TorusGrid(2, 8)
    s = rng.standard_normal(g.shape)
    assert np.allclose(forward_transform(s, g).coeffs, direct_dft(s), atol=1e-14)


def test_roundtrip_and_parseval(rng):
    g = TorusGrid(2, 16)
    s = rng.standard_normal(g.shape)
    u = forward_transform(s, g)
    assert np.allclose(inverse_transform(u), s, atol=1e-13)
    assert math.isclose(u.l2(), math.sqrt(np.mean(s**2)), rel_tol=1e-13)


def test_wavenumber_convention():
    g = TorusGrid(2, 8)
    k = np.asarray(g.wavenumbers[0]).ravel()
    assert list(k) == [0, 1, 2, 3, 4, -3, -2, -1]
    kd = np.asarray(g.derivative_wavenumbers[0]).ravel()
    assert kd[4] == 0
    assert g.kmag2[4, 0] == 16


def test_derivatives_of_single_modes():
    g = TorusGrid(2, 16)
    x = g.coordinates()
    u = forward_transform(np.sin(3 * x[0]) * np.cos(2 * x[1]), g)
    assert np.allclose(derivative(u, 0).values(), 3 * np.cos(3 * x[0]) * np.cos(2 * x[1]), atol=1e-13)
    assert np.allclose(laplacian(u).values(), -13 * u.values(), atol=1e-12)
    assert np.allclose(inverse_laplacian(laplacian(u)).coeffs, u.coeffs, atol=1e-15)


def test_nyquist_mode_has_zero_derivative():
    g = TorusGrid(2, 8)
    x = g.coordinates()
    u = forward_transform(np.cos(4 * x[0]), g)
    assert derivative(u, 0).l2() == 0.0


def test_l4_norm_of_cosine():
    g = TorusGrid(2, 32)
    x = g.coordinates()
    u = forward_transform(np.cos(x[0]), g)
    assert math.isclose(lp_norm(u, 4), (3 / 8) ** 0.25, rel_tol=1e-13)
    assert math.isclose(lp_norm(u, math.inf), 1.0, rel_tol=1e-13)
    assert math.isclose(lp_norm(u, 1), float(np.mean(np.abs(np.cos(x[0])))), rel_tol=1e-13)


def test_product_is_dealiased_pointwise_product(rng):
    g = TorusGrid(2, 32)
    u, v = random_field(g, rng), random_field(g, rng)
    uv = product(u, v)
    assert np.allclose(uv.coeffs, dealias(forward_transform(u.values() * v.values(), g)).coeffs, atol=1e-16)


def test_product_of_low_modes_is_exact():
    g = TorusGrid(2, 32)
    x = g.coordinates()
    u = forward_transform(np.sin(x[0]), g)
    v = forward_transform(np.cos(x[1]), g)
    assert np.allclose(product(u, v).values(), np.sin(x[0]) * np.cos(x[1]), atol=1e-14)


def test_inverse_laplacian_rejects_mean():
    g = TorusGrid(2, 8)
    with pytest.raises(NonZeroMean):
        inverse_laplacian(SpectralField.constant(g, 1.0))


def test_gradient_inverse_laplacian_is_curl_free(grid, rng):
    f = random_field(grid, rng)
    v = grad_inverse_laplacian(f)
    assert np.allclose(divergence(v).coeffs, f.coeffs, atol=1e-15)
    c = curl(v)
    assert c.l2() < 1e-14


def test_lame_inverse_roundtrip(grid, rng):
    w = random_vector(grid, rng)
    back = lame_inverse(lame_operator(w, 1.0, 0.5), 1.0, 0.5)
    assert (back - w).l2() < 1e-13 * w.l2()
    with pytest.raises(EllipticityViolation):
        lame_operator(w, 1.0, -3.0)


def test_grid_mismatch_raises():
    a = SpectralField.zeros(TorusGrid(2, 8))
    b = SpectralField.zeros(TorusGrid(2, 16))
    with pytest.raises(GridMismatch):
        a + b


def test_vector_dimension_checked():
    g = TorusGrid(2, 8)
    with pytest.raises((DimensionMismatch, ValueError)):
        divergence(VectorField((SpectralField.zeros(g),) * 3))


def test_resample_keeps_common_modes(rng):
    fine, coarse = TorusGrid(2, 64), TorusGrid(2, 32)
    u = dealias(resample(random_field(fine, rng, k0=2.0), coarse))
    back = resample(u, fine)
    assert (resample(back, coarse) - u).l2() < 1e-15


def test_dilate_moves_modes():
    g = TorusGrid(2, 16)
    x = g.coordinates()
    u = forward_transform(np.sin(x[0] + 2 * x[1]), g)
    assert np.allclose(dilate(u, 2).values(), np.sin(2 * x[0] + 4 * x[1]), atol=1e-14)
    with pytest.raises(ValueError):
        dilate(u, 4)


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity_and_realness(seed, a, b):
    g = TorusGrid(2, 16)
    rng = np.random.default_rng(seed)
    u, v = random_field(g, rng), random_field(g, rng)
    w = u * a + v * b
    assert hermitian_defect(w) < 1e-15
    assert np.allclose(gradient(w).stack(), gradient(u).stack() * a + gradient(v).stack() * b, atol=1e-13)
    assert not np.iscomplexobj(w.values())
