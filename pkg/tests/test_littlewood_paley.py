import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from besovlab.corpus import POWER, random_field
from besovlab.littlewood_paley import (
    J_MIN,
    PHI,
    SUPPORT,
    block_weights,
    decompose,
    dyadic_block,
    level_range,
    low_freq_cutoff,
    smooth_cutoff,
    split_bf_hf,
)
from besovlab.spectral import SpectralField, TorusGrid, forward_transform, gradient


def test_cutoff_is_flat_then_zero():
    assert smooth_cutoff(0.0) == 1.0
    assert smooth_cutoff(0.75) == 1.0
    assert smooth_cutoff(4 / 3) == 0.0
    assert 0 < smooth_cutoff(1.0) < 1
    r = np.linspace(0.75, 4 / 3, 200)
    assert np.all(np.diff(smooth_cutoff(r)) <= 0)


def test_bump_support_and_values():
    assert SUPPORT == (0.75, 8 / 3)
    assert PHI(0.5) == 0.0 and PHI(3.0) == 0.0
    assert PHI(0.74) == 0.0 and PHI(2.67) == 0.0
    # on [4/3, 3/2] only one block is active
    assert PHI(1.4) == 1.0
    assert PHI(1.0) + PHI(2.0) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(1e-3, 1e3))
def test_partition_of_unity(r):
    assert abs(PHI.partition(np.array([r]))[0] - 1.0) <= 1e-12


@given(st.floats(0.1, 100.0))
def test_at_most_two_blocks_active(r):
    active = [j for j in range(-5, 10) if PHI(r / 2.0**j) > 0]
    assert 1 <= len(active) <= 2
    if len(active) == 2:
        assert active[1] == active[0] + 1


def test_level_range():
    # sqrt(2) 64 = 90.5; ceil(log2 90.5) + 1 = 8
    assert level_range(TorusGrid(2, 128)) == range(-1, 9)
    assert level_range(TorusGrid(2, 32)).start == J_MIN


def test_support_enumeration_matches_symbol():
    """Modes carried by block 2 are exactly those with |k| in (3, 32/3)."""
    g = TorusGrid(2, 32)
    w = block_weights(g, 2)
    k = g.kmag
    assert np.all(w[(k <= 3) | (k >= 32 / 3)] == 0)
    assert np.all(w[(k > 3) & (k < 32 / 3)] > 0)
    assert set(np.round(k[w == 1.0] ** 2).astype(int)) >= {36}


def test_reconstruction(grid, rng):
    u = random_field(grid, rng, POWER) + SpectralField.constant(grid, 0.3)
    rec = decompose(u).reconstruct()
    assert np.max(np.abs((rec - u).values())) <= 1e-12 * np.max(np.abs(u.values()))


def test_blocks_are_almost_orthogonal(rng):
    g = TorusGrid(2, 64)
    u = random_field(g, rng, POWER)
    for j in level_range(g):
        for k in level_range(g):
            if abs(j - k) >= 2:
                assert np.all(dyadic_block(dyadic_block(u, j), k).coeffs == 0)


def test_bernstein(rng):
    g = TorusGrid(2, 64)
    u = random_field(g, rng, POWER)
    for j in level_range(g):
        b = dyadic_block(u, j)
        if b.l2() > 0:
            ratio = gradient(b).l2() / b.l2()
            assert 0.75 * 2**j <= ratio <= 8 / 3 * 2**j


def test_low_frequency_cutoff_includes_mean():
    g = TorusGrid(2, 32)
    x = g.coordinates()
    u = forward_transform(2.0 + np.cos(x[0]) + np.cos(11 * x[1]), g)
    low = low_freq_cutoff(u, 2)
    assert np.allclose(low.values(), 2.0 + np.cos(x[0]), atol=1e-14)


def test_split_bf_hf():
    g = TorusGrid(2, 32)
    x = g.coordinates()
    u = forward_transform(1.0 + np.cos(x[0]) + np.cos(11 * x[1]), g)
    lo, hi = split_bf_hf(u)
    assert np.allclose(lo.values(), np.cos(x[0]), atol=1e-14)
    assert np.allclose(hi.values(), np.cos(11 * x[1]), atol=1e-14)
