import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from besovlab.corpus import POWER, random_field
from besovlab.norms import (
    INF,
    BesovIndex,
    HybridIndex,
    InsufficientSnapshots,
    TimeNormSpec,
    besov_norm,
    block_norm,
    chemin_lerner_norm,
    hybrid_norm,
    lebesgue_besov_norm,
    lr_sum,
    sobolev_seminorm,
    sum_space_norm,
    time_norm,
)
from besovlab.spectral import SpectralField, TorusGrid, forward_transform


@pytest.fixture
def cos11():
    g = TorusGrid(2, 32)
    c = np.zeros(g.shape, dtype=complex)
    c[11, 0] = c[-11, 0] = 0.5
    return SpectralField(g, c)


def test_single_block_field(cos11):
    # |k| = 11 lies where only block 3 is active: Delta_3 u = u
    assert block_norm(cos11, 3, 2) == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    assert block_norm(cos11, 3, INF) == pytest.approx(1.0, rel=1e-14)
    assert block_norm(cos11, 2, 2) == 0.0
    for r in (1, 2, INF):
        assert besov_norm(cos11, BesovIndex(0.5, 2, r)) == pytest.approx(2**1.5 / math.sqrt(2), rel=1e-14)


def test_two_block_field_weights():
    """|k| = 4 splits between blocks 1 and 2 with weights phi(2), phi(1)."""
    from besovlab.littlewood_paley import PHI

    g = TorusGrid(2, 32)
    x = g.coordinates()
    u = forward_transform(np.cos(4 * x[0]), g)
    a, b = float(PHI(2.0)), float(PHI(1.0))
    expected = (2**1 * a + 2**2 * b) / math.sqrt(2)
    assert besov_norm(u, BesovIndex(1, 2, 1)) == pytest.approx(expected, rel=1e-14)


def test_index_validation():
    with pytest.raises(ValueError):
        BesovIndex(0, 0.5, 1)
    with pytest.raises(ValueError):
        HybridIndex(0, 0, 2, 0.9)


def test_lr_sum():
    assert lr_sum([3, 4], 2) == pytest.approx(5)
    assert lr_sum([3, 4], 1) == 7
    assert lr_sum([3, 4], INF) == 4


def test_hybrid_reduces_to_besov(rng):
    u = random_field(TorusGrid(2, 32), rng, POWER)
    assert hybrid_norm(u, HybridIndex(0.5, 0.5, 2, 2)) == pytest.approx(besov_norm(u, BesovIndex(0.5, 2, 1)), rel=1e-13)


def test_hybrid_uses_high_index_above_threshold(cos11):
    # block 3 > 0 uses (t, q)
    assert hybrid_norm(cos11, HybridIndex(-5, 1, 2, INF)) == pytest.approx(8.0, rel=1e-14)


def test_sum_space_is_blockwise_minimum(rng):
    u = random_field(TorusGrid(2, 32), rng, POWER)
    a, b = HybridIndex(0, 1, 2, 2), HybridIndex(1, 0, 2, 2)
    s = sum_space_norm(u, [a, b])
    assert s <= min(hybrid_norm(u, a), hybrid_norm(u, b)) + 1e-15


def test_mean_is_excluded():
    g = TorusGrid(2, 16)
    assert besov_norm(SpectralField.constant(g, 3.0), BesovIndex(0, 2, 1)) == 0.0


def test_time_norm_of_exponential():
    t = np.linspace(0, 1, 2001)
    v = np.exp(-t)
    assert time_norm(t, v, 1) == pytest.approx(1 - math.exp(-1), rel=1e-7)
    assert time_norm(t, v, 2) == pytest.approx(math.sqrt((1 - math.exp(-2)) / 2), rel=1e-7)
    assert time_norm(t, v, INF) == 1.0


def test_time_spec_validation(cos11):
    with pytest.raises(InsufficientSnapshots):
        TimeNormSpec(1, (0.0,), (cos11,))
    with pytest.raises(ValueError):
        TimeNormSpec(1, (0.0, 0.0), (cos11, cos11))


def _decaying(u, times):
    g = u.grid
    return TimeNormSpec(1.0, tuple(times), tuple(SpectralField(g, u.coeffs * np.exp(-g.kmag2 * t)) for t in times))


@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 2.0, INF]), st.sampled_from([1.0, 2.0, INF]))
def test_minkowski_ordering(seed, rho, r):
    u = random_field(TorusGrid(2, 16), np.random.default_rng(seed), POWER)
    spec = _decaying(u, np.linspace(0, 0.5, 11)).with_rho(rho)
    cl = chemin_lerner_norm(spec, 0.5, 2, r)
    lb = lebesgue_besov_norm(spec, 0.5, 2, r)
    if r >= rho:
        assert cl <= lb * (1 + 1e-12)
    if r <= rho:
        assert cl >= lb * (1 - 1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(-1, 2))
def test_sobolev_equivalence_bounds(seed, s):
    from besovlab.experiments.measure import sobolev_symbol_bounds

    u = random_field(TorusGrid(2, 32), np.random.default_rng(seed), POWER)
    ratio = besov_norm(u, BesovIndex(s, 2, 2)) / sobolev_seminorm(u, s)
    lo, hi = sobolev_symbol_bounds(s)
    assert lo * (1 - 1e-9) <= ratio <= hi * (1 + 1e-9)


@given(st.integers(0, 2**32 - 1))
def test_r_embedding(seed):
    u = random_field(TorusGrid(2, 16), np.random.default_rng(seed), POWER)
    n = [besov_norm(u, BesovIndex(0.3, 2, r)) for r in (1, 2, INF)]
    assert n[0] >= n[1] >= n[2]
