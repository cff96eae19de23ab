import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochweyl.lattice import (LatticeSpec, character_chi1, character_chi2,
                               decompose_even_odd, pairing, parity_split_double,
                               reduce_to_cell, reduce_to_double_cell, sigma1_indices,
                               unit_phase)


def test_pairing_examples():
    assert pairing([1.0], [0.5]) == pytest.approx(np.pi)
    assert pairing([0.0, 0.0], [3.1, -2.7]) == 0.0
    assert pairing([1.0, -1.0], [0.25, 0.25]) == pytest.approx(0.0, abs=1e-15)


def test_pairing_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        pairing([1.0, 2.0], [0.5])


def test_lattice_spec_validation():
    LatticeSpec(1)
    with pytest.raises(ValueError):
        LatticeSpec(0)


def test_section_examples():
    x_hat, gamma = reduce_to_cell(np.array([0.75]))
    assert x_hat[0] == pytest.approx(-0.25) and gamma[0] == 1
    x_hat, gamma = reduce_to_cell(np.array([-0.5]))
    assert x_hat[0] == -0.5 and gamma[0] == 0
    x_hat, gamma = reduce_to_cell(np.array([1.5, -0.3]))
    assert np.allclose(x_hat, [-0.5, -0.3]) and np.array_equal(gamma, [2, 0])


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=3))
@settings(max_examples=200, deadline=None)
def test_section_idempotent_and_consistent(coords):
    x = np.array(coords)
    x_hat, gamma = reduce_to_cell(x)
    assert np.all(x_hat >= -0.5) and np.all(x_hat < 0.5)
    assert np.allclose(x_hat + gamma, x, atol=1e-9)
    again, gamma2 = reduce_to_cell(x_hat)
    assert np.array_equal(gamma2, np.zeros_like(gamma2))
    assert np.array_equal(again, x_hat)


def test_parity_examples():
    even, par = decompose_even_odd(np.array([3]))
    assert even[0] == 1 and par[0] == 1
    even, par = decompose_even_odd(np.array([-1]))
    assert even[0] == -1 and par[0] == 1
    even, par = decompose_even_odd(np.array([4, -2]))
    assert np.array_equal(even, [2, -1]) and np.array_equal(par, [0, 0])


@given(st.lists(st.integers(-10, 10), min_size=1, max_size=3))
def test_parity_reconstruction(gamma):
    g = np.array(gamma)
    even, par = decompose_even_odd(g)
    assert np.array_equal(2 * even + par, g)
    assert np.all((par == 0) | (par == 1))


def test_character_examples():
    assert character_chi1([0], [0.37]) == pytest.approx(1.0)
    assert character_chi1([1], [-0.5]) == pytest.approx(-1.0)
    assert character_chi1([2], [0.25]) == pytest.approx(-1.0)
    assert character_chi2([0], [0.9]) == pytest.approx(1.0)
    assert character_chi2([1], [0.5]) == pytest.approx(-1j)


@given(st.integers(-5, 5), st.floats(-0.5, 0.499), st.floats(-0.5, 0.499))
@settings(max_examples=100, deadline=None)
def test_chi1_group_character(nu, za, zb):
    a, b = np.array([za]), np.array([zb])
    prod, _ = reduce_to_cell(a + b)
    lhs = character_chi1([nu], prod)
    rhs = character_chi1([nu], a) * character_chi1([nu], b)
    assert abs(lhs - rhs) < 1e-12
    assert abs(abs(lhs) - 1.0) < 1e-14


@given(st.integers(-4, 4), st.floats(-1.0, 0.999))
@settings(max_examples=200, deadline=None)
def test_double_cover_square_law(nu, t):
    """chi2(nu, z)^2 = chi1(nu, projected) * e^{-i <nu, kappa>} with kappa in {0,1}^d."""
    z2 = np.array([t])
    j2, kappa = parity_split_double(z2)
    lhs = character_chi2([nu], z2) ** 2
    rhs = character_chi1([nu], j2) * unit_phase(-pairing([float(nu)], kappa.astype(float)))
    assert abs(lhs - rhs) < 1e-14


def test_double_cell_reduction():
    t, g = reduce_to_double_cell(np.array([2.3]))
    assert t[0] == pytest.approx(0.3) and g[0] == 2
    t, g = reduce_to_double_cell(np.array([-1.0]))
    assert t[0] == -1.0 and g[0] == 0


def test_sigma1_enumeration():
    s1 = sigma1_indices(2)
    assert s1.shape == (4, 2)
    assert [tuple(r) for r in s1] == [(0, 0), (0, 1), (1, 0), (1, 1)]
