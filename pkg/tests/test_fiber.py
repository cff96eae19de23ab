import numpy as np
import pytest

from blochweyl.fiber import (DualWindow, band_periodicity_check, build_fiber_matrix,
                             hermiticity_defect)
from blochweyl.oracle import fd_bloch_spectrum
from blochweyl.spectra import eig_hermitian
from blochweyl.symbols import (PeriodicSymbol, Polynomial, TrigSeries, free_symbol,
                               potential_symbol, schrodinger_symbol)

TWO_PI_SQ = (2 * np.pi) ** 2


def test_window_ordering_deterministic():
    w = DualWindow(1, 2)
    assert [tuple(r) for r in w.indices] == [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0),
                                             (0, 1), (1, -1), (1, 0), (1, 1)]
    assert w.size == 9
    assert w.position(np.array([0, 1])) == 5
    assert w.position(np.array([2, 0])) == -1


def test_free_symbol_diagonal():
    mat = build_fiber_matrix(free_symbol(1), [0.25], DualWindow(1, 1))
    diag = np.real(np.diag(mat.entries))
    assert np.allclose(diag, TWO_PI_SQ * np.array([1.5625, 0.0625, 0.5625]), atol=1e-12)
    off = mat.entries - np.diag(np.diag(mat.entries))
    assert np.max(np.abs(off)) == 0.0


def test_cosine_potential_band_matrix():
    cosine = potential_symbol(TrigSeries.cosine(1, (1,), 2.0))
    mat = build_fiber_matrix(cosine, [0.4], DualWindow(3, 1)).entries
    expected = np.eye(7, k=1) + np.eye(7, k=-1)
    assert np.allclose(mat, expected, atol=1e-15)


def test_mathieu_ground_state_vs_fd_oracle(mathieu):
    vals = eig_hermitian(build_fiber_matrix(mathieu, [0.0], DualWindow(16, 1)))
    oracle = fd_bloch_spectrum(TrigSeries.cosine(1, (1,), 2.0), [0.0], 2048, k_keep=1)
    assert abs(vals[0] - oracle[0]) / max(abs(oracle[0]), 1e-2) < 1e-4


def test_hermiticity_cases(mathieu, rng):
    for _ in range(10):
        xi = rng.uniform(-0.5, 0.5, size=1)
        assert hermiticity_defect(build_fiber_matrix(mathieu, xi, DualWindow(8, 1))) < 1e-12
    # non-real symbol: only the +1 frequency present
    lopsided = PeriodicSymbol(1, {(1,): Polynomial({(): 1.0})})
    defect = hermiticity_defect(build_fiber_matrix(lopsided, [0.2], DualWindow(2, 1)))
    assert defect == pytest.approx(1.0)
    assert hermiticity_defect(build_fiber_matrix(free_symbol(1), [0.2], DualWindow(2, 1))) == 0.0


def test_band_periodicity_exact_and_generic(mathieu):
    # dyadic momentum: the index-shift identity is bitwise exact
    assert band_periodicity_check(mathieu, [0.125], [1], DualWindow(12, 1)) == 0.0
    # generic momentum: one representation rounding of xi+1, amplified by the
    # entry slope; stays at the 1e-12 scale for desk windows
    assert band_periodicity_check(mathieu, [0.13], [1], DualWindow(12, 1)) < 1e-11
    assert band_periodicity_check(mathieu, [0.3], [0], DualWindow(4, 1)) == 0.0
    assert band_periodicity_check(free_symbol(1), [0.37], [1], DualWindow(6, 1)) < 1e-11


def test_band_periodicity_margin_guard(mathieu):
    with pytest.raises(ValueError, match="margin"):
        band_periodicity_check(mathieu, [0.1], [2], DualWindow(3, 1), margin=2)


def test_entry_formula_invariance(mathieu):
    """M(xi + g*)[a, b] = M(xi)[a - g*, b - g*] wherever both sides exist."""
    w = DualWindow(5, 1)
    m0 = build_fiber_matrix(mathieu, [0.125], w).entries
    m1 = build_fiber_matrix(mathieu, [1.125], w).entries
    inner = DualWindow(4, 1)
    rows1 = w.position(inner.indices)
    rows0 = w.position(inner.indices - np.array([1]))
    assert np.array_equal(m1[np.ix_(rows1, rows1)], m0[np.ix_(rows0, rows0)])


def test_diagonal_only_reduction():
    """A momentum-only symbol gives the Fourier-multiplier diagonal."""
    sym = PeriodicSymbol(1, {(0,): Polynomial({(1,): 2.0, (0,): 1.0})})
    w = DualWindow(3, 1)
    mat = build_fiber_matrix(sym, [0.2], w).entries
    assert np.allclose(mat, np.diag(np.diag(mat)))
    for k, alpha in enumerate(w.indices):
        assert mat[k, k] == pytest.approx(2.0 * (0.2 - alpha[0]) + 1.0)


def test_translation_in_xi_consistency(mathieu):
    a = 0.17
    w = DualWindow(6, 1)
    lhs = build_fiber_matrix(mathieu.shift([a]), [0.21], w).entries
    rhs = build_fiber_matrix(mathieu, [0.21 + a], w).entries
    assert np.max(np.abs(lhs - rhs)) < 1e-11


def test_free_2d_diagonal():
    mat = build_fiber_matrix(free_symbol(2), [0.1, 0.3], DualWindow(1, 2))
    w = mat.window
    for k, alpha in enumerate(w.indices):
        expected = TWO_PI_SQ * ((0.1 - alpha[0]) ** 2 + (0.3 - alpha[1]) ** 2)
        assert mat.entries[k, k] == pytest.approx(expected)
    assert hermiticity_defect(mat) == 0.0


def test_mathieu_2d_vs_fd_oracle():
    v2 = TrigSeries(2, {(1, 0): 0.75, (-1, 0): 0.75, (0, 1): 0.5, (0, -1): 0.5})
    sym = schrodinger_symbol(v2)
    vals = eig_hermitian(build_fiber_matrix(sym, [0.1, 0.2], DualWindow(6, 2)))[:3]
    oracle = fd_bloch_spectrum(v2, [0.1, 0.2], 32, k_keep=3)
    assert np.max(np.abs(vals - oracle) / np.maximum(np.abs(oracle), 1.0)) < 2e-3
