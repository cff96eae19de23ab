import numpy as np
import pytest

from blochweyl.fiber import DualWindow, build_fiber_matrix
from blochweyl.lattice import pairing, reduce_to_double_cell, unit_phase
from blochweyl.symbols import CutoffProfile, TrigSeries, free_symbol, schrodinger_symbol
from blochweyl.torus_kernel import (GridSpec, ToroidalSymbolSeq, amplitude_value,
                                    apply_kernel, build_amplitude, build_kernel,
                                    default_kernel_window, difference_op, grid_inner,
                                    matrix_from_kernel, quantize_kohn_nirenberg,
                                    quantize_symmetric, symmetric_kernel, translate_grid,
                                    weyl_apply, _resample_double)

GRID = GridSpec(64, 1)
PROF = CutoffProfile(8)
XI = np.array([0.3])


# ---------------------------------------------------------------------------
# difference operators
# ---------------------------------------------------------------------------

def _constant_seq(grid, value=2.5, radius=3):
    idx = np.arange(-radius, radius + 1).reshape(-1, 1)
    vals = np.full((idx.shape[0], grid.n), value, dtype=complex)
    return ToroidalSymbolSeq(idx, vals, grid)


def test_difference_of_constant_vanishes_on_interior():
    grid = GridSpec(8, 1)
    seq = difference_op(_constant_seq(grid), 0)
    for idx, val in zip(seq.indices, seq.values):
        if -3 <= idx[0] + 1 <= 3 and -3 <= idx[0] <= 3:
            assert np.max(np.abs(val)) == 0.0


def test_difference_of_linear_is_constant():
    grid = GridSpec(8, 1)
    idx = np.arange(-4, 5).reshape(-1, 1)
    vals = np.tile(idx.astype(complex), (1, grid.n))
    seq = difference_op(ToroidalSymbolSeq(idx, vals, grid), 0)
    for i, val in zip(seq.indices, seq.values):
        if -4 <= i[0] and i[0] + 1 <= 4:
            assert np.allclose(val, 1.0)


def test_differences_commute(rng):
    grid = GridSpec(4, 2)
    idx = np.array([(i, j) for i in range(-2, 3) for j in range(-2, 3)])
    vals = rng.normal(size=(idx.shape[0], 4, 4)) + 1j * rng.normal(size=(idx.shape[0], 4, 4))
    seq = ToroidalSymbolSeq(idx, vals, grid)
    ab = difference_op(difference_op(seq, 0), 1)
    ba = difference_op(difference_op(seq, 1), 0)
    assert np.array_equal(ab.indices, ba.indices)
    assert np.array_equal(ab.values, ba.values)


# ---------------------------------------------------------------------------
# amplitudes
# ---------------------------------------------------------------------------

def test_amplitude_x_independent_collapses():
    """Character orthogonality kills every half-shifted momentum term."""
    amp = build_amplitude(free_symbol(1), XI, [2.0], GRID, cutoff=PROF)
    spread = np.max(np.abs(amp.values - amp.values.flat[0]))
    assert spread < 1e-13
    expected = (2 * np.pi) ** 2 * (2.0 + XI[0]) ** 2 * PROF.value(np.array([2.0 + XI[0]]))
    assert amp.values.flat[0] == pytest.approx(complex(expected), abs=1e-10)


def test_amplitude_table_matches_direct_formula(mathieu):
    amp = build_amplitude(mathieu, XI, [3.0], GRID, cutoff=PROF)
    pts = GRID.points()
    direct = amplitude_value(mathieu, XI, [3.0], pts[:, None, :], pts[None, :, :],
                             cutoff=PROF)
    assert np.max(np.abs(amp.values - direct)) < 1e-13


def test_amplitude_lattice_periodicity(mathieu, rng):
    xs = rng.uniform(-1.5, 1.5, size=(16, 1))
    ys = rng.uniform(-1.5, 1.5, size=(16, 1))
    base = amplitude_value(mathieu, XI, [1.0], xs, ys, cutoff=PROF)
    for shift in ((1.0, 0.0), (0.0, 1.0), (2.0, -1.0)):
        moved = amplitude_value(mathieu, XI, [1.0], xs + shift[0], ys + shift[1],
                                cutoff=PROF)
        assert np.max(np.abs(moved - base)) < 1e-13


def test_amplitude_kappa_sign_equivalence(mathieu, rng):
    """The two midpoint conventions agree by the symbol's periodicity."""
    xs = rng.uniform(-1, 1, size=(12, 1))
    ys = rng.uniform(-1, 1, size=(12, 1))
    plus = amplitude_value(mathieu, XI, [1.0], xs, ys, cutoff=PROF)
    minus = amplitude_value(mathieu, XI, [1.0], xs, ys, cutoff=PROF, minus_kappa=True)
    assert np.max(np.abs(plus - minus)) < 1e-13


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def test_kernel_convolution_for_fourier_multiplier():
    kern = build_kernel(free_symbol(1), XI, DualWindow(10, 1), GRID, cutoff=PROF)
    scale = np.max(np.abs(kern.values))
    assert kern.translation_invariance_defect() < 1e-13 * scale


def test_kernel_hermitian_form(mathieu):
    radius = default_kernel_window(mathieu, XI, PROF)
    kern = build_kernel(mathieu, XI, DualWindow(radius, 1), GRID, cutoff=PROF)
    scale = np.max(np.abs(kern.values))
    assert kern.hermitian_form_defect() < 1e-12 * scale


def test_kernel_empty_window_rejected(mathieu):
    with pytest.raises(ValueError, match="empty"):
        build_kernel(mathieu, XI, np.zeros((0, 1)), GRID, cutoff=PROF)


def test_kernel_distribution_regime_flagged(mathieu):
    kern = build_kernel(mathieu, XI, DualWindow(2, 1), GRID, cutoff=None)
    assert kern.provenance["distribution_regime"] is True


def test_apply_kernel_linearity_and_reproduction(rng):
    kern = build_kernel(free_symbol(1), XI, DualWindow(10, 1), GRID, cutoff=PROF)
    phi = rng.normal(size=64) + 1j * rng.normal(size=64)
    psi = rng.normal(size=64) + 1j * rng.normal(size=64)
    lhs = apply_kernel(kern, 2.0 * phi - 1j * psi)
    rhs = 2.0 * apply_kernel(kern, phi) - 1j * apply_kernel(kern, psi)
    assert np.max(np.abs(lhs - rhs)) < 1e-9
    # identity-approximant: flat symbol reproduces band-limited functions
    from blochweyl.symbols import PeriodicSymbol, Polynomial
    flat = PeriodicSymbol(1, {(0,): Polynomial({(): 1.0})})
    window = DualWindow(10, 1)
    kern_id = build_kernel(flat, [0.0], window, GRID, cutoff=CutoffProfile(8))
    mode = unit_phase(-pairing([3.0], GRID.points()))
    out = apply_kernel(kern_id, mode)
    assert np.max(np.abs(out.ravel() - mode)) < 1e-12


def test_apply_kernel_grid_mismatch(mathieu):
    kern = build_kernel(mathieu, XI, DualWindow(4, 1), GRID, cutoff=PROF)
    with pytest.raises(ValueError, match="grid mismatch"):
        apply_kernel(kern, np.zeros(32))


def test_matrix_from_kernel_routes(mathieu):
    """Two independent routes to the fiber matrix coincide (desk tolerance 1e-10)."""
    window = DualWindow(2, 1)
    for sym in (free_symbol(1), mathieu):
        radius = default_kernel_window(sym, XI, PROF)
        kern = build_kernel(sym, XI, DualWindow(radius, 1), GRID, cutoff=PROF)
        got = matrix_from_kernel(kern, window)
        want = build_fiber_matrix(sym.with_cutoff(PROF), XI, window).entries
        assert np.max(np.abs(got - want)) < 1e-10


def test_matrix_from_kernel_plane_wave_pairing(mathieu):
    """<e_a, K e_b> computed by kernel application matches the matrix element."""
    radius = default_kernel_window(mathieu, XI, PROF)
    kern = build_kernel(mathieu, XI, DualWindow(radius, 1), GRID, cutoff=PROF)
    window = DualWindow(1, 1)
    mat = matrix_from_kernel(kern, window)
    pts = GRID.points()
    for a, alpha in enumerate(window.indices):
        for b, beta in enumerate(window.indices):
            ea = unit_phase(-pairing(alpha.astype(float), pts))
            eb = unit_phase(-pairing(beta.astype(float), pts))
            val = grid_inner(ea, apply_kernel(kern, eb).ravel(), GRID)
            assert abs(val - mat[a, b]) < 1e-11


def test_matrix_from_kernel_alias_guard(mathieu):
    small = GridSpec(8, 1)
    radius = default_kernel_window(mathieu, XI, PROF)
    kern = build_kernel(mathieu, XI, DualWindow(radius, 1), small, cutoff=PROF)
    with pytest.raises(ValueError, match="aliasing risk"):
        matrix_from_kernel(kern, DualWindow(2, 1))


def test_zero_symbol_zero_matrix():
    from blochweyl.symbols import PeriodicSymbol
    zero = PeriodicSymbol(1, {})
    kern = build_kernel(zero, XI, DualWindow(3, 1), GRID, cutoff=PROF)
    assert np.max(np.abs(matrix_from_kernel(kern, DualWindow(1, 1)))) == 0.0


def test_route_equivalence_2d():
    v2 = TrigSeries(2, {(1, 0): 0.4, (-1, 0): 0.4})
    sym = schrodinger_symbol(v2)
    grid = GridSpec(16, 2)
    prof = CutoffProfile(2)
    xi = np.array([0.2, -0.1])
    kern = build_kernel(sym, xi, DualWindow(4, 2), grid, cutoff=prof)
    window = DualWindow(1, 2)
    got = matrix_from_kernel(kern, window)
    want = build_fiber_matrix(sym.with_cutoff(prof), xi, window).entries
    assert np.max(np.abs(got - want)) < 1e-10


# ---------------------------------------------------------------------------
# Weyl system
# ---------------------------------------------------------------------------

def test_weyl_identity_element(rng):
    grid = GridSpec(32, 1)
    f = rng.normal(size=32) + 1j * rng.normal(size=32)
    out = weyl_apply([0.0], [0], f, grid)
    assert np.max(np.abs(out - f)) == 0.0


def test_weyl_requires_grid_alignment(rng):
    grid = GridSpec(32, 1)
    f = rng.normal(size=32)
    with pytest.raises(ValueError, match="grid-aligned"):
        weyl_apply([0.015], [1], f, grid)
    out = weyl_apply([0.015], [1], f, grid, interpolate=True)
    assert out.shape == (32,)


def test_translate_grid_interpolation_matches_exact_shift():
    grid = GridSpec(32, 1)
    pts = grid.points()
    mode = unit_phase(-pairing([2.0], pts))
    shift = np.array([0.2371])
    moved = translate_grid(mode, shift, grid, interpolate=True)
    expected = unit_phase(-pairing([2.0], pts + shift))
    assert np.max(np.abs(moved - expected)) < 1e-12


def test_weyl_composition_and_adjoint(rng):
    grid = GridSpec(32, 1)
    worst_comp = worst_adj = 0.0
    for _ in range(25):
        z1 = np.array([rng.integers(0, 64)]) / 32 - 1.0
        z2 = np.array([rng.integers(0, 64)]) / 32 - 1.0
        a_s = rng.integers(-3, 4, size=1)
        b_s = rng.integers(-3, 4, size=1)
        f = rng.normal(size=32) + 1j * rng.normal(size=32)
        g = rng.normal(size=32) + 1j * rng.normal(size=32)
        t1, _ = reduce_to_double_cell(z1)
        t2, _ = reduce_to_double_cell(z2)
        left = weyl_apply(z1, a_s, weyl_apply(z2, b_s, f, grid), grid)
        phase = unit_phase(0.5 * (pairing(a_s.astype(float), t2)
                                  - pairing(b_s.astype(float), t1)))
        right = phase * weyl_apply(t1 + t2, a_s + b_s, f, grid)
        worst_comp = max(worst_comp, float(np.max(np.abs(left - right))))
        lhs = grid_inner(weyl_apply(z1, a_s, f, grid), g, grid)
        rhs = grid_inner(f, weyl_apply(-t1, -a_s, g, grid), grid)
        worst_adj = max(worst_adj, abs(lhs - rhs))
    assert worst_comp < 1e-12
    assert worst_adj < 1e-12


def test_weyl_composition_2d(rng):
    grid = GridSpec(8, 2)
    for _ in range(10):
        z1 = rng.integers(0, 16, size=2) / 8 - 1.0
        z2 = rng.integers(0, 16, size=2) / 8 - 1.0
        a_s = rng.integers(-2, 3, size=2)
        b_s = rng.integers(-2, 3, size=2)
        f = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        t1, _ = reduce_to_double_cell(z1)
        t2, _ = reduce_to_double_cell(z2)
        left = weyl_apply(z1, a_s, weyl_apply(z2, b_s, f, grid), grid)
        phase = unit_phase(0.5 * (pairing(a_s.astype(float), t2)
                                  - pairing(b_s.astype(float), t1)))
        right = phase * weyl_apply(t1 + t2, a_s + b_s, f, grid)
        assert np.max(np.abs(left - right)) < 1e-12


# ---------------------------------------------------------------------------
# quantizations
# ---------------------------------------------------------------------------

def test_resample_double_exact_for_band_limited(rng):
    grid = GridSpec(16, 1)
    pts = grid.points()
    dpts = grid.double_points()
    coeffs = {m: complex(rng.normal(), rng.normal()) for m in range(-5, 6)}
    data = sum(c * unit_phase(-pairing([float(m)], pts)) for m, c in coeffs.items())
    doubled = _resample_double(data, 16, 1)
    expected = sum(c * unit_phase(-pairing([float(m)], dpts)) for m, c in coeffs.items())
    assert np.max(np.abs(doubled.ravel() - expected)) < 1e-13


def test_symmetric_quantization_constant_momentum_is_identity(rng):
    """A momentum-constant sequence (all indices) acts as c * identity on
    band-limited data; restricting it to the single index 0 leaves only the
    averaging projector times c."""
    grid = GridSpec(32, 1)
    c = 1.7 - 0.3j
    idx = np.arange(-12, 13).reshape(-1, 1)
    vals = np.full((idx.shape[0], grid.n), c, dtype=complex)
    seq = ToroidalSymbolSeq(idx, vals, grid)
    pts = grid.points()
    phi = sum(rng.normal() * unit_phase(-pairing([float(m)], pts)) for m in range(-5, 6))
    out = quantize_symmetric(seq, phi, grid)
    assert np.max(np.abs(out.ravel() - c * phi)) < 1e-12

    only0 = ToroidalSymbolSeq(np.array([[0]]), np.full((1, grid.n), c, dtype=complex), grid)
    out0 = quantize_symmetric(only0, phi, grid)
    assert np.max(np.abs(out0.ravel() - c * np.mean(phi))) < 1e-12


def test_symmetric_quantization_matches_fiber_matrix(mathieu):
    """Sampling the symbol on the half-integer dual lattice reproduces the fiber."""
    grid = GridSpec(32, 1)
    cut = mathieu.with_cutoff(CutoffProfile(6))
    window = DualWindow(2, 1)
    indices = np.arange(-4 * window.radius - 2, 4 * window.radius + 3).reshape(-1, 1)
    seq = ToroidalSymbolSeq.from_symbol(cut, XI, indices, grid, half_index=True)
    got = matrix_from_kernel(symmetric_kernel(seq, grid), window)
    want = build_fiber_matrix(cut, XI, window).entries
    assert np.max(np.abs(got - want)) < 1e-10


def test_symmetric_quantization_fiber_consistency_2d():
    v2 = TrigSeries(2, {(0, 1): 0.4, (0, -1): 0.4})
    sym = schrodinger_symbol(v2).with_cutoff(CutoffProfile(2))
    grid = GridSpec(16, 2)
    window = DualWindow(1, 2)
    rng_idx = np.array([(i, j) for i in range(-4, 5) for j in range(-4, 5)])
    seq = ToroidalSymbolSeq.from_symbol(sym, [0.2, -0.1], rng_idx, grid, half_index=True)
    got = matrix_from_kernel(symmetric_kernel(seq, grid), window)
    want = build_fiber_matrix(sym, [0.2, -0.1], window).entries
    assert np.max(np.abs(got - want)) < 1e-10


def test_symmetric_adjoint_law(mathieu, rng):
    grid = GridSpec(32, 1)
    cut = mathieu.with_cutoff(CutoffProfile(6))
    seq = ToroidalSymbolSeq.from_symbol(cut, [0.2], np.arange(-8, 9).reshape(-1, 1),
                                        grid, half_index=True)
    for _ in range(10):
        phi = rng.normal(size=32) + 1j * rng.normal(size=32)
        psi = rng.normal(size=32) + 1j * rng.normal(size=32)
        lhs = grid_inner(psi, quantize_symmetric(seq, phi, grid), grid)
        rhs = grid_inner(quantize_symmetric(seq.conj(), psi, grid), phi, grid)
        assert abs(lhs - rhs) < 1e-10


def test_kohn_nirenberg_examples(rng):
    grid = GridSpec(32, 1)
    pts = grid.points()
    phi = rng.normal(size=32) + 1j * rng.normal(size=32)
    # indicator at 0: averaging projector onto the constant mode
    proj = ToroidalSymbolSeq(np.array([[0]]), np.ones((1, 32), dtype=complex), grid)
    out = quantize_kohn_nirenberg(proj, phi, grid)
    assert np.max(np.abs(out.ravel() - np.mean(phi))) < 1e-12
    # x-independent sequences: KN and symmetric quantizations act identically
    # when fed the same momentum function on their respective index grids
    momentum = lambda z: 1.0 / (1.0 + z**2)
    kn_idx = np.arange(-6, 7).reshape(-1, 1)
    kn_vals = np.array([[momentum(float(k))] * 32 for k in kn_idx[:, 0]], dtype=complex)
    kn_seq = ToroidalSymbolSeq(kn_idx, kn_vals, grid)
    sym_idx = np.arange(-12, 13).reshape(-1, 1)
    sym_vals = np.array([[momentum(k / 2.0)] * 32 for k in sym_idx[:, 0]], dtype=complex)
    sym_seq = ToroidalSymbolSeq(sym_idx, sym_vals, grid)
    band = sum(rng.normal() * unit_phase(-pairing([float(m)], pts)) for m in range(-6, 7))
    kn_out = quantize_kohn_nirenberg(kn_seq, band, grid)
    sym_out = quantize_symmetric(sym_seq, band, grid)
    assert np.max(np.abs(kn_out - sym_out)) < 1e-12


def test_kohn_nirenberg_vs_symmetric_differ_for_x_dependent(mathieu, rng):
    """For x-dependent sequences the two orderings differ; record the gap."""
    grid = GridSpec(32, 1)
    cut = mathieu.with_cutoff(CutoffProfile(4))
    idx = np.arange(-6, 7).reshape(-1, 1)
    kn_seq = ToroidalSymbolSeq.from_symbol(cut, [0.2], idx, grid, half_index=False)
    sym_seq = ToroidalSymbolSeq.from_symbol(cut, [0.2], np.arange(-12, 13).reshape(-1, 1),
                                            grid, half_index=True)
    phi = rng.normal(size=32) + 1j * rng.normal(size=32)
    gap = np.max(np.abs(quantize_kohn_nirenberg(kn_seq, phi, grid)
                        - quantize_symmetric(sym_seq, phi, grid)))
    assert gap > 1e-6  # genuinely different quantizations
