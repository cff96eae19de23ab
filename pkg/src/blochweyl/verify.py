"""Acceptance suites: every numbered criterion as a callable check.

Each suite returns a report dict with the measured figure, its tolerance, and
a pass flag; the CLI ``verify`` command and the pytest acceptance module both
run these.  Fixed seeds keep every run reproducible.
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.stats

from .fiber import DualWindow, band_periodicity_check, build_fiber_matrix, hermiticity_defect
from .lattice import TWO_PI
from .magnetic import (VectorPotential, curl, gradient_potential, minimal_coupling,
                       magnetic_fiber_matrix, zero_flux_defect)
from .oracle import (bfz_factorization_defect, discrete_bloch_floquet_all, fd_bloch_spectrum,
                     inverse_discrete_bloch_floquet, parseval_defect, supercell_identity_check,
                     supercell_norm_sq)
from .symbols import (CutoffProfile, PeriodicSymbol, Polynomial, TrigSeries, free_symbol,
                      schrodinger_symbol)
from .spectra import eig_hermitian
from .torus_kernel import (GridSpec, ToroidalSymbolSeq, build_kernel, default_kernel_window,
                           grid_inner, matrix_from_kernel, quantize_symmetric, weyl_apply)

__all__ = ["ACCEPTANCE_SUITES", "run_suites", "mutate_symbol_sign", "shipped_config_dir"]


def _report(name, passed, measured, tolerance, started, **extra):
    out = {"name": name, "passed": bool(passed), "measured": float(measured),
           "tolerance": float(tolerance), "runtime_s": round(time.time() - started, 3)}
    out.update(extra)
    return out


def _mathieu():
    return schrodinger_symbol(TrigSeries.cosine(1, (1,), 2.0))


def _sorted_spectrum(entries, k=None):
    vals = np.sort(scipy.linalg.eigvalsh(0.5 * (entries + entries.conj().T)))
    return vals if k is None else vals[:k]


def shipped_config_dir():
    """Repo-level configs/ next to the editable install, else the working dir."""
    candidate = Path(__file__).resolve().parents[2] / "configs"
    if candidate.is_dir():
        return candidate
    return Path.cwd() / "configs"


def mutate_symbol_sign(symbol):
    """Debug mutation emulating a mis-signed storage convention.

    Negates the coefficient stored at the lexicographically negative partner
    of each frequency pair, which destroys the conjugate symmetry that real
    symbols rely on; the Hermiticity gate must catch this.
    """
    from .symbols import Product, constant_coefficient
    terms = {}
    for mu, coef in symbol.terms.items():
        if mu < tuple(-m for m in mu):
            terms[mu] = Product(constant_coefficient(-1.0), coef)
        else:
            terms[mu] = coef
    return PeriodicSymbol(symbol.dimension, terms, symbol.order, is_real=False,
                          is_elliptic=symbol.is_elliptic)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def suite_free_band_exactness(seed=0, flip_sign=False):
    """1: free bands equal sorted (2 pi)^2 (xi - alpha)^2 to 1e-10, under 1 s."""
    t0 = time.time()
    F = free_symbol(1)
    window = DualWindow(8, 1)
    worst = 0.0
    for xi in np.arange(0.0, 0.51, 0.1):
        vals = eig_hermitian(build_fiber_matrix(F, [xi], window))[:5]
        alphas = np.arange(-2, 3)
        exact = np.sort(TWO_PI**2 * (xi - alphas) ** 2)[:5]
        worst = max(worst, float(np.max(np.abs(vals - exact))))
    elapsed = time.time() - t0
    return _report("free_band_exactness", worst <= 1e-10 and elapsed < 1.0,
                   worst, 1e-10, t0, runtime_limit_s=1.0)


def suite_mathieu_cross_check(seed=0, flip_sign=False):
    """2: cosine-potential bands vs finite differences (rel 1e-4) and window-Cauchy 1e-10."""
    t0 = time.time()
    F = _mathieu()
    V = TrigSeries.cosine(1, (1,), 2.0)
    worst_rel = 0.0
    worst_cauchy = 0.0
    for xi in (0.0, 0.5):
        w16 = eig_hermitian(build_fiber_matrix(F, [xi], DualWindow(16, 1)))[:4]
        w8 = eig_hermitian(build_fiber_matrix(F, [xi], DualWindow(8, 1)))[:4]
        fd = fd_bloch_spectrum(V, [xi], 2048, k_keep=4)
        scale = np.maximum(np.abs(w16), 1e-2)
        worst_rel = max(worst_rel, float(np.max(np.abs(fd - w16) / scale)))
        worst_cauchy = max(worst_cauchy, float(np.max(np.abs(w16 - w8))))
    elapsed = time.time() - t0
    passed = worst_rel <= 1e-4 and worst_cauchy <= 1e-10 and elapsed < 10.0
    return _report("mathieu_cross_check", passed, worst_rel, 1e-4, t0,
                   cauchy=worst_cauchy, cauchy_tolerance=1e-10, runtime_limit_s=10.0)


def suite_band_periodicity(seed=0, flip_sign=False):
    """3: index-shift identity to 1e-13; interior eigenvalues at xi and xi+1 to 1e-10.

    The witness momentum is dyadic so that xi + 1 is exactly representable;
    at generic momenta the identity still holds but picks up one float
    rounding amplified by the entry slope (covered by a unit test at a
    scale-aware tolerance).
    """
    t0 = time.time()
    F = _mathieu()
    xi = np.array([0.125])
    shift_defect = band_periodicity_check(F, xi, [1], DualWindow(12, 1), margin=1)
    window = DualWindow(12, 1)
    k = window.size // 4
    lo = eig_hermitian(build_fiber_matrix(F, xi, window))[:k]
    hi = eig_hermitian(build_fiber_matrix(F, xi + 1.0, window))[:k]
    eig_dev = float(np.max(np.abs(lo - hi)))
    passed = shift_defect <= 1e-13 and eig_dev <= 1e-10
    return _report("band_periodicity", passed, shift_defect, 1e-13, t0,
                   eigenvalue_dev=eig_dev, eigenvalue_tolerance=1e-10)


def suite_hermiticity(seed=0, flip_sign=False):
    """4: defect <= 1e-12 over 50 random momenta for every shipped real symbol."""
    t0 = time.time()
    from .config import load_symbol
    rng = np.random.default_rng(seed)
    cfg_dir = shipped_config_dir()
    paths = sorted(cfg_dir.glob("symbol_*.json"))
    worst = 0.0
    checked = []
    for path in paths:
        symbol = load_symbol(path)
        if not symbol.is_real:
            continue
        if flip_sign:
            symbol = mutate_symbol_sign(symbol)
        window = DualWindow(6, symbol.dimension)
        for _ in range(50):
            xi = rng.uniform(-0.5, 0.5, size=symbol.dimension)
            worst = max(worst, hermiticity_defect(build_fiber_matrix(symbol, xi, window)))
        checked.append(path.name)
    return _report("hermiticity", worst <= 1e-12 and bool(checked), worst, 1e-12, t0,
                   configs=checked, mutated=bool(flip_sign))


def suite_route_equivalence(seed=0, flip_sign=False):
    """5: kernel-route matrix equals closed-form fiber matrix to 1e-10 (N=8, n=64)."""
    t0 = time.time()
    grid = GridSpec(64, 1)
    prof = CutoffProfile(8)
    window = DualWindow(2, 1)
    xi = np.array([0.3])
    worst = 0.0
    for F in (free_symbol(1), _mathieu()):
        radius = default_kernel_window(F, xi, prof)
        kern = build_kernel(F, xi, DualWindow(radius, 1), grid, cutoff=prof)
        m_kernel = matrix_from_kernel(kern, window)
        m_fiber = build_fiber_matrix(F.with_cutoff(prof), xi, window).entries
        worst = max(worst, float(np.max(np.abs(m_kernel - m_fiber))))
    return _report("route_equivalence", worst <= 1e-10, worst, 1e-10, t0)


def suite_supercell_identity(seed=0, flip_sign=False):
    """6: L=4 supercell spectrum equals the union of fiber spectra to 1e-8."""
    t0 = time.time()
    rep = supercell_identity_check(_mathieu(), L=4, window_radius=8, k_keep=5,
                                   n=64, cutoff=CutoffProfile(16), r_per=3)
    return _report("supercell_identity", rep["max_deviation"] <= 1e-8,
                   rep["max_deviation"], 1e-8, t0, tail=rep["tail_estimate"])


def suite_bf_bfz_transforms(seed=0, flip_sign=False):
    """7: Parseval + inversion to 1e-12 and the Zak factorization to 1e-13 (100 draws)."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    L, n = 4, 32
    worst_unitary = 0.0
    worst_zak = 0.0
    for _ in range(100):
        f = rng.normal(size=L * n) + 1j * rng.normal(size=L * n)
        worst_unitary = max(worst_unitary, parseval_defect(f, L, n))
        u = discrete_bloch_floquet_all(f, L, n)
        back = inverse_discrete_bloch_floquet(u, L, n)
        inv = float(np.max(np.abs(back - f))) / max(1.0, np.sqrt(supercell_norm_sq(f, n)))
        worst_unitary = max(worst_unitary, inv)
        xi = np.array([rng.integers(0, L) / L + rng.integers(-2, 3)])
        worst_zak = max(worst_zak, bfz_factorization_defect(f, xi, L, n)
                        / max(1.0, float(np.max(np.abs(f)))))
    passed = worst_unitary <= 1e-12 and worst_zak <= 1e-13
    return _report("bf_bfz_transforms", passed, worst_unitary, 1e-12, t0,
                   zak_defect=worst_zak, zak_tolerance=1e-13)


def suite_constant_gauge_shift(seed=0, flip_sign=False):
    """8: constant potential a shifts magnetic fiber spectra by exactly a (1e-10)."""
    t0 = time.time()
    F = _mathieu()
    grid = GridSpec(64, 1)
    prof = CutoffProfile(8)
    window = DualWindow(6, 1)
    a = 0.2
    xi = np.array([0.3])
    shifted = magnetic_fiber_matrix(F, VectorPotential.constant([a]), xi, window, grid, prof)
    plain = magnetic_fiber_matrix(F, None, xi - a, window, grid, prof)
    dev = float(np.max(np.abs(_sorted_spectrum(shifted.entries) - _sorted_spectrum(plain.entries))))
    return _report("constant_gauge_shift", dev <= 1e-10, dev, 1e-10, t0)


def suite_gauge_covariance(seed=0, flip_sign=False):
    """9: potentials differing by d(0.3 sin(2 pi x)) give the same spectra to 1e-6."""
    t0 = time.time()
    F = _mathieu()
    grid = GridSpec(64, 1)
    prof = CutoffProfile(8)
    window = DualWindow(6, 1)
    xi = np.array([0.25])
    base = VectorPotential([TrigSeries.cosine(1, (1,), 0.15)])
    gauge = base + gradient_potential(TrigSeries.sine(1, (1,), 0.3))
    e1 = _sorted_spectrum(magnetic_fiber_matrix(F, base, xi, window, grid, prof).entries, 4)
    e2 = _sorted_spectrum(magnetic_fiber_matrix(F, gauge, xi, window, grid, prof).entries, 4)
    dev = float(np.max(np.abs(e1 - e2)))
    return _report("gauge_covariance", dev <= 1e-6, dev, 1e-6, t0)


def suite_zero_flux_gate(seed=0, flip_sign=False):
    """10: constant B is rejected; every curl-derived field passes at 1e-14."""
    t0 = time.time()
    from .magnetic import MagneticField2Form
    rng = np.random.default_rng(seed)
    constant = MagneticField2Form(2, {(0, 1): TrigSeries(2, {(0, 0): 0.5})})
    rejected = zero_flux_defect(constant) > 1e-12
    worst = 0.0
    for _ in range(10):
        comps = []
        for _j in range(2):
            coeffs = {}
            for _t in range(3):
                mu = (int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
                v = complex(rng.normal(), rng.normal())
                coeffs[mu] = coeffs.get(mu, 0) + v
                neg = (-mu[0], -mu[1])
                coeffs[neg] = coeffs.get(neg, 0) + np.conj(v)
            comps.append(TrigSeries(2, coeffs))
        worst = max(worst, zero_flux_defect(curl(VectorPotential(comps))))
    passed = rejected and worst <= 1e-14
    return _report("zero_flux_gate", passed, worst, 1e-14, t0,
                   constant_rejected=bool(rejected))


def suite_symmetric_adjoint(seed=0, flip_sign=False):
    """11: <psi, Op(Fo) phi> = <Op(conj Fo) psi, phi> to 1e-10 over 50 random pairs."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    grid = GridSpec(32, 1)
    F = _mathieu().with_cutoff(CutoffProfile(6))
    indices = np.arange(-10, 11).reshape(-1, 1)
    seq = ToroidalSymbolSeq.from_symbol(F, [0.2], indices, grid, half_index=True)
    worst = 0.0
    for _ in range(50):
        phi = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        psi = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        lhs = grid_inner(psi, quantize_symmetric(seq, phi, grid), grid)
        rhs = grid_inner(quantize_symmetric(seq.conj(), psi, grid), phi, grid)
        worst = max(worst, abs(lhs - rhs))
    return _report("symmetric_adjoint", worst <= 1e-10, worst, 1e-10, t0)


def suite_weyl_system_laws(seed=0, flip_sign=False):
    """12: composition and adjoint identities of the half-angle Weyl system (1e-12)."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    grid = GridSpec(32, 1)
    from .lattice import pairing, reduce_to_double_cell, unit_phase
    worst_comp = 0.0
    worst_adj = 0.0
    for _ in range(100):
        z1 = np.array([rng.integers(0, 2 * grid.n)]) / grid.n - 1.0
        z2 = np.array([rng.integers(0, 2 * grid.n)]) / grid.n - 1.0
        a_s = rng.integers(-3, 4, size=1)
        b_s = rng.integers(-3, 4, size=1)
        f = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
        g = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
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
    passed = worst_comp <= 1e-12 and worst_adj <= 1e-12
    return _report("weyl_system_laws", passed, max(worst_comp, worst_adj), 1e-12, t0,
                   composition=worst_comp, adjoint=worst_adj)


def suite_minimal_coupling_slope(seed=0, flip_sign=False):
    """13: spectral gap of the leading gauge symbol shrinks with slope >= 1.8 in epsilon."""
    t0 = time.time()
    c4 = 0.05
    F = PeriodicSymbol(
        1, {(0,): Polynomial({(2,): TWO_PI**2, (4,): c4 * TWO_PI**4})},
        order=4.0, is_real=True, is_elliptic=True)
    prof = CutoffProfile(8)
    grid = GridSpec(64, 1)
    window = DualWindow(6, 1)
    xi = np.array([0.0])
    cut = F.with_cutoff(prof)
    eps_list = [0.1, 0.05, 0.025]
    gaps = []
    for eps in eps_list:
        pot = VectorPotential([TrigSeries.sine(1, (1,), eps)])
        exact = magnetic_fiber_matrix(F, pot, xi, window, grid, prof)
        approx = minimal_coupling(cut, pot).fiber_matrix(xi, window, n_quad=160)
        gaps.append(float(np.max(np.abs(_sorted_spectrum(exact.entries, 4)
                                        - _sorted_spectrum(approx.entries, 4)))))
    fit = scipy.stats.linregress(np.log(eps_list), np.log(gaps))
    return _report("minimal_coupling_slope", fit.slope >= 1.8, fit.slope, 1.8, t0,
                   gaps=gaps, epsilons=eps_list)


ACCEPTANCE_SUITES = {
    "free_band_exactness": suite_free_band_exactness,
    "mathieu_cross_check": suite_mathieu_cross_check,
    "band_periodicity": suite_band_periodicity,
    "hermiticity": suite_hermiticity,
    "route_equivalence": suite_route_equivalence,
    "supercell_identity": suite_supercell_identity,
    "bf_bfz_transforms": suite_bf_bfz_transforms,
    "constant_gauge_shift": suite_constant_gauge_shift,
    "gauge_covariance": suite_gauge_covariance,
    "zero_flux_gate": suite_zero_flux_gate,
    "symmetric_adjoint": suite_symmetric_adjoint,
    "weyl_system_laws": suite_weyl_system_laws,
    "minimal_coupling_slope": suite_minimal_coupling_slope,
}


def run_suites(names=None, seed=0, flip_sign=False):
    """Execute the requested suites (all by default) in declaration order."""
    if names is None:
        names = list(ACCEPTANCE_SUITES)
    unknown = [n for n in names if n not in ACCEPTANCE_SUITES]
    if unknown:
        raise ValueError(f"unknown suites: {unknown}")
    return [ACCEPTANCE_SUITES[n](seed=seed, flip_sign=flip_sign) for n in names]
