import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochweyl.symbols import (BracketPower, CutoffProfile, Gaussian, PeriodicSymbol,
                               Polynomial, Product, TrigSeries, ellipticity_probe,
                               free_symbol, potential_symbol, schrodinger_symbol,
                               seminorm_probe)

TWO_PI_SQ = (2 * np.pi) ** 2


def test_eval_examples(mathieu):
    free = free_symbol(1)
    assert free.eval([0.9], [0.5]) == pytest.approx(TWO_PI_SQ * 0.25)
    cosine = potential_symbol(TrigSeries.cosine(1, (1,), 2.0))
    assert cosine.eval([0.0], [1.7]) == pytest.approx(2.0)
    assert abs(cosine.eval([0.25], [0.0])) < 1e-14
    assert mathieu.eval([0.0], [0.5]) == pytest.approx(TWO_PI_SQ * 0.25 + 2.0)


def test_fourier_coefficient_lookup(mathieu):
    free = free_symbol(1)
    assert free.fourier_coefficient((0,), np.array([0.5])) == pytest.approx(TWO_PI_SQ * 0.25)
    assert free.fourier_coefficient((1,), np.array([0.5])) == 0.0
    assert mathieu.fourier_coefficient((-1,), np.array([3.3])) == pytest.approx(1.0)


def test_fourier_quadrature_exact(mathieu):
    q = mathieu.fourier_coefficient_quadrature((1,), np.array([0.4]), 8)
    assert abs(q - 1.0) < 1e-14
    q = free_symbol(1).fourier_coefficient_quadrature((2,), np.array([0.4]), 8)
    assert abs(q) < 1e-14


def test_fourier_quadrature_undersampled(mathieu):
    with pytest.raises(ValueError, match="undersample"):
        mathieu.fourier_coefficient_quadrature((1,), np.array([0.0]), 3)


def test_quadrature_matches_lookup_random_symbol(rng):
    """Self-consistency oracle: quadrature equals the table at every stored index."""
    terms = {}
    for mu in [(-2,), (0,), (2,)]:
        terms[mu] = Polynomial({(0,): complex(rng.normal(), rng.normal()),
                                (1,): complex(rng.normal(), rng.normal())})
    sym = PeriodicSymbol(1, terms, order=1.0)
    xi = np.array([0.73])
    for mu in terms:
        q = sym.fourier_coefficient_quadrature(mu, xi, 16)
        assert abs(q - sym.fourier_coefficient(mu, xi)) < 1e-13


def test_shift_examples():
    free = free_symbol(1)
    shifted = free.shift([0.3])
    assert shifted.eval([0.1], [0.0]) == pytest.approx(TWO_PI_SQ * 0.09)
    assert free.shift([0.0]) is free


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-1, 1))
@settings(max_examples=50, deadline=None)
def test_shift_group_law(a, b, zeta):
    sym = schrodinger_symbol(TrigSeries.cosine(1, (1,), 2.0))
    double = sym.shift([a]).shift([b])
    direct = sym.shift([a + b])
    x = np.array([0.21])
    assert abs(double.eval(x, [zeta]) - direct.eval(x, [zeta])) < 1e-14 * max(
        1.0, abs(direct.eval(x, [zeta])))


def test_periodicity_invariant(mathieu, rng):
    x = rng.uniform(-0.5, 0.5, size=(20, 1))
    xi = rng.uniform(-3, 3, size=(20, 1))
    for gamma in ([1.0], [-2.0], [5.0]):
        dev = np.max(np.abs(mathieu.eval(x + np.asarray(gamma), xi) - mathieu.eval(x, xi)))
        assert dev < 1e-13


def test_reality_invariant(mathieu, rng):
    x = rng.uniform(-0.5, 0.5, size=(30, 1))
    xi = rng.uniform(-4, 4, size=(30, 1))
    assert np.max(np.abs(mathieu.eval(x, xi).imag)) < 1e-14


def test_real_flag_rejects_asymmetric_terms():
    with pytest.raises(ValueError, match="conjugate"):
        PeriodicSymbol(1, {(1,): Polynomial({(): 1.0})}, is_real=True)
    with pytest.raises(ValueError, match="conjugate-symmetric"):
        PeriodicSymbol(1, {(1,): Polynomial({(): 1.0}),
                           (-1,): Polynomial({(): 2.0})}, is_real=True)


def test_cutoff_plateau_support_and_convergence(mathieu):
    prof = CutoffProfile(8)
    cut = mathieu.with_cutoff(prof)
    assert cut.eval([0.2], [3.0]) == pytest.approx(mathieu.eval([0.2], [3.0]))
    assert cut.eval([0.2], [9.0]) == 0.0
    # pointwise convergence on a fixed ball is monotone in N
    xi = np.linspace(-3, 3, 41).reshape(-1, 1)
    x = np.array([0.11])
    sups = []
    for n_cut in (4, 8, 16):
        cN = mathieu.with_cutoff(CutoffProfile(n_cut))
        sups.append(np.max(np.abs(cN.eval(x, xi) - mathieu.eval(x, xi))))
    assert sups[0] > 0.0
    assert sups[0] >= sups[1] >= sups[2]
    assert sups[2] == 0.0  # plateau covers the ball


def test_cutoff_profile_shape():
    prof = CutoffProfile(8)
    r = np.array([0.0, 3.9, 4.0, 6.0, 8.0, 9.0])
    vals = prof.radial(r)
    assert vals[0] == 1.0 and vals[1] == 1.0 and vals[2] == 1.0
    assert 0.0 < vals[3] < 1.0
    assert vals[4] == 0.0 and vals[5] == 0.0


def test_seminorm_probe_orders():
    free = free_symbol(1)
    # declared order: bounded probe even on a large box
    small = seminorm_probe(free, p=2.0, n=1, m=2, xi_box=10.0, n_samples=150)
    large = seminorm_probe(free, p=2.0, n=1, m=2, xi_box=100.0, n_samples=150)
    assert large < 3.0 * small + 1e-6
    # understated order: the probe grows with the box
    small_bad = seminorm_probe(free, p=1.0, n=0, m=0, xi_box=10.0, n_samples=150)
    large_bad = seminorm_probe(free, p=1.0, n=0, m=0, xi_box=100.0, n_samples=150)
    assert large_bad > 5.0 * small_bad
    cosine = potential_symbol(TrigSeries.cosine(1, (1,), 2.0))
    assert seminorm_probe(cosine, p=0.0, n=2, m=1, xi_box=50.0) <= 2 * np.pi * 2.0 + 1e-9


def test_ellipticity_probe():
    ok, c = ellipticity_probe(free_symbol(1), p=2.0, R=1.0)
    assert ok and c > 1.0
    mathieu = schrodinger_symbol(TrigSeries.cosine(1, (1,), 2.0))
    ok, _ = ellipticity_probe(mathieu, p=2.0, R=1.0)
    assert ok
    cos_only = potential_symbol(TrigSeries.cosine(1, (1,), 2.0))
    ok, _ = ellipticity_probe(cos_only, p=1.0, R=1.0)
    assert not ok


def test_serialization_roundtrip(mathieu, rng):
    spec = mathieu.to_dict()
    back = PeriodicSymbol.from_dict(spec)
    xi = rng.uniform(-3, 3, size=(5, 1))
    x = rng.uniform(-0.5, 0.5, size=(5, 1))
    assert np.allclose(back.eval(x, xi), mathieu.eval(x, xi), atol=1e-15)
    wrapped = mathieu.shift([0.3]).with_cutoff(CutoffProfile(6))
    again = PeriodicSymbol.from_dict(wrapped.to_dict())
    assert np.allclose(again.eval(x, xi), wrapped.eval(x, xi), atol=1e-15)


def test_coefficient_gradients(rng):
    xi = rng.uniform(-2, 2, size=(10, 2))
    h = 1e-6
    for coef in (Polynomial({(2, 0): 1.5, (1, 1): -0.7}), BracketPower(-1.3),
                 Gaussian(2.0), Product(BracketPower(2.0), Gaussian(1.5))):
        grad = coef.grad(xi)
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (coef.value(xi + e) - coef.value(xi - e)) / (2 * h)
            assert np.max(np.abs(fd - grad[..., j])) < 1e-6


def test_trig_series_calculus():
    s = TrigSeries.sine(1, (1,), 0.5)
    x = np.array([[0.1], [0.3]])
    assert np.allclose(s.eval(x), 0.5 * np.sin(2 * np.pi * x[:, 0]))
    ds = s.derivative(0)
    assert np.allclose(ds.eval(x), 0.5 * 2 * np.pi * np.cos(2 * np.pi * x[:, 0]))
    assert TrigSeries.cosine(1, (1,), 2.0).mean() == 0.0
    with pytest.raises(ValueError, match="not real"):
        TrigSeries(1, {(1,): 1.0j})
