"""Periodic magnetic data: potentials, flux gates, holonomy phases, and
magnetic fiber matrices by kernel quadrature.

Unit convention: vector-potential components are stored in dual-basis units,
so a ``VectorPotential`` with constant component a shifts fiber spectra by
exactly a quasi-momentum units.  The Euclidean 1-form is 2*pi times the
stored components; line integrals carry that factor through the duality
pairing, and the minimal-coupling substitution xi -> xi - a(x) acts on dual
coordinates directly.

The magnetic fiber at quasi-momentum xi is realized at kernel level:

    K_per(x, y) = sum_{|beta| <= R} Lambda(x, y + beta)
                  e^{-i <xi, x - y - beta>} K0(x, y + beta),

with K0 the cutoff Weyl kernel by eta quadrature and Lambda the straight-line
holonomy exp(-i int_{x -> y} A).  Plane-wave matrix elements of K_per give the
fiber matrix; a constant potential then shifts the momentum argument exactly,
and gauge transformations move spectra only at quadrature level.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import _kernels
from .fiber import FiberMatrix
from .lattice import pairing, unit_phase
from .symbols import TrigSeries
from .weylquad import momentum_tables

__all__ = [
    "VectorPotential",
    "MagneticField2Form",
    "curl",
    "face_flux",
    "zero_flux_defect",
    "line_integral",
    "lambda_phase",
    "gradient_potential",
    "MinimalCoupling",
    "minimal_coupling",
    "magnetic_fiber_matrix",
]


class VectorPotential:
    """Periodic real 1-form, one finite Fourier series per component (dual units)."""

    def __init__(self, components):
        self.components = list(components)
        if not self.components:
            raise ValueError("vector potential needs at least one component")
        self.dimension = self.components[0].dimension
        if len(self.components) != self.dimension:
            raise ValueError("need exactly d component series")
        for c in self.components:
            if c.dimension != self.dimension:
                raise ValueError("component dimension mismatch")
            if not c.is_real:
                raise ValueError("vector potential components must be real series")

    def eval(self, x):
        """Component values at x, shape (..., d)."""
        x = np.asarray(x, dtype=float)
        return np.stack([np.real(c.eval(x)) for c in self.components], axis=-1)

    def term_arrays(self):
        """Flatten to (component, frequency, coefficient) arrays for batch kernels."""
        comp, mus, vals = [], [], []
        for c_idx, series in enumerate(self.components):
            for mu, v in series.coeffs.items():
                comp.append(c_idx)
                mus.append(mu)
                vals.append(v)
        return (np.asarray(comp, dtype=np.int64),
                np.asarray(mus, dtype=np.float64).reshape(len(comp), self.dimension),
                np.asarray(vals, dtype=np.complex128))

    def __add__(self, other):
        return VectorPotential([a + b for a, b in zip(self.components, other.components)])

    def scaled(self, factor):
        return VectorPotential([c.scaled(factor) for c in self.components])

    @classmethod
    def zero(cls, dimension):
        return cls([TrigSeries(dimension, {}) for _ in range(dimension)])

    @classmethod
    def constant(cls, values):
        values = np.asarray(values, dtype=float).ravel()
        d = values.shape[0]
        zero = (0,) * d
        return cls([TrigSeries(d, {zero: float(v)}) for v in values])


class MagneticField2Form:
    """Antisymmetric field components B_jk for j < k, each a real series."""

    def __init__(self, dimension, components):
        self.dimension = int(dimension)
        self.components = {}
        for (j, k), series in components.items():
            if not (0 <= j < k < self.dimension):
                raise ValueError(f"need 0 <= j < k < d, got ({j}, {k})")
            self.components[(j, k)] = series

    def component(self, j, k):
        if j >= k:
            raise ValueError("store and query components with j < k")
        return self.components.get((j, k), TrigSeries(self.dimension, {}))


def curl(potential):
    """Exterior derivative on Fourier coefficients: B_jk = d_j a_k - d_k a_j."""
    d = potential.dimension
    comps = {}
    for j in range(d):
        for k in range(j + 1, d):
            series = potential.components[k].derivative(j) + \
                potential.components[j].derivative(k).scaled(-1.0)
            comps[(j, k)] = series
    return MagneticField2Form(d, comps)


def face_flux(field, j, k):
    """Flux through the coordinate unit face R_jk: the mean of B_jk."""
    return float(np.real(field.component(j, k).mean()))


def zero_flux_defect(field):
    """max |face flux| over all coordinate faces; the gate passes at <= 1e-12."""
    d = field.dimension
    worst = 0.0
    for j in range(d):
        for k in range(j + 1, d):
            worst = max(worst, abs(face_flux(field, j, k)))
    return worst


# ---------------------------------------------------------------------------
# holonomy phases
# ---------------------------------------------------------------------------

def line_integral(potential, x, y):
    """Integral of the 1-form along the straight segment from x to y.

    Closed form per Fourier term; the 2*pi of the duality enters through
    :func:`pairing`, so a constant component a gives exactly <a, y - x>.
    For a gradient potential (components (1/2pi) d_j phi) the value is
    phi(y) - phi(x).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
    x = np.broadcast_to(x, shape + (potential.dimension,)).reshape(-1, potential.dimension)
    y = np.broadcast_to(y, shape + (potential.dimension,)).reshape(-1, potential.dimension)
    comp, mus, vals = potential.term_arrays()
    if comp.size == 0:
        return np.zeros(shape)
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        out[i] = _kernels.line_integral_grid(x[i:i + 1], y[i:i + 1], comp, mus, vals)[0, 0]
    return out.reshape(shape) if shape else float(out[0])


def lambda_phase(potential, x, y):
    """Holonomy factor exp(-i * line_integral(x -> y)); unimodular."""
    return unit_phase(-np.asarray(line_integral(potential, x, y)))


def gradient_potential(phi):
    """Potential with components (1/2pi) d_j phi, i.e. the pure-gauge field d phi.

    In dual units the coefficients are -i * mu_j * phi_hat_mu, so adding this
    to any potential changes holonomies by boundary terms only.
    """
    d = phi.dimension
    comps = []
    for j in range(d):
        coeffs = {mu: v * (-1j * mu[j]) for mu, v in phi.coeffs.items() if mu[j] != 0}
        comps.append(TrigSeries(d, coeffs))
    return VectorPotential(comps)


# ---------------------------------------------------------------------------
# minimal coupling (leading-order gauge symbol)
# ---------------------------------------------------------------------------

class MinimalCoupling:
    """Evaluator for F(x, xi - a(x)), the leading term of the gauge-converted symbol.

    Not a finite Fourier series in x, so it is exposed as a callable with a
    quadrature projection to Fourier coefficients and a quadrature fiber
    matrix.
    """

    def __init__(self, symbol, potential):
        if symbol.dimension != potential.dimension:
            raise ValueError("symbol / potential dimension mismatch")
        self.symbol = symbol
        self.potential = potential
        self.dimension = symbol.dimension

    def eval(self, x, xi):
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        return self.symbol.eval(x, xi - self.potential.eval(x))

    def project_coefficient(self, mu, xi, n_quad=None):
        """Fourier coefficient of x -> F(x, xi - a(x)) by cell quadrature."""
        d = self.dimension
        if n_quad is None:
            n_quad = 8 * (self.symbol.max_support + 4)
        axes = [np.arange(n_quad) / n_quad - 0.5] * d
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        vals = self.eval(grid, np.asarray(xi, dtype=float))
        phase = unit_phase(pairing(np.asarray(mu, dtype=float), grid))
        return complex(np.mean(phase * vals))

    def fiber_matrix(self, xi, window, n_quad=None):
        """Fiber matrix with entries <alpha| . |beta> by per-entry x quadrature.

        Exact for polynomial momentum dependence and band-limited potentials
        once the grid resolves the combined trigonometric degree.
        """
        xi = np.asarray(xi, dtype=float).ravel()
        d = self.dimension
        if n_quad is None:
            poly_degree = _max_poly_degree(self.symbol)
            band = self.symbol.max_support + poly_degree * max(
                (c.max_support for c in self.potential.components), default=0)
            n_quad = 2 * (band + 2 * window.radius) + 5
        axes = [np.arange(n_quad) / n_quad - 0.5] * d
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
        a_vals = self.potential.eval(grid)
        alphas = window.indices
        m = window.size
        entries = np.zeros((m, m), dtype=complex)
        for i, alpha in enumerate(alphas):
            for j, beta in enumerate(alphas):
                zeta = xi - (alpha + beta) / 2.0
                vals = self.symbol.eval(grid, zeta[None, :] - a_vals)
                phase = unit_phase(pairing((alpha - beta).astype(float), grid))
                entries[i, j] = np.mean(phase * vals)
        return FiberMatrix(xi=xi, window=window, entries=entries)


def _max_poly_degree(symbol):
    from .symbols import Polynomial, Product, Shifted, Cutoffed
    deg = 0
    def walk(c):
        nonlocal deg
        if isinstance(c, Polynomial):
            deg = max(deg, max((sum(p) for p in c.coeffs), default=0))
        elif isinstance(c, Product):
            walk(c.first)
            walk(c.second)
        elif isinstance(c, (Shifted, Cutoffed)):
            walk(c.inner)
    for coef in symbol.terms.values():
        walk(coef)
    return deg


def minimal_coupling(symbol, potential):
    return MinimalCoupling(symbol, potential)


# ---------------------------------------------------------------------------
# magnetic fiber matrix by kernel quadrature
# ---------------------------------------------------------------------------

def magnetic_fiber_matrix(symbol, potential, xi, window, grid, cutoff,
                          r_per=None, eta_spacing=None, tail_tol=1e-9):
    """Fiber matrix of the magnetic quantization at quasi-momentum xi.

    Builds the periodized holonomy-twisted kernel on the cell grid and
    sandwiches it between plane waves.  The cutoff is mandatory (the kernel
    must be a function).  The periodization tail is estimated as the
    matrix-element contribution of the first excluded shell and must sit
    below ``tail_tol`` (the smooth cutoff's kernel decays subexponentially,
    so the first shell dominates the remainder).

    Returns a FiberMatrix; quadrature leaves a small Hermiticity defect, which
    callers may symmetrize away (it is reported by ``hermiticity_defect``).
    """
    if cutoff is None:
        raise ValueError("magnetic quadrature requires a momentum cutoff")
    d = symbol.dimension
    if d not in (1, 2):
        raise NotImplementedError("magnetic quadrature is implemented for d in {1, 2}")
    if potential is None:
        potential = VectorPotential.zero(d)
    if r_per is None:
        r_per = 16 if d == 1 else 6
    xi = np.asarray(xi, dtype=float).ravel()
    if eta_spacing is None:
        eta_spacing = 1.0 / (4.0 * (r_per + 1))
    n = grid.n
    pts = grid.points()

    # separation axis per dimension: (i - j)/n - beta_c, all shells at once
    lo = -(n - 1) - (r_per + 1) * n
    hi = (n - 1) + (r_per + 1) * n
    v_axis = np.arange(lo, hi + 1) / n
    tables = momentum_tables(symbol, cutoff, [v_axis] * d, eta_spacing)

    digit = grid.digits()
    base_idx = [digit[:, None, c] - digit[None, :, c] - lo for c in range(d)]
    comp, mus, vals = potential.term_arrays()

    def kernel_block(beta):
        """Lambda * e^{-i<xi, x-y-beta>} * K0 on the pair grid for one shell."""
        w = pts + beta.astype(float)
        block = np.zeros((grid.size, grid.size), dtype=complex)
        for mu, table in tables.items():
            mu_f = np.asarray(mu, dtype=float)
            phx = unit_phase(-0.5 * pairing(mu_f, pts))
            phw = unit_phase(-0.5 * pairing(mu_f, w))
            idx = tuple(base_idx[c] - beta[c] * n for c in range(d))
            block += np.outer(phx, phw) * table[idx]
        xiph = np.outer(unit_phase(-pairing(xi, pts)), unit_phase(pairing(xi, w)))
        if comp.size:
            lam = unit_phase(-_kernels.line_integral_grid(pts, np.ascontiguousarray(w),
                                                          comp, mus, vals))
        else:
            lam = 1.0
        return lam * xiph * block

    k_per = np.zeros((grid.size, grid.size), dtype=complex)
    for beta in itertools.product(range(-r_per, r_per + 1), repeat=d):
        k_per += kernel_block(np.asarray(beta, dtype=np.int64))

    basis = np.empty((grid.size, window.size), dtype=complex)
    for k, alpha in enumerate(window.indices):
        basis[:, k] = unit_phase(-pairing(alpha.astype(float), pts))
    entries = basis.conj().T @ k_per @ basis / grid.size**2

    tail = 0.0
    for beta in itertools.product(range(-r_per - 1, r_per + 2), repeat=d):
        if np.max(np.abs(beta)) != r_per + 1:
            continue
        block = kernel_block(np.asarray(beta, dtype=np.int64))
        contrib = basis.conj().T @ block @ basis / grid.size**2
        tail = max(tail, float(np.max(np.abs(contrib))))
    if tail > tail_tol:
        raise ValueError(f"periodization tail {tail:.2e} above tolerance {tail_tol:.2e}; "
                         f"increase r_per or the cutoff resolution")
    return FiberMatrix(xi=xi, window=window, entries=entries)
