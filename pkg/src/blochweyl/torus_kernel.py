"""Torus-side calculus: amplitudes, distribution kernels, and quantizations.

The fiber operator at quasi-momentum xi, viewed on the torus, has the kernel

    K(z, z') = sum_{a*} e^{i <a*, z - z'>} Phi_{a*}(z, z'),

with the two-scale amplitude

    Phi_{a*}(x, y) = sum_{k* in {0,1}^d} e^{(i/2) <k*, x - y>}
                     sum_{k in {0,1}^d} (e^{(i/2) <k*, k>} / 2^d)
                         F_xi( (x + y + k)/2, a* + k*/2 ),

whose half-integer momentum arguments and midpoint evaluations encode the
double cover of the torus.  Everything half-integer appears only as half-angle
phases and parity sums; all midpoints land on the doubled grid, so truncated
sums stay exact on band-limited data.

The same parity machinery drives the symmetric Weyl system W(z~, g*) and the
adjoint-respecting symmetric quantization, here realized through its integral
kernel

    (Op(Fo) phi)(z) = 2^{-d} int dz' sum_{g*} e^{i <g*/2, z - z'>}
                      [ sum_k e^{i <g*/2, k>} Fo_{g*}( (z + z')/2 + k/2 ) ] phi(z'),

whose matrix elements reproduce the fiber matrix when Fo samples the symbol on
the half-integer dual lattice.  The Kohn-Nirenberg quantization is kept
alongside for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .fiber import DualWindow
from .lattice import pairing, reduce_to_cell, reduce_to_double_cell, sigma1_indices, unit_phase

__all__ = [
    "GridSpec",
    "ToroidalSymbolSeq",
    "Amplitude",
    "ToroidalKernel",
    "difference_op",
    "build_amplitude",
    "amplitude_value",
    "build_kernel",
    "default_kernel_window",
    "apply_kernel",
    "matrix_from_kernel",
    "weyl_apply",
    "translate_grid",
    "quantize_symmetric",
    "symmetric_kernel",
    "quantize_kohn_nirenberg",
]


class GridSpec:
    """Uniform grid on the cell [-1/2, 1/2)^d with n points per dimension."""

    def __init__(self, n, dimension):
        if n < 2:
            raise ValueError("grid needs at least 2 points per dimension")
        self.n = int(n)
        self.dimension = int(dimension)

    @property
    def size(self):
        return self.n**self.dimension

    def axis(self):
        return np.arange(self.n) / self.n - 0.5

    def points(self):
        """All grid points, flattened C-order, shape (n^d, d)."""
        mesh = np.meshgrid(*[self.axis()] * self.dimension, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dimension)

    def digits(self):
        """Per-axis integer indices of the flattened points, shape (n^d, d)."""
        mesh = np.meshgrid(*[np.arange(self.n)] * self.dimension, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dimension).astype(np.int64)

    def double_axis(self):
        return np.arange(2 * self.n) / (2 * self.n) - 0.5

    def double_points(self):
        mesh = np.meshgrid(*[self.double_axis()] * self.dimension, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dimension)

    def __eq__(self, other):
        return isinstance(other, GridSpec) and (self.n, self.dimension) == (other.n, other.dimension)

    def __repr__(self):
        return f"GridSpec(n={self.n}, dimension={self.dimension})"


def grid_inner(u, v, grid):
    """Quadrature inner product <u, v> = (1/n^d) sum conj(u) v."""
    return complex(np.vdot(np.asarray(u).ravel(), np.asarray(v).ravel())) / grid.size


# ---------------------------------------------------------------------------
# toroidal symbol sequences
# ---------------------------------------------------------------------------

class ToroidalSymbolSeq:
    """Finitely supported sequence of grid functions indexed by dual vectors.

    ``indices`` are integers; whether an index means the frequency itself
    (Kohn-Nirenberg) or twice it (symmetric quantization, where the index g*
    stands for the half-integer g*/2) is up to the quantizer consuming the
    sequence.
    """

    def __init__(self, indices, values, grid, order=0.0, rho=1):
        self.indices = np.asarray(indices, dtype=np.int64).reshape(-1, grid.dimension)
        self.values = np.asarray(values, dtype=complex)
        self.grid = grid
        expected = (self.indices.shape[0],) + (grid.n,) * grid.dimension
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")
        self.order = float(order)
        self.rho = int(rho)

    @classmethod
    def from_symbol(cls, symbol, xi, indices, grid, half_index=False):
        """Sample a periodic symbol: value[k] = F(z, scale * index_k + xi)."""
        xi = np.asarray(xi, dtype=float).ravel()
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, grid.dimension)
        scale = 0.5 if half_index else 1.0
        pts = grid.points()
        vals = np.empty((indices.shape[0],) + (grid.n,) * grid.dimension, dtype=complex)
        for k, idx in enumerate(indices):
            zeta = scale * idx.astype(float) + xi
            vals[k] = symbol.eval(pts, zeta).reshape((grid.n,) * grid.dimension)
        return cls(indices, vals, grid, order=symbol.order, rho=1)

    def conj(self):
        return ToroidalSymbolSeq(self.indices, np.conj(self.values), self.grid,
                                 self.order, self.rho)

    def lookup(self, index):
        """Grid values at one index (zeros if absent)."""
        index = np.asarray(index, dtype=np.int64).ravel()
        hits = np.nonzero(np.all(self.indices == index, axis=1))[0]
        if hits.size == 0:
            return np.zeros((self.grid.n,) * self.grid.dimension, dtype=complex)
        return self.values[hits[0]]


def difference_op(seq, j):
    """Forward step-1 difference along axis j: (d_j f)_g = f_{g + e_j} - f_g.

    Values outside the stored support read as zero, so the support grows by
    one step in direction -e_j.
    """
    if not (0 <= j < seq.grid.dimension):
        raise ValueError(f"axis {j} out of range for dimension {seq.grid.dimension}")
    e_j = np.zeros(seq.grid.dimension, dtype=np.int64)
    e_j[j] = 1
    keys = {tuple(idx) for idx in seq.indices}
    keys |= {tuple(idx - e_j) for idx in seq.indices}
    new_idx = np.array(sorted(keys), dtype=np.int64)
    vals = np.empty((new_idx.shape[0],) + (seq.grid.n,) * seq.grid.dimension, dtype=complex)
    for k, idx in enumerate(new_idx):
        vals[k] = seq.lookup(idx + e_j) - seq.lookup(idx)
    return ToroidalSymbolSeq(new_idx, vals, seq.grid, seq.order - seq.rho, seq.rho)


# ---------------------------------------------------------------------------
# amplitudes and kernels
# ---------------------------------------------------------------------------

@dataclass
class Amplitude:
    """Grid samples of Phi_{alpha*} on cell x cell (flattened points)."""

    alpha_star: np.ndarray
    values: np.ndarray  # (n^d, n^d)
    grid: GridSpec


def amplitude_value(symbol, xi, alpha_star, x, y, cutoff=None, minus_kappa=False):
    """Pointwise amplitude at arbitrary (x, y), straight from the parity sums.

    Independent of the table-based :func:`build_amplitude` (no doubled-grid
    lookups), so it serves as its cross-check and as the witness of the
    lattice periodicity Phi(x + a, y + b) = Phi(x, y).  ``minus_kappa``
    evaluates the variant with midpoint (x + y - kappa)/2, equal by the
    symbol's periodicity.
    """
    f = symbol.with_cutoff(cutoff) if cutoff is not None else symbol
    xi = np.asarray(xi, dtype=float).ravel()
    alpha_star = np.asarray(alpha_star, dtype=float).ravel()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = xi.shape[0]
    sign = -1.0 if minus_kappa else 1.0
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]), dtype=complex)
    for ks in sigma1_indices(d):
        zeta = alpha_star + 0.5 * ks + xi
        inner = np.zeros_like(out)
        for ka in sigma1_indices(d):
            phase = unit_phase(0.5 * pairing(ks.astype(float), ka.astype(float)))
            inner = inner + phase * f.eval((x + y + sign * ka) / 2.0, zeta)
        out = out + unit_phase(0.5 * pairing(ks.astype(float), x - y)) * inner / 2**d
    return out


def _halfgrid_tables(symbol, zetas, grid):
    """Symbol values on the doubled grid at each momentum argument."""
    pts = grid.double_points()
    out = np.empty((len(zetas), (2 * grid.n) ** grid.dimension), dtype=complex)
    for k, zeta in enumerate(zetas):
        out[k] = symbol.eval(pts, np.asarray(zeta, dtype=float))
    return out


def _parity_combined_tables(raw_tables, kappa_phases, n, d):
    """G[w, t] = sum_k phase[w, k] * raw[w, (t + n*k) mod 2n] on the doubled grid."""
    two_n = 2 * n
    nw = raw_tables.shape[0]
    kappas = sigma1_indices(d)
    out = np.zeros_like(raw_tables)
    grid_shape = (two_n,) * d
    for w in range(nw):
        table = raw_tables[w].reshape(grid_shape)
        acc = np.zeros(grid_shape, dtype=complex)
        for kidx, kappa in enumerate(kappas):
            acc += kappa_phases[w, kidx] * np.roll(table, shift=tuple(-n * kappa), axis=tuple(range(d)))
        out[w] = acc.ravel()
    return out


def build_amplitude(symbol, xi, alpha_star, grid, cutoff=None):
    """Two-scale amplitude Phi_{alpha*} of the (cutoff) symbol at momentum xi.

    Midpoints (x + y + kappa)/2 land on the doubled grid, so the assembly is
    table lookups plus the 4^d parity phases; no interpolation occurs.
    """
    f = symbol.with_cutoff(cutoff) if cutoff is not None else symbol
    xi = np.asarray(xi, dtype=float).ravel()
    alpha_star = np.asarray(alpha_star, dtype=float).ravel()
    d, n = grid.dimension, grid.n
    kstars = sigma1_indices(d)
    kappas = sigma1_indices(d)

    zetas = [alpha_star + 0.5 * ks + xi for ks in kstars]
    raw = _halfgrid_tables(f, zetas, grid)
    # e^{(i/2) <k*, k>} / 2^d  for each (k*, k)
    phases = np.empty((len(kstars), len(kappas)), dtype=complex)
    for a, ks in enumerate(kstars):
        for b, ka in enumerate(kappas):
            phases[a, b] = unit_phase(0.5 * pairing(ks.astype(float), ka.astype(float))) / 2**d
    g_tables = _parity_combined_tables(raw, phases, n, d)

    # u-phases e^{(i/2) <k*, z_i>} turn e^{(i/2)<k*, x-y>} into u[i] conj(u[j])
    pts = grid.points()
    u_phases = np.empty((len(kstars), grid.size), dtype=complex)
    for a, ks in enumerate(kstars):
        u_phases[a] = unit_phase(0.5 * pairing(ks.astype(float), pts))
    values = _kernels.half_grid_pair_sum(u_phases, np.ascontiguousarray(g_tables),
                                         grid.digits(), n)
    return Amplitude(alpha_star=alpha_star, values=values, grid=grid)


@dataclass
class ToroidalKernel:
    """Grid-sampled distribution kernel on cell x cell with provenance."""

    values: np.ndarray  # (n^d, n^d)
    grid: GridSpec
    provenance: dict = field(default_factory=dict)

    def hermitian_form_defect(self):
        return float(np.max(np.abs(self.values - self.values.conj().T)))

    def translation_invariance_defect(self):
        """max |K(z + h, z' + h) - K(z, z')| over one-step grid shifts h."""
        n, d = self.grid.n, self.grid.dimension
        shape = (n,) * d + (n,) * d
        vals = self.values.reshape(shape)
        worst = 0.0
        for axis in range(d):
            rolled = np.roll(np.roll(vals, -1, axis=axis), -1, axis=d + axis)
            worst = max(worst, float(np.max(np.abs(rolled - vals))))
        return worst


def default_kernel_window(symbol, xi, cutoff):
    """Dual-window radius covering every index with a nonvanishing amplitude.

    With the cutoff, Phi_{a*} needs |a* + k*/2 + xi| <= N; without one, fall
    back to the symbol's x-support plus a documented margin (the sum is then a
    flagged truncation of a distribution).
    """
    xi = np.asarray(xi, dtype=float).ravel()
    if cutoff is not None:
        return int(np.ceil(cutoff.N + 0.5 + np.max(np.abs(xi), initial=0.0))) + 1
    return int(symbol.max_support) + 2


def build_kernel(symbol, xi, window, grid, cutoff=None):
    """Truncated toroidal kernel K(z, z') = sum_{a*} e^{i<a*, z-z'>} Phi_{a*}(z, z')."""
    if isinstance(window, DualWindow):
        alpha_list = window.indices
        radius = window.radius
    else:
        alpha_list = np.asarray(window, dtype=np.int64).reshape(-1, grid.dimension)
        radius = int(np.max(np.abs(alpha_list), initial=0))
    if alpha_list.shape[0] == 0:
        raise ValueError("empty dual window")

    pts = grid.points()
    phi = np.empty((alpha_list.shape[0], grid.size, grid.size), dtype=complex)
    phases = np.empty((alpha_list.shape[0], grid.size), dtype=complex)
    for k, alpha in enumerate(alpha_list):
        phi[k] = build_amplitude(symbol, xi, alpha.astype(float), grid, cutoff).values
        phases[k] = unit_phase(pairing(alpha.astype(float), pts))
    values = _kernels.kernel_alpha_sum(phases, phi)

    provenance = {
        "xi": list(np.asarray(xi, dtype=float).ravel()),
        "grid_n": grid.n,
        "dimension": grid.dimension,
        "alpha_window_radius": radius,
        "mu_max": int(symbol.max_support),
        "cutoff_n": None if cutoff is None else cutoff.N,
        "distribution_regime": bool(cutoff is None and symbol.order >= 0),
    }
    return ToroidalKernel(values=values, grid=grid, provenance=provenance)


def apply_kernel(kernel, phi):
    """(K phi)(z) = (1/n^d) sum_{z'} K(z, z') phi(z')."""
    grid = kernel.grid
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (grid.n,) * grid.dimension and phi.shape != (grid.size,):
        raise ValueError(f"grid mismatch: phi shape {phi.shape} for {grid}")
    out = kernel.values @ phi.ravel() / grid.size
    return out.reshape((grid.n,) * grid.dimension)


def matrix_from_kernel(kernel, window):
    """Plane-wave matrix elements of the kernel: M[a, b] = <e_a, K e_b>.

    Exact (trig-polynomial quadrature) provided the grid resolves every
    frequency present; the required resolution is checked from the kernel's
    provenance and reported on failure.
    """
    grid = kernel.grid
    r_k = kernel.provenance.get("alpha_window_radius", 0)
    mu_max = kernel.provenance.get("mu_max", 0)
    required = 2 * (window.radius + r_k + (mu_max + 1) // 2 + 1) + 1
    if grid.n < required:
        raise ValueError(f"aliasing risk: grid n={grid.n} < required n={required} "
                         f"for window radius {window.radius}")
    pts = grid.points()
    basis = np.empty((grid.size, window.size), dtype=complex)
    for k, alpha in enumerate(window.indices):
        basis[:, k] = unit_phase(-pairing(alpha.astype(float), pts))
    return basis.conj().T @ kernel.values @ basis / grid.size**2


# ---------------------------------------------------------------------------
# symmetric Weyl system on the torus
# ---------------------------------------------------------------------------

def translate_grid(phi, shift, grid, interpolate=False):
    """phi(z + shift) on the grid; exact roll when shift is grid-aligned.

    Off-grid shifts require ``interpolate=True`` (band-limited trigonometric
    resampling); otherwise they raise, so exactness claims stay honest.
    """
    phi = np.asarray(phi, dtype=complex).reshape((grid.n,) * grid.dimension)
    shift = np.asarray(shift, dtype=float).ravel()
    steps = shift * grid.n
    if np.max(np.abs(steps - np.round(steps)), initial=0.0) < 1e-9:
        ints = tuple(int(s) for s in np.round(steps))
        return np.roll(phi, shift=tuple(-s for s in ints), axis=tuple(range(grid.dimension)))
    if not interpolate:
        raise ValueError(f"translation {shift} is not grid-aligned; "
                         f"pass interpolate=True for band-limited resampling")
    out = np.fft.fftn(phi)
    for axis in range(grid.dimension):
        freqs = np.fft.fftfreq(grid.n) * grid.n
        ph = np.exp(2j * np.pi * freqs * shift[axis])
        out = np.moveaxis(np.moveaxis(out, axis, -1) * ph, -1, axis)
    return np.fft.ifftn(out)


def weyl_apply(z2, gamma_star, phi, grid, interpolate=False):
    """Symmetric Weyl operator W(z~, g*) on grid data.

    W(z~, g*) = chi_{2,-g*}(z~) U(p2(z~)) V(g*): multiply by the torus
    character of index g*, translate by the projected double-cover point, and
    scale by the half-angle character of z~.
    """
    z2 = np.asarray(z2, dtype=float).ravel()
    gamma_star = np.asarray(gamma_star, dtype=float).ravel()
    t, _ = reduce_to_double_cell(z2)
    shift, _ = reduce_to_cell(t)

    pts = grid.points().reshape((grid.n,) * grid.dimension + (grid.dimension,))
    character = unit_phase(-pairing(gamma_star, pts + shift))
    moved = translate_grid(phi, shift, grid, interpolate=interpolate)
    scale = unit_phase(0.5 * pairing(gamma_star, t))
    return scale * character * moved


# ---------------------------------------------------------------------------
# symmetric toroidal quantization (kernel form)
# ---------------------------------------------------------------------------

def _resample_double(values, n, d):
    """Band-limited resampling from the n-grid to the 2n-grid (exact below Nyquist)."""
    vals = np.asarray(values, dtype=complex).reshape((n,) * d)
    spec = np.fft.fftn(vals)
    for axis in range(d):
        spec = np.moveaxis(spec, axis, 0)
        padded = np.zeros((2 * n,) + spec.shape[1:], dtype=complex)
        kneg = n // 2
        kpos = n - kneg
        padded[:kpos] = spec[:kpos]
        padded[2 * n - kneg:] = spec[kpos:]
        if n % 2 == 0:
            # split the Nyquist bin across +-n/2 (zero anyway for band-limited data)
            padded[kpos] = 0.5 * spec[kpos]
            padded[2 * n - kneg] = 0.5 * spec[kpos]
        spec = np.moveaxis(padded, 0, axis)
    return np.fft.ifftn(spec) * 2**d


def symmetric_kernel(seq, grid):
    """Integral kernel of the symmetric quantization of the sequence.

    Index g* of the sequence stands for the half-integer frequency g*/2; the
    midpoint argument (z + z')/2 + kappa/2 is looked up on the doubled grid
    after band-limited resampling of the stored values.
    """
    if seq.grid != grid:
        raise ValueError("sequence and target grid differ")
    d, n = grid.dimension, grid.n
    nw = seq.indices.shape[0]
    kappas = sigma1_indices(d)

    raw = np.empty((nw, (2 * n) ** d), dtype=complex)
    for w in range(nw):
        raw[w] = _resample_double(seq.values[w], n, d).ravel()
    phases = np.empty((nw, len(kappas)), dtype=complex)
    for w, gs in enumerate(seq.indices):
        for b, ka in enumerate(kappas):
            phases[w, b] = unit_phase(0.5 * pairing(gs.astype(float), ka.astype(float)))
    g_tables = _parity_combined_tables(raw, phases, n, d)

    pts = grid.points()
    u_phases = np.empty((nw, grid.size), dtype=complex)
    for w, gs in enumerate(seq.indices):
        u_phases[w] = unit_phase(0.5 * pairing(gs.astype(float), pts))
    values = _kernels.half_grid_pair_sum(u_phases, np.ascontiguousarray(g_tables),
                                         grid.digits(), n) / 2**d
    provenance = {
        "grid_n": n,
        "dimension": d,
        "alpha_window_radius": int(np.ceil(np.max(np.abs(seq.indices), initial=0) / 2)) + 1,
        "mu_max": 0,
        "quantization": "symmetric",
    }
    return ToroidalKernel(values=values, grid=grid, provenance=provenance)


def quantize_symmetric(seq, phi, grid):
    """Apply the symmetric quantization of ``seq`` to grid data ``phi``."""
    return apply_kernel(symmetric_kernel(seq, grid), phi)


def quantize_kohn_nirenberg(seq, phi, grid):
    """(a(X, D) phi)(z) = sum_{a*} e^{i <a*, z>} a(z, a*) phi_hat(a*).

    Integer indices are the frequencies themselves here; phi_hat is the
    quadrature Fourier coefficient matching e_{-a*}.
    """
    if seq.grid != grid:
        raise ValueError("sequence and target grid differ")
    phi = np.asarray(phi, dtype=complex).reshape((grid.n,) * grid.dimension)
    pts = grid.points()
    out = np.zeros(grid.size, dtype=complex)
    for w, alpha in enumerate(seq.indices):
        mode = unit_phase(-pairing(alpha.astype(float), pts))
        coeff = np.sum(mode * phi.ravel()) / grid.size
        out += seq.values[w].ravel() * unit_phase(pairing(alpha.astype(float), pts)) * coeff
    return out.reshape((grid.n,) * grid.dimension)
