"""Truncated fiber matrices in the plane-wave basis of the torus.

At quasi-momentum xi the fiber operator acts on L^2 of the unit torus; in the
plane-wave basis e_alpha(z) = e^{-i <alpha, z>} its matrix is

    M[alpha, beta] = F_hat_{alpha - beta}( xi - (alpha + beta) / 2 ),

evaluated in closed form from the symbol's coefficient functions (no momentum
grid, no quadrature).  Windows are centered infinity-norm boxes with a fixed
lexicographic ordering, so output is reproducible bit-for-bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DualWindow",
    "FiberMatrix",
    "build_fiber_matrix",
    "hermiticity_defect",
    "band_periodicity_check",
]


class DualWindow:
    """Centered box {alpha in Z^d : |alpha|_inf <= radius}, lexicographic order."""

    def __init__(self, radius, dimension):
        if radius < 0:
            raise ValueError("window radius must be >= 0")
        self.radius = int(radius)
        self.dimension = int(dimension)
        rng = range(-self.radius, self.radius + 1)
        self.indices = np.array(list(itertools.product(rng, repeat=self.dimension)),
                                dtype=np.int64)

    @property
    def size(self):
        return self.indices.shape[0]

    def position(self, alpha):
        """Row index of alpha, or -1 if out of window (vectorized)."""
        alpha = np.asarray(alpha, dtype=np.int64)
        shifted = alpha + self.radius
        inside = np.all((shifted >= 0) & (shifted <= 2 * self.radius), axis=-1)
        width = 2 * self.radius + 1
        flat = np.zeros(alpha.shape[:-1], dtype=np.int64)
        for c in range(self.dimension):
            flat = flat * width + np.clip(shifted[..., c], 0, width - 1)
        return np.where(inside, flat, -1)

    def __repr__(self):
        return f"DualWindow(radius={self.radius}, dimension={self.dimension})"


@dataclass
class FiberMatrix:
    """Dense fiber matrix with its quasi-momentum and window."""

    xi: np.ndarray
    window: DualWindow
    entries: np.ndarray

    @property
    def size(self):
        return self.entries.shape[0]


def build_fiber_matrix(symbol, xi, window):
    """Assemble the fiber matrix of ``symbol`` at quasi-momentum ``xi``.

    One vectorized pass per stored Fourier term: the term mu populates the
    diagonal band alpha - beta = mu with coefficient values at the half-integer
    momentum arguments xi - (alpha + beta)/2.
    """
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.shape[0] != symbol.dimension or window.dimension != symbol.dimension:
        raise ValueError("dimension mismatch between symbol, xi, and window")
    if window.size == 0:
        raise ValueError("empty window")
    alphas = window.indices
    m = window.size
    entries = np.zeros((m, m), dtype=complex)
    for mu, coef in symbol.terms.items():
        mu_arr = np.asarray(mu, dtype=np.int64)
        betas = alphas - mu_arr
        cols = window.position(betas)
        rows = np.nonzero(cols >= 0)[0]
        if rows.size == 0:
            continue
        cols = cols[rows]
        args = xi[None, :] - (alphas[rows] + alphas[cols]) / 2.0
        entries[rows, cols] = coef.value(args)
    return FiberMatrix(xi=xi, window=window, entries=entries)


def hermiticity_defect(matrix):
    """max |M - M^dagger| entrywise; zero witnesses fiber self-adjointness."""
    m = matrix.entries if isinstance(matrix, FiberMatrix) else np.asarray(matrix)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def band_periodicity_check(symbol, xi, gamma_star, window, margin=1):
    """Entrywise witness of the dual-lattice covariance of the fibers.

    The fiber at xi + gamma_star is the character conjugate of the fiber at
    xi, which at matrix level is the index relabeling
    M(xi + gamma_star)[a, b] = M(xi)[a - gamma_star, b - gamma_star].  Both
    sides are compared on the interior sub-window
    |alpha|_inf <= radius - margin * |gamma_star|_inf, where the relabeled
    indices stay inside the full window; the max entry difference is returned
    (zero up to rounding).
    """
    gamma_star = np.asarray(gamma_star, dtype=np.int64).ravel()
    shrink = int(margin) * int(np.max(np.abs(gamma_star), initial=0))
    if shrink > window.radius:
        raise ValueError(f"margin too large: interior window would be empty "
                         f"(radius {window.radius}, shrink {shrink})")
    xi = np.asarray(xi, dtype=float).ravel()
    m_base = build_fiber_matrix(symbol, xi, window).entries
    m_shift = build_fiber_matrix(symbol, xi + gamma_star, window).entries

    inner = DualWindow(window.radius - shrink, window.dimension)
    rows_shift = window.position(inner.indices)
    rows_base = window.position(inner.indices - gamma_star)
    sub_shift = m_shift[np.ix_(rows_shift, rows_shift)]
    sub_base = m_base[np.ix_(rows_base, rows_base)]
    return float(np.max(np.abs(sub_shift - sub_base)))
