"""Unit-lattice and torus geometry.

Everything downstream works on the cubic lattice Z^d and its dual, with the
fundamental cell [-1/2, 1/2)^d and the 2*pi factor of the duality pairing kept
in exactly one place (:func:`pairing`).  The double torus R^d / 2Z^d, needed by
the half-angle Weyl system, is parametrized by coordinates in [-1, 1)^d and
only ever manifests as half-angle phase bookkeeping plus the parity split of
its section.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class LatticeSpec:
    """Dimension of the configuration lattice Z^d (volume-1 cubic cell)."""

    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")


def _check_same_dim(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a, b


def pairing(xi, x):
    """Duality pairing <xi, x> = 2*pi * sum_j xi_j x_j.

    The 2*pi convention lives here and nowhere else; every phase in the
    package is built by exponentiating this value.  Broadcasts over leading
    axes; the trailing axis is the coordinate axis.
    """
    xi, x = _check_same_dim(xi, x)
    return TWO_PI * np.sum(xi * x, axis=-1)


def unit_phase(theta):
    """e^{i*theta} for real theta, via cos/sin so |result| = 1 to rounding."""
    theta = np.asarray(theta, dtype=float)
    return np.cos(theta) + 1j * np.sin(theta)


def reduce_to_cell(x):
    """Section of R^d -> [-1/2, 1/2)^d: return (x_hat, gamma) with x = x_hat + gamma.

    Ties at 1/2 reduce to -1/2 (left-closed cell).  Idempotent on cell points.
    """
    x = np.asarray(x, dtype=float)
    gamma = np.floor(x + 0.5).astype(np.int64)
    return x - gamma, gamma


def reduce_to_double_cell(x):
    """Section of R^d -> [-1, 1)^d (cell of the doubled lattice 2Z^d)."""
    x = np.asarray(x, dtype=float)
    gamma2 = 2.0 * np.floor(x / 2.0 + 0.5)
    return x - gamma2, gamma2.astype(np.int64)


def decompose_even_odd(gamma):
    """Split an integer vector as gamma = 2*even + parity with parity in {0,1}^d.

    Uses floor division, so it is valid for negative entries.
    """
    gamma = np.asarray(gamma, dtype=np.int64)
    even = gamma // 2
    parity = gamma - 2 * even
    return even, parity


def parity_split_double(t):
    """Parity split of a double-torus coordinate t in [-1, 1)^d.

    Returns (j2, kappa) with j2 in [-1/2, 1/2)^d, kappa in {0,1}^d and
    t = j2 + kappa (mod 2Z^d).  kappa is the Sigma_1 representative of the
    integer offset, so the identity holds modulo the doubled lattice only.
    """
    t = np.asarray(t, dtype=float)
    j2, gamma = reduce_to_cell(t)
    kappa = np.mod(gamma, 2)
    return j2, kappa


def character_chi1(nu, z):
    """Character of the torus: chi_{1,nu}(z) = e^{-i <nu, s(z)>}, |chi| = 1.

    ``z`` is interpreted through the cell section, so any real representative
    may be passed.
    """
    nu = np.asarray(nu, dtype=float)
    z_hat, _ = reduce_to_cell(z)
    return unit_phase(-pairing(nu, z_hat))


def character_chi2(nu, z2):
    """Half-index character of the double torus: e^{-i <nu/2, s2(z2)>}.

    ``z2`` is a coordinate vector in [-1, 1)^d (reduced if necessary).
    Its square equals chi_{1,nu} at the projected point times
    e^{-i <nu, kappa(z2)>} with kappa the Sigma_1 parity of the section.
    """
    nu = np.asarray(nu, dtype=float)
    t, _ = reduce_to_double_cell(z2)
    return unit_phase(-0.5 * pairing(nu, t))


def sigma1_indices(d):
    """All 2^d parity vectors kappa in {0,1}^d, lexicographic."""
    out = np.indices((2,) * d).reshape(d, -1).T
    return np.ascontiguousarray(out, dtype=np.int64)
