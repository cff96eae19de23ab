"""Direct quadrature of the Weyl distribution kernel for cutoff symbols.

For a symbol with smooth compactly supported momentum parts (after the cutoff
theta_N) the kernel is an honest function,

    K0(x, y) = integral d eta  e^{i <eta, x - y>} theta_N(eta) F((x+y)/2, eta)
             = sum_mu e^{-i <mu, (x+y)/2>} k_mu(x - y),
    k_mu(v)  = integral d eta  e^{i <eta, v>} theta_N(eta) c_mu(eta),

and the eta integral is evaluated on a uniform grid over the cutoff support.
This path never touches the closed-form fiber matrix formula, which keeps it
usable as one side of independent cross-checks.
"""

from __future__ import annotations

import numpy as np

from . import _kernels

__all__ = ["eta_axis", "momentum_tables"]


def eta_axis(cutoff, spacing):
    """Uniform quadrature axis covering [-N, N] with step <= spacing."""
    n_half = int(np.ceil(cutoff.N / spacing))
    return np.linspace(-cutoff.N, cutoff.N, 2 * n_half + 1)


def momentum_tables(symbol, cutoff, v_axes, spacing):
    """k_mu on a product grid of separation values.

    Parameters
    ----------
    symbol : PeriodicSymbol
        Raw symbol; the cutoff is applied here, do not pre-apply it.
    cutoff : CutoffProfile
        Momentum truncation; fixes the quadrature support.
    v_axes : sequence of 1-D arrays
        Per-dimension separation values; the table is over their product.
    spacing : float
        eta grid step (trapezoid weights degenerate to uniform because the
        integrand vanishes at the boundary).

    Returns
    -------
    dict mapping mu -> complex array over the product of ``v_axes``.
    """
    d = symbol.dimension
    if len(v_axes) != d:
        raise ValueError("one separation axis per dimension required")
    if d not in (1, 2):
        raise NotImplementedError("quadrature kernels are implemented for d in {1, 2}")
    axis = eta_axis(cutoff, spacing)
    step = axis[1] - axis[0]
    if d == 1:
        eta = axis[:, None]
        theta = cutoff.value(eta)
        tables = {}
        for mu, coef in symbol.terms.items():
            cw = coef.value(eta) * theta * step
            tables[mu] = _kernels.momentum_table_1d(
                np.ascontiguousarray(cw, dtype=complex), axis, np.asarray(v_axes[0], float))
        return tables
    e1, e2 = np.meshgrid(axis, axis, indexing="ij")
    eta = np.stack([e1, e2], axis=-1)
    theta = cutoff.value(eta)
    tables = {}
    for mu, coef in symbol.terms.items():
        cw = coef.value(eta) * theta * step**2
        tables[mu] = _kernels.momentum_table_2d(
            np.ascontiguousarray(cw, dtype=complex), axis, axis,
            np.asarray(v_axes[0], float), np.asarray(v_axes[1], float))
    return tables
