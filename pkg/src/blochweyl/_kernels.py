"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

The fallback is selected by setting the environment variable
``FLOQUET_PURE_NUMPY=1`` before import (or when numba is unavailable).  Both
paths are exercised by the test suite and compared by
``benchmarks/bench_kernels.py``.

All kernels operate on plain arrays; phase conventions (the 2*pi pairing, the
orientation of line integrals) are fixed by the callers.
"""

from __future__ import annotations

import os

import numpy as np

TWO_PI = 2.0 * np.pi

PURE_NUMPY = os.environ.get("FLOQUET_PURE_NUMPY", "").strip().lower() in {"1", "true", "yes"}

if not PURE_NUMPY:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        PURE_NUMPY = True

if PURE_NUMPY:
    def njit(*args, **kwargs):  # noqa: D103 - identity decorator
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def backend():
    """'numpy' or 'numba', as selected at import time."""
    return "numpy" if PURE_NUMPY else "numba"


# ---------------------------------------------------------------------------
# segment integral of e^{i theta t} over t in [0, 1]
# ---------------------------------------------------------------------------

def _segment_phase_mean_np(theta):
    """E(theta) = (e^{i theta} - 1) / (i theta), series near 0 for accuracy."""
    theta = np.asarray(theta, dtype=float)
    small = np.abs(theta) < 1e-2
    th = np.where(small, 1.0, theta)
    closed = (np.exp(1j * th) - 1.0) / (1j * th)
    it = 1j * theta
    series = 1.0 + it / 2.0 + it**2 / 6.0 + it**3 / 24.0 + it**4 / 120.0 \
        + it**5 / 720.0 + it**6 / 5040.0
    return np.where(small, series, closed)


@njit(cache=True)
def _segment_phase_mean_scalar(theta):
    if abs(theta) < 1e-2:
        it = 1j * theta
        return 1.0 + it / 2.0 + it**2 / 6.0 + it**3 / 24.0 + it**4 / 120.0 \
            + it**5 / 720.0 + it**6 / 5040.0
    return (np.exp(1j * theta) - 1.0) / (1j * theta)


# ---------------------------------------------------------------------------
# momentum-grid Fourier tables  k(v) = sum_eta cw(eta) e^{2 pi i eta . v}
# ---------------------------------------------------------------------------

def _momentum_table_1d_np(cw, eta, v):
    phase = np.exp(2j * np.pi * np.outer(v, eta))
    return phase @ cw


@njit(cache=True)
def _momentum_table_1d_nb(cw, eta, v):
    out = np.zeros(v.shape[0], dtype=np.complex128)
    for a in range(v.shape[0]):
        acc = 0.0 + 0.0j
        for k in range(eta.shape[0]):
            acc += cw[k] * np.exp(2j * np.pi * eta[k] * v[a])
        out[a] = acc
    return out


def _momentum_table_2d_np(cw, eta1, eta2, v1, v2):
    p1 = np.exp(2j * np.pi * np.outer(v1, eta1))
    p2 = np.exp(2j * np.pi * np.outer(eta2, v2))
    return p1 @ cw @ p2


@njit(cache=True)
def _momentum_table_2d_nb(cw, eta1, eta2, v1, v2):
    n1, n2 = eta1.shape[0], eta2.shape[0]
    m1, m2 = v1.shape[0], v2.shape[0]
    tmp = np.zeros((m1, n2), dtype=np.complex128)
    for a in range(m1):
        for k2 in range(n2):
            acc = 0.0 + 0.0j
            for k1 in range(n1):
                acc += cw[k1, k2] * np.exp(2j * np.pi * eta1[k1] * v1[a])
            tmp[a, k2] = acc
    out = np.zeros((m1, m2), dtype=np.complex128)
    for a in range(m1):
        for b in range(m2):
            acc = 0.0 + 0.0j
            for k2 in range(n2):
                acc += tmp[a, k2] * np.exp(2j * np.pi * eta2[k2] * v2[b])
            out[a, b] = acc
    return out


# ---------------------------------------------------------------------------
# straight-line integrals of a periodic 1-form over point-pair grids
# ---------------------------------------------------------------------------

def _line_integral_grid_np(x, y, comp, mus, vals):
    """S[i, j] = integral of the form along the segment x_i -> y_j.

    comp[t] selects the form component of term t, mus[t] its frequency vector,
    vals[t] its Fourier coefficient (component functions in dual-basis units;
    the 2*pi of the pairing is applied here).
    """
    nx, ny = x.shape[0], y.shape[0]
    out = np.zeros((nx, ny), dtype=complex)
    diff = y[None, :, :] - x[:, None, :]
    for t in range(comp.shape[0]):
        mu = mus[t]
        theta = -TWO_PI * (diff @ mu)
        seg = _segment_phase_mean_np(theta)
        base = np.exp(-2j * np.pi * (x @ mu))
        out += TWO_PI * diff[:, :, comp[t]] * vals[t] * base[:, None] * seg
    return out.real


@njit(cache=True)
def _line_integral_grid_nb(x, y, comp, mus, vals):
    nx, ny = x.shape[0], y.shape[0]
    d = x.shape[1]
    nt = comp.shape[0]
    out = np.zeros((nx, ny), dtype=np.float64)
    for i in range(nx):
        for j in range(ny):
            acc = 0.0 + 0.0j
            for t in range(nt):
                dot_x = 0.0
                dot_v = 0.0
                dv = 0.0
                for c in range(d):
                    dot_x += mus[t, c] * x[i, c]
                    dot_v += mus[t, c] * (y[j, c] - x[i, c])
                dv = y[j, comp[t]] - x[i, comp[t]]
                seg = _segment_phase_mean_scalar(-TWO_PI * dot_v)
                acc += TWO_PI * dv * vals[t] * np.exp(-2j * np.pi * dot_x) * seg
            out[i, j] = acc.real
    return out


# ---------------------------------------------------------------------------
# kernel assembly: sum over dual frequencies with split phases
# ---------------------------------------------------------------------------

def _kernel_alpha_sum_np(phases, phi):
    """K[i, j] = sum_w phases[w, i] conj(phases[w, j]) phi[w, i, j]."""
    return np.einsum("wi,wj,wij->ij", phases, np.conj(phases), phi)


@njit(cache=True)
def _kernel_alpha_sum_nb(phases, phi):
    nw, npts = phases.shape
    out = np.zeros((npts, npts), dtype=np.complex128)
    for w in range(nw):
        for i in range(npts):
            pi = phases[w, i]
            for j in range(npts):
                out[i, j] += pi * np.conj(phases[w, j]) * phi[w, i, j]
    return out


# ---------------------------------------------------------------------------
# symmetric-quantization kernel: half-grid midpoint lookups
# ---------------------------------------------------------------------------

def _half_grid_pair_sum_np(u_phases, g_tables, digits, n):
    """K[i, j] = sum_w u[w, i] conj(u[w, j]) g[w, m(i, j)].

    ``digits[i]`` are the per-axis grid indices of flat point i on the n-grid;
    m(i, j) is the flat index of digits[i] + digits[j] on the 2n-grid, the
    midpoint (z_i + z_j)/2 of the pair.  ``g_tables`` has shape
    (n_freq, (2n)**d), flattened C-order over the doubled grid.
    """
    mid = digits[:, None, :] + digits[None, :, :]
    d = digits.shape[1]
    flat = np.zeros(mid.shape[:2], dtype=np.int64)
    for c in range(d):
        flat = flat * (2 * n) + mid[:, :, c]
    out = np.zeros(flat.shape, dtype=complex)
    for w in range(u_phases.shape[0]):
        out += u_phases[w][:, None] * np.conj(u_phases[w])[None, :] * g_tables[w][flat]
    return out


@njit(cache=True)
def _half_grid_pair_sum_nb(u_phases, g_tables, digits, n):
    nw, npts = u_phases.shape
    d = digits.shape[1]
    out = np.zeros((npts, npts), dtype=np.complex128)
    for i in range(npts):
        for j in range(npts):
            flat = 0
            for c in range(d):
                flat = flat * (2 * n) + digits[i, c] + digits[j, c]
            acc = 0.0 + 0.0j
            for w in range(nw):
                acc += u_phases[w, i] * np.conj(u_phases[w, j]) * g_tables[w, flat]
            out[i, j] = acc
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if PURE_NUMPY:
    momentum_table_1d = _momentum_table_1d_np
    momentum_table_2d = _momentum_table_2d_np
    line_integral_grid = _line_integral_grid_np
    kernel_alpha_sum = _kernel_alpha_sum_np
    half_grid_pair_sum = _half_grid_pair_sum_np
else:
    momentum_table_1d = _momentum_table_1d_nb
    momentum_table_2d = _momentum_table_2d_nb
    line_integral_grid = _line_integral_grid_nb
    kernel_alpha_sum = _kernel_alpha_sum_nb
    half_grid_pair_sum = _half_grid_pair_sum_nb

PAIRED_KERNELS = {
    "momentum_table_1d": (_momentum_table_1d_np, _momentum_table_1d_nb if not PURE_NUMPY else None),
    "momentum_table_2d": (_momentum_table_2d_np, _momentum_table_2d_nb if not PURE_NUMPY else None),
    "line_integral_grid": (_line_integral_grid_np, _line_integral_grid_nb if not PURE_NUMPY else None),
    "kernel_alpha_sum": (_kernel_alpha_sum_np, _kernel_alpha_sum_nb if not PURE_NUMPY else None),
    "half_grid_pair_sum": (_half_grid_pair_sum_np, _half_grid_pair_sum_nb if not PURE_NUMPY else None),
}
