"""Hermitian diagonalization, band sweeps, and convergence/smoothness probes."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .fiber import FiberMatrix, build_fiber_matrix, hermiticity_defect
from .magnetic import magnetic_fiber_matrix

__all__ = [
    "NonHermitianError",
    "DegenerateBandError",
    "eig_hermitian",
    "MomentumPath",
    "BandStructure",
    "bands",
    "truncation_convergence",
    "band_smoothness_probe",
]


class NonHermitianError(ValueError):
    def __init__(self, defect, tol):
        self.defect = defect
        super().__init__(f"matrix is not Hermitian: defect {defect:.3e} > {tol:.1e}")


class DegenerateBandError(ValueError):
    def __init__(self, gap, needed):
        self.gap = gap
        super().__init__(f"band too close to its neighbors: gap {gap:.3e} < {needed:.3e}")


def eig_hermitian(matrix, want_vectors=False, tol=1e-10):
    """Ascending eigenvalues of a Hermitian matrix, gated on the defect.

    Rejects inputs whose Hermiticity defect exceeds ``tol`` (the error carries
    the defect); the accepted matrix is symmetrized before LAPACK, and
    residuals are verified when eigenvectors are requested.
    """
    m = matrix.entries if isinstance(matrix, FiberMatrix) else np.asarray(matrix)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianError(defect, tol)
    sym = 0.5 * (m + m.conj().T)
    if not want_vectors:
        return scipy.linalg.eigvalsh(sym)
    evals, vecs = scipy.linalg.eigh(sym)
    scale = max(np.linalg.norm(sym, 2), 1.0)
    residual = np.max(np.linalg.norm(sym @ vecs - vecs * evals[None, :], axis=0))
    if residual > 1e-10 * scale:
        raise RuntimeError(f"eigensolver residual {residual:.3e} above guarantee")
    return evals, vecs


@dataclass(frozen=True)
class MomentumPath:
    """Waypoints in the dual cell with a fixed sample count per segment."""

    waypoints: tuple
    samples_per_segment: int = 16

    def __post_init__(self):
        if len(self.waypoints) < 1:
            raise ValueError("need at least one waypoint")
        if self.samples_per_segment < 1:
            raise ValueError("need at least one sample per segment")

    def samples(self):
        pts = [np.asarray(w, dtype=float).ravel() for w in self.waypoints]
        if len(pts) == 1:
            return np.array(pts)
        out = []
        for a, b in zip(pts[:-1], pts[1:]):
            for j in range(self.samples_per_segment):
                out.append(a + (b - a) * j / self.samples_per_segment)
        out.append(pts[-1])
        return np.array(out)


@dataclass
class BandStructure:
    """Eigenvalue arrays along a momentum path, with provenance."""

    xis: np.ndarray           # (m, d)
    energies: np.ndarray      # (m, k), ascending rows
    window_radius: int
    k_keep: int
    gauge_id: str = "none"
    meta: dict = field(default_factory=dict)

    def to_csv(self, path):
        """Deterministic CSV: xi_1..xi_d, lambda_1..lambda_k, shortest decimals."""
        d = self.xis.shape[1]
        header = [f"xi_{j + 1}" for j in range(d)] + \
            [f"lambda_{j + 1}" for j in range(self.energies.shape[1])]
        lines = [",".join(header)]
        for xi, row in zip(self.xis, self.energies):
            cells = [repr(float(v)) for v in xi] + [repr(float(v)) for v in row]
            lines.append(",".join(cells))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    def to_json(self, path):
        payload = {
            "window_radius": self.window_radius,
            "k_keep": self.k_keep,
            "gauge": self.gauge_id,
            "meta": self.meta,
            "xi": self.xis.tolist(),
            "energies": self.energies.tolist(),
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _worker_count(n_jobs):
    env = os.environ.get("FLOQUET_THREADS", "").strip()
    if not env:
        return 1
    try:
        cap = int(env)
    except ValueError:
        return 1
    return max(1, min(cap, n_jobs))


def bands(symbol, path, window, k_keep=None, potential=None, grid=None, cutoff=None,
          magnetic_opts=None, hermiticity_tol=1e-10):
    """Band structure along a momentum path.

    Plain route: closed-form fiber matrices of ``symbol`` (with ``cutoff``
    applied when given).  Magnetic route (``potential`` set): kernel
    quadrature, which needs ``grid`` and ``cutoff``; its matrices carry a
    quadrature-level Hermiticity defect, so they are gated at a looser
    tolerance and symmetrized by the eigensolver.

    Eigenvalues above the edge-mode cut (k_keep, default window size / 4) are
    discarded.
    """
    xis = path.samples() if isinstance(path, MomentumPath) else np.asarray(path, dtype=float)
    if k_keep is None:
        k_keep = max(1, window.size // 4)
    k_keep = int(min(k_keep, window.size))
    magnetic_opts = dict(magnetic_opts or {})

    work_symbol = symbol.with_cutoff(cutoff) if (cutoff is not None and potential is None) \
        else symbol

    def solve(xi):
        if potential is None:
            mat = build_fiber_matrix(work_symbol, xi, window)
            return eig_hermitian(mat, tol=hermiticity_tol)[:k_keep]
        if grid is None or cutoff is None:
            raise ValueError("magnetic bands need grid and cutoff")
        mat = magnetic_fiber_matrix(symbol, potential, xi, window, grid, cutoff,
                                    **magnetic_opts)
        return eig_hermitian(mat, tol=max(hermiticity_tol, 1e-8))[:k_keep]

    workers = _worker_count(len(xis))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(solve, xis))
    else:
        rows = [solve(xi) for xi in xis]
    energies = np.array(rows)
    return BandStructure(
        xis=np.atleast_2d(xis),
        energies=energies,
        window_radius=window.radius,
        k_keep=k_keep,
        gauge_id="magnetic" if potential is not None else "none",
        meta={"cutoff_n": None if cutoff is None else cutoff.N},
    )


def truncation_convergence(symbol, xi, window_radii, k_keep, cutoffs=None,
                           stall_tol=1e-10, make_window=None):
    """Lowest-k eigenvalues across growing windows (and optional cutoffs).

    Reports per-level values, Cauchy differences between consecutive levels,
    and flags levels whose difference fails to shrink while still above
    ``stall_tol``.
    """
    from .fiber import DualWindow
    from .symbols import CutoffProfile

    if cutoffs is None:
        cutoffs = [None] * len(window_radii)
    if len(cutoffs) != len(window_radii):
        raise ValueError("one cutoff entry per window radius (None allowed)")
    if make_window is None:
        make_window = lambda r: DualWindow(r, symbol.dimension)

    levels = []
    prev = None
    prev_diff = None
    for radius, cut in zip(window_radii, cutoffs):
        work = symbol if cut is None else symbol.with_cutoff(
            cut if not isinstance(cut, int) else CutoffProfile(cut))
        mat = build_fiber_matrix(work, xi, make_window(radius))
        vals = eig_hermitian(mat)[:k_keep]
        entry = {"window_radius": radius,
                 "cutoff_n": (cut.N if hasattr(cut, "N") else cut),
                 "eigenvalues": vals.tolist()}
        if prev is not None:
            k = min(len(prev), len(vals))
            diff = float(np.max(np.abs(np.asarray(prev[:k]) - vals[:k])))
            entry["cauchy_diff"] = diff
            entry["stalled"] = bool(prev_diff is not None and diff > prev_diff
                                    and diff > stall_tol)
            prev_diff = diff
        levels.append(entry)
        prev = vals
    return {"xi": list(np.asarray(xi, dtype=float).ravel()), "k_keep": k_keep,
            "levels": levels}


def band_smoothness_probe(symbol, xi, direction, h_list, band_index, window,
                          gap_factor=10.0):
    """Richardson-stabilized difference quotients of one band along a direction.

    Refuses near-degenerate bands: the gap to the neighboring bands must
    exceed ``gap_factor * max(h) * slope_estimate``; crossings would make the
    sorted-order eigenvalue a non-smooth function.
    """
    xi = np.asarray(xi, dtype=float).ravel()
    direction = np.asarray(direction, dtype=float).ravel()
    direction = direction / np.linalg.norm(direction)
    h_list = sorted(float(h) for h in h_list)
    if not h_list:
        raise ValueError("need at least one step size")

    def level(xi_val):
        mat = build_fiber_matrix(symbol, xi_val, window)
        return eig_hermitian(mat)

    base = level(xi)
    lam = base[band_index]
    neighbors = [abs(base[j] - lam) for j in (band_index - 1, band_index + 1)
                 if 0 <= j < len(base)]
    gap = min(neighbors) if neighbors else np.inf

    h0 = h_list[0]
    slope_est = abs(level(xi + h0 * direction)[band_index] - lam) / h0
    needed = gap_factor * max(h_list) * max(slope_est, 1.0)
    if gap < needed:
        raise DegenerateBandError(gap, needed)

    rows = []
    for h in h_list:
        up = level(xi + h * direction)[band_index]
        dn = level(xi - h * direction)[band_index]
        rows.append({"h": h,
                     "first": (up - dn) / (2 * h),
                     "second": (up - 2 * lam + dn) / h**2})

    # Richardson extrapolation of the order-h^2 central quotients
    table = {"h": [r["h"] for r in rows],
             "first": [r["first"] for r in rows],
             "second": [r["second"] for r in rows]}
    for key in ("first", "second"):
        vals = table[key]
        hs = table["h"]
        extrap = []
        for i in range(len(vals) - 1):
            r2 = (hs[i] / hs[i + 1]) ** 2
            extrap.append((vals[i] - r2 * vals[i + 1]) / (1.0 - r2))
        table[f"{key}_richardson"] = extrap
        if len(extrap) >= 2:
            table[f"{key}_stabilized"] = bool(
                abs(extrap[-1] - extrap[-2]) <= 1e-6 * max(1.0, abs(extrap[-1])))
    table["gap"] = float(gap)
    table["band_value"] = float(lam)
    return table
