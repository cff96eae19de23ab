"""Periodic symbols as finite Fourier series in x with closed-form momentum parts.

A symbol is stored as ``F(x, xi) = sum_mu c_mu(xi) * e^{-i <mu, x>}`` over a
finite set of integer frequency vectors mu.  The momentum coefficients c_mu
come from a small closed family (polynomials, bracket powers <xi>^s,
Gaussians, products, plus argument-shift and smooth-cutoff wrappers), so they
are serializable, evaluable at arbitrary real momenta (half-integers included)
and carry exact first derivatives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lattice import pairing, unit_phase

__all__ = [
    "Coefficient",
    "Polynomial",
    "BracketPower",
    "Gaussian",
    "Product",
    "Shifted",
    "Cutoffed",
    "CutoffProfile",
    "PeriodicSymbol",
    "TrigSeries",
    "free_symbol",
    "potential_symbol",
    "schrodinger_symbol",
    "seminorm_probe",
    "ellipticity_probe",
]


# ---------------------------------------------------------------------------
# momentum coefficient functions
# ---------------------------------------------------------------------------

class Coefficient:
    """Base class: a smooth function of the momentum xi in R^d."""

    def value(self, xi):
        raise NotImplementedError

    def grad(self, xi):
        """Closed-form gradient, shape (..., d)."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def __call__(self, xi):
        return self.value(np.asarray(xi, dtype=float))


@dataclass(frozen=True)
class Polynomial(Coefficient):
    """sum_k coeffs[k] * xi^k over multi-indices k (tuple of ints >= 0)."""

    coeffs: dict

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros(xi.shape[:-1], dtype=complex)
        for powers, c in self.coeffs.items():
            mono = np.ones(xi.shape[:-1])
            for j, k in enumerate(powers):
                if k:
                    mono = mono * xi[..., j] ** k
            out = out + c * mono
        return out

    def grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        d = xi.shape[-1]
        out = np.zeros(xi.shape[:-1] + (d,), dtype=complex)
        for powers, c in self.coeffs.items():
            for j, k in enumerate(powers):
                if k == 0:
                    continue
                mono = np.full(xi.shape[:-1], float(k))
                for l, m in enumerate(powers):
                    p = m - 1 if l == j else m
                    if p:
                        mono = mono * xi[..., l] ** p
                out[..., j] += c * mono
        return out

    def to_dict(self):
        return {
            "kind": "polynomial",
            "coeffs": [
                {"powers": list(p), "value": _num_out(c)} for p, c in self.coeffs.items()
            ],
        }


@dataclass(frozen=True)
class BracketPower(Coefficient):
    """<xi>^s = (1 + |xi|^2)^{s/2}."""

    s: float

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        return (1.0 + np.sum(xi * xi, axis=-1)) ** (self.s / 2.0) + 0j

    def grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        base = (1.0 + np.sum(xi * xi, axis=-1)) ** (self.s / 2.0 - 1.0)
        return (self.s * base)[..., None] * xi + 0j

    def to_dict(self):
        return {"kind": "bracket_power", "s": self.s}


@dataclass(frozen=True)
class Gaussian(Coefficient):
    """e^{-|xi|^2 / sigma^2}."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("gaussian width must be positive")

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.exp(-np.sum(xi * xi, axis=-1) / self.sigma**2) + 0j

    def grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        v = np.exp(-np.sum(xi * xi, axis=-1) / self.sigma**2)
        return (-2.0 / self.sigma**2 * v)[..., None] * xi + 0j

    def to_dict(self):
        return {"kind": "gaussian", "sigma": self.sigma}


@dataclass(frozen=True)
class Product(Coefficient):
    first: Coefficient
    second: Coefficient

    def value(self, xi):
        return self.first.value(xi) * self.second.value(xi)

    def grad(self, xi):
        return (
            self.first.grad(xi) * self.second.value(xi)[..., None]
            + self.first.value(xi)[..., None] * self.second.grad(xi)
        )

    def to_dict(self):
        return {"kind": "product", "factors": [self.first.to_dict(), self.second.to_dict()]}


@dataclass(frozen=True)
class Shifted(Coefficient):
    """inner(xi + offset): closes the family under momentum translation."""

    inner: Coefficient
    offset: tuple

    def _shift(self, xi):
        return np.asarray(xi, dtype=float) + np.asarray(self.offset, dtype=float)

    def value(self, xi):
        return self.inner.value(self._shift(xi))

    def grad(self, xi):
        return self.inner.grad(self._shift(xi))

    def to_dict(self):
        return {"kind": "shifted", "offset": list(self.offset), "inner": self.inner.to_dict()}


# ---------------------------------------------------------------------------
# smooth momentum cutoff
# ---------------------------------------------------------------------------

def _mollifier(t):
    """C^inf ramp h with h(t)=0 for t<=0, h(t)=1 for t>=1 (exp(-1/t) bump)."""
    t = np.asarray(t, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        g0 = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        g1 = np.where(t < 1.0, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return g0 / (g0 + g1)


def _mollifier_deriv(t, h=1e-6):
    t = np.asarray(t, dtype=float)
    return (_mollifier(t + h) - _mollifier(t - h)) / (2.0 * h)


@dataclass(frozen=True)
class CutoffProfile:
    """Radial bump theta_N(xi) = theta(xi / N): 1 on |xi| <= N/2, 0 on |xi| >= N.

    The transition uses the standard exp(-1/t) mollifier, so theta_N is C^inf
    with plateau radius N/2 and support radius N.
    """

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("cutoff index N must be a positive integer")

    def radial(self, r):
        """theta(r/N) as a function of the radius r >= 0."""
        u = (np.asarray(r, dtype=float) / self.N - 0.5) * 2.0
        return 1.0 - _mollifier(u)

    def value(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.radial(np.sqrt(np.sum(xi * xi, axis=-1)))

    def grad(self, xi):
        xi = np.asarray(xi, dtype=float)
        r = np.sqrt(np.sum(xi * xi, axis=-1))
        u = (r / self.N - 0.5) * 2.0
        dr = -_mollifier_deriv(u) * 2.0 / self.N
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[..., None] > 0, xi / np.maximum(r, 1e-300)[..., None], 0.0)
        return dr[..., None] * unit


@dataclass(frozen=True)
class Cutoffed(Coefficient):
    """inner(xi) * theta_N(xi): compactly supported momentum part."""

    inner: Coefficient
    profile: CutoffProfile

    def value(self, xi):
        return self.inner.value(xi) * self.profile.value(xi)

    def grad(self, xi):
        return (
            self.inner.grad(xi) * self.profile.value(xi)[..., None]
            + self.inner.value(xi)[..., None] * self.profile.grad(xi)
        )

    def to_dict(self):
        return {"kind": "cutoff", "n": self.profile.N, "inner": self.inner.to_dict()}


def coefficient_from_dict(spec):
    kind = spec["kind"]
    if kind == "polynomial":
        coeffs = {tuple(t["powers"]): _num_in(t["value"]) for t in spec["coeffs"]}
        return Polynomial(coeffs)
    if kind == "bracket_power":
        return BracketPower(float(spec["s"]))
    if kind == "gaussian":
        return Gaussian(float(spec["sigma"]))
    if kind == "product":
        a, b = spec["factors"]
        return Product(coefficient_from_dict(a), coefficient_from_dict(b))
    if kind == "shifted":
        return Shifted(coefficient_from_dict(spec["inner"]), tuple(spec["offset"]))
    if kind == "cutoff":
        return Cutoffed(coefficient_from_dict(spec["inner"]), CutoffProfile(int(spec["n"])))
    raise ValueError(f"unknown coefficient kind {kind!r}")


def _num_in(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _num_out(c):
    c = complex(c)
    if c.imag == 0.0:
        return c.real
    return [c.real, c.imag]


def constant_coefficient(value):
    return Polynomial({(): complex(value)})


# ---------------------------------------------------------------------------
# periodic symbols
# ---------------------------------------------------------------------------

class PeriodicSymbol:
    """F(x, xi) = sum_mu c_mu(xi) e^{-i <mu, x>}, finitely many terms.

    Immutable after construction.  The Fourier coefficient with respect to x
    is a table lookup: F_hat_mu(xi) = c_mu(xi).
    """

    def __init__(self, dimension, terms, order=0.0, is_real=False, is_elliptic=False):
        self.dimension = int(dimension)
        self.terms = {tuple(int(c) for c in mu): coef for mu, coef in terms.items()}
        for mu in self.terms:
            if len(mu) != self.dimension:
                raise ValueError(f"term index {mu} does not match dimension {self.dimension}")
        self.order = float(order)
        self.is_real = bool(is_real)
        self.is_elliptic = bool(is_elliptic)
        if self.is_real:
            self._check_real_structure()

    # -- structure ---------------------------------------------------------

    def _check_real_structure(self, n_samples=8, tol=1e-10, seed=7):
        rng = np.random.default_rng(seed)
        xi = rng.uniform(-3.0, 3.0, size=(n_samples, self.dimension))
        for mu, coef in self.terms.items():
            neg = tuple(-m for m in mu)
            if neg not in self.terms:
                raise ValueError(f"real symbol lacks the conjugate partner of mu={mu}")
            a = coef.value(xi)
            b = self.terms[neg].value(xi)
            if np.max(np.abs(np.conj(a) - b)) > tol * max(1.0, np.max(np.abs(a))):
                raise ValueError(f"coefficients at mu={mu} and -mu are not conjugate-symmetric")

    @property
    def max_support(self):
        """Largest infinity norm among stored frequency vectors."""
        if not self.terms:
            return 0
        return max(max(abs(c) for c in mu) for mu in self.terms)

    # -- evaluation --------------------------------------------------------

    def eval(self, x, xi):
        """Evaluate F at (x, xi); broadcasts over leading axes of both."""
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-1])
        out = np.zeros(shape, dtype=complex)
        for mu, coef in self.terms.items():
            out = out + coef.value(xi) * unit_phase(-pairing(np.asarray(mu, float), x))
        return out

    def fourier_coefficient(self, mu, xi):
        """F_hat_mu(xi): stored coefficient, zero for absent mu."""
        mu = tuple(int(c) for c in np.asarray(mu).ravel())
        coef = self.terms.get(mu)
        if coef is None:
            xi = np.asarray(xi, dtype=float)
            return np.zeros(xi.shape[:-1], dtype=complex)
        return coef.value(xi)

    def fourier_coefficient_quadrature(self, mu, xi, n_quad):
        """Same coefficient by uniform-grid quadrature over the cell.

        Exact for the stored band-limited series once
        n_quad >= 2*(max_support + |mu|_inf) + 1; smaller grids raise.
        """
        mu = np.asarray(mu, dtype=np.int64).ravel()
        need = 2 * (self.max_support + int(np.max(np.abs(mu), initial=0))) + 1
        if n_quad < need:
            raise ValueError(f"n_quad={n_quad} undersamples the integrand; need >= {need}")
        axes = [np.arange(n_quad) / n_quad - 0.5 for _ in range(self.dimension)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dimension)
        vals = self.eval(grid, np.asarray(xi, dtype=float))
        phase = unit_phase(pairing(mu.astype(float), grid))
        return np.mean(phase * vals)

    # -- algebra -----------------------------------------------------------

    def shift(self, xi0):
        """Momentum translate: coefficients become zeta -> c_mu(zeta + xi0)."""
        xi0 = tuple(float(v) for v in np.asarray(xi0, dtype=float).ravel())
        if len(xi0) != self.dimension:
            raise ValueError("shift vector dimension mismatch")
        if all(v == 0.0 for v in xi0):
            return self
        terms = {}
        for mu, coef in self.terms.items():
            if isinstance(coef, Shifted):
                off = tuple(a + b for a, b in zip(coef.offset, xi0))
                terms[mu] = coef.inner if all(v == 0.0 for v in off) else Shifted(coef.inner, off)
            else:
                terms[mu] = Shifted(coef, xi0)
        return PeriodicSymbol(self.dimension, terms, self.order, self.is_real, self.is_elliptic)

    def with_cutoff(self, profile):
        """Multiply every momentum coefficient by theta_N (compact support)."""
        terms = {mu: Cutoffed(coef, profile) for mu, coef in self.terms.items()}
        return PeriodicSymbol(self.dimension, terms, min(self.order, 0.0) - 1.0,
                              self.is_real, False)

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "order": self.order,
            "real": self.is_real,
            "elliptic": self.is_elliptic,
            "terms": [
                {"mu": list(mu), "coef": coef.to_dict()} for mu, coef in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_dict(cls, spec):
        terms = {tuple(t["mu"]): coefficient_from_dict(t["coef"]) for t in spec["terms"]}
        return cls(
            spec["dimension"],
            terms,
            order=spec.get("order", 0.0),
            is_real=spec.get("real", False),
            is_elliptic=spec.get("elliptic", False),
        )


def apply_cutoff(symbol, profile):
    """Module-level alias for :meth:`PeriodicSymbol.with_cutoff`."""
    return symbol.with_cutoff(profile)


# ---------------------------------------------------------------------------
# x-only trigonometric series (potentials, gauge functions)
# ---------------------------------------------------------------------------

class TrigSeries:
    """Finite Fourier series f(x) = sum_mu f_hat_mu e^{-i <mu, x>} on the cell."""

    def __init__(self, dimension, coeffs, require_real=True):
        self.dimension = int(dimension)
        self.coeffs = {tuple(int(c) for c in mu): complex(v) for mu, v in coeffs.items()}
        for mu in self.coeffs:
            if len(mu) != self.dimension:
                raise ValueError(f"index {mu} does not match dimension {self.dimension}")
        if require_real:
            for mu, v in self.coeffs.items():
                neg = tuple(-m for m in mu)
                w = self.coeffs.get(neg, 0.0)
                if abs(np.conj(v) - w) > 1e-12 * max(1.0, abs(v)):
                    raise ValueError(f"series is not real: coefficient pair at mu={mu}")
        self.is_real = bool(require_real)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for mu, v in self.coeffs.items():
            out = out + v * unit_phase(-pairing(np.asarray(mu, float), x))
        return out.real if self.is_real else out

    def derivative(self, j):
        """Exact partial derivative along axis j (coefficients pick up -2*pi*i*mu_j)."""
        coeffs = {
            mu: v * (-2j * np.pi * mu[j]) for mu, v in self.coeffs.items() if mu[j] != 0
        }
        return TrigSeries(self.dimension, coeffs, require_real=self.is_real)

    def mean(self):
        """Cell average (the zero Fourier coefficient)."""
        return self.coeffs.get((0,) * self.dimension, 0.0 + 0.0j)

    @property
    def max_support(self):
        if not self.coeffs:
            return 0
        return max(max(abs(c) for c in mu) for mu in self.coeffs)

    def scaled(self, factor):
        return TrigSeries(
            self.dimension,
            {mu: v * factor for mu, v in self.coeffs.items()},
            require_real=self.is_real and float(np.imag(factor)) == 0.0,
        )

    def __add__(self, other):
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        keys = set(self.coeffs) | set(other.coeffs)
        coeffs = {k: self.coeffs.get(k, 0.0) + other.coeffs.get(k, 0.0) for k in keys}
        return TrigSeries(self.dimension, coeffs, require_real=self.is_real and other.is_real)

    @classmethod
    def cosine(cls, dimension, mu, amplitude=1.0):
        """amplitude * cos(<mu, x>) as a real series."""
        mu = tuple(int(c) for c in mu)
        neg = tuple(-c for c in mu)
        half = amplitude / 2.0
        if mu == neg:
            return cls(dimension, {mu: amplitude})
        return cls(dimension, {mu: half, neg: half})

    @classmethod
    def sine(cls, dimension, mu, amplitude=1.0):
        """amplitude * sin(<mu, x>) as a real series."""
        mu = tuple(int(c) for c in mu)
        neg = tuple(-c for c in mu)
        if mu == neg:
            raise ValueError("sine needs a nonzero frequency")
        return cls(dimension, {mu: 0.5j * amplitude, neg: -0.5j * amplitude})

    def to_terms(self):
        return [{"mu": list(mu), "value": _num_out(v)} for mu, v in sorted(self.coeffs.items())]

    @classmethod
    def from_terms(cls, dimension, terms, require_real=True):
        return cls(dimension, {tuple(t["mu"]): _num_in(t["value"]) for t in terms},
                   require_real=require_real)


# ---------------------------------------------------------------------------
# stock symbols
# ---------------------------------------------------------------------------

def free_symbol(dimension):
    """(2*pi)^2 |xi|^2: the symbol quantizing to -Laplace."""
    coeffs = {}
    for j in range(dimension):
        powers = tuple(2 if k == j else 0 for k in range(dimension))
        coeffs[powers] = (2.0 * np.pi) ** 2
    zero = (0,) * dimension
    return PeriodicSymbol(dimension, {zero: Polynomial(coeffs)}, order=2.0,
                          is_real=True, is_elliptic=True)


def potential_symbol(series):
    """Wrap an x-only real series V(x) as a momentum-constant symbol."""
    terms = {mu: constant_coefficient(v) for mu, v in series.coeffs.items()}
    return PeriodicSymbol(series.dimension, terms, order=0.0, is_real=series.is_real)


def schrodinger_symbol(potential):
    """(2*pi)^2 |xi|^2 + V(x) for a real TrigSeries V."""
    d = potential.dimension
    free = free_symbol(d)
    terms = dict(potential_symbol(potential).terms)
    zero = (0,) * d
    if zero in terms:
        merged = Polynomial({**free.terms[zero].coeffs, (): terms[zero].coeffs.get((), 0.0)})
        terms[zero] = merged
    else:
        terms[zero] = free.terms[zero]
    return PeriodicSymbol(d, terms, order=2.0, is_real=True, is_elliptic=True)


# ---------------------------------------------------------------------------
# numerical class probes
# ---------------------------------------------------------------------------

def _xi_derivative(symbol, x, xi, orders, fd_step=1e-4):
    """d^orders/dxi F(x, xi) with closed forms up to first order, central
    differences beyond (step documented, not claimed exact)."""
    orders = tuple(int(o) for o in orders)
    total = sum(orders)
    if total == 0:
        return symbol.eval(x, xi)
    j = next(i for i, o in enumerate(orders) if o > 0)
    rest = tuple(o - 1 if i == j else o for i, o in enumerate(orders))
    if sum(rest) == 0:
        out = np.zeros(np.broadcast_shapes(np.shape(x)[:-1], np.shape(xi)[:-1]), dtype=complex)
        for mu, coef in symbol.terms.items():
            out = out + coef.grad(xi)[..., j] * unit_phase(-pairing(np.asarray(mu, float), x))
        return out
    e = np.zeros(symbol.dimension)
    e[j] = fd_step
    hi = _xi_derivative(symbol, x, np.asarray(xi, float) + e, rest, fd_step)
    lo = _xi_derivative(symbol, x, np.asarray(xi, float) - e, rest, fd_step)
    return (hi - lo) / (2.0 * fd_step)


def seminorm_probe(symbol, p, n, m, xi_box, n_samples=200, n_x=16, seed=0, fd_step=1e-4):
    """Empirical sup of <xi>^{-p+m} |d_x^a d_xi^b F| over |a| <= n, |b| <= m.

    ``xi_box`` is (lo, hi) per component or a scalar half-width.  A bounded
    return value over a large box supports the declared order p; growth in the
    box size flags an order violation.
    """
    d = symbol.dimension
    rng = np.random.default_rng(seed)
    if np.isscalar(xi_box):
        lo, hi = -float(xi_box), float(xi_box)
        xi = rng.uniform(lo, hi, size=(n_samples, d))
    else:
        lo, hi = xi_box
        xi = rng.uniform(lo, hi, size=(n_samples, d))
    x = rng.uniform(-0.5, 0.5, size=(n_x, d))
    weight = (1.0 + np.sum(xi * xi, axis=-1)) ** ((-p + m) / 2.0)

    worst = 0.0
    x_orders = [a for a in itertools.product(range(n + 1), repeat=d) if sum(a) <= n]
    xi_orders = [b for b in itertools.product(range(m + 1), repeat=d) if sum(b) <= m]
    for a in x_orders:
        for b in xi_orders:
            vals = _xi_derivative(_x_derivative(symbol, a), x[:, None, :], xi[None, :, :], b,
                                  fd_step=fd_step)
            worst = max(worst, float(np.max(weight[None, :] * np.abs(vals))))
    return worst


def _x_derivative(symbol, a):
    """d_x^a applied term-by-term: multiplies c_mu by (-2*pi*i*mu)^a."""
    if sum(a) == 0:
        return symbol
    terms = {}
    for mu, coef in symbol.terms.items():
        fac = 1.0 + 0.0j
        for j, k in enumerate(a):
            fac *= (-2j * np.pi * mu[j]) ** k
        if fac == 0.0:
            continue
        terms[mu] = Product(constant_coefficient(fac), coef)
    return PeriodicSymbol(symbol.dimension, terms, symbol.order, False, False)


def ellipticity_probe(symbol, p, R, n_xi=400, n_x=32, xi_max=None, seed=0, tol=1e-8):
    """Sample inf of |F(x, xi)| <xi>^{-p} over |xi| >= R.

    Returns (is_elliptic, inf_value); the inf is the empirical constant of the
    lower bound |F| >= C <xi>^p.
    """
    if p <= 0:
        raise ValueError("ellipticity probe requires p > 0")
    d = symbol.dimension
    rng = np.random.default_rng(seed)
    if xi_max is None:
        xi_max = max(4.0 * R, 20.0)
    radii = rng.uniform(R, xi_max, size=n_xi)
    dirs = rng.normal(size=(n_xi, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    xi = radii[:, None] * dirs
    x = rng.uniform(-0.5, 0.5, size=(n_x, d))
    vals = np.abs(symbol.eval(x[:, None, :], xi[None, :, :]))
    weight = (1.0 + np.sum(xi * xi, axis=-1)) ** (-p / 2.0)
    inf_val = float(np.min(vals * weight[None, :]))
    return inf_val > tol, inf_val
