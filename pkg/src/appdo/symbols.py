"""Almost-periodic symbols as finite trigonometric polynomials in x.

A symbol is ``a(x, xi) = sum_lam a_lam(xi) exp(2 pi i lam.x)`` with finitely
many frequencies ``lam`` (exact, see :mod:`appdo.frequencies`) and closed-form
coefficient functions ``a_lam`` (see :mod:`appdo.expr`). Operators are taken
in Kohn-Nirenberg quantization, so on characters
``a(x, D) e_eta = sum_nu a_nu(eta) e_{eta + nu}``.

Composition, adjoint and translation are exact finite formulas on the
coefficient trees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import AppdoError, DimensionError, HypothesisError, SymbolClassError
from .expr import CoeffFn, parse_coeff_expr
from .frequencies import Frequency, GeneratorSet, embed, embed_many, integer_basis

__all__ = [
    "SymbolClassParams", "APSymbol", "TPFunction", "parse_coeff_expr",
    "evaluate_symbol", "mean_value_exact", "mean_value_box", "bohr_fourier",
    "apply_to_tp", "adjoint_symbol", "compose_symbols", "translate_symbol",
    "seminorm_estimate", "hypoellipticity_check", "bochner_fejer",
    "fejer_weights", "besicovitch_sobolev_norm", "hermitian_part",
]

DEFAULT_QUADRATURE_BUDGET = 4_000_000


class QuadratureBudgetError(AppdoError):
    """Box quadrature would need more nodes than allowed."""


@dataclass(frozen=True)
class SymbolClassParams:
    """Order ``m``, type ``(rho, delta)`` and optional lower order ``m0``."""

    m: float = 0.0
    rho: float = 1.0
    delta: float = 0.0
    m0: float | None = None

    def __post_init__(self):
        for name in ("m", "rho", "delta"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise SymbolClassError(f"class parameter {name} must be a finite real, got {v!r}")
        if not 0 < self.rho <= 1:
            raise SymbolClassError(f"rho = {self.rho} violates 0 < rho <= 1")
        if not 0 <= self.delta < 1:
            raise SymbolClassError(f"delta = {self.delta} violates 0 <= delta < 1")
        if self.delta > self.rho:
            raise SymbolClassError(f"delta = {self.delta} exceeds rho = {self.rho}")
        if self.m0 is not None and self.m0 > self.m:
            raise SymbolClassError(f"lower order m0 = {self.m0} exceeds m = {self.m}")


def _frozen_terms(terms, gens: GeneratorSet, dim: int):
    out = {}
    for lam, fn in dict(terms).items():
        if not isinstance(lam, Frequency):
            lam = Frequency(lam)
        if lam.rank != gens.count:
            raise DimensionError(f"frequency {lam.label()} has {lam.rank} coefficients, expected {gens.count}")
        if isinstance(fn, str):
            fn = parse_coeff_expr(fn, dim)
        elif not isinstance(fn, CoeffFn):
            fn = CoeffFn.constant(fn, dim)
        if fn.dim != dim:
            raise DimensionError(f"coefficient at {lam.label()} has dimension {fn.dim}, expected {dim}")
        if fn.is_zero():
            continue
        out[lam] = fn
    return tuple(sorted(out.items(), key=lambda kv: kv[0]))


class APSymbol:
    """Finite sum ``sum_lam a_lam(xi) e_lam(x)``; immutable.

    Parameters
    ----------
    gens : GeneratorSet
    terms : mapping Frequency -> CoeffFn (or expression text, or constant)
        Zero coefficients are dropped.
    cls : SymbolClassParams, optional
    """

    __slots__ = ("gens", "terms", "cls", "_map")

    def __init__(self, gens: GeneratorSet, terms: Mapping, cls: SymbolClassParams | None = None):
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "terms", _frozen_terms(terms, gens, gens.dim))
        object.__setattr__(self, "cls", cls or SymbolClassParams())
        object.__setattr__(self, "_map", dict(self.terms))

    def __setattr__(self, name, value):
        raise AttributeError("APSymbol is immutable")

    # constructors
    @classmethod
    def identity(cls, gens: GeneratorSet) -> "APSymbol":
        return cls(gens, {gens.zero(): 1})

    @classmethod
    def multiplier(cls, gens: GeneratorSet, g, params=None) -> "APSymbol":
        return cls(gens, {gens.zero(): g}, params)

    @classmethod
    def character(cls, gens: GeneratorSet, lam: Frequency, g=1, params=None) -> "APSymbol":
        return cls(gens, {lam: g}, params)

    @property
    def dim(self) -> int:
        return self.gens.dim

    @property
    def frequencies(self) -> tuple:
        return tuple(lam for lam, _ in self.terms)

    def coefficient(self, lam: Frequency) -> CoeffFn:
        fn = self._map.get(lam)
        return fn if fn is not None else CoeffFn.constant(0, self.dim)

    def is_multiplier(self) -> bool:
        """Only the zero frequency occurs: the operator is g(D)."""
        return all(lam.is_zero() for lam in self.frequencies)

    def is_xi_independent(self) -> bool:
        return all(fn.is_constant() for _, fn in self.terms)

    def with_class(self, cls: SymbolClassParams) -> "APSymbol":
        return APSymbol(self.gens, self._map, cls)

    def __eq__(self, other):
        if not isinstance(other, APSymbol):
            return NotImplemented
        return self.gens == other.gens and self.terms == other.terms and self.cls == other.cls

    def __hash__(self):
        return hash((self.gens, self.terms, self.cls))

    def __repr__(self):
        body = ", ".join(f"{lam.label()}: {fn.text()}" for lam, fn in self.terms)
        return f"APSymbol({{{body}}}, m={self.cls.m})"

    # arithmetic
    def _check_gens(self, other: "APSymbol"):
        if self.gens != other.gens:
            raise DimensionError("symbols are defined over different generator sets")

    def __add__(self, other):
        if not isinstance(other, APSymbol):
            return self + APSymbol.multiplier(self.gens, other, self.cls)
        self._check_gens(other)
        terms = dict(self._map)
        for lam, fn in other.terms:
            terms[lam] = terms[lam] + fn if lam in terms else fn
        cls = SymbolClassParams(max(self.cls.m, other.cls.m), min(self.cls.rho, other.cls.rho),
                                max(self.cls.delta, other.cls.delta))
        return APSymbol(self.gens, terms, cls)

    def __neg__(self):
        return APSymbol(self.gens, {lam: -fn for lam, fn in self.terms}, self.cls)

    def __sub__(self, other):
        if not isinstance(other, APSymbol):
            return self + (-complex(other))
        return self + (-other)

    def scale(self, c) -> "APSymbol":
        return APSymbol(self.gens, {lam: fn * complex(c) for lam, fn in self.terms}, self.cls)

    def evaluate(self, x, xi) -> np.ndarray:
        """Vectorized ``a(x_k, xi_k)`` for paired point arrays of shape ``(n, d)``."""
        x = _points(x, self.dim)
        xi = _points(xi, self.dim)
        if x.shape[0] != xi.shape[0]:
            if x.shape[0] == 1:
                x = np.repeat(x, xi.shape[0], axis=0)
            elif xi.shape[0] == 1:
                xi = np.repeat(xi, x.shape[0], axis=0)
            else:
                raise DimensionError("x and xi point counts differ")
        out = np.zeros(x.shape[0], dtype=complex)
        for lam, fn in self.terms:
            phase = np.exp(2j * np.pi * (x @ embed(lam, self.gens)))
            out += fn.evaluate(xi) * phase
        return out


def _points(p, dim: int) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.shape[1] != dim:
        raise DimensionError(f"points of dimension {arr.shape[1]}, expected {dim}")
    return arr


class TPFunction:
    """Trigonometric polynomial ``sum_lam c_lam e_lam``; zero coefficients dropped."""

    __slots__ = ("gens", "coeffs")

    def __init__(self, gens: GeneratorSet, coeffs: Mapping):
        clean = {}
        for lam, c in dict(coeffs).items():
            if not isinstance(lam, Frequency):
                lam = Frequency(lam)
            if lam.rank != gens.count:
                raise DimensionError("frequency does not match the generator count")
            c = complex(c)
            if c != 0:
                clean[lam] = c
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("TPFunction is immutable")

    @classmethod
    def character(cls, gens: GeneratorSet, lam: Frequency, c=1.0) -> "TPFunction":
        return cls(gens, {lam: c})

    @property
    def frequencies(self) -> tuple:
        return tuple(self.coeffs)

    def coefficient(self, lam: Frequency) -> complex:
        return self.coeffs.get(lam, 0j)

    def norm(self) -> float:
        """Besicovitch norm, by Plancherel."""
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def coeff_l1(self) -> float:
        return sum(abs(c) for c in self.coeffs.values())

    def inner(self, other: "TPFunction") -> complex:
        """Besicovitch inner product ``M(f conj(g))``."""
        return sum((c * other.coeffs.get(lam, 0j).conjugate() for lam, c in self.coeffs.items()), 0j)

    def __call__(self, x) -> np.ndarray:
        pts = _points(x, self.gens.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        for lam, c in self.coeffs.items():
            out += c * np.exp(2j * np.pi * (pts @ embed(lam, self.gens)))
        return out

    def __add__(self, other: "TPFunction") -> "TPFunction":
        merged = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            merged[lam] = merged.get(lam, 0j) + c
        return TPFunction(self.gens, merged)

    def __sub__(self, other: "TPFunction") -> "TPFunction":
        return self + other.scale(-1)

    def scale(self, c) -> "TPFunction":
        return TPFunction(self.gens, {lam: v * c for lam, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, TPFunction):
            return NotImplemented
        return self.gens == other.gens and self.coeffs == other.coeffs

    def __repr__(self):
        return f"TPFunction({ {lam.label(): c for lam, c in self.coeffs.items()} })"


# ----------------------------------------------------------- operations


def evaluate_symbol(a: APSymbol, x, xi) -> complex:
    """``a(x, xi)`` at a single point."""
    x = np.asarray(x, dtype=float).reshape(1, a.dim)
    xi = np.asarray(xi, dtype=float).reshape(1, a.dim)
    return complex(a.evaluate(x, xi)[0])


def mean_value_exact(f: TPFunction) -> complex:
    """Mean value of a trigonometric polynomial: its zero-frequency coefficient."""
    return f.coefficient(f.gens.zero())


def mean_value_box(f: Callable, T: float, s, panels_per_unit: int = 4, order: int = 10,
                   budget: int = DEFAULT_QUADRATURE_BUDGET) -> complex:
    """Average of ``f`` over the cube ``s + [0, T]^d`` by composite Gauss-Legendre.

    Parameters
    ----------
    f : callable
        Maps an ``(n, d)`` array of points to ``n`` values.
    T : float
        Side length of the cube.
    s : sequence of float
        Lower corner; its length fixes ``d``.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d = s.shape[0]
    panels = max(1, math.ceil(T * panels_per_unit))
    per_axis = panels * order
    if per_axis ** d > budget:
        raise QuadratureBudgetError(f"{per_axis ** d} quadrature nodes exceed the budget of {budget}")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, T, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    axis_pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    axis_w = (half[:, None] * weights[None, :]).ravel()
    grids = np.meshgrid(*([axis_pts] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1) + s[None, :]
    wgrids = np.meshgrid(*([axis_w] * d), indexing="ij")
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    vals = np.asarray(f(pts), dtype=complex)
    return complex(np.sum(w * vals) / T**d)


def bohr_fourier(a: APSymbol, lam: Frequency) -> CoeffFn:
    """Coefficient of ``e_lam`` in ``a`` (the zero function when absent)."""
    return a.coefficient(lam)


def apply_to_tp(a: APSymbol, f: TPFunction) -> TPFunction:
    """Exact action of ``a(x, D)`` on a trigonometric polynomial."""
    if a.gens != f.gens:
        raise DimensionError("symbol and function use different generator sets")
    if not f.coeffs:
        return TPFunction(f.gens, {})
    etas = list(f.coeffs)
    pts = embed_many(etas, f.gens)
    vals = np.array([f.coeffs[e] for e in etas])
    out: dict = {}
    for nu, fn in a.terms:
        contrib = fn.evaluate(pts) * vals
        for eta, c in zip(etas, contrib):
            key = nu + eta
            out[key] = out.get(key, 0j) + c
    return TPFunction(f.gens, out)


def adjoint_symbol(a: APSymbol) -> APSymbol:
    """Formal adjoint: ``a+_mu(eta) = conj(a_{-mu}(eta + mu))``."""
    mat = a.gens.matrix
    terms = {}
    for lam, fn in a.terms:
        mu = -lam
        terms[mu] = fn.shifted(coeffs=mu.coeffs, gens_matrix=mat).conj()
    return APSymbol(a.gens, terms, a.cls)


def compose_symbols(a: APSymbol, b: APSymbol) -> APSymbol:
    """Symbol of ``a(x, D) b(x, D)``.

    ``(a o b)_mu(eta) = sum_{nu + nu' = mu} a_nu(eta + nu') b_nu'(eta)``.
    """
    a._check_gens(b)
    mat = a.gens.matrix
    terms: dict = {}
    for nu, fa in a.terms:
        for nup, fb in b.terms:
            piece = fa.shifted(coeffs=nup.coeffs, gens_matrix=mat) * fb
            key = nu + nup
            terms[key] = terms[key] + piece if key in terms else piece
    cls = SymbolClassParams(a.cls.m + b.cls.m, min(a.cls.rho, b.cls.rho), max(a.cls.delta, b.cls.delta))
    return APSymbol(a.gens, terms, cls)


def translate_symbol(a: APSymbol, xi0) -> APSymbol:
    """Shift every coefficient: ``a_lam(.) -> a_lam(. + xi0)``."""
    xi0 = np.atleast_1d(np.asarray(xi0, dtype=float))
    if xi0.shape[0] != a.dim:
        raise DimensionError("translation vector does not match the dimension")
    return APSymbol(a.gens, {lam: fn.shifted(real=xi0) for lam, fn in a.terms}, a.cls)


def hermitian_part(a: APSymbol) -> APSymbol:
    """``(a + a+) / 2``, a symbol whose operator is formally self-adjoint."""
    return (a + adjoint_symbol(a)).scale(0.5).with_class(a.cls)


def japanese(xi: np.ndarray) -> np.ndarray:
    """``<xi> = (1 + |xi|^2)^(1/2)`` row-wise."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 1:
        return np.sqrt(1.0 + xi**2)
    return np.sqrt(1.0 + np.sum(xi**2, axis=-1))


@dataclass(frozen=True)
class GridEstimate:
    """A supremum taken over finitely many points; a lower bound of the true sup."""

    value: float
    xi: tuple = ()
    x: tuple = ()
    is_lower_bound: bool = True

    def __float__(self):
        return float(self.value)


def _tup(row) -> tuple:
    return tuple(float(v) for v in row)


def _default_x_grid(dim: int, n: int = 128, extent: float = 8.0) -> np.ndarray:
    per = n if dim == 1 else max(8, int(round(n ** (1 / dim))))
    axis = np.linspace(0.0, extent, per, endpoint=False)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _derived_values(a: APSymbol, alpha, beta, xi: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``d_xi^alpha d_x^beta a`` on the product grid, shape ``(len(xi), len(x))``."""
    out = np.zeros((xi.shape[0], x.shape[0]), dtype=complex)
    for lam, fn in a.terms:
        vec = embed(lam, a.gens)
        xfactor = np.prod((2j * np.pi * vec) ** np.asarray(beta))
        if xfactor == 0:
            continue
        dvals = fn.derivative(alpha).evaluate(xi)
        phase = np.exp(2j * np.pi * (x @ vec))
        out += xfactor * dvals[:, None] * phase[None, :]
    return out


def seminorm_estimate(a: APSymbol, alpha, beta, xi_grid, x_grid=None) -> GridEstimate:
    """Grid maximum of ``<xi>^(-m + rho|alpha| - delta|beta|) |d_xi^alpha d_x^beta a|``."""
    alpha = tuple(int(v) for v in alpha)
    beta = tuple(int(v) for v in beta)
    if len(alpha) != a.dim or len(beta) != a.dim:
        raise DimensionError("multi-indices must have one entry per dimension")
    xi = _points(xi_grid, a.dim)
    x = _default_x_grid(a.dim) if x_grid is None else _points(x_grid, a.dim)
    vals = np.abs(_derived_values(a, alpha, beta, xi, x))
    expo = -a.cls.m + a.cls.rho * sum(alpha) - a.cls.delta * sum(beta)
    weighted = vals * japanese(xi)[:, None] ** expo
    if weighted.size == 0 or not a.terms:
        return GridEstimate(0.0)
    i, j = np.unravel_index(int(np.argmax(weighted)), weighted.shape)
    return GridEstimate(float(weighted[i, j]), _tup(xi[i]), _tup(x[j]))


@dataclass
class HypoellipticityReport:
    ok: bool
    C: float
    ratio_constants: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)


def _multi_indices(dim: int, max_order: int):
    def rec(prefix, remaining, slots):
        if slots == 0:
            yield tuple(prefix)
            return
        for k in range(remaining + 1):
            yield from rec(prefix + [k], remaining - k, slots - 1)
    for idx in rec([], max_order, 2 * dim):
        if 0 < sum(idx) <= max_order:
            yield idx[:dim], idx[dim:]


def hypoellipticity_check(a: APSymbol, R: float, max_order: int, xi_grid, x_grid=None,
                          lower_tol: float = 1e-6, ratio_cap: float = 1e6) -> HypoellipticityReport:
    """Grid test of the lower bound ``|a| >= C <xi>^m0`` and the derivative ratio bounds for ``|xi| >= R``.

    ``ok`` requires the smallest observed ``|a| <xi>^(-m0)`` to exceed
    ``lower_tol`` and every observed ratio constant to stay below ``ratio_cap``.
    """
    if a.cls.m0 is None:
        raise HypothesisError("hypoellipticity needs the lower order m0 in the class parameters")
    xi = _points(xi_grid, a.dim)
    xi = xi[np.linalg.norm(xi, axis=1) >= R]
    x = _default_x_grid(a.dim) if x_grid is None else _points(x_grid, a.dim)
    if xi.shape[0] == 0:
        raise HypothesisError(f"no grid point satisfies |xi| >= {R}")
    zero = (0,) * a.dim
    base = _derived_values(a, zero, zero, xi, x)
    jb = japanese(xi)
    lower = np.abs(base) * jb[:, None] ** (-a.cls.m0)
    i, j = np.unravel_index(int(np.argmin(lower)), lower.shape)
    C = float(lower[i, j])
    report = HypoellipticityReport(ok=C > lower_tol, C=C)
    if C <= lower_tol:
        report.witnesses.append({"kind": "lower bound", "xi": _tup(xi[i]), "x": _tup(x[j]),
                                 "abs_a": float(np.abs(base[i, j]))})
    nonzero = base != 0
    for alpha, beta in _multi_indices(a.dim, max_order):
        der = _derived_values(a, alpha, beta, xi, x)
        weight = jb[:, None] ** (a.cls.rho * sum(alpha) - a.cls.delta * sum(beta))
        ratio = np.full(base.shape, np.inf)
        ratio[nonzero] = (np.abs(der) * weight)[nonzero] / np.abs(base[nonzero])
        k, l = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
        cab = float(ratio[k, l])
        report.ratio_constants[(alpha, beta)] = cab
        if not cab <= ratio_cap:
            report.ok = False
            report.witnesses.append({"kind": "ratio", "alpha": alpha, "beta": beta,
                                     "xi": _tup(xi[k]), "x": _tup(x[l]), "value": cab})
    return report


def fejer_weights(f: TPFunction, n: int) -> dict:
    """Product-Fejer kernel ``prod_i max(0, 1 - |m_i|/n)`` at each frequency of ``f``.

    The ``m_i`` are integer coordinates in a Z-basis of the group generated
    by the frequencies of ``f``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    _, coords = integer_basis(list(f.coeffs))
    weights = {}
    for lam, m in coords.items():
        w = 1.0
        for mi in m:
            w *= max(0.0, 1.0 - abs(mi) / n)
        weights[lam] = w
    return weights


def bochner_fejer(f: TPFunction, n: int) -> TPFunction:
    """Bochner-Fejer polynomial of order ``n``."""
    w = fejer_weights(f, n)
    return TPFunction(f.gens, {lam: c * w[lam] for lam, c in f.coeffs.items()})


def bochner_fejer_bound(f: TPFunction, n: int) -> float:
    """Upper bound ``sum_lam (sum_i |m_i| / n) |f_lam|`` for the sup-norm error."""
    _, coords = integer_basis(list(f.coeffs))
    return sum(min(1.0, sum(abs(mi) for mi in coords[lam]) / n) * abs(c) for lam, c in f.coeffs.items())


def besicovitch_sobolev_norm(f: TPFunction, s: float) -> float:
    """``(sum_lam <lam>^(2s) |f_lam|^2)^(1/2)``; ``s = 0`` is the Besicovitch norm."""
    if not f.coeffs:
        return 0.0
    lams = list(f.coeffs)
    weights = japanese(embed_many(lams, f.gens)) ** (2 * s)
    vals = np.array([abs(f.coeffs[l]) ** 2 for l in lams])
    return float(math.sqrt(float(np.sum(weights * vals))))
