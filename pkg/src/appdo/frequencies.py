"""Exact frequency vectors over a finite set of real generators.

A frequency is stored as a vector of rationals ``(q_1, ..., q_r)`` and
stands for the real vector ``q_1 g_1 + ... + q_r g_r``. Arithmetic and
equality are exact on the rational coordinates, so matching a difference
of two frequencies against the frequency set of a symbol never depends on
floating point rounding. The generators carry the irrational content and
are only touched when a frequency is embedded into R^d.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, IndependenceError, WindowCapError

DEFAULT_ELEMENT_CAP = 50_000
DEFAULT_PROBE_BOUND = 12


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # floats are accepted only when they are exact small rationals
        frac = Fraction(value).limit_denominator(10**6)
        if float(frac) != value:
            raise ValueError(f"{value!r} is not an exact rational; pass a Fraction or 'p/q'")
        return frac
    return Fraction(value)


@dataclass(frozen=True)
class GeneratorSet:
    """Real generators g_1..g_r in R^d assumed linearly independent over Q.

    Parameters
    ----------
    generators : sequence of sequences of float
        One vector of length ``dim`` per generator.
    names : sequence of str, optional
        Display names, used by the symbol file format.
    probe_bound : int
        Integer relations ``sum c_i g_i = 0`` with ``max |c_i| <= probe_bound``
        are searched for; finding one is an error. Set to 0 to skip.
    """

    generators: tuple
    names: tuple = ()
    probe_bound: int = DEFAULT_PROBE_BOUND

    def __post_init__(self):
        gens = tuple(tuple(float(c) for c in g) for g in self.generators)
        if not gens:
            raise DimensionError("at least one generator is required")
        dim = len(gens[0])
        if dim == 0 or any(len(g) != dim for g in gens):
            raise DimensionError("every generator must have the same positive length")
        object.__setattr__(self, "generators", gens)
        names = tuple(self.names) if self.names else tuple(f"g{i + 1}" for i in range(len(gens)))
        if len(names) != len(gens):
            raise DimensionError("one name per generator is required")
        object.__setattr__(self, "names", names)
        if self.probe_bound > 0:
            relation = find_integer_relation(gens, self.probe_bound)
            if relation is not None:
                raise IndependenceError(
                    f"generators satisfy the rational relation {relation} "
                    f"(coefficients bounded by {self.probe_bound})"
                )

    @property
    def dim(self) -> int:
        return len(self.generators[0])

    @property
    def count(self) -> int:
        return len(self.generators)

    @property
    def matrix(self) -> np.ndarray:
        """Generators as rows, shape ``(count, dim)``."""
        return np.array(self.generators, dtype=float)

    def zero(self) -> "Frequency":
        return Frequency.zero(self.count)

    def unit(self, i: int) -> "Frequency":
        coeffs = [0] * self.count
        coeffs[i] = 1
        return Frequency(coeffs)

    def freq(self, *coeffs) -> "Frequency":
        if len(coeffs) != self.count:
            raise DimensionError(f"expected {self.count} coefficients, got {len(coeffs)}")
        return Frequency(coeffs)


def find_integer_relation(gens, bound: int, rtol: float = 1e-9):
    """Return a nonzero integer vector c with sum c_i g_i ~ 0, or None.

    Brute force over ``max |c_i| <= bound``; relations and their negatives
    are equivalent so only one of each pair is checked.
    """
    mat = np.asarray(gens, dtype=float)
    r = mat.shape[0]
    scale = max(float(np.abs(mat).max()), 1.0)
    if np.any(np.all(np.abs(mat) <= rtol * scale, axis=1)):
        idx = int(np.flatnonzero(np.all(np.abs(mat) <= rtol * scale, axis=1))[0])
        rel = [0] * r
        rel[idx] = 1
        return tuple(rel)
    if r == 1:
        return None
    rng = np.arange(-bound, bound + 1)
    grids = np.stack(np.meshgrid(*([rng] * r), indexing="ij"), axis=-1).reshape(-1, r)
    grids = grids[np.any(grids != 0, axis=1)]
    # keep one representative per +/- pair: first nonzero entry positive
    first = grids[np.arange(len(grids)), np.argmax(grids != 0, axis=1)]
    grids = grids[first > 0]
    values = grids @ mat
    tol = rtol * scale * np.abs(grids).sum(axis=1)
    hit = np.all(np.abs(values) <= tol[:, None], axis=1)
    if np.any(hit):
        c = grids[np.flatnonzero(hit)[0]]
        return tuple(int(v) for v in c)
    return None


@total_ordering
class Frequency:
    """Exact rational coordinate vector; immutable and hashable."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable):
        c = tuple(_as_fraction(v) for v in coeffs)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "_hash", hash(c))

    def __setattr__(self, name, value):
        raise AttributeError("Frequency is immutable")

    @classmethod
    def zero(cls, r: int) -> "Frequency":
        return cls((0,) * r)

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "Frequency"):
        if not isinstance(other, Frequency):
            return NotImplemented
        if len(other.coeffs) != len(self.coeffs):
            raise DimensionError(
                f"frequencies over {len(self.coeffs)} and {len(other.coeffs)} generators"
            )
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Frequency(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Frequency(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return Frequency(-a for a in self.coeffs)

    def scale(self, q) -> "Frequency":
        q = _as_fraction(q)
        return Frequency(q * a for a in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Frequency):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __lt__(self, other):
        if not isinstance(other, Frequency):
            return NotImplemented
        return self.coeffs < other.coeffs

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Frequency({self.label()})"

    def label(self) -> str:
        """Exact text form, e.g. ``(1,-1/2)``."""
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"

    @classmethod
    def parse(cls, text: str) -> "Frequency":
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        parts = [p for p in body.split(",") if p.strip()]
        return cls(Fraction(p.strip()) for p in parts)


def embed(f: Frequency, g: GeneratorSet) -> np.ndarray:
    """Real vector ``sum_i f.coeffs[i] * g.generators[i]`` in double precision."""
    if f.rank != g.count:
        raise DimensionError(f"frequency has {f.rank} coefficients but there are {g.count} generators")
    q = np.array([float(c) for c in f.coeffs])
    return q @ g.matrix


def embed_many(freqs: Sequence[Frequency], g: GeneratorSet) -> np.ndarray:
    """Embed a list of frequencies, shape ``(len(freqs), dim)``."""
    if not freqs:
        return np.zeros((0, g.dim))
    for f in freqs:
        if f.rank != g.count:
            raise DimensionError(f"frequency has {f.rank} coefficients but there are {g.count} generators")
    q = np.array([[float(c) for c in f.coeffs] for f in freqs])
    return q @ g.matrix


class FrequencyWindow:
    """Sorted, duplicate-free finite list of frequencies used as an index set."""

    def __init__(self, elements: Iterable[Frequency], gens: GeneratorSet, radius=None):
        elems = sorted(set(elements))
        for e in elems:
            if e.rank != gens.count:
                raise DimensionError("window element does not match the generator count")
        self.elements: tuple = tuple(elems)
        self.gens = gens
        self.radius = radius
        self._index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __contains__(self, f):
        return f in self._index

    def __eq__(self, other):
        if not isinstance(other, FrequencyWindow):
            return NotImplemented
        return self.elements == other.elements and self.gens == other.gens

    def __repr__(self):
        return f"FrequencyWindow(n={len(self)}, radius={self.radius})"

    def index(self, f: Frequency) -> int:
        return self._index[f]

    def get_index(self, f: Frequency, default=None):
        return self._index.get(f, default)

    def embedded(self) -> np.ndarray:
        return embed_many(self.elements, self.gens)

    def union(self, other: "FrequencyWindow") -> "FrequencyWindow":
        return FrequencyWindow(self.elements + other.elements, self.gens)

    def padded(self, band: Iterable[Frequency]) -> "FrequencyWindow":
        """``self ∪ (self + band)``."""
        band = list(band)
        extra = [w + b for w in self.elements for b in band]
        return FrequencyWindow(self.elements + tuple(extra), self.gens, radius=self.radius)

    def negated(self) -> "FrequencyWindow":
        return FrequencyWindow((-e for e in self.elements), self.gens, radius=self.radius)


def window_enumerate(
    g: GeneratorSet, coeff_bound, denom_bound: int = 1, cap: int = DEFAULT_ELEMENT_CAP
) -> FrequencyWindow:
    """All frequencies with coefficients ``k / denom_bound``, ``|k/denom_bound| <= coeff_bound``."""
    bound = _as_fraction(coeff_bound)
    if bound <= 0:
        raise ValueError("coeff_bound must be positive")
    if int(denom_bound) != denom_bound or denom_bound < 1:
        raise ValueError("denom_bound must be a positive integer")
    q = int(denom_bound)
    kmax = math.floor(bound * q)
    per_axis = 2 * kmax + 1
    size = per_axis ** g.count
    if size > cap:
        raise WindowCapError(size, cap)
    axis = [Fraction(k, q) for k in range(-kmax, kmax + 1)]
    elems = (Frequency(c) for c in itertools.product(axis, repeat=g.count))
    return FrequencyWindow(elems, g, radius=bound)


def module_closure(
    freqs: Sequence[Frequency], g: GeneratorSet, depth: int, cap: int = DEFAULT_ELEMENT_CAP
) -> FrequencyWindow:
    """All sums of at most ``depth`` elements of ``freqs ∪ -freqs``."""
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    steps = set(freqs) | {-f for f in freqs}
    zero = g.zero()
    current = {zero}
    frontier = {zero}
    for _ in range(depth):
        nxt = {f + s for f in frontier for s in steps} - current
        current |= nxt
        if len(current) > cap:
            raise WindowCapError(len(current), cap)
        frontier = nxt
        if not frontier:
            break
    return FrequencyWindow(current, g)


def integer_basis(freqs: Sequence[Frequency]):
    """Z-basis of the additive group generated by ``freqs``.

    Returns ``(basis, coords)`` where ``basis`` is a list of frequencies and
    ``coords[f]`` is the integer coordinate tuple of each input frequency
    with respect to that basis. Computed by integer row reduction of the
    rational coordinates scaled to a common denominator.
    """
    freqs = list(dict.fromkeys(freqs))
    if not freqs:
        return [], {}
    r = freqs[0].rank
    den = 1
    for f in freqs:
        for c in f.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
    rows = [[int(c * den) for c in f.coeffs] for f in freqs]
    basis_rows = _integer_echelon(rows, r)
    basis = [Frequency(Fraction(v, den) for v in row) for row in basis_rows]
    coords = {f: _solve_echelon(basis_rows, row) for f, row in zip(freqs, rows)}
    return basis, coords


def _integer_echelon(rows, ncols):
    rows = [list(r) for r in rows if any(r)]
    out = []
    col = 0
    while rows and col < ncols:
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not live:
            col += 1
            continue
        # Euclid on the pivot column until a single row carries it
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                red = [a - q * b for a, b in zip(r, piv)]
                if red[col] != 0:
                    nxt.append(red)
                elif any(red):
                    rest.append(red)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        rows = [r for r in rest if any(r)]
        col += 1
    return out


def _solve_echelon(basis_rows, target):
    target = list(target)
    coords = []
    for row in basis_rows:
        col = next(i for i, v in enumerate(row) if v != 0)
        q, rem = divmod(target[col], row[col])
        if rem != 0:
            raise ValueError("target is not in the integer span")
        coords.append(q)
        target = [a - q * b for a, b in zip(target, row)]
    if any(target):
        raise ValueError("target is not in the integer span")
    return tuple(coords)
