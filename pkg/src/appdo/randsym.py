"""Seeded random symbols, functions and frequency sets for property trials."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .expr import CoeffFn
from .frequencies import Frequency, GeneratorSet
from .symbols import APSymbol, SymbolClassParams, TPFunction

JB_POWERS = (Fraction(0), Fraction(-1, 2), Fraction(-1), Fraction(-3, 2), Fraction(-2))


def default_generators() -> GeneratorSet:
    """The generators ``{1, sqrt(2)}`` of the one-dimensional default setting."""
    return GeneratorSet([[1.0], [math.sqrt(2.0)]], names=["one", "sqrt2"])


def _small_complex(rng) -> complex:
    re = Fraction(int(rng.integers(-4, 5)), 4)
    im = Fraction(int(rng.integers(-4, 5)), 4)
    if re == 0 and im == 0:
        re = Fraction(1, 2)
    return complex(float(re), float(im))


def random_coeff(rng: np.random.Generator, dim: int = 1, max_order: Fraction = Fraction(0)) -> tuple:
    """A coefficient from the families ``c <xi>^p``, ``c cos(k xi) <xi>^p`` and ``c exp(i q xi) <xi>^p``.

    Returns ``(CoeffFn, order)`` with ``order = p <= max_order``.
    """
    powers = [p for p in JB_POWERS if p <= max_order]
    p = powers[int(rng.integers(len(powers)))]
    c = _small_complex(rng)
    var = "xi" if dim == 1 else f"xi{int(rng.integers(1, dim + 1))}"
    family = int(rng.integers(3))
    ptxt = f"{p.numerator}/{p.denominator}" if p.denominator != 1 else str(p.numerator)
    text = f"jbracket(xi)^({ptxt})"
    if family == 1:
        text += f"*cos({int(rng.integers(1, 4))}*{var})"
    elif family == 2:
        q = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        text += f"*exp(i*({q.numerator})/{q.denominator}*{var})"
    return CoeffFn.parse(text, dim) * c, float(p)


def random_frequency(gens: GeneratorSet, rng: np.random.Generator, bound: int = 1, denom: int = 1) -> Frequency:
    return Frequency(Fraction(int(rng.integers(-bound * denom, bound * denom + 1)), denom)
                     for _ in range(gens.count))


def random_symbol(gens: GeneratorSet, rng: np.random.Generator, n_terms: int = 3, bound: int = 1,
                  max_order: Fraction = Fraction(0)) -> APSymbol:
    """Trigonometric polynomial in ``x`` with random coefficients of order at most ``max_order``."""
    terms = {}
    order = -math.inf
    while len(terms) < n_terms:
        lam = random_frequency(gens, rng, bound)
        if lam in terms:
            continue
        fn, p = random_coeff(rng, gens.dim, max_order)
        terms[lam] = fn
        order = max(order, p)
    return APSymbol(gens, terms, SymbolClassParams(m=float(order)))


def random_tp(gens: GeneratorSet, rng: np.random.Generator, n_terms: int = 3, bound: int = 2,
              denom: int = 1, freqs=None) -> TPFunction:
    """Random trigonometric polynomial; frequencies drawn from ``freqs`` when given."""
    coeffs = {}
    pool = list(freqs) if freqs is not None else None
    while len(coeffs) < n_terms:
        if pool is not None:
            lam = pool[int(rng.integers(len(pool)))]
            if len(coeffs) >= len(pool):
                break
        else:
            lam = random_frequency(gens, rng, bound, denom)
        if lam in coeffs:
            continue
        coeffs[lam] = complex(rng.standard_normal(), rng.standard_normal())
    return TPFunction(gens, coeffs)
