import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from appdo.errors import DimensionError, IndependenceError, WindowCapError
from appdo.frequencies import (Frequency, FrequencyWindow, GeneratorSet, embed, embed_many,
                               integer_basis, module_closure, window_enumerate)

ONE = GeneratorSet([[1.0]])
TWO = GeneratorSet([[1.0], [math.sqrt(2.0)]])

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
pairs = st.tuples(fractions, fractions).map(Frequency)


def test_embed_examples():
    assert embed(Frequency([Fraction(3, 2)]), ONE)[0] == 1.5
    assert embed(Frequency([1, -1]), TWO)[0] == 1 - 1.4142135623730951
    assert np.all(embed(Frequency([0, 0]), TWO) == 0)


def test_embed_rank_mismatch():
    with pytest.raises(DimensionError):
        embed(Frequency([1]), TWO)


def test_window_examples():
    assert [f.coeffs[0] for f in window_enumerate(ONE, 2)] == [-2, -1, 0, 1, 2]
    half = [f.coeffs[0] for f in window_enumerate(ONE, 1, 2)]
    assert half == [Fraction(-1), Fraction(-1, 2), 0, Fraction(1, 2), 1]


@pytest.mark.parametrize("bound,denom", [(1, 1), (2, 1), (1, 2), (Fraction(3, 2), 2)])
def test_window_matches_brute_force(bound, denom):
    axis = [Fraction(k, denom) for k in range(-10 * denom, 10 * denom + 1) if abs(Fraction(k, denom)) <= bound]
    expected = sorted(Frequency(c) for c in itertools.product(axis, repeat=2))
    assert list(window_enumerate(TWO, bound, denom)) == expected
    if (bound, denom) == (1, 1):
        assert len(expected) == 9


def test_window_cap():
    with pytest.raises(WindowCapError):
        window_enumerate(TWO, 10, 1, cap=100)


def test_module_closure_examples():
    assert [f.coeffs[0] for f in module_closure([Frequency([1])], ONE, 2)] == [-2, -1, 0, 1, 2]
    assert list(module_closure([], ONE, 3)) == [Frequency([0])]
    gens = [Frequency([Fraction(1, 2)]), Frequency([1])]
    steps = [0] + [s * g.coeffs[0] for g in gens for s in (1, -1)]
    brute = sorted({a + b for a in steps for b in steps})
    assert [f.coeffs[0] for f in module_closure(gens, ONE, 2)] == brute
    assert len(brute) == 9


def test_dependent_generators_rejected():
    with pytest.raises(IndependenceError):
        GeneratorSet([[1.0], [0.5]])
    with pytest.raises(IndependenceError):
        GeneratorSet([[math.sqrt(2.0)], [math.sqrt(8.0)]])


def test_float_coefficients_must_be_exact():
    assert Frequency([0.5]).coeffs == (Fraction(1, 2),)
    with pytest.raises(ValueError):
        Frequency([math.pi])


def test_label_parse_round_trip():
    f = Frequency([1, Fraction(-1, 2)])
    assert f.label() == "(1,-1/2)"
    assert Frequency.parse(f.label()) == f


@given(pairs, pairs, pairs)
def test_group_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a - a == Frequency([0, 0])
    assert -(-a) == a
    assert a.scale(2) == a + a


@given(pairs, pairs)
def test_embedding_is_additive(a, b):
    lhs = embed(a + b, TWO)
    rhs = embed(a, TWO) + embed(b, TWO)
    assert abs(lhs[0] - rhs[0]) <= 1e-12 * (1 + abs(rhs[0]))


@given(pairs, pairs)
def test_ordering_is_total_and_consistent(a, b):
    assert (a < b) + (b < a) + (a == b) == 1


@given(st.lists(pairs, min_size=1, max_size=5))
@settings(max_examples=50)
def test_integer_basis_reconstructs(freqs):
    basis, coords = integer_basis(freqs)
    for f in freqs:
        total = Frequency([0, 0])
        for m, b in zip(coords[f], basis):
            assert isinstance(m, int)
            total = total + b.scale(m)
        assert total == f
    assert len(basis) <= 2


def test_window_operations():
    w = window_enumerate(TWO, 1)
    band = [Frequency([1, 0])]
    pad = w.padded(band)
    assert all(f in pad for f in w)
    assert all(f + band[0] in pad for f in w)
    assert len(pad) == 12
    assert list(w.negated()) == list(w)
    assert w.index(w[3]) == 3 and w.get_index(Frequency([5, 5])) is None
    assert embed_many(list(w), TWO).shape == (9, 1)
    assert FrequencyWindow(list(w) + list(w), TWO) == w
