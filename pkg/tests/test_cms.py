import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import eval_hermite

from appdo.cms import (HermiteBasis, TensorTP, adjoint_residual_A, apply_A, compressed_blocks,
                       equivalence_residual, q_map, random_tensor, tensor_inner, tensor_to_csv)
from appdo.errors import HypothesisError
from appdo.frequencies import Frequency, embed
from appdo.grid import Grid
from appdo.randsym import default_generators, random_symbol
from appdo.symbols import APSymbol, SymbolClassParams, adjoint_symbol, compose_symbols

G = default_generators()
ZERO = G.zero()
E1 = Frequency([1, 0])
ESQ = Frequency([0, 1])
GRID = Grid()
BASIS = HermiteBasis(8, GRID)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def cos_symbol(g, m):
    return APSymbol(G, {E1: f"0.5*{g}", -E1: f"0.5*{g}"}, SymbolClassParams(m=m))


def test_hermite_against_scipy():
    # phi_n(x) = 2^(1/4) (2^n n!)^(-1/2) H_n(sqrt(2 pi) x) exp(-pi x^2)
    x = GRID.axis
    for n in range(8):
        ref = 2**0.25 / math.sqrt(2.0**n * math.factorial(n)) * eval_hermite(n, math.sqrt(2 * math.pi) * x) \
            * np.exp(-np.pi * x**2)
        assert np.max(np.abs(BASIS[n] - ref)) <= 1e-12


def test_hermite_orthonormal():
    assert np.max(np.abs(BASIS.raw_gram - np.eye(8))) <= 1e-12
    assert np.max(np.abs(BASIS.gram() - np.eye(8))) <= 1e-14
    # boundary values negligible on the default box
    assert max(abs(f[0]) for f in BASIS.functions) < 1e-12


def test_hermite_two_dimensional_ordering():
    b = HermiteBasis(6, Grid(L=8, N=32, dim=2))
    assert b.indices == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert np.max(np.abs(b.gram() - np.eye(6))) <= 1e-12


def test_tensor_inner_examples():
    u = TensorTP.elementary(G, GRID, E1, BASIS[2])
    v = TensorTP.elementary(G, GRID, E1, BASIS[3])
    assert abs(tensor_inner(u, u) - 1) <= 1e-8
    assert abs(tensor_inner(u, v)) <= 1e-8
    w = TensorTP.elementary(G, GRID, ESQ, BASIS[2])
    assert tensor_inner(u, w) == 0


def test_apply_identity_and_multiplier():
    u = TensorTP(G, GRID, {E1: BASIS[1], ESQ: BASIS[0]})
    out = apply_A(APSymbol.identity(G), u)
    assert all(np.allclose(out.terms[mu], u.terms[mu], atol=1e-15) for mu in u.terms)
    g = APSymbol.multiplier(G, "jbracket(xi)^(-1)")
    out = apply_A(g, u)
    assert set(out.terms) == set(u.terms)
    mult = 1 / np.sqrt(1 + GRID.freq_axis**2)
    assert np.allclose(out.terms[E1], np.fft.ifft(mult * np.fft.fft(BASIS[1])), atol=1e-15)


def test_apply_pure_character():
    # e_mu (x) f -> e_{mu+1}(x) (x) e_1(y) f(y)
    mu = Frequency([0, 1])
    out = apply_A(APSymbol.character(G, E1), TensorTP.elementary(G, GRID, mu, BASIS[2]))
    assert list(out.terms) == [mu + E1]
    expected = np.exp(2j * np.pi * GRID.axis) * BASIS[2]
    assert np.allclose(out.terms[mu + E1], expected, atol=1e-15)


def test_q_map_examples():
    lam = Frequency([1, -1])
    field = q_map(TensorTP.elementary(G, GRID, lam, BASIS[3]))
    assert field.support == (-lam,)
    expected = BASIS[3] * np.exp(-2j * np.pi * embed(lam, G)[0] * GRID.axis)
    assert np.allclose(field.component(-lam), expected, atol=1e-15)
    assert q_map(TensorTP(G, GRID)).support == ()


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_q_map_preserves_norm(seed):
    rng = np.random.default_rng(seed)
    u = random_tensor(G, BASIS, [ZERO, E1, ESQ, -E1], rng)
    assert abs(q_map(u).norm() - u.norm()) <= 1e-10 * u.norm()


def test_equivalence_examples():
    assert equivalence_residual(APSymbol.identity(G), ZERO, 0, BASIS) == 0
    g = APSymbol.multiplier(G, "jbracket(xi)^(-1)", SymbolClassParams(m=-1))
    assert equivalence_residual(g, ZERO, 0, BASIS) <= 1e-6
    a = cos_symbol("jbracket(xi)^(-2)", -2)
    for n in range(3):
        assert equivalence_residual(a, E1, n, BASIS) <= 1e-6
    with pytest.raises(HypothesisError):
        equivalence_residual(APSymbol.multiplier(G, "xi", SymbolClassParams(m=1)), ZERO, 0, BASIS)


def test_adjoint_pairing_examples():
    assert adjoint_residual_A(APSymbol.identity(G), 3, BASIS) == 0
    assert adjoint_residual_A(APSymbol.multiplier(G, "jbracket(xi)^(-1)"), 3, BASIS) <= 1e-10
    assert adjoint_residual_A(APSymbol.character(G, E1, "jbracket(xi)^(-1)"), 3, BASIS) <= 1e-8


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_representation_axioms(seed):
    rng = np.random.default_rng(seed)
    a, b = random_symbol(G, rng), random_symbol(G, rng)
    u = random_tensor(G, BASIS, [ZERO, E1], rng)
    lhs = apply_A(compose_symbols(a, b), u)
    rhs = apply_A(a, apply_A(b, u))
    assert (lhs - rhs).norm() <= 1e-8 * u.norm()
    v = random_tensor(G, BASIS, [ZERO, E1, -E1], rng)
    pair = tensor_inner(apply_A(a, u), v) - tensor_inner(u, apply_A(adjoint_symbol(a), v))
    assert abs(pair) <= 1e-8 * u.norm() * v.norm()
    form = tensor_inner(apply_A(compose_symbols(adjoint_symbol(b), b), u), u)
    assert form.real >= -1e-8 * u.norm() ** 2


def test_compressed_blocks_match_apply():
    a = cos_symbol("exp(i*xi)*jbracket(xi)^(-1)", -1)
    blocks = compressed_blocks(a, BASIS)
    u = TensorTP.elementary(G, GRID, ZERO, BASIS[2])
    out = apply_A(a, u)
    for lam in (E1, -E1):
        coeffs = np.array([GRID.inner(out.terms[lam], BASIS[m]) for m in range(8)])
        assert np.allclose(blocks[lam][:, 2], coeffs, atol=1e-14)


def test_tensor_csv_layout():
    grid = Grid(L=4, N=4)
    u = TensorTP.elementary(G, grid, E1, np.arange(4) + 1j)
    lines = tensor_to_csv(u).splitlines()
    assert lines[0] == 'freq,"(1,0)"'
    assert lines[1] == "-2.0,0.0,1.0"
    assert len(lines) == 5
