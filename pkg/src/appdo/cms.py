"""Tensor-space representation on ``B^2 (x) L^2``.

Elements ``u(x, y) = sum_mu e_mu(x) f_mu(y)`` are stored as a map from
frequencies to grid functions of ``y``. The symbol acts by freezing
``x`` and applying ``a(x + y, D_y)``; expanding in frequencies gives

    A(e_mu (x) f) = sum_lam e_{mu+lam}(x) (x) e_lam(y) a_lam(D) f(y),

which is exact for trigonometric polynomial symbols. The map ``Q`` sends
``e_lam (x) f`` to the vector field with the single component
``f e_{-lam}`` at ``-lam``; it intertwines ``A`` with ``U(a)(D)``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math

import numpy as np

from .errors import DimensionError, HypothesisError
from .frequencies import Frequency, GeneratorSet, embed
from .gladyshev import VectorField, apply_UaD
from .grid import Grid
from .symbols import APSymbol, adjoint_symbol


class HermiteBasis:
    """Hermite functions ``phi_n(x) = 2^(1/4) (2^n n!)^(-1/2) H_n(sqrt(2 pi) x) exp(-pi x^2)``.

    Sampled on ``grid`` by the normalized three-term recurrence, then
    orthonormalized on the grid (symmetric Lowdin step) so the discrete Gram
    matrix is the identity to rounding. In several dimensions the functions
    are tensor products ordered by total degree.

    Parameters
    ----------
    count : int
        Number of basis functions.
    grid : Grid
    """

    def __init__(self, count: int, grid: Grid | None = None):
        if count < 1:
            raise ValueError("count must be positive")
        self.count = count
        self.grid = grid or Grid()
        self.indices = self._indices(count, self.grid.dim)
        top = max(max(ix) for ix in self.indices)
        table = self._table_1d(top + 1, self.grid.axis)
        raw = []
        for ix in self.indices:
            f = table[ix[0]]
            for k in ix[1:]:
                f = np.multiply.outer(f, table[k])
            raw.append(np.asarray(f, dtype=complex).reshape(self.grid.shape))
        self.raw_gram = self._gram(raw)
        self.functions = self._orthonormalize(raw)

    @staticmethod
    def _indices(count, dim):
        out = []
        degree = 0
        while len(out) < count:
            level = sorted(ix for ix in itertools.product(range(degree + 1), repeat=dim) if sum(ix) == degree)
            out.extend(level)
            degree += 1
        return out[:count]

    @staticmethod
    def _table_1d(n, x):
        t = math.sqrt(2 * math.pi) * x
        scale = (2 * math.pi) ** 0.25
        table = np.zeros((n, x.size))
        table[0] = math.pi ** -0.25 * np.exp(-t**2 / 2)
        if n > 1:
            table[1] = math.sqrt(2.0) * t * table[0]
        for k in range(1, n - 1):
            table[k + 1] = math.sqrt(2.0 / (k + 1)) * t * table[k] - math.sqrt(k / (k + 1)) * table[k - 1]
        return scale * table

    def _gram(self, funcs):
        flat = np.array([f.ravel() for f in funcs])
        return flat.conj() @ flat.T * self.grid.cell

    def _orthonormalize(self, funcs):
        flat = np.array([f.ravel() for f in funcs])
        G = flat.conj() @ flat.T * self.grid.cell
        vals, vecs = np.linalg.eigh(G)
        inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.conj().T
        ortho = inv_sqrt.T @ flat
        return [row.reshape(self.grid.shape) for row in ortho]

    def gram(self) -> np.ndarray:
        return self._gram(self.functions)

    def __getitem__(self, n) -> np.ndarray:
        return self.functions[n]

    def __len__(self):
        return self.count


class TensorTP:
    """``sum_mu e_mu(x) f_mu(y)`` with ``f_mu`` sampled on a grid."""

    def __init__(self, gens: GeneratorSet, grid: Grid, terms: dict | None = None):
        if gens.dim != grid.dim:
            raise DimensionError("grid and generators have different dimensions")
        self.gens = gens
        self.grid = grid
        clean = {}
        for mu, f in (terms or {}).items():
            f = grid.check(f)
            if np.any(f != 0):
                clean[mu] = f
        self.terms = dict(sorted(clean.items()))

    @classmethod
    def elementary(cls, gens, grid, mu: Frequency, f) -> "TensorTP":
        return cls(gens, grid, {mu: f})

    def norm(self) -> float:
        return math.sqrt(sum(self.grid.norm(f) ** 2 for f in self.terms.values()))

    def _check(self, other: "TensorTP"):
        if self.gens != other.gens or self.grid != other.grid:
            raise DimensionError("tensors use different generators or grids")

    def __add__(self, other: "TensorTP") -> "TensorTP":
        self._check(other)
        terms = dict(self.terms)
        for mu, f in other.terms.items():
            terms[mu] = terms[mu] + f if mu in terms else f
        return TensorTP(self.gens, self.grid, terms)

    def __sub__(self, other: "TensorTP") -> "TensorTP":
        return self + other.scale(-1)

    def scale(self, c) -> "TensorTP":
        return TensorTP(self.gens, self.grid, {mu: c * f for mu, f in self.terms.items()})


def tensor_inner(u: TensorTP, v: TensorTP) -> complex:
    """``sum_mu (f_mu, g_mu)_{L^2}``; the mean in ``x`` pairs equal frequencies only."""
    u._check(v)
    return sum((u.grid.inner(f, v.terms[mu]) for mu, f in u.terms.items() if mu in v.terms), 0j)


def multiplier_values(fn, grid: Grid, shift=None) -> np.ndarray:
    """Samples of ``fn(xi_k + shift)`` on the discrete frequencies, grid shaped."""
    pts = grid.freq_points if shift is None else grid.freq_points + np.asarray(shift)[None, :]
    return fn.evaluate(pts).reshape(grid.shape)


def apply_A(a: APSymbol, u: TensorTP) -> TensorTP:
    """Apply the tensor representation of ``a`` to ``u``."""
    if a.gens != u.gens:
        raise DimensionError("symbol and tensor use different generator sets")
    grid = u.grid
    spectra = {mu: grid.dft(f) for mu, f in u.terms.items()}
    parts = [(lam, fn, None if fn.is_constant() else multiplier_values(fn, grid),
              grid.character(embed(lam, a.gens))) for lam, fn in a.terms]
    out: dict = {}
    for mu, fh in spectra.items():
        for lam, fn, gvals, char in parts:
            # constant coefficients skip the FFT round trip
            inner = fn(0.0 if a.dim == 1 else np.zeros(a.dim)) * u.terms[mu] if gvals is None \
                else grid.idft(gvals * fh)
            piece = inner if lam.is_zero() else char * inner
            key = mu + lam
            out[key] = out[key] + piece if key in out else piece
    return TensorTP(u.gens, grid, out)


def q_map(u: TensorTP) -> VectorField:
    """``e_lam (x) f -> f e_{-lam}`` placed at component ``-lam``."""
    comps = {}
    for mu, f in u.terms.items():
        comps[-mu] = f * u.grid.character(-embed(mu, u.gens))
    return VectorField(u.grid, u.gens, comps)


def _require_nonpositive(a: APSymbol):
    if a.cls.m > 0:
        raise HypothesisError(f"the unitary equivalence is exercised for order m <= 0 only, got m = {a.cls.m}")


def equivalence_residual(a: APSymbol, mu: Frequency, n: int, basis: HermiteBasis) -> float:
    """``||Q A (e_mu (x) phi_n) - U(a)(D) Q (e_mu (x) phi_n)||`` on the grid."""
    _require_nonpositive(a)
    u = TensorTP.elementary(a.gens, basis.grid, mu, basis[n])
    lhs = q_map(apply_A(a, u))
    rhs = apply_UaD(a, q_map(u))
    return (lhs - rhs).norm()


def random_tensor(gens: GeneratorSet, basis: HermiteBasis, freqs, rng: np.random.Generator,
                  modes: int | None = None) -> TensorTP:
    """Random combination of ``e_mu (x) phi_n`` over the given frequencies."""
    modes = basis.count if modes is None else min(modes, basis.count)
    terms = {}
    for mu in freqs:
        c = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
        terms[mu] = sum(ck * basis[k] for k, ck in enumerate(c))
    return TensorTP(gens, basis.grid, terms)


def adjoint_residual_A(a: APSymbol, trials: int, basis: HermiteBasis | None = None,
                       rng: np.random.Generator | None = None, freqs=None) -> float:
    """Largest ``|(A(a) u, v) - (u, A(a+) v)|`` over random normalized pairs."""
    basis = basis or HermiteBasis(8, Grid(dim=a.dim))
    rng = rng or np.random.default_rng(0)
    freqs = list(freqs) if freqs is not None else sorted({a.gens.zero(), *a.frequencies})
    adj = adjoint_symbol(a)
    worst = 0.0
    for _ in range(trials):
        u = random_tensor(a.gens, basis, freqs, rng)
        v = random_tensor(a.gens, basis, freqs, rng)
        u = u.scale(1 / u.norm())
        v = v.scale(1 / v.norm())
        lhs = tensor_inner(apply_A(a, u), v)
        rhs = tensor_inner(u, apply_A(adj, v))
        worst = max(worst, abs(lhs - rhs))
    return worst


def compressed_blocks(a: APSymbol, basis: HermiteBasis) -> dict:
    """Blocks ``B_lam[m, n] = (e_lam a_lam(D) phi_n, phi_m)`` of ``A`` on ``span{e_nu (x) phi_n}``.

    The compression has block ``B_{nu - nu'}`` at ``(nu, nu')``, independent
    of ``nu'`` itself.
    """
    grid = basis.grid
    phis = np.array([f.ravel() for f in basis.functions])
    blocks = {}
    for lam, fn in a.terms:
        char = grid.character(embed(lam, a.gens)).ravel()
        g = multiplier_values(fn, grid)
        images = np.array([(char.reshape(grid.shape) * grid.idft(g * grid.dft(f))).ravel()
                           for f in basis.functions])
        blocks[lam] = phis.conj() @ images.T * grid.cell
    return blocks


def tensor_to_csv(u: TensorTP) -> str:
    """One block per frequency: a header line with the frequency, then ``y,re,im`` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    pts = u.grid.points
    for mu, f in u.terms.items():
        writer.writerow(["freq", mu.label()])
        for p, v in zip(pts, f.ravel()):
            writer.writerow([*(repr(float(c)) for c in p), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()
