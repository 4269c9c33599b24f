"""Frequency-indexed kernel matrices of a symbol.

For a window of frequencies the kernel at ``xi`` is the matrix

    K[lam, lam'] = a_{lam' - lam}(xi - embed(lam')),

a banded matrix whose nonzero diagonals are the frequencies of ``a``.
The family ``xi -> K(xi)`` is multiplicative under symbol composition
(given enough padding), Hermitian-conjugates under the formal adjoint,
and acts on vector-valued grid functions as an operator-valued Fourier
multiplier.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisError, WindowCapError
from .frequencies import Frequency, FrequencyWindow, embed
from .grid import Grid
from .symbols import APSymbol, japanese

DEFAULT_COMPONENT_CAP = 4096
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


@dataclass(frozen=True)
class KernelMatrix:
    window: FrequencyWindow
    xi: tuple
    entries: np.ndarray
    band: frozenset = field(default_factory=frozenset)

    def __len__(self):
        return len(self.window)

    def restrict(self, sub: FrequencyWindow) -> np.ndarray:
        """Entries on ``sub x sub`` (``sub`` must lie inside the window)."""
        idx = [self.window.index(f) for f in sub]
        return self.entries[np.ix_(idx, idx)]


@dataclass(frozen=True)
class WeightedWindow:
    """Weights ``<embed(lam)>^s`` on a window, defining ``l^2_s``."""

    window: FrequencyWindow
    s: float

    @property
    def weights(self) -> np.ndarray:
        return japanese(self.window.embedded()) ** self.s


def _xi_vector(xi, dim: int) -> np.ndarray:
    return np.asarray(xi, dtype=float).reshape(dim)


def build_kernel(a: APSymbol, xi, w: FrequencyWindow) -> KernelMatrix:
    """Windowed kernel ``K[lam, lam'] = a_{lam'-lam}(xi - lam')``."""
    if w.gens != a.gens:
        raise ValueError("window and symbol use different generator sets")
    xi = _xi_vector(xi, a.dim)
    n = len(w)
    K = np.zeros((n, n), dtype=complex)
    if n == 0:
        return KernelMatrix(w, tuple(xi.tolist()), K, frozenset())
    args = xi[None, :] - w.embedded()
    band = set()
    for nu, fn in a.terms:
        rows, cols = [], []
        for j, lamp in enumerate(w):
            i = w.get_index(lamp - nu)
            if i is not None:
                rows.append(i)
                cols.append(j)
        if not rows:
            continue
        cols_arr = np.array(cols)
        K[np.array(rows), cols_arr] = fn.evaluate(args[cols_arr])
        band.add(nu)
    return KernelMatrix(w, tuple(xi.tolist()), K, frozenset(band))


def weighted_norm(K: KernelMatrix, s: float, m: float) -> float:
    """Largest singular value of ``D_{s-m} K D_s^{-1}``; the finite-section norm on ``l^2_s -> l^2_{s-m}``."""
    jb = japanese(K.window.embedded())
    M = (jb ** (s - m))[:, None] * K.entries * (jb ** (-s))[None, :]
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


@dataclass(frozen=True)
class PositivityResult:
    hermitian: bool
    psd: bool
    min_eig: float


def positivity_check(K: KernelMatrix | np.ndarray, tol: float = PSD_TOL,
                     hermitian_tol: float = HERMITIAN_TOL) -> PositivityResult:
    """Hermiticity and positive semidefiniteness of a kernel matrix.

    ``min_eig`` is the smallest eigenvalue of the Hermitian part. The matrix
    counts as positive when it is Hermitian and ``min_eig >= -tol * ||K||``.
    """
    M = K.entries if isinstance(K, KernelMatrix) else np.asarray(K, dtype=complex)
    if M.size == 0:
        return PositivityResult(True, True, 0.0)
    hermitian = bool(np.max(np.abs(M - M.conj().T)) <= hermitian_tol)
    H = 0.5 * (M + M.conj().T)
    min_eig = float(np.linalg.eigvalsh(H)[0])
    scale = float(np.linalg.norm(M, 2))
    psd = hermitian and min_eig >= -tol * scale
    return PositivityResult(hermitian, psd, min_eig)


def isometry_sweep(a: APSymbol, xi_list, w: FrequencyWindow) -> list:
    """Finite-section norms ``||K(xi)||`` on ``l^2`` for each ``xi``; needs order ``m <= 0``."""
    if a.cls.m > 0:
        raise HypothesisError(f"the norm is xi-independent only for order m <= 0, got m = {a.cls.m}")
    return [weighted_norm(build_kernel(a, xi, w), 0.0, 0.0) for xi in xi_list]


class VectorField:
    """Grid functions indexed by frequencies: ``F = sum_lam F_lam delta_lam``."""

    def __init__(self, grid: Grid, gens, components: dict | None = None):
        self.grid = grid
        self.gens = gens
        comps = {}
        for lam, vals in (components or {}).items():
            vals = grid.check(vals)
            if np.any(vals != 0):
                comps[lam] = vals
        self.components = dict(sorted(comps.items()))

    @property
    def support(self) -> tuple:
        return tuple(self.components)

    def component(self, lam: Frequency) -> np.ndarray:
        vals = self.components.get(lam)
        return self.grid.zeros() if vals is None else vals

    def norm(self) -> float:
        return float(np.sqrt(sum(self.grid.norm(v) ** 2 for v in self.components.values())))

    def inner(self, other: "VectorField") -> complex:
        return sum((self.grid.inner(v, other.components[lam])
                    for lam, v in self.components.items() if lam in other.components), 0j)

    def __sub__(self, other: "VectorField") -> "VectorField":
        comps = dict(self.components)
        for lam, v in other.components.items():
            comps[lam] = comps.get(lam, 0) - v
        return VectorField(self.grid, self.gens, comps)


def apply_UaD(a: APSymbol, F: VectorField, cap: int = DEFAULT_COMPONENT_CAP) -> VectorField:
    """Operator-valued Fourier multiplier ``U(a)(D)`` on a vector field.

    ``(U(a)(D) F)_lam = sum_nu IDFT[a_nu(xi_k - embed(lam + nu)) DFT F_{lam + nu}]``.
    """
    if F.gens != a.gens:
        raise ValueError("field and symbol use different generator sets")
    grid = F.grid
    out: dict = {}
    support = F.support
    if len(support) * max(1, len(a.terms)) > cap:
        raise WindowCapError(len(support) * len(a.terms), cap)
    spectra = {lamp: grid.dft(F.components[lamp]) for lamp in support}
    for lamp in support:
        args = grid.freq_points - embed(lamp, a.gens)[None, :]
        for nu, fn in a.terms:
            lam = lamp - nu
            if fn.is_constant():
                piece = fn.evaluate(args[:1])[0] * F.components[lamp]
            else:
                piece = grid.idft(fn.evaluate(args).reshape(grid.shape) * spectra[lamp])
            out[lam] = out[lam] + piece if lam in out else piece
    return VectorField(grid, F.gens, out)


def kernel_to_csv(K: KernelMatrix) -> str:
    """CSV text: header row and first column hold the window frequencies, cells ``re,im``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    labels = [f.label() for f in K.window]
    writer.writerow(["freq"] + labels)
    for label, row in zip(labels, K.entries):
        writer.writerow([label] + [f"{float(v.real)!r},{float(v.imag)!r}" for v in row])
    return buf.getvalue()


def kernel_from_csv(text: str) -> tuple:
    """Parse :func:`kernel_to_csv` output into ``(frequencies, matrix)``."""
    rows = list(csv.reader(io.StringIO(text)))
    freqs = [Frequency.parse(lbl) for lbl in rows[0][1:]]
    mat = np.array([[complex(*map(float, cell.split(","))) for cell in r[1:]] for r in rows[1:]])
    return freqs, mat


@dataclass
class GrowthReport:
    """Outcome of checking ``C^-1 <xi>^-p <= ||K(xi)|| <= C <xi>^p``, ``p = |s| + |m - s|``."""

    C: float
    p: float
    slack: float
    passes: bool
    norms: list
    worst_upper: float
    worst_lower: float


def growth_sweep(a: APSymbol, xi_values, w: FrequencyWindow, s: float, m: float | None = None,
                 fit_radius: float = 4.0, slack: float | None = None) -> GrowthReport:
    """Fit the growth constant on ``|xi| <= fit_radius`` and test it on every ``xi``.

    The constant ``C`` is the smallest one for which both bounds hold on the
    fitting points; the remaining points must satisfy the bounds with ``C``
    enlarged by ``slack`` (default ``2^(p/2)``).
    """
    m = a.cls.m if m is None else m
    p = abs(s) + abs(m - s)
    slack = 2 ** (p / 2) if slack is None else slack
    pts = np.asarray(xi_values, dtype=float).reshape(-1, a.dim)
    norms = np.array([weighted_norm(build_kernel(a, xi, w), s, m) for xi in pts])
    jb = japanese(pts)
    upper = norms / jb**p
    lower = jb ** (-p) / np.where(norms > 0, norms, np.nan)
    fit = np.linalg.norm(pts, axis=1) <= fit_radius
    if not np.any(fit):
        raise ValueError("no sweep point lies in the fitting region")
    C = float(max(np.nanmax(upper[fit]), np.nanmax(lower[fit]), 1.0))
    worst_upper = float(np.nanmax(upper))
    worst_lower = float(np.nanmax(lower)) if np.any(norms > 0) else math.inf
    passes = bool(worst_upper <= C * slack and worst_lower <= C * slack)
    return GrowthReport(C, p, slack, passes, norms.tolist(), worst_upper, worst_lower)
