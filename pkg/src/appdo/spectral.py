"""Spectral computations for symbols and their kernel matrices.

Closed-form spectra are available when the symbol depends on one variable
only: a multiplier ``g(D)`` has every ``g(xi)`` as an eigenvalue (with the
character ``e_xi`` as eigenfunction), and multiplication by ``a(x)`` has
spectrum equal to the closure of its range. Otherwise the module works
with finite sections of the kernel matrices, with compressions of the
tensor representation, and with the exact residual of character
sequences.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .cms import HermiteBasis, compressed_blocks
from .errors import HypothesisError
from .frequencies import Frequency, FrequencyWindow, embed
from .gladyshev import HERMITIAN_TOL, build_kernel
from .symbols import APSymbol, TPFunction, apply_to_tp

POINT = "point"
CONTINUOUS = "continuous-witness"
FINITE_SECTION = "finite-section"
ESSENTIAL = "essential"

SOLVABLE_REL_THRESHOLD = 1e-8
RAY_RADII = (1e2, 1e4, 1e6, 1e8)


@dataclass(frozen=True)
class SpectralValue:
    approx: complex
    kind: str
    window_radius: object = None


@dataclass
class SpectrumReport:
    values: list
    metadata: dict = field(default_factory=dict)

    def by_kind(self, kind: str) -> np.ndarray:
        return np.array([v.approx for v in self.values if v.kind == kind], dtype=complex)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["value_re", "value_im", "kind", "window_radius"])
        for v in self.values:
            radius = "" if v.window_radius is None else str(v.window_radius)
            writer.writerow([repr(float(v.approx.real)), repr(float(v.approx.imag)), v.kind, radius])
        return buf.getvalue()


def _sorted_values(vals) -> list:
    return sorted(vals, key=lambda z: (z.real, z.imag))


def _points(grid, dim: int) -> np.ndarray:
    arr = np.asarray(grid, dtype=float)
    return arr.reshape(-1, 1) if arr.ndim <= 1 and dim == 1 else arr.reshape(-1, dim)


def _ray_limits(fn, dim: int) -> list:
    """Limits of ``fn`` along coordinate rays to infinity, when they settle."""
    out = []
    for axis in range(dim):
        for sign in (1.0, -1.0):
            pts = np.zeros((len(RAY_RADII), dim))
            pts[:, axis] = sign * np.array(RAY_RADII)
            vals = fn.evaluate(pts)
            if abs(vals[-1] - vals[-2]) <= 1e-6 * max(1.0, abs(vals[-1])):
                out.append(complex(vals[-1]))
    return out


def multiplier_spectrum(a: APSymbol, xi_grid, attain_tol: float = 1e-9) -> SpectrumReport:
    """Spectrum samples of an x-independent symbol ``g(D)``.

    Every sampled ``g(xi)`` is an eigenvalue. Limits of ``g`` at infinity
    that are not attained on the grid are reported as continuous-spectrum
    witnesses; the spectrum itself is the closure of the range of ``g``.
    """
    if not a.is_multiplier():
        raise HypothesisError("multiplier spectrum needs a symbol with only the zero frequency")
    g = a.coefficient(a.gens.zero())
    pts = _points(xi_grid, a.dim)
    samples = g.evaluate(pts)
    seen = set()
    values = []
    for z in samples:
        z = complex(z)
        if z not in seen:
            seen.add(z)
            values.append(SpectralValue(z, POINT))
    witnesses = []
    for lim in _ray_limits(g, a.dim):
        if np.min(np.abs(samples - lim)) > attain_tol and all(abs(lim - w) > attain_tol for w in witnesses):
            witnesses.append(lim)
            values.append(SpectralValue(lim, CONTINUOUS))
    meta = {"method": "multiplier range", "points": int(pts.shape[0]),
            "spectrum": "closure of the range of g", "attain_tol": attain_tol}
    return SpectrumReport(values, meta)


def multiplication_spectrum(a: APSymbol, x_grid) -> SpectrumReport:
    """Sampled range of an xi-independent symbol ``a(x)``; all values are essential spectrum.

    The metadata carries the Lipschitz bound ``sum 2 pi |lam| |a_lam|`` and
    the resulting bound on gaps between neighbouring samples.
    """
    if not a.is_xi_independent():
        raise HypothesisError("multiplication spectrum needs coefficients constant in xi")
    pts = _points(x_grid, a.dim)
    xi0 = np.zeros((pts.shape[0], a.dim))
    vals = a.evaluate(pts, xi0)
    lip = sum(2 * math.pi * float(np.linalg.norm(embed(lam, a.gens))) * abs(fn.evaluate(np.zeros((1, a.dim)))[0])
              for lam, fn in a.terms)
    steps = np.diff(np.sort(pts, axis=0), axis=0)
    step = float(np.max(steps)) if steps.size else 0.0
    meta = {"method": "multiplication range", "points": int(pts.shape[0]),
            "spectrum": "closure of the range of a", "lipschitz": lip,
            "x_step": step, "gap_bound": lip * step,
            "real_range": (float(vals.real.min()), float(vals.real.max())) if vals.size else None}
    return SpectrumReport([SpectralValue(complex(v), ESSENTIAL) for v in vals], meta)


def max_gap(values) -> float:
    """Largest distance between neighbours of a set of reals."""
    v = np.sort(np.asarray(values, dtype=float))
    return float(np.max(np.diff(v))) if v.size > 1 else 0.0


def band_components(w: FrequencyWindow, shifts) -> list:
    """Connected components of the window under the given frequency shifts."""
    parent = list(range(len(w)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    shifts = [s for s in shifts if not s.is_zero()]
    for j, lam in enumerate(w):
        for s in shifts:
            i = w.get_index(lam + s)
            if i is not None:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict = {}
    for i in range(len(w)):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups)]


def _eigenvalues(M: np.ndarray, hermitian: bool) -> np.ndarray:
    if hermitian:
        return np.linalg.eigvalsh(0.5 * (M + M.conj().T)).astype(complex)
    return np.linalg.eigvals(M)


def kernel_eigenvalues(a: APSymbol, w: FrequencyWindow, xi, herm_tol: float = HERMITIAN_TOL):
    """Eigenvalues of the windowed kernel, block by block; returns ``(values, hermitian)``."""
    K = build_kernel(a, xi, w).entries
    hermitian = bool(K.size == 0 or np.max(np.abs(K - K.conj().T)) <= herm_tol)
    vals = []
    for comp in band_components(w, a.frequencies):
        vals.append(_eigenvalues(K[np.ix_(comp, comp)], hermitian))
    return (np.concatenate(vals) if vals else np.zeros(0, complex)), hermitian


def finite_section_spectrum(a: APSymbol, w: FrequencyWindow, xi) -> SpectrumReport:
    """Eigenvalues of the kernel matrix on ``w`` at ``xi``."""
    vals, hermitian = kernel_eigenvalues(a, w, xi)
    values = [SpectralValue(complex(z), FINITE_SECTION, w.radius) for z in _sorted_values(vals)]
    meta = {"method": "finite section", "window_size": len(w), "hermitian": hermitian,
            "solver": "symmetric" if hermitian else "general",
            "advisory": not hermitian, "xi": [float(v) for v in np.atleast_1d(xi)]}
    return SpectrumReport(values, meta)


@dataclass
class WeylSequenceResult:
    xi0: tuple
    s: complex
    residuals: list


def weyl_residual(a: APSymbol, xi0, xi_seq, tol: float = 1e-12) -> WeylSequenceResult:
    """Residuals ``||(a(x, D) - s) e_{xi_j}||_B`` with ``s = a_0(xi0)``.

    Requires every nonzero-frequency coefficient to vanish at ``xi0``. The
    residual is the finite sum ``|a_0(xi_j) - s|^2 + sum_{lam != 0} |a_lam(xi_j)|^2``.
    """
    xi0 = np.asarray(xi0, dtype=float).reshape(1, a.dim)
    for lam, fn in a.terms:
        if lam.is_zero():
            continue
        v = complex(fn.evaluate(xi0)[0])
        if abs(v) > tol:
            raise HypothesisError(f"coefficient at frequency {lam.label()} is {v} at xi0, not zero")
    zero = a.gens.zero()
    s = complex(a.coefficient(zero).evaluate(xi0)[0])
    pts = _points(xi_seq, a.dim)
    total = np.abs(a.coefficient(zero).evaluate(pts) - s) ** 2
    for lam, fn in a.terms:
        if not lam.is_zero():
            total = total + np.abs(fn.evaluate(pts)) ** 2
    r = np.sqrt(total)
    return WeylSequenceResult(tuple(xi0[0].tolist()), s,
                              [(tuple(p.tolist()), float(v)) for p, v in zip(pts, r)])


def character_residual(a: APSymbol, s: complex, xi: Frequency) -> float:
    """``||(a(x, D) - s) e_xi||_B`` through the exact action on the character."""
    e = TPFunction.character(a.gens, xi)
    return (apply_to_tp(a, e) - e.scale(s)).norm()


@dataclass
class ResolventResult:
    solvable: bool
    sigma_min: float
    inv_norm: float


def resolvent_window(a: APSymbol, s: complex, w: FrequencyWindow, xi,
                     rel_threshold: float = SOLVABLE_REL_THRESHOLD) -> ResolventResult:
    """Smallest singular value of ``K(xi) - s I`` and the implied resolvent norm."""
    K = build_kernel(a, xi, w).entries
    n = K.shape[0]
    if n == 0:
        return ResolventResult(True, math.inf, 0.0)
    sing = np.linalg.svd(K - s * np.eye(n), compute_uv=False)
    smin = float(sing[-1])
    scale = float(np.linalg.norm(K, 2)) or 1.0
    solvable = smin > rel_threshold * scale
    return ResolventResult(solvable, smin, math.inf if smin == 0 else 1.0 / smin)


def hausdorff(A, B) -> float:
    """Symmetric Hausdorff distance between two finite subsets of the complex plane."""
    A = np.asarray(A, dtype=complex).ravel()
    B = np.asarray(B, dtype=complex).ravel()
    if A.size == 0 and B.size == 0:
        return 0.0
    if A.size == 0 or B.size == 0:
        return math.inf
    if np.all(A.imag == 0) and np.all(B.imag == 0):
        return max(_directed_real(A.real, B.real), _directed_real(B.real, A.real))
    return max(_directed(A, B), _directed(B, A))


def _directed_real(A, B) -> float:
    Bs = np.sort(B)
    idx = np.clip(np.searchsorted(Bs, A), 1, Bs.size - 1) if Bs.size > 1 else np.zeros(A.size, int)
    left = np.abs(A - Bs[idx - 1]) if Bs.size > 1 else np.abs(A - Bs[0])
    right = np.abs(A - Bs[idx]) if Bs.size > 1 else left
    return float(np.max(np.minimum(left, right)))


def _directed(A, B, chunk: int = 2048) -> float:
    worst = 0.0
    for k in range(0, A.size, chunk):
        d = np.abs(A[k:k + chunk, None] - B[None, :]).min(axis=1)
        worst = max(worst, float(d.max()))
    return worst


def compressed_A_eigenvalues(a: APSymbol, w: FrequencyWindow, basis: HermiteBasis) -> np.ndarray:
    """Rayleigh-Ritz values of the tensor representation on ``span{e_nu (x) phi_n : nu in w}``.

    The compression is block banded with blocks depending only on
    frequency differences, so window components of equal shape share
    their eigenvalues.
    """
    blocks = compressed_blocks(a, basis)
    k = basis.count
    cache: dict = {}
    out = []
    for comp in band_components(w, a.frequencies):
        elems = [w[i] for i in comp]
        key = tuple(e - elems[0] for e in elems)
        if key not in cache:
            n = len(elems)
            M = np.zeros((n * k, n * k), dtype=complex)
            for r, nu in enumerate(elems):
                for c, nup in enumerate(elems):
                    blk = blocks.get(nu - nup)
                    if blk is not None:
                        M[r * k:(r + 1) * k, c * k:(c + 1) * k] = blk
            cache[key] = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
        out.append(cache[key])
    return np.concatenate(out) if out else np.zeros(0)


@dataclass
class InvarianceResult:
    hausdorff_Ul2_vs_UxiD: float
    hausdorff_Ul2_vs_A: float
    sizes: dict = field(default_factory=dict)


def invariance_check(a: APSymbol, w: FrequencyWindow, xi_grid, basis: HermiteBasis,
                     herm_tol: float = HERMITIAN_TOL) -> InvarianceResult:
    """Compare three finite spectral sets of a self-adjoint symbol of order ``m <= 0``.

    (i) eigenvalues of the kernel at ``xi = 0`` on ``w``; (ii) the union of
    kernel eigenvalues over ``xi_grid``; (iii) Ritz values of the tensor
    representation compressed to ``w`` times the Hermite modes.
    """
    if a.cls.m > 0:
        raise HypothesisError(f"invariance is checked for order m <= 0 only, got m = {a.cls.m}")
    pts = _points(xi_grid, a.dim)
    s0, herm = kernel_eigenvalues(a, w, np.zeros(a.dim), herm_tol)
    if not herm:
        raise HypothesisError("the kernel at xi = 0 is not Hermitian; the symbol is not self-adjoint")
    union = []
    for xi in pts:
        vals, herm = kernel_eigenvalues(a, w, xi, herm_tol)
        if not herm:
            raise HypothesisError(f"the kernel at xi = {xi.tolist()} is not Hermitian")
        union.append(vals)
    s1 = np.concatenate(union)
    s2 = compressed_A_eigenvalues(a, w, basis)
    s0, s1 = s0.real, s1.real
    return InvarianceResult(hausdorff(s0, s1), hausdorff(s0, s2),
                            {"kernel": int(s0.size), "union": int(s1.size), "tensor": int(s2.size),
                             "tensor_range": (float(s2.min()), float(s2.max())),
                             "kernel_range": (float(s0.min()), float(s0.max()))})
