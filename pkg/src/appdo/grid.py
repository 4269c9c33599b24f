"""Uniform periodic grids and DFT Fourier multipliers.

The box is ``[-L/2, L/2)^d`` with ``N`` points per axis, centered so that
Gaussian-type functions sit in the middle. Frequencies follow
``numpy.fft.fftfreq`` with spacing ``1/L``; a multiplier ``g(D)`` acts as
``IDFT[g(xi_k) DFT f]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class Grid:
    L: float = 16.0
    N: int = 256
    dim: int = 1

    def __post_init__(self):
        if self.L <= 0 or self.N < 2 or self.dim < 1:
            raise DimensionError("grid needs L > 0, N >= 2 and dim >= 1")

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.dim

    @property
    def step(self) -> float:
        return self.L / self.N

    @property
    def cell(self) -> float:
        """Volume element ``(L/N)^d``."""
        return self.step**self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.L / 2 + self.step * np.arange(self.N)

    @cached_property
    def freq_axis(self) -> np.ndarray:
        return np.fft.fftfreq(self.N, d=self.step)

    def _stack(self, axis: np.ndarray) -> np.ndarray:
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @cached_property
    def points(self) -> np.ndarray:
        """Grid points, shape ``(N^d, d)``, in C order matching ``shape``."""
        return self._stack(self.axis)

    @cached_property
    def freq_points(self) -> np.ndarray:
        """Discrete frequencies in FFT layout, shape ``(N^d, d)``."""
        return self._stack(self.freq_axis)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)

    def check(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=complex)
        if values.shape != self.shape:
            raise DimensionError(f"grid values of shape {values.shape}, expected {self.shape}")
        return values

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Discrete ``L^2`` inner product ``(L/N)^d sum f conj(g)``."""
        return complex(np.vdot(g, f) * self.cell)

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.cell) * np.linalg.norm(f))

    def dft(self, f: np.ndarray) -> np.ndarray:
        return np.fft.fftn(f)

    def idft(self, fh: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(fh)

    def apply_multiplier(self, symbol_values: np.ndarray, f: np.ndarray) -> np.ndarray:
        """``g(D) f`` given ``g`` sampled at ``freq_points`` (flat or grid shaped)."""
        g = np.asarray(symbol_values).reshape(self.shape)
        return self.idft(g * self.dft(f))

    def character(self, freq_vector) -> np.ndarray:
        """``exp(2 pi i lam.x)`` sampled on the grid."""
        lam = np.asarray(freq_vector, dtype=float).reshape(self.dim)
        return np.exp(2j * np.pi * (self.points @ lam)).reshape(self.shape)
