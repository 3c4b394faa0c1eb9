"""Periodic 1-D grids, complex envelope fields and their spectral transforms.

FFT convention
--------------
``fft_forward`` is the unitary DFT (``norm="ortho"``) and ``fft_inverse`` its
exact inverse. With this choice Parseval reads

    sum_j |a_j|^2 dz == sum_k |A_k|^2 dz

so the photon count can be evaluated on either side. Wavenumbers are in the
usual FFT order, ``k_j = 2*pi*m_j/L`` with ``m_j`` in ``[-n/2, n/2)``.

``continuous_spectrum`` converts the DFT into samples of the symmetric
continuous transform ``F(k) = (2*pi)^(-1/2) * integral exp(-ikz) a(z) dz``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid over ``[z_min, z_max)``."""

    z_min: float
    z_max: float
    n_points: int

    def __post_init__(self):
        n = self.n_points
        if isinstance(n, bool) or int(n) != n:
            raise ValueError(f"n_points must be an integer, got {n!r}")
        object.__setattr__(self, "n_points", int(n))
        if self.n_points < 8 or self.n_points & (self.n_points - 1):
            raise ValueError(f"n_points must be a power of two >= 8, got {n}")
        if not (np.isfinite(self.z_min) and np.isfinite(self.z_max)):
            raise ValueError("grid bounds must be finite")
        if not self.z_max > self.z_min:
            raise ValueError(f"z_max ({self.z_max}) must exceed z_min ({self.z_min})")

    @classmethod
    def centered(cls, length: float, n_points: int) -> "Grid":
        return cls(-0.5 * length, 0.5 * length, n_points)

    @property
    def length(self) -> float:
        return self.z_max - self.z_min

    @property
    def dz(self) -> float:
        return self.length / self.n_points

    @property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_points)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex envelope samples on a grid, one time slice.

    Samples are copied and frozen on construction.
    """

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.complex128)
        if s.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} samples, got shape {s.shape}"
            )
        if not np.all(np.isfinite(s)):
            raise ValueError("field samples must be finite")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def __eq__(self, other):
        if not isinstance(other, ComplexField):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.samples, other.samples)

    __hash__ = None

    def with_samples(self, samples) -> "ComplexField":
        return ComplexField(self.grid, samples)


@dataclass(frozen=True)
class WaveguideParams:
    """Carrier, group velocity, group-velocity dispersion C and Kerr constant K."""

    omega0: float = 1.0
    k0: float = 1.0
    vg: float = 1.0
    gvd_C: float = 2.0
    kerr_K: float = 2.0

    def __post_init__(self):
        if not self.vg > 0:
            raise ValueError(f"group velocity must be positive, got {self.vg}")
        if not self.omega0 > 0:
            raise ValueError(f"carrier frequency must be positive, got {self.omega0}")

    @property
    def supports_bright_soliton(self) -> bool:
        return self.gvd_C * self.kerr_K > 0


def wavenumbers(grid: Grid) -> np.ndarray:
    """FFT-ordered wavenumbers for ``grid``."""
    n = grid.n_points
    m = np.fft.fftfreq(n, d=1.0 / n)
    return 2.0 * np.pi * m / grid.length


def fft_forward(field: ComplexField) -> np.ndarray:
    return np.fft.fft(field.samples, norm="ortho")


def fft_inverse(spectrum, grid: Grid) -> ComplexField:
    spectrum = np.asarray(spectrum)
    if spectrum.shape != (grid.n_points,):
        raise ValueError(
            f"spectrum has shape {spectrum.shape}, grid expects ({grid.n_points},)"
        )
    return ComplexField(grid, np.fft.ifft(spectrum, norm="ortho"))


def continuous_spectrum(field: ComplexField) -> np.ndarray:
    """Samples of the symmetric continuous Fourier transform at ``wavenumbers``.

    Exact (by Poisson summation) for the periodisation of the sampled
    function when it is band-limited on the grid.
    """
    g = field.grid
    k = wavenumbers(g)
    return np.fft.fft(field.samples) * np.exp(-1j * k * g.z_min) * g.dz / np.sqrt(2.0 * np.pi)


def spectral_derivative(field: ComplexField, order: int = 1) -> np.ndarray:
    k = wavenumbers(field.grid)
    return np.fft.ifft((1j * k) ** order * np.fft.fft(field.samples))


def l2_norm_sq(field: ComplexField) -> float:
    """Photon count ``sum |a_j|^2 dz`` (rectangle rule, exact trapezoid on a periodic grid)."""
    return float(np.sum(np.abs(field.samples) ** 2) * field.grid.dz)


def max_abs_diff(f: ComplexField, g: ComplexField) -> float:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    return float(np.max(np.abs(f.samples - g.samples)))


def relative_l2_error(f: ComplexField, reference: ComplexField) -> float:
    if f.grid != reference.grid:
        raise ValueError("fields live on different grids")
    return float(
        np.linalg.norm(f.samples - reference.samples) / np.linalg.norm(reference.samples)
    )
