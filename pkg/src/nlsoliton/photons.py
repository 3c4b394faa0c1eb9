"""Coherent-state photon statistics and Kerr phases of the one-soliton pulse.

Integrating the soliton over z gives a single complex amplitude
``alpha(t) = sqrt(2 xi) A exp(i K A^2 t / 2)`` with ``|alpha|^2 = n``. Treating
it as a coherent state, the photon count is Poisson with mean ``|alpha|^2`` and
number state ``|n>`` picks up the Kerr phase ``K A^2 t n / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from .field import WaveguideParams
from .soliton import SolitonParams

TAIL_WARNING = 0.5


@dataclass(frozen=True)
class CoherentAmplitude:
    alpha: complex
    reference: SolitonParams | None = None
    waveguide: WaveguideParams | None = None

    @property
    def mean_photons(self) -> float:
        return abs(self.alpha) ** 2


@dataclass(frozen=True, eq=False)
class PhotonPmf:
    probabilities: np.ndarray
    n_max: int
    tail_mass: float

    @property
    def truncation_warning(self) -> bool:
        return self.tail_mass > TAIL_WARNING

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.n_max + 1)


def alpha0(p: SolitonParams, w: WaveguideParams | None = None) -> CoherentAmplitude:
    return CoherentAmplitude(complex(math.sqrt(2.0 * p.width_xi) * p.amplitude_A), p, w)


def alpha_t(a0: CoherentAmplitude, K: float, A: float, t: float) -> CoherentAmplitude:
    """Rotate ``a0`` by the Kerr phase ``K A^2 t / 2``."""
    rot = complex(math.cos(0.5 * K * A * A * t), math.sin(0.5 * K * A * A * t))
    return CoherentAmplitude(a0.alpha * rot, a0.reference, a0.waveguide)


def default_n_max(mean: float) -> int:
    return math.ceil(mean + 10.0 * math.sqrt(mean) + 20.0)


def photon_pmf(a: CoherentAmplitude, n_max: int | None = None) -> PhotonPmf:
    """Poisson probabilities ``exp(-|a|^2) |a|^(2n) / n!`` for ``n = 0..n_max``.

    Evaluated in log space so large means do not overflow.
    """
    lam = a.mean_photons
    if n_max is None:
        n_max = default_n_max(lam)
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    n = np.arange(n_max + 1)
    logp = -lam + xlogy(n, lam) - gammaln(n + 1)
    p = np.exp(logp)
    p.flags.writeable = False
    tail = max(0.0, 1.0 - math.fsum(p))
    return PhotonPmf(p, int(n_max), tail)


def coherent_coefficients(a: CoherentAmplitude, n_max: int) -> np.ndarray:
    """Fock-basis amplitudes ``alpha^n / sqrt(n!) * exp(-|alpha|^2 / 2)``."""
    n = np.arange(n_max + 1)
    mag = np.exp(-0.5 * a.mean_photons + xlogy(n, abs(a.alpha)) - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * n * np.angle(a.alpha))


def number_state_phase(n: int, K: float, A: float, t: float) -> float:
    if n < 0:
        raise ValueError(f"photon number must be non-negative, got {n}")
    return K * A * A * t * n / 2.0


def pmf_moments(pmf: PhotonPmf) -> tuple[float, float]:
    """Mean and variance of the truncated distribution (no renormalisation)."""
    n = pmf.n.astype(float)
    p = pmf.probabilities
    mean = math.fsum(n * p)
    var = math.fsum((n - mean) ** 2 * p)
    return mean, var


def fano_factor(pmf: PhotonPmf) -> float:
    mean, var = pmf_moments(pmf)
    return var / mean
