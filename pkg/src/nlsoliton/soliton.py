"""Closed-form one-soliton solutions of the Kerr NLS envelope equation.

The envelope obeys ``a_t = i (C/2) a_zz + i K |a|^2 a`` (carrier and group
delay removed). Its bright soliton is

    a(z, t) = A exp(i K A^2 t / 2) sech(z / xi),     K A^2 = C / xi^2,

carrying ``n = 2 A^2 xi`` photons.

The four-parameter form (``ZSParams``) is

    u = A0 exp(-4i(xi^2 - eta^2) t - 2i xi x + i phi) / cosh(2 eta (x - x0) + 8 eta xi t).

By direct substitution it solves ``i u_t + u_xx + 2|u|^2 u = 0`` exactly when
``A0 = 2 eta``; this is the envelope equation above with ``C = K = 2``. With
``xi = x0 = phi = 0`` and ``2 eta = 1/xi`` it coincides with ``soliton_field``
(time phase included) for ``C = 2``. The Lax-pair form used in
``nlsoliton.laxpair`` is solved by the complex conjugate of both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import ComplexField, Grid, WaveguideParams

CONSTRAINT_RTOL = 1e-12
_SECH_CUTOFF = 700.0


class ConstraintError(ValueError):
    """Raised when amplitude and width do not balance dispersion against Kerr focusing."""


def sech(x):
    """``2 / (e^x + e^-x)``, returning 0 beyond ``|x| > 700`` instead of overflowing."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.zeros_like(ax)
    ok = ax <= _SECH_CUTOFF
    e = np.exp(-ax[ok])
    out[ok] = 2.0 * e / (1.0 + e * e)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SolitonParams:
    amplitude_A: float
    width_xi: float

    def __post_init__(self):
        if self.amplitude_A < 0:
            raise ValueError(f"amplitude must be non-negative, got {self.amplitude_A}")
        if not self.width_xi > 0:
            raise ValueError(f"width must be positive, got {self.width_xi}")

    @classmethod
    def checked(cls, amplitude_A: float, width_xi: float, w: WaveguideParams) -> "SolitonParams":
        """Build params and verify ``K A^2 = C / xi^2`` against ``w``."""
        p = cls(amplitude_A, width_xi)
        r = constraint_residual(p, w)
        if abs(r) >= CONSTRAINT_RTOL:
            raise ConstraintError(f"K*A^2 != C/xi^2 (relative residual {r:.3e})")
        return p

    @classmethod
    def from_width(cls, width_xi: float, w: WaveguideParams) -> "SolitonParams":
        _require_bright(w)
        return cls(float(np.sqrt(w.gvd_C / (w.kerr_K * width_xi**2))), width_xi)


@dataclass(frozen=True)
class ZSParams:
    eta: float
    xi_zs: float = 0.0
    x0: float = 0.0
    phi: float = 0.0
    A0: float = 1.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")


def _require_bright(w: WaveguideParams):
    if not w.supports_bright_soliton:
        raise ConstraintError(
            f"C*K = {w.gvd_C * w.kerr_K} <= 0: no bright-soliton regime"
        )


def constraint_residual(p: SolitonParams, w: WaveguideParams) -> float:
    """Relative imbalance ``(K A^2 - C/xi^2) / (C/xi^2)``."""
    _require_bright(w)
    target = w.gvd_C / p.width_xi**2
    return (w.kerr_K * p.amplitude_A**2 - target) / target


def photon_number(p: SolitonParams) -> float:
    return 2.0 * p.amplitude_A**2 * p.width_xi


def from_photon_number(n: float, w: WaveguideParams) -> SolitonParams:
    """Soliton carrying ``n`` photons in waveguide ``w``."""
    if not n > 0:
        raise ValueError(f"photon number must be positive, got {n}")
    _require_bright(w)
    xi = 2.0 * w.gvd_C / (w.kerr_K * n)
    return SolitonParams(float(np.sqrt(n / (2.0 * xi))), xi)


def phase_rate(p: SolitonParams, w: WaveguideParams) -> float:
    return 0.5 * w.kerr_K * p.amplitude_A**2


def soliton_period(p: SolitonParams, w: WaveguideParams) -> float:
    """Time for the soliton phase to advance by 2*pi."""
    return 2.0 * np.pi / phase_rate(p, w)


def soliton_field(p: SolitonParams, w: WaveguideParams, g: Grid, t: float = 0.0) -> ComplexField:
    r = constraint_residual(p, w)
    if abs(r) >= CONSTRAINT_RTOL:
        raise ConstraintError(f"K*A^2 != C/xi^2 (relative residual {r:.3e})")
    phase = np.exp(1j * phase_rate(p, w) * t)
    return ComplexField(g, p.amplitude_A * phase * sech(g.z / p.width_xi))


def sech_spectrum(xi: float, k):
    """Continuous transform of ``sech(z/xi)``: ``xi sqrt(pi/2) sech(pi k xi / 2)``."""
    if not xi > 0:
        raise ValueError(f"width must be positive, got {xi}")
    return xi * np.sqrt(np.pi / 2.0) * sech(0.5 * np.pi * np.asarray(k) * xi)


def zs_values(p: ZSParams, x, t):
    """Four-parameter soliton evaluated at arbitrary ``(x, t)`` (broadcasting)."""
    x = np.asarray(x, dtype=float)
    theta = -4.0 * (p.xi_zs**2 - p.eta**2) * t - 2.0 * p.xi_zs * x + p.phi
    arg = 2.0 * p.eta * (x - p.x0) + 8.0 * p.eta * p.xi_zs * t
    return p.A0 * np.exp(1j * theta) * sech(arg)


def zs_soliton_field(p: ZSParams, g: Grid, t: float = 0.0) -> ComplexField:
    return ComplexField(g, zs_values(p, g.z, t))


def zs_peak_position(p: ZSParams, t: float) -> float:
    return p.x0 - 4.0 * p.xi_zs * t


def reduce_zs(p: ZSParams) -> SolitonParams:
    """Stationary, centred, zero-phase special case as ``SolitonParams``."""
    if p.xi_zs != 0 or p.x0 != 0 or p.phi != 0:
        raise ValueError("reduction needs xi_zs = x0 = phi = 0")
    return SolitonParams(p.A0, 1.0 / (2.0 * p.eta))
