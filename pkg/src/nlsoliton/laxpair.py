"""Lax matrices for the NLS equation and numerical zero-curvature checks.

A two-component ``psi`` is transported by ``psi_z = M psi`` and
``psi_t = H psi`` with

    M = [[-i zeta, u], [-u*, i zeta]]
    H = [[-i|u|^2 + 2i zeta^2, -i u_z - 2 zeta u],
         [-i u*_z + 2 zeta u*,  i|u|^2 - 2i zeta^2]]

and the compatibility residual is ``R = HM - MH - M_t + H_z``. Expanding by
hand (and checked numerically in the tests):

    R11 = R22 = 0                      for any u
    R12 = -(u_t + i u_zz + 2i|u|^2 u) = -nls_residual(u)
    R21 = conj(nls_residual(u))

with no zeta left over. So the pair encodes ``u_t + i u_zz + 2i|u|^2 u = 0``,
whose solutions are the complex conjugates of the envelope solitons in
``nlsoliton.soliton`` (``C = K = 2``). ``to_lax_frame`` maps a general
``(C, K)`` envelope onto this form.

Matrices are numpy arrays with trailing shape ``(2, 2)``; every function
broadcasts over leading axes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .field import WaveguideParams
from .soliton import SolitonParams, ZSParams, sech

ANALYTIC_TOL = 1e-10
Provider = Callable[[float, float], tuple[complex, complex]]


class StencilError(ValueError):
    """Lattice too small or too coarse for the finite-difference residual."""


class StepSizeError(RuntimeError):
    """Parallel-transport step exceeded the local error bound."""


@dataclass(frozen=True)
class LaxSample:
    """Field value and derivatives at one or many ``(z, t)`` points."""

    u: complex | np.ndarray
    du_dz: complex | np.ndarray
    du_dt: complex | np.ndarray = 0.0
    d2u_dz2: complex | np.ndarray = 0.0

    def __post_init__(self):
        for name in ("u", "du_dz", "du_dt", "d2u_dz2"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be finite")

    def conj(self) -> "LaxSample":
        return LaxSample(
            np.conj(self.u), np.conj(self.du_dz), np.conj(self.du_dt), np.conj(self.d2u_dz2)
        )


def _mat(m11, m12, m21, m22) -> np.ndarray:
    m11, m12, m21, m22 = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (m11, m12, m21, m22)))
    return np.stack([np.stack([m11, m12], -1), np.stack([m21, m22], -1)], -2)


def m_matrix(s: LaxSample, zeta: float) -> np.ndarray:
    u = np.asarray(s.u, dtype=complex)
    return _mat(-1j * zeta + 0 * u, u, -np.conj(u), 1j * zeta + 0 * u)


def h_matrix(s: LaxSample, zeta: float) -> np.ndarray:
    u = np.asarray(s.u, dtype=complex)
    uz = np.asarray(s.du_dz, dtype=complex)
    d = -1j * np.abs(u) ** 2 + 2j * zeta**2
    return _mat(d, -1j * uz - 2.0 * zeta * u, -1j * np.conj(uz) + 2.0 * zeta * np.conj(u), -d)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def nls_residual(s: LaxSample):
    """``u_t + i u_zz + 2i|u|^2 u``."""
    u = np.asarray(s.u, dtype=complex)
    return np.asarray(s.du_dt) + 1j * np.asarray(s.d2u_dz2) + 2j * np.abs(u) ** 2 * u


def compatibility_residual(s: LaxSample, zeta: float) -> np.ndarray:
    """``HM - MH - M_t + H_z`` with analytically supplied derivatives."""
    u = np.asarray(s.u, dtype=complex)
    uz = np.asarray(s.du_dz, dtype=complex)
    ut = np.asarray(s.du_dt, dtype=complex)
    uzz = np.asarray(s.d2u_dz2, dtype=complex)
    M = m_matrix(s, zeta)
    H = h_matrix(s, zeta)
    dM_dt = _mat(0 * u, ut, -np.conj(ut), 0 * u)
    dmod = -2j * np.real(np.conj(u) * uz)  # d/dz of -i|u|^2
    dH_dz = _mat(
        dmod,
        -1j * uzz - 2.0 * zeta * uz,
        -1j * np.conj(uzz) + 2.0 * zeta * np.conj(uz),
        -dmod,
    )
    return commutator(H, M) - dM_dt + dH_dz


@dataclass(frozen=True, eq=False)
class LaxLattice:
    """Field samples ``u[i_t, j_z]`` at ``t0 + i dt``, ``z0 + j dz``."""

    u: np.ndarray
    dz: float
    dt: float
    z0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.ndim != 2:
            raise StencilError(f"lattice must be 2-D (time, z), got shape {u.shape}")
        if u.shape[0] < 3:
            raise StencilError(f"need ≥ 3 time slices, got {u.shape[0]}")
        if u.shape[1] < 5:
            raise StencilError(f"need ≥ 5 z samples, got {u.shape[1]}")
        if not (self.dz > 0 and self.dt > 0):
            raise StencilError("lattice spacings must be positive")
        if not np.all(np.isfinite(u)):
            raise StencilError("lattice contains non-finite values")
        object.__setattr__(self, "u", u)

    @property
    def z(self) -> np.ndarray:
        return self.z0 + self.dz * np.arange(self.u.shape[1])

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.u.shape[0])

    def coarsened(self) -> "LaxLattice":
        """Every other point in both directions (spacing doubled)."""
        return LaxLattice(self.u[::2, ::2], 2 * self.dz, 2 * self.dt, self.z0, self.t0)

    def check_resolution(self, max_jump: float = 0.25):
        """Reject lattices whose neighbour-to-neighbour change is not small."""
        scale = np.max(np.abs(self.u))
        if scale == 0:
            return
        jz = np.max(np.abs(np.diff(self.u, axis=1))) / scale
        jt = np.max(np.abs(np.diff(self.u, axis=0))) / scale
        if jz > max_jump or jt > max_jump:
            raise StencilError(
                f"lattice under-resolved: relative jumps {jz:.3g} (z), {jt:.3g} (t) exceed {max_jump}"
            )


@dataclass(frozen=True, eq=False)
class LatticeResidual:
    R: np.ndarray  # (n_t, n_z, 2, 2) on interior points
    z: np.ndarray
    t: np.ndarray


def _dz(a: np.ndarray, h: float) -> np.ndarray:
    return (a[:, 2:] - a[:, :-2]) / (2.0 * h)


def lattice_residual(lat: LaxLattice, zeta: float, check: bool = True) -> LatticeResidual:
    """Compatibility residual from centred second-order differences.

    ``u_z`` comes from a centred difference, ``M`` and ``H`` are assembled
    pointwise and ``M_t``, ``H_z`` are centred differences of those entries.
    Valid on interior points (one row trimmed in t, two columns in z).
    """
    if check:
        lat.check_resolution()
    u = lat.u
    uz = np.zeros_like(u)
    uz[:, 1:-1] = _dz(u, lat.dz)
    s = LaxSample(u, uz)
    M = m_matrix(s, zeta)
    H = h_matrix(s, zeta)
    dM_dt = (M[2:] - M[:-2]) / (2.0 * lat.dt)
    dH_dz = (H[:, 3:-1] - H[:, 1:-3]) / (2.0 * lat.dz)
    R = commutator(H, M)[1:-1, 2:-2] - dM_dt[:, 2:-2] + dH_dz[1:-1]
    return LatticeResidual(R, lat.z[2:-2], lat.t[1:-1])


def lattice_nls_residual(lat: LaxLattice) -> LatticeResidual:
    """Direct finite-difference ``u_t + i u_zz + 2i|u|^2 u`` on the same interior."""
    u = lat.u
    ut = (u[2:, 2:-2] - u[:-2, 2:-2]) / (2.0 * lat.dt)
    uzz = (u[1:-1, 3:-1] - 2 * u[1:-1, 2:-2] + u[1:-1, 1:-3]) / lat.dz**2
    uc = u[1:-1, 2:-2]
    r = ut + 1j * uzz + 2j * np.abs(uc) ** 2 * uc
    return LatticeResidual(r, lat.z[2:-2], lat.t[1:-1])


def richardson_error(lat: LaxLattice, zeta: float) -> np.ndarray:
    """Estimated discretisation error of ``lattice_residual`` on the coarse-lattice points.

    For a second-order stencil ``R_2h - R_h ~ 3 err_h``. Returns the
    ``(n_t, n_z, 2, 2)`` estimate at the points shared with ``lat.coarsened()``.
    """
    fine = lattice_residual(lat, zeta, check=False)
    coarse = lattice_residual(lat.coarsened(), zeta, check=False)
    fine_on_coarse = restrict(fine, coarse)
    return (coarse.R - fine_on_coarse) / 3.0


def restrict(fine: LatticeResidual, coarse: LatticeResidual) -> np.ndarray:
    """Values of ``fine`` at the points of ``coarse``."""
    dz = fine.z[1] - fine.z[0]
    dt = fine.t[1] - fine.t[0]
    iz = np.rint((coarse.z - fine.z[0]) / dz).astype(int)
    it = np.rint((coarse.t - fine.t[0]) / dt).astype(int)
    return fine.R[np.ix_(it, iz)]


def stencil_tolerance(lat: LaxLattice, zeta: float = 0.0, factor: float = 10.0) -> float:
    """``factor`` times the largest Richardson error estimate over the lattice."""
    return factor * float(np.max(np.abs(richardson_error(lat, zeta))))


@dataclass(frozen=True)
class DiagonalReport:
    vanish: bool
    max_diagonal: float
    tolerance: float


def residual_diagonals_vanish(R: np.ndarray, tol: float = 1e-12) -> DiagonalReport:
    R = np.asarray(R)
    m = float(max(np.max(np.abs(R[..., 0, 0])), np.max(np.abs(R[..., 1, 1])))) if R.size else 0.0
    return DiagonalReport(m <= tol, m, tol)


@dataclass(frozen=True)
class ZetaReport:
    zetas: tuple[float, ...]
    max_pairwise_deviation: float
    max_offdiagonal: float


def check_zeta_independence(source: LaxSample | LaxLattice, zetas: Sequence[float]) -> ZetaReport:
    """Largest pairwise difference of the off-diagonal residual across ``zetas``."""
    zetas = tuple(float(z) for z in zetas)
    if len(set(zetas)) < 2:
        raise ValueError("need at least two distinct zeta values")
    offs = []
    for z in zetas:
        if isinstance(source, LaxLattice):
            R = lattice_residual(source, z).R
        else:
            R = compatibility_residual(source, z)
        offs.append(np.stack([R[..., 0, 1], R[..., 1, 0]]))
    dev = max(float(np.max(np.abs(a - b))) for a, b in itertools.combinations(offs, 2))
    return ZetaReport(zetas, dev, max(float(np.max(np.abs(o))) for o in offs))


# -- closed-form fields with analytic derivatives -------------------------------------


def zs_sample(p: ZSParams, z, t) -> LaxSample:
    """Four-parameter soliton and its derivatives.

    Solves ``i u_t + u_zz + 2|u|^2 u = 0`` when ``A0 = 2 eta``; its conjugate
    then has vanishing ``nls_residual``.
    """
    z = np.asarray(z, dtype=float)
    X = 2.0 * p.eta * (z - p.x0) + 8.0 * p.eta * p.xi_zs * t
    theta = -4.0 * (p.xi_zs**2 - p.eta**2) * t - 2.0 * p.xi_zs * z + p.phi
    u = p.A0 * np.exp(1j * theta) * sech(X)
    th = np.tanh(X)
    g = -2j * p.xi_zs - 2.0 * p.eta * th
    uz = u * g
    ut = u * (-4j * (p.xi_zs**2 - p.eta**2) - 8.0 * p.eta * p.xi_zs * th)
    uzz = u * (g * g - 4.0 * p.eta**2 * sech(X) ** 2)
    return LaxSample(u, uz, ut, uzz)


def lax_scale(w: WaveguideParams) -> tuple[float, float]:
    """``(amplitude factor, time factor)`` of the map onto the unit Lax form."""
    if not w.gvd_C * w.kerr_K > 0:
        raise ValueError("the Lax form needs C*K > 0")
    return float(np.sqrt(w.kerr_K / w.gvd_C)), 0.5 * w.gvd_C


def to_lax_frame(a, t, w: WaveguideParams):
    """Map envelope samples ``a(z, t)`` of ``a_t = i(C/2)a_zz + iK|a|^2 a``
    to ``u(z, s) = sqrt(K/C) conj(a(z, t))`` at ``s = C t / 2``,
    which solves ``u_s + i u_zz + 2i|u|^2 u = 0``.
    """
    lam, tau = lax_scale(w)
    return lam * np.conj(np.asarray(a)), tau * np.asarray(t, dtype=float)


def from_lax_frame(u, s, w: WaveguideParams):
    lam, tau = lax_scale(w)
    return np.conj(np.asarray(u)) / lam, np.asarray(s, dtype=float) / tau


def lax_soliton_sample(p: SolitonParams, w: WaveguideParams, z, s) -> LaxSample:
    """The envelope soliton ``p`` mapped into the Lax frame, at Lax time ``s``."""
    lam, _ = lax_scale(w)
    zs = ZSParams(eta=0.5 / p.width_xi, A0=lam * p.amplitude_A)
    return zs_sample(zs, z, s).conj()


def lattice_from_samples(values: np.ndarray, times, z) -> LaxLattice:
    times = np.asarray(times, dtype=float)
    z = np.asarray(z, dtype=float)
    if len(times) < 3:
        raise StencilError(f"need ≥ 3 time slices, got {len(times)}")
    dts = np.diff(times)
    dzs = np.diff(z)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0) or dts[0] <= 0:
        raise StencilError("time slices must be uniformly spaced and increasing")
    if not np.allclose(dzs, dzs[0], rtol=1e-9, atol=0):
        raise StencilError("z samples must be uniformly spaced")
    return LaxLattice(values, float(dzs[0]), float(dts[0]), float(z[0]), float(times[0]))


def lattice_from_trajectory(traj, w: WaveguideParams) -> LaxLattice:
    """Lax-frame lattice from a propagator ``Trajectory``."""
    a = np.stack([s.samples for s in traj.snapshots])
    u, s = to_lax_frame(a, traj.times, w)
    if len(s) > 1 and s[1] < s[0]:
        u, s = u[::-1], s[::-1]
    return lattice_from_samples(u, s, traj.grid.z)


# -- parallel transport -----------------------------------------------------------------


def sample_provider(fn: Callable[[float, float], LaxSample]) -> Provider:
    def provide(z, t):
        s = fn(z, t)
        return complex(s.u), complex(s.du_dz)

    return provide


def _generator(provider: Provider, zeta: float, z: float, t: float, dz: float, dt: float) -> np.ndarray:
    u, uz = provider(z, t)
    s = LaxSample(u, uz)
    return m_matrix(s, zeta) * dz + h_matrix(s, zeta) * dt


def _rk4(provider, zeta, p0, p1, psi, n):
    """``n`` RK4 steps along the straight segment ``p0 -> p1`` (parameter in [0, 1])."""
    dz = p1[0] - p0[0]
    dt = p1[1] - p0[1]
    h = 1.0 / n
    for i in range(n):
        s = i * h

        def G(sv):
            return _generator(provider, zeta, p0[0] + sv * dz, p0[1] + sv * dt, dz, dt)

        g0, gm, g1 = G(s), G(s + 0.5 * h), G(s + h)
        k1 = g0 @ psi
        k2 = gm @ (psi + 0.5 * h * k1)
        k3 = gm @ (psi + 0.5 * h * k2)
        k4 = g1 @ (psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def parallel_transport(
    psi0,
    path: Sequence[tuple[float, float]],
    provider: Provider,
    zeta: float,
    steps_per_segment: int = 32,
    tol: float | None = 1e-8,
) -> np.ndarray:
    """Integrate ``d psi = (M dz + H dt) psi`` along a polyline of ``(z, t)`` vertices.

    ``psi0`` may be a 2-vector or a ``(2, k)`` block of column vectors. Each
    segment is checked by step doubling; if the estimated error exceeds
    ``tol`` a ``StepSizeError`` is raised (``tol=None`` disables the check).
    """
    psi = np.array(psi0, dtype=complex)
    if psi.shape[0] != 2:
        raise ValueError(f"psi0 must have 2 components, got shape {psi.shape}")
    pts = [tuple(map(float, p)) for p in path]
    for i, (p0, p1) in enumerate(zip(pts[:-1], pts[1:])):
        coarse = _rk4(provider, zeta, p0, p1, psi, steps_per_segment)
        if tol is None:
            psi = coarse
            continue
        fine = _rk4(provider, zeta, p0, p1, psi, 2 * steps_per_segment)
        err = float(np.max(np.abs(fine - coarse))) / 15.0
        if err > tol:
            raise StepSizeError(
                f"segment {i} {p0}->{p1}: estimated error {err:.3e} > {tol:.3e}; "
                f"increase steps_per_segment (now {steps_per_segment})"
            )
        psi = fine
    return psi


def holonomy(
    provider: Provider,
    corner: tuple[float, float],
    side_z: float,
    side_t: float,
    zeta: float,
    steps_per_segment: int = 32,
    tol: float | None = None,
) -> np.ndarray:
    """Transport matrix once around the rectangle with lower-left ``corner``.

    Goes z-first to the opposite corner and returns t-first, so for a
    zero-curvature connection the result is the identity.
    """
    z0, t0 = corner
    loop = [(z0, t0), (z0 + side_z, t0), (z0 + side_z, t0 + side_t), (z0, t0 + side_t), (z0, t0)]
    return parallel_transport(np.eye(2, dtype=complex), loop, provider, zeta, steps_per_segment, tol)


def holonomy_deviation(*args, **kwargs) -> float:
    T = holonomy(*args, **kwargs)
    return float(np.max(np.abs(T - np.eye(2))))


def hermitian_forms(s: LaxSample, zeta: float) -> tuple[np.ndarray, np.ndarray]:
    """``(iH, -iM)``; both are Hermitian for real ``zeta``."""
    return 1j * h_matrix(s, zeta), -1j * m_matrix(s, zeta)
