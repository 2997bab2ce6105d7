r"""Continuum ohmic bath: Green function, boundary values and equilibrium moments.

The bath enters only through its spectral density :math:`J(\omega) = \eta\omega`
on :math:`0 < \omega < \omega_c`.  Integrating the star-coupled bath out gives
the inverse Green function of the subsystem coordinate

.. math::

   g^{-1}(z) = z^2 - \Omega_0^2 - \frac{\eta z}{\pi}
               \ln\frac{z + \omega_c}{z - \omega_c},

analytic off the cut :math:`[-\omega_c, \omega_c]`.  Boundary values are taken
from below the real axis (retarded convention), where
:math:`\operatorname{Im} g^{-1}(\omega - i0^+) = -J(\omega)`.

Units: :math:`\hbar = k_B = m = 1`.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import BranchCutError, DomainError, InvalidParam, QuadratureError

__all__ = [
    "OhmicSpectrum",
    "SystemParams",
    "EquilibriumMoments",
    "ComplexPoles",
    "j_value",
    "g_inverse_continuum",
    "g_boundary",
    "im_g_boundary",
    "lorentzian_im_g",
    "thermal_p2",
    "thermal_q2",
    "isolated_moments",
    "equilibrium_moments",
    "log_char_exact",
    "complex_poles",
]

QUAD_RTOL = 1e-8


@dataclass(frozen=True)
class OhmicSpectrum:
    """Ohmic spectral density ``J(w) = eta * w`` below a hard cutoff.

    ``eta == 0`` is accepted and describes the uncoupled control case.
    """

    eta: float
    cutoff: float

    def __post_init__(self):
        if not self.eta >= 0:
            raise InvalidParam(f"eta must be non-negative, got {self.eta!r}")
        if not self.cutoff > 0:
            raise InvalidParam(f"cutoff must be positive, got {self.cutoff!r}")


@dataclass(frozen=True)
class SystemParams:
    """Bare subsystem frequency ``omega0`` and inverse temperature ``beta``."""

    omega0: float
    beta: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise InvalidParam(f"omega0 must be positive, got {self.omega0!r}")
        if not self.beta > 0:
            raise InvalidParam(f"beta must be positive, got {self.beta!r}")


@dataclass(frozen=True)
class EquilibriumMoments:
    """Second moments of the subsystem in a stationary Gaussian state.

    ``cross`` is the symmetrized moment ``<{P0, Q0}>/2``; it vanishes in any
    stationary state.
    """

    p2: float
    q2: float
    cross: float = 0.0

    def to_dict(self) -> dict:
        return {"p2": self.p2, "q2": self.q2, "cross": self.cross}


class ComplexPoles(NamedTuple):
    """The four poles of the small-frequency ``Im g(w - i0+)``."""

    poles: np.ndarray
    overdamped: bool


def j_value(spec: OhmicSpectrum, omega):
    """Spectral density, zero outside the open band ``(0, cutoff)``."""
    omega = np.asarray(omega, dtype=float)
    inside = (omega > 0) & (omega < spec.cutoff)
    out = np.where(inside, spec.eta * omega, 0.0)
    return out[()] if out.ndim == 0 else out


def _boundary_g_inverse(sys: SystemParams, spec: OhmicSpectrum, omega, sign):
    # sign = -1 below the axis, +1 above; |omega| < cutoff assumed
    c = spec.cutoff
    real = (omega**2 - sys.omega0**2
            - spec.eta * omega / np.pi * np.log(np.abs((omega + c) / (omega - c))))
    return real + 1j * sign * spec.eta * omega


def g_inverse_continuum(sys: SystemParams, spec: OhmicSpectrum, z, side: str | None = None):
    """Inverse Green function of the subsystem for the continuum ohmic bath.

    Parameters
    ----------
    sys, spec : SystemParams, OhmicSpectrum
        Subsystem and bath parameters.
    z : complex or array_like
        Evaluation point(s).
    side : {None, 'below', 'above'}
        Needed for real ``z`` inside ``(-cutoff, cutoff)``: ``'below'`` gives
        the retarded value at ``z - i0+``, ``'above'`` the advanced one.

    Raises
    ------
    BranchCutError
        If a point lies on the cut and ``side`` is None.
    """
    if side not in (None, "below", "above"):
        raise ValueError(f"side must be None, 'below' or 'above', got {side!r}")
    z = np.asarray(z, dtype=complex)
    c = spec.cutoff
    on_cut = (z.imag == 0) & (np.abs(z.real) < c) & (z.real != 0)
    if np.any(on_cut) and side is None:
        raise BranchCutError(
            "z lies on the cut (-cutoff, cutoff); pass side='below' or side='above'")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = z**2 - sys.omega0**2 - spec.eta * z / np.pi * np.log((z + c) / (z - c))
    out = np.where(z == 0, -sys.omega0**2 + 0j, out)
    if np.any(on_cut):
        sign = -1.0 if side == "below" else 1.0
        out = np.where(on_cut, _boundary_g_inverse(sys, spec, z.real, sign), out)
    return out[()] if out.ndim == 0 else out


def g_boundary(sys: SystemParams, spec: OhmicSpectrum, omega):
    """Retarded Green function ``g(omega - i0+)`` for real ``0 <= omega < cutoff``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0) or np.any(omega >= spec.cutoff):
        raise DomainError("g_boundary needs 0 <= omega < cutoff")
    out = 1.0 / _boundary_g_inverse(sys, spec, omega, -1.0)
    return out[()] if out.ndim == 0 else out


def im_g_boundary(sys: SystemParams, spec: OhmicSpectrum, omega):
    """``Im g(omega - i0+)`` from the full logarithmic Green function.

    Equals ``J / |g^{-1}|^2`` and is non-negative on the band.  It vanishes at
    ``omega = 0`` and at the cutoff, where ``|g^{-1}|`` diverges
    logarithmically.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0) or np.any(omega > spec.cutoff):
        raise DomainError(f"omega must lie in [0, {spec.cutoff}]")
    edge = omega == spec.cutoff
    w = np.where(edge, 0.0, omega)
    ginv = _boundary_g_inverse(sys, spec, w, -1.0)
    out = np.where(edge, 0.0, spec.eta * w / (ginv.real**2 + ginv.imag**2))
    return out[()] if out.ndim == 0 else out


def lorentzian_im_g(sys: SystemParams, spec: OhmicSpectrum, omega):
    """Infinite-cutoff limit of :func:`im_g_boundary` (cross-check only)."""
    omega = np.asarray(omega, dtype=float)
    eta = spec.eta
    return eta * omega / ((omega**2 - sys.omega0**2)**2 + omega**2 * eta**2)


def _coth(x):
    return 1.0 / np.tanh(x)


def thermal_p2(omega, beta: float):
    """``<P^2> = (w/2) coth(beta w / 2)`` for a free oscillator of frequency ``w``."""
    omega = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(omega == 0, 1.0 / beta, 0.5 * omega * _coth(0.5 * beta * omega))
    return out[()] if out.ndim == 0 else out


def thermal_q2(omega, beta: float):
    """``<Q^2> = coth(beta w / 2) / (2 w)`` for a free oscillator of frequency ``w``."""
    omega = np.asarray(omega, dtype=float)
    return 0.5 * _coth(0.5 * beta * omega) / omega


def isolated_moments(sys: SystemParams) -> EquilibriumMoments:
    """Thermal moments of the subsystem with the coupling switched off."""
    return EquilibriumMoments(
        p2=float(thermal_p2(sys.omega0, sys.beta)),
        q2=float(thermal_q2(sys.omega0, sys.beta)),
    )


def _breakpoints(sys: SystemParams, spec: OhmicSpectrum) -> list[float]:
    w0, eta, c = sys.omega0, spec.eta, spec.cutoff
    pts = {w0 - 2 * eta, w0, w0 + 2 * eta, c * (1 - 1e-6)}
    return sorted(p for p in pts if 0 < p < c)


def _spectral_integral(sys, spec, weight, rtol=QUAD_RTOL) -> float:
    # sum_nu X_0nu^2 F(w_nu)  ->  int_0^c (2/pi) w Im g(w - i0+) F(w) dw
    def integrand(w):
        return 2.0 / np.pi * w * im_g_boundary(sys, spec, w) * weight(w)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *msg = integrate.quad(
            integrand, 0.0, spec.cutoff, points=_breakpoints(sys, spec),
            epsabs=0.0, epsrel=rtol, limit=1000, full_output=1)
    if msg or not np.isfinite(val) or err > rtol * abs(val):
        raise QuadratureError(
            f"quadrature failed to reach rtol={rtol:g} (estimate {err:.3g} on {val:.6g})")
    return float(val)


def equilibrium_moments(sys: SystemParams, spec: OhmicSpectrum,
                        rtol: float = QUAD_RTOL) -> EquilibriumMoments:
    """Exact equilibrium ``<P0^2>`` and ``<Q0^2>`` of the coupled oscillator.

    Both are spectral integrals of ``Im g(w - i0+)`` weighted by the thermal
    factors of a free oscillator at frequency ``w``.
    """
    if spec.eta == 0:
        return isolated_moments(sys)
    beta = sys.beta
    p2 = _spectral_integral(sys, spec, lambda w: thermal_p2(w, beta), rtol)
    q2 = _spectral_integral(sys, spec, lambda w: thermal_q2(w, beta), rtol)
    return EquilibriumMoments(p2=p2, q2=q2, cross=0.0)


def log_char_exact(m: EquilibriumMoments, u: float, v: float) -> complex:
    """Log of the equilibrium characteristic function ``<exp(iP0 u) exp(iQ0 v)>``."""
    return complex(-0.5 * u * u * m.p2 - 0.5 * v * v * m.q2, 0.5 * u * v)


def complex_poles(sys: SystemParams, spec: OhmicSpectrum) -> ComplexPoles:
    """Roots of ``(w^2 - Omega0^2)^2 + w^2 eta^2``, the poles of the Lorentzian.

    Underdamped (``eta < 2 Omega0``): ``+-Omega +- i eta/2`` with
    ``Omega^2 = Omega0^2 - eta^2/4``.  Otherwise all four are imaginary.
    """
    w0, eta = sys.omega0, spec.eta
    root = np.sqrt(complex(4 * w0 * w0 - eta * eta))
    poles = np.array([(s1 * 1j * eta + s2 * root) / 2
                      for s2 in (1, -1) for s1 in (1, -1)])
    return ComplexPoles(poles=poles, overdamped=bool(eta >= 2 * w0))
