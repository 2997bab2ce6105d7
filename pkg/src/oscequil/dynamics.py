"""Evolution of the uncoupled thermal state under the coupled Hamiltonian.

Heisenberg operators of the subsystem at time ``t`` are linear in the
Schrodinger-picture operators of all oscillators,

    P0(t) = sum_i (xc_i P_i - xbars_i Q_i),   Q0(t) = sum_i (xc_i Q_i + xs_i P_i),

with coefficient functions

    xc_i(t)    = sum_nu X0nu Xinu cos(w_nu t)
    xs_i(t)    = sum_nu X0nu Xinu sin(w_nu t) / w_nu
    xbars_i(t) = sum_nu X0nu Xinu sin(w_nu t) w_nu.

In the product state of free thermal oscillators the oscillators are
independent, so every second moment of ``P0(t), Q0(t)`` is a single sum
over ``i``.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bath import DiscretizedBath
from .errors import GridError, InvalidParam, RecurrenceWarning
from .modes import NormalModes
from .spectral import (OhmicSpectrum, SystemParams, equilibrium_moments, g_boundary,
                       thermal_p2, thermal_q2)

__all__ = [
    "Occupations",
    "PropagatorCoefficients",
    "CovariancePoint",
    "CovarianceTrajectory",
    "thermal_occupations",
    "propagator_coefficients",
    "evolved_covariance",
    "trajectory",
    "subsystem_coefficient",
    "asymptotic_coefficients",
    "stationary_p2",
]


class Occupations(NamedTuple):
    """Uncoupled thermal moments ``<P_i^2>_0`` and ``<Q_i^2>_0``, ``i = 0..N``."""

    p2: np.ndarray
    q2: np.ndarray


class PropagatorCoefficients(NamedTuple):
    t: float
    xc: np.ndarray
    xs: np.ndarray
    xbars: np.ndarray


class CovariancePoint(NamedTuple):
    p2: float
    q2: float
    pq: float
    comm: float


@dataclass(eq=False)
class CovarianceTrajectory:
    """Subsystem second moments sampled on a time grid.

    ``p2`` and ``q2`` are ``<P0(t)^2>`` and ``<Q0(t)^2>``, ``pq`` the
    symmetrized cross moment and ``comm`` the coefficient multiplying
    ``i uv / 2`` in the log characteristic function (identically 1 when the
    commutator is preserved).
    """

    times: np.ndarray
    p2: np.ndarray
    q2: np.ndarray
    pq: np.ndarray
    comm: np.ndarray

    COLUMNS = ("t", "p2", "q2", "pq", "comm")

    def __len__(self):
        return self.times.size

    @property
    def max_comm_deviation(self) -> float:
        return float(np.max(np.abs(self.comm - 1.0)))

    def channel(self, name: str) -> np.ndarray:
        if name not in ("p2", "q2", "pq", "comm"):
            raise ValueError(f"unknown channel {name!r}")
        return getattr(self, name)

    def window(self, t_lo: float, t_hi: float) -> "CovarianceTrajectory":
        m = (self.times >= t_lo) & (self.times <= t_hi)
        return CovarianceTrajectory(*(getattr(self, a)[m] for a in
                                      ("times", "p2", "q2", "pq", "comm")))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.COLUMNS)
            for row in zip(self.times, self.p2, self.q2, self.pq, self.comm):
                w.writerow([f"{v:.17g}" for v in row])

    @classmethod
    def from_csv(cls, path) -> "CovarianceTrajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(*(data[:, j].copy() for j in range(5)))


def thermal_occupations(sys: SystemParams, bath: DiscretizedBath) -> Occupations:
    """Free-oscillator thermal moments for the subsystem (at ``Omega0``) and bath."""
    freqs = np.concatenate([[sys.omega0], bath.omegas])
    return Occupations(p2=np.asarray(thermal_p2(freqs, sys.beta)),
                       q2=np.asarray(thermal_q2(freqs, sys.beta)))


def _coefficients(modes: NormalModes, times: np.ndarray):
    w = modes.omegas
    a = modes.X[0]
    phase = np.outer(w, times)
    c = a[:, None] * np.cos(phase)
    s = a[:, None] * np.sin(phase)
    X = modes.X
    return X @ c, X @ (s / w[:, None]), X @ (s * w[:, None])


def propagator_coefficients(modes: NormalModes, t: float) -> PropagatorCoefficients:
    """Coefficient functions ``xc``, ``xs``, ``xbars`` over all oscillators at ``t``."""
    if t < 0:
        raise InvalidParam(f"t must be non-negative, got {t}")
    xc, xs, xb = _coefficients(modes, np.array([float(t)]))
    return PropagatorCoefficients(float(t), xc[:, 0], xs[:, 0], xb[:, 0])


def _moments(xc, xs, xb, occ: Occupations):
    P = occ.p2[:, None]
    Q = occ.q2[:, None]
    p2 = np.sum(xc**2 * P + xb**2 * Q, axis=0)
    q2 = np.sum(xc**2 * Q + xs**2 * P, axis=0)
    pq = np.sum(xc * xs * P - xb * xc * Q, axis=0)
    comm = np.sum(xc**2 + xb * xs, axis=0)
    return p2, q2, pq, comm


def evolved_covariance(modes: NormalModes, occupations: Occupations, t: float) -> CovariancePoint:
    """Second moments of ``P0(t), Q0(t)`` in the uncoupled thermal state."""
    pc = propagator_coefficients(modes, t)
    vals = _moments(pc.xc[:, None], pc.xs[:, None], pc.xbars[:, None], occupations)
    return CovariancePoint(*(float(v[0]) for v in vals))


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise GridError("time grid must be a non-empty 1-d array")
    if t[0] < 0 or not np.all(np.isfinite(t)):
        raise GridError("time grid must be finite and non-negative")
    if np.any(np.diff(t) <= 0):
        raise GridError("time grid must be strictly increasing")
    return t


def trajectory(modes: NormalModes, occupations: Occupations, t_grid,
               horizon: float | None = None, chunk: int = 256) -> CovarianceTrajectory:
    """Evaluate :func:`evolved_covariance` on every grid point.

    Times are processed in blocks so each block is three dense
    matrix products.  A :class:`RecurrenceWarning` is issued when the grid
    reaches ``horizon`` (normally :func:`bath.recurrence_estimate`).
    """
    t = _check_grid(t_grid)
    if horizon is not None and t[-1] >= horizon:
        warnings.warn(f"time grid reaches {t[-1]:g}, beyond the recurrence horizon "
                      f"{horizon:g}", RecurrenceWarning, stacklevel=2)
    out = np.empty((4, t.size))
    for lo in range(0, t.size, chunk):
        block = t[lo:lo + chunk]
        xc, xs, xb = _coefficients(modes, block)
        out[:, lo:lo + block.size] = _moments(xc, xs, xb, occupations)
    return CovarianceTrajectory(t.copy(), *out)


def subsystem_coefficient(modes: NormalModes, t_grid) -> np.ndarray:
    """``xc_0(t) = sum_nu X0nu^2 cos(w_nu t)``, the subsystem's own coefficient."""
    t = _check_grid(t_grid)
    a2 = modes.X[0] ** 2
    out = np.empty(t.size)
    for lo in range(0, t.size, 1024):
        out[lo:lo + 1024] = np.cos(np.outer(t[lo:lo + 1024], modes.omegas)) @ a2
    return out


def asymptotic_coefficients(sys: SystemParams, spec: OhmicSpectrum, bath: DiscretizedBath,
                            k: int, t):
    """Non-decaying parts of ``xc_k`` and ``xbars_k`` for bath oscillator ``k``.

    ``k`` counts from 1.  Uses the continuum Green function at the bath
    frequency; the transients that cancel these at ``t = 0`` are omitted.
    """
    if not 1 <= k <= bath.n:
        raise IndexError(f"bath index {k} outside 1..{bath.n}")
    om = bath.omegas[k - 1]
    al = bath.alphas[k - 1]
    g = g_boundary(sys, spec, om)
    t = np.asarray(t, dtype=float)
    c, s = np.cos(om * t), np.sin(om * t)
    xc = al * (g.real * c - g.imag * s)
    xb = al * om * (g.real * s + g.imag * c)
    return xc, xb


def stationary_p2(sys: SystemParams, spec: OhmicSpectrum, bath: DiscretizedBath | None = None,
                  form: str = "discrete") -> float:
    """Time-independent part of ``<P0(t)^2>`` contributed by the bath.

    ``discrete`` sums ``a_k^2 <P_k^2>_0 |g(W_k - i0+)|^2`` over the bath;
    ``integral`` is its continuum limit, identical to
    ``equilibrium_moments(sys, spec).p2``.
    """
    if form == "integral":
        return equilibrium_moments(sys, spec).p2
    if form != "discrete":
        raise ValueError(f"form must be 'discrete' or 'integral', got {form!r}")
    if bath is None:
        raise InvalidParam("discrete form needs a bath")
    g = g_boundary(sys, spec, bath.omegas)
    return float(np.sum(bath.alphas**2 * thermal_p2(bath.omegas, sys.beta) * np.abs(g) ** 2))
