"""Post-processing of trajectories: relaxation rate, equilibration time, revivals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as signal_tools, stats

from .dynamics import CovarianceTrajectory
from .errors import OverdampedError, UnderflowError, WindowError
from .spectral import EquilibriumMoments, OhmicSpectrum, SystemParams

__all__ = [
    "DecayFit",
    "oscillation_period",
    "block_envelope",
    "fit_envelope_rate",
    "fit_decay_rate",
    "relative_residual",
    "equilibration_time",
    "detect_recurrence",
]

FLOOR_ULPS = 64


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of ``log envelope = const - rate * t``."""

    rate: float
    rate_stderr: float
    window: tuple
    target: EquilibriumMoments | None
    channel: str = "p2"
    n_points: int = 0

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "rate": self.rate,
            "rate_stderr": self.rate_stderr,
            "window": list(self.window),
            "n_points": self.n_points,
        }


def oscillation_period(sys: SystemParams, spec: OhmicSpectrum) -> float:
    """Period ``pi / Omega`` of the squared transients, ``Omega^2 = Omega0^2 - eta^2/4``."""
    if spec.eta >= 2 * sys.omega0:
        raise OverdampedError(f"eta={spec.eta} >= 2*omega0={2 * sys.omega0}: no oscillation")
    return float(np.pi / np.sqrt(sys.omega0**2 - spec.eta**2 / 4))


def _estimate_period(times: np.ndarray, signal: np.ndarray) -> float:
    # median spacing of the dominant local maxima; a maximum counts when it
    # rises at least half its height above the neighbouring minima, which
    # drops small fast ripple and is insensitive to the decaying trend
    x = np.asarray(signal, dtype=float)
    peaks, props = signal_tools.find_peaks(x, prominence=0.0)
    peaks = peaks[props["prominences"] >= 0.5 * x[peaks]]
    if peaks.size < 3:
        raise WindowError("too few oscillations to estimate a period")
    return float(np.median(np.diff(np.asarray(times)[peaks])))


def block_envelope(times, values, period: float, t_lo=None, t_hi=None):
    """Maxima of ``values`` over consecutive blocks of length ``period``.

    Returns the times and values of the block maxima.  A trailing partial
    block is dropped.
    """
    times = np.asarray(times)
    values = np.asarray(values)
    t_lo = times[0] if t_lo is None else t_lo
    t_hi = times[-1] if t_hi is None else t_hi
    nblocks = int(np.floor((t_hi - t_lo) / period + 1e-9))
    tm, vm = [], []
    for j in range(nblocks):
        a = t_lo + j * period
        m = (times >= a) & (times < a + period) & (times <= t_hi)
        if not np.any(m):
            continue
        i = np.argmax(values[m])
        tm.append(times[m][i])
        vm.append(values[m][i])
    return np.array(tm), np.array(vm)


def fit_envelope_rate(times, residual, window, period: float | None = None,
                      floor: float = 0.0):
    """Exponential rate of the upper envelope of a non-negative ``residual``.

    Returns ``(rate, stderr, n_points)``.
    """
    times = np.asarray(times, dtype=float)
    residual = np.abs(np.asarray(residual, dtype=float))
    t_lo, t_hi = map(float, window)
    if not t_lo < t_hi or t_lo < times[0] or t_hi > times[-1]:
        raise WindowError(f"window {window} not inside [{times[0]}, {times[-1]}]")
    inside = (times >= t_lo) & (times <= t_hi)
    if period is None:
        period = _estimate_period(times[inside], residual[inside])
    tm, vm = block_envelope(times, residual, period, t_lo, t_hi)
    if tm.size < 3:
        raise WindowError(f"window {window} holds fewer than 3 oscillation periods")
    if np.any(vm <= 10 * floor):
        raise UnderflowError("residual reaches the numerical floor inside the fit window")
    fit = stats.linregress(tm, np.log(vm))
    return float(-fit.slope), float(fit.stderr), int(tm.size)


def fit_decay_rate(traj: CovarianceTrajectory, eq: EquilibriumMoments, channel: str = "p2",
                   window=(10.0, 50.0), *, system: SystemParams | None = None,
                   spectrum: OhmicSpectrum | None = None,
                   period: float | None = None) -> DecayFit:
    """Fit the decay of ``|channel(t) - eq|`` toward equilibrium.

    The residual envelope is the sequence of block maxima over one period of
    the squared transient oscillation; its logarithm is fitted linearly.
    When ``system`` and ``spectrum`` are given the period is ``pi / Omega``
    and overdamped parameters are rejected; otherwise the period falls back
    to the spacing of the dominant residual maxima, which can be a fraction
    of the true period (still a valid block length, but less smoothing).

    Raises
    ------
    WindowError, UnderflowError, OverdampedError
    """
    if channel not in ("p2", "q2"):
        raise ValueError(f"channel must be 'p2' or 'q2', got {channel!r}")
    if system is not None and spectrum is not None and period is None:
        period = oscillation_period(system, spectrum)
    values = traj.channel(channel)
    target = getattr(eq, channel)
    floor = FLOOR_ULPS * np.finfo(float).eps * max(np.max(np.abs(values)), abs(target))
    rate, err, npts = fit_envelope_rate(traj.times, values - target, window, period, floor)
    return DecayFit(rate=rate, rate_stderr=err, window=tuple(map(float, window)),
                    target=eq, channel=channel, n_points=npts)


def relative_residual(traj: CovarianceTrajectory, eq: EquilibriumMoments) -> np.ndarray:
    """``max(|p2 - p2_eq| / p2_eq, |q2 - q2_eq| / q2_eq)`` at every sample."""
    return np.maximum(np.abs(traj.p2 - eq.p2) / eq.p2, np.abs(traj.q2 - eq.q2) / eq.q2)


def equilibration_time(traj: CovarianceTrajectory, eq: EquilibriumMoments,
                       rel_tol: float) -> float | None:
    """First sampled time after which both relative residuals stay below ``rel_tol``.

    Returns None when the residual is not contained up to the end of the
    trajectory.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    above = np.flatnonzero(relative_residual(traj, eq) >= rel_tol)
    if above.size == 0:
        return float(traj.times[0])
    last = above[-1]
    if last + 1 >= len(traj):
        return None
    return float(traj.times[last + 1])


def detect_recurrence(traj: CovarianceTrajectory, eq: EquilibriumMoments,
                      period: float | None = None, factor: float = 3.0) -> float | None:
    """Earliest revival of the residual after it has settled.

    The relative residual is reduced to its block envelope; after the
    envelope minimum (the settled plateau) the first block whose envelope
    exceeds ``factor`` times that minimum marks the revival.  Returns None
    if no such block exists or the residual never rises above rounding.
    """
    r = relative_residual(traj, eq)
    if period is None:
        period = _estimate_period(traj.times, r)
    tm, vm = block_envelope(traj.times, r, period)
    if tm.size < 3:
        return None
    j = int(np.argmin(vm))
    plateau = vm[j]
    noise = 1e3 * np.finfo(float).eps
    threshold = max(factor * plateau, noise)
    later = np.flatnonzero(vm[j + 1:] > threshold)
    if later.size == 0:
        return None
    return float(tm[j + 1 + later[0]])
