import numpy as np
import pytest

from oscequil.analysis import (block_envelope, detect_recurrence, equilibration_time,
                               fit_decay_rate, fit_envelope_rate, oscillation_period,
                               relative_residual)
from oscequil.dynamics import CovarianceTrajectory
from oscequil.errors import OverdampedError, UnderflowError, WindowError
from oscequil.spectral import EquilibriumMoments, OhmicSpectrum, SystemParams

EQ = EquilibriumMoments(p2=1.0, q2=1.0)


def _synthetic(rate, t_max=60.0, dt=0.01, amp=0.1, omega=1.0):
    t = np.arange(0.0, t_max + dt / 2, dt)
    r = amp * np.exp(-rate * t) * np.cos(omega * t) ** 2
    ones = np.ones_like(t)
    return CovarianceTrajectory(t, 1.0 + r, 1.0 + 0.5 * r, 0 * t, ones)


def test_oscillation_period():
    assert oscillation_period(SystemParams(1.0, 1.0), OhmicSpectrum(0.2, 20.0)) == pytest.approx(
        np.pi / np.sqrt(0.99), rel=1e-15)
    with pytest.raises(OverdampedError):
        oscillation_period(SystemParams(1.0, 1.0), OhmicSpectrum(2.0, 20.0))


@pytest.mark.parametrize("rate", [0.05, 0.1, 0.2, 0.4])
def test_fit_recovers_synthetic_rate(rate):
    traj = _synthetic(rate)
    fit = fit_decay_rate(traj, EQ, window=(10, 50), period=np.pi)
    assert fit.rate == pytest.approx(rate, rel=1e-3)
    assert fit.n_points == 12
    # period estimated from the data
    auto = fit_decay_rate(traj, EQ, channel="q2", window=(10, 50))
    assert auto.rate == pytest.approx(rate, rel=2e-2)
    assert set(fit.to_dict()) == {"channel", "rate", "rate_stderr", "window", "n_points"}


def test_fit_errors():
    traj = _synthetic(0.1)
    with pytest.raises(WindowError):
        fit_decay_rate(traj, EQ, window=(10, 80), period=np.pi)
    with pytest.raises(WindowError):
        fit_decay_rate(traj, EQ, window=(10, 14), period=np.pi)
    with pytest.raises(ValueError):
        fit_decay_rate(traj, EQ, channel="pq")
    flat = _synthetic(0.0, amp=0.0)
    with pytest.raises(UnderflowError):
        fit_decay_rate(flat, EQ, window=(10, 50), period=np.pi)


def test_block_envelope():
    t = np.arange(0, 10, 0.5)
    tm, vm = block_envelope(t, np.sin(t) ** 2, np.pi)
    assert tm.size == 3
    assert np.all(vm > 0.9)


def test_fit_envelope_rate_plain():
    t = np.linspace(0, 30, 3001)
    rate, err, n = fit_envelope_rate(t, 2 * np.exp(-0.3 * t) * np.abs(np.sin(t)), (5, 25),
                                     period=np.pi)
    assert rate == pytest.approx(0.3, rel=1e-2) and err < 1e-2 and n == 6


def test_equilibration_time():
    traj = _synthetic(0.1)
    r = relative_residual(traj, EQ)
    t_eq = equilibration_time(traj, EQ, 0.01)
    assert np.all(r[traj.times >= t_eq] < 0.01)
    assert r[traj.times < t_eq][-1] >= 0.01
    assert 20 < t_eq < 25  # 0.1 exp(-0.1 t) = 0.01 at t = 23.0
    assert equilibration_time(traj, EQ, 1.0) == 0.0
    assert equilibration_time(_synthetic(0.0), EQ, 0.01) is None
    with pytest.raises(ValueError):
        equilibration_time(traj, EQ, 0.0)


def test_detect_recurrence():
    t = np.arange(0, 400, 0.05)
    env = 0.1 * np.exp(-0.2 * t) + 1e-6 + 0.05 * np.exp(-((t - 300) / 20) ** 2)
    r = env * np.cos(t) ** 2
    traj = CovarianceTrajectory(t, 1 + r, 1 + r, 0 * t, np.ones_like(t))
    hit = detect_recurrence(traj, EQ, period=np.pi)
    assert 220 < hit < 300
    calm = CovarianceTrajectory(t, 1 + 0.1 * np.exp(-0.2 * t) * np.cos(t) ** 2, np.ones_like(t),
                                0 * t, np.ones_like(t))
    assert detect_recurrence(calm, EQ, period=np.pi) is None
