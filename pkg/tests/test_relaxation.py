"""Where the decay rates actually sit, and the high-temperature expansion.

The single-operator coefficient ``xc_0(t)`` decays at ``eta/2``; second
moments are quadratic in such coefficients, so their residuals decay at
``eta``.  At small ``beta`` the finite-bath ``beta <P0^2>`` exceeds 1 by the
quantum correction ``beta^2 <w^2>/12 - beta^4 <w^4>/720``.
"""
import numpy as np
import pytest

from oscequil.analysis import fit_decay_rate, fit_envelope_rate, oscillation_period
from oscequil.bath import discretize
from oscequil.dynamics import subsystem_coefficient, thermal_occupations, trajectory
from oscequil.modes import normal_modes
from oscequil.spectral import OhmicSpectrum, SystemParams, equilibrium_moments, thermal_p2

T = np.arange(1201) * 0.05


def _model(eta):
    sys_, spec = SystemParams(1.0, 2.0), OhmicSpectrum(eta, 20.0)
    bath = discretize(spec, 1200)
    return sys_, spec, bath, normal_modes(sys_, bath)


@pytest.mark.parametrize("eta", [0.1, 0.2, 0.4])
def test_coefficient_decays_at_half_eta(eta):
    sys_, spec, _, modes = _model(eta)
    xc0 = subsystem_coefficient(modes, T)
    rate, _, _ = fit_envelope_rate(T, xc0, (10.0, 50.0), 2 * oscillation_period(sys_, spec))
    assert rate == pytest.approx(eta / 2, rel=0.15)


@pytest.mark.parametrize("eta", [0.1, 0.2])
def test_moment_residual_decays_at_eta(eta):
    sys_, spec, bath, modes = _model(eta)
    traj = trajectory(modes, thermal_occupations(sys_, bath), T)
    fit = fit_decay_rate(traj, equilibrium_moments(sys_, spec), "p2", (10.0, 50.0),
                         system=sys_, spectrum=spec)
    assert fit.rate == pytest.approx(eta, rel=0.15)


def test_classical_limit_expansion():
    beta = 0.01
    sys_ = SystemParams(1.0, beta)
    bath = discretize(OhmicSpectrum(0.2, 20.0), 1200)
    modes = normal_modes(sys_, bath)
    m2 = 1.0 + np.sum(bath.alphas**2 / bath.omegas**2)
    m4 = m2**2 + np.sum(bath.alphas**2)
    expected = 1 + beta**2 * m2 / 12 - beta**4 * m4 / 720
    got = beta * modes.spectral_sum(lambda w: thermal_p2(w, beta))
    assert got == pytest.approx(expected, abs=1e-9)
    assert got - 1 > 1e-6
