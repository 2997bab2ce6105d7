import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscequil.bath import DiscretizedBath, discretize, recurrence_estimate
from oscequil.dynamics import (CovarianceTrajectory, asymptotic_coefficients, evolved_covariance,
                               propagator_coefficients, stationary_p2, subsystem_coefficient,
                               thermal_occupations, trajectory)
from oscequil.errors import GridError, InvalidParam, RecurrenceWarning
from oscequil.modes import normal_modes
from oscequil.spectral import OhmicSpectrum, SystemParams, equilibrium_moments

from conftest import random_bath


def test_thermal_occupations(ref_system, ref_spectrum):
    bath = discretize(ref_spectrum, 3)
    occ = thermal_occupations(ref_system, bath)
    assert occ.p2[0] == pytest.approx(0.5 / np.tanh(1.0), rel=1e-15)
    assert occ.q2[0] == pytest.approx(0.5 / np.tanh(1.0), rel=1e-15)
    np.testing.assert_allclose(occ.p2 / occ.q2, np.r_[1.0, bath.omegas**2], rtol=1e-14)


def test_coefficients_at_zero(two_level):
    modes = normal_modes(*two_level)
    pc = propagator_coefficients(modes, 0.0)
    np.testing.assert_allclose(pc.xc, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(pc.xs, 0.0, atol=0)
    with pytest.raises(InvalidParam):
        propagator_coefficients(modes, -1.0)


def test_two_level_closed_form(two_level):
    # xc_0(t) = sum_nu X0nu^2 cos(w_nu t) with the surd weights
    modes = normal_modes(*two_level)
    t = np.linspace(0, 20, 41)
    w = np.sqrt([3 - np.sqrt(5), 3 + np.sqrt(5)])
    a2 = np.array([(5 + np.sqrt(5)) / 10, (5 - np.sqrt(5)) / 10])
    expected = np.cos(np.outer(t, w)) @ a2
    np.testing.assert_allclose(subsystem_coefficient(modes, t), expected, atol=1e-13)


def test_evolved_matches_trajectory(ref_model):
    sys_, _, bath, modes = ref_model
    occ = thermal_occupations(sys_, bath)
    traj = trajectory(modes, occ, [0.0, 1.3, 7.0], chunk=2)
    pt = evolved_covariance(modes, occ, 7.0)
    assert (traj.p2[2], traj.q2[2], traj.pq[2], traj.comm[2]) == pytest.approx(tuple(pt), rel=1e-13)


def test_grid_errors(two_level):
    modes = normal_modes(*two_level)
    occ = thermal_occupations(two_level[0], two_level[1])
    for bad in ([], [1.0, 0.5], [-1.0, 0.0], [0.0, np.nan], [[0.0, 1.0]]):
        with pytest.raises(GridError):
            trajectory(modes, occ, bad)


def test_recurrence_warning(two_level):
    modes = normal_modes(*two_level)
    occ = thermal_occupations(*two_level)
    with pytest.warns(RecurrenceWarning):
        trajectory(modes, occ, [0.0, 5.0], horizon=4.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        trajectory(modes, occ, [0.0, 3.0], horizon=4.0)


def test_free_run_is_stationary(ref_system, ref_spectrum):
    bath = discretize(ref_spectrum, 50).decoupled()
    modes = normal_modes(ref_system, bath)
    occ = thermal_occupations(ref_system, bath)
    traj = trajectory(modes, occ, np.linspace(0, 60, 301))
    assert np.max(np.abs(traj.p2 - occ.p2[0])) <= 4 * np.finfo(float).eps
    assert np.max(np.abs(traj.pq)) <= 4 * np.finfo(float).eps


def test_csv_round_trip(tmp_path, two_level):
    modes = normal_modes(*two_level)
    traj = trajectory(modes, thermal_occupations(*two_level), np.linspace(0, 3, 7))
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = CovarianceTrajectory.from_csv(path)
    for name in ("times", "p2", "q2", "pq", "comm"):
        np.testing.assert_array_equal(getattr(back, name), getattr(traj, name))
    assert path.read_text().splitlines()[0] == "t,p2,q2,pq,comm"
    assert len(traj.window(1.0, 2.0)) == 3
    with pytest.raises(ValueError):
        traj.channel("xx")


def test_asymptotic_coefficients_match_modes(ref_model):
    # late-time bath coefficients approach the continuum Green-function form
    sys_, spec, bath, modes = ref_model
    t = np.array([40.0, 45.0, 50.0])
    pc = [propagator_coefficients(modes, ti) for ti in t]
    for k in (40, 60, 200):
        xc, xb = asymptotic_coefficients(sys_, spec, bath, k, t)
        got_c = np.array([p.xc[k] for p in pc])
        got_b = np.array([p.xbars[k] for p in pc])
        scale = bath.alphas[k - 1] * np.abs(1 / (1 - bath.omegas[k - 1] ** 2)) + 0.05
        assert np.max(np.abs(got_c - xc)) < 0.05 * scale
        assert np.max(np.abs(got_b - xb)) < 0.05 * scale * bath.omegas[k - 1]
    with pytest.raises(IndexError):
        asymptotic_coefficients(sys_, spec, bath, 0, t)


def test_stationary_p2_forms(ref_system, ref_spectrum):
    bath = discretize(ref_spectrum, 1200)
    disc = stationary_p2(ref_system, ref_spectrum, bath)
    cont = stationary_p2(ref_system, ref_spectrum, form="integral")
    assert cont == equilibrium_moments(ref_system, ref_spectrum).p2
    assert abs(disc - cont) / cont < 5e-3
    with pytest.raises(InvalidParam):
        stationary_p2(ref_system, ref_spectrum)
    with pytest.raises(ValueError):
        stationary_p2(ref_system, ref_spectrum, bath, form="other")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30), beta=st.floats(0.05, 20.0),
       t=st.lists(st.floats(0.0, 100.0), min_size=1, max_size=6, unique=True))
def test_commutator_and_uncertainty(seed, n, beta, t):
    sys_ = SystemParams(1.0, beta)
    bath = random_bath(np.random.default_rng(seed), n)
    modes = normal_modes(sys_, bath)
    traj = trajectory(modes, thermal_occupations(sys_, bath), np.sort(t))
    assert traj.max_comm_deviation < 1e-10
    det = traj.p2 * traj.q2 - traj.pq**2
    assert np.all(det >= 0.25 * (1 - 1e-10))
