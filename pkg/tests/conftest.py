import numpy as np
import pytest

from oscequil import kernels
from oscequil.bath import DiscretizedBath, discretize
from oscequil.modes import normal_modes
from oscequil.spectral import OhmicSpectrum, SystemParams

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


@pytest.fixture
def ref_system():
    return SystemParams(omega0=1.0, beta=2.0)


@pytest.fixture
def ref_spectrum():
    return OhmicSpectrum(eta=0.2, cutoff=20.0)


@pytest.fixture
def two_level():
    """Omega0 = 1 with a single bath mode Omega1 = 2, alpha1 = 2: roots 3 -+ sqrt(5)."""
    return SystemParams(omega0=1.0, beta=2.0), DiscretizedBath([2.0], [2.0])


@pytest.fixture(scope="session")
def ref_model():
    sys_ = SystemParams(omega0=1.0, beta=2.0)
    spec = OhmicSpectrum(eta=0.2, cutoff=20.0)
    bath = discretize(spec, 1200)
    return sys_, spec, bath, normal_modes(sys_, bath)


def random_bath(rng, n, cutoff=10.0):
    omegas = np.sort(rng.uniform(0.05, cutoff, n))
    alphas = rng.uniform(0.01, 1.0, n) * omegas
    return DiscretizedBath(omegas, alphas)
