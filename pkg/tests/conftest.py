import pytest

from tallcol.oracle import DiscreteShape
from tallcol.reconstruct import profile
from tallcol.shooting import integrate_backward


@pytest.fixture(scope="session")
def clamped():
    return integrate_backward("clamped")


@pytest.fixture(scope="session")
def hinged():
    return integrate_backward("hinged")


@pytest.fixture(scope="session")
def clamped_profile(clamped):
    return profile(clamped)


@pytest.fixture(scope="session")
def hinged_profile(hinged):
    return profile(hinged)


@pytest.fixture(scope="session")
def clamped_shape(clamped_profile):
    return DiscreteShape.from_profile(clamped_profile, 2000)


@pytest.fixture(scope="session")
def hinged_shape(hinged_profile):
    return DiscreteShape.from_profile(hinged_profile, 2000)
