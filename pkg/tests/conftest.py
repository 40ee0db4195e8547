import pytest

import support


@pytest.fixture(scope="session")
def ref_params():
    """Endemic certified reference set: gamma=2, r0=1.5, rho=2, i_u=0.5."""
    return support.make(support.REF)


@pytest.fixture(scope="session")
def dfe_params():
    """Sub-threshold variant of the reference set (beta=1.5, r0=0.75)."""
    return support.make(support.REF_DFE)


@pytest.fixture(scope="session")
def boundary_params():
    """Certified exactly on the i_u == rho boundary (delta=4, beta=6)."""
    return support.make(support.BOUNDARY)


@pytest.fixture(scope="session")
def uncertified_params():
    """High-transmission set with omega = {i < rho} not invariant (beta=20)."""
    return support.make(support.UNCERTIFIED)
