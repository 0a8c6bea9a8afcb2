import pytest

from opencavity.fock import CavityParams


@pytest.fixture
def ref():
    """omega=1, gamma'=0.5, kappa=0.1, so g=0.2."""
    return CavityParams(omega=1.0, gamma_prime=0.5, kappa=0.1)


@pytest.fixture
def ref_k0():
    """Noiseless cavity with the same g=0.2."""
    return CavityParams(omega=1.0, gamma_prime=0.4, kappa=0.0)


@pytest.fixture
def closed():
    return CavityParams(omega=1.0, gamma_prime=0.0, kappa=0.0, undamped_ok=True)
