import pytest

from qcurrents import ParameterContext, CurrentCatalog


@pytest.fixture(scope="session")
def ctx2():
    return ParameterContext(N=2, k=1, r=3, lam=(1,), T=8)


@pytest.fixture(scope="session")
def ctx3():
    return ParameterContext(N=3, k=1, r=3, lam=(1, 1), T=6)


@pytest.fixture(scope="session")
def cat2(ctx2):
    return CurrentCatalog(ctx2)


@pytest.fixture(scope="session")
def cat3(ctx3):
    return CurrentCatalog(ctx3)
