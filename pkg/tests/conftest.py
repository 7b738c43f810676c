import pytest

from amtlab.verify import context, green


@pytest.fixture(scope="session")
def ctx1():
    return context(1)


@pytest.fixture(scope="session")
def ctx2():
    return context(2)


@pytest.fixture(scope="session")
def green1():
    return green(1, 0.0)


@pytest.fixture(scope="session")
def green2():
    return green(2, 0.0)
