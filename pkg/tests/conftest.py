import pytest

from szego_borel.phi import ModelOrder
from szego_borel.zeros import locate_zeros


@pytest.fixture(scope="session")
def order1():
    return ModelOrder(1)


@pytest.fixture(scope="session")
def order2():
    return ModelOrder(2)


@pytest.fixture(scope="session")
def order3():
    return ModelOrder(3)


@pytest.fixture(scope="session")
def table2(order2):
    """First 40 zeros for m = 2, shared by the kernel tests."""
    return locate_zeros(order2, 40)


@pytest.fixture(scope="session")
def table3(order3):
    return locate_zeros(order3, 40)
