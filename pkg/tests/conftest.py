import pytest

from padic_gz.crosscheck import orient
from padic_gz.quadratic import make_setup


@pytest.fixture(scope="session")
def canonical():
    return make_setup(-43, -163, 2, 3)


@pytest.fixture(scope="session")
def oriented(canonical):
    return orient(canonical)


@pytest.fixture(scope="session")
def ref(oriented):
    return oriented.setup
