import warnings

import pytest

from hpaxis import find_equilibria, preset


@pytest.fixture(scope="session")
def params():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return preset("paper-s6")


@pytest.fixture(scope="session")
def eqset(params):
    return find_equilibria(params)
