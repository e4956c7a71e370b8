import pytest

import bfl


@pytest.fixture(scope="session")
def reservoir():
    return bfl.bundled_tree("reservoir.ft")


@pytest.fixture(scope="session")
def covid():
    return bfl.bundled_tree("covid.ft")


@pytest.fixture(scope="session")
def patterns():
    """e1 = AND(e2, e3), e3 = OR(e4, e5); vectors are over (e2, e4, e5)."""
    return bfl.bundled_tree("patterns.ft")


@pytest.fixture(scope="session")
def or2():
    return bfl.bundled_tree("or2.ft")
