import pytest

from indefspec.spectrum import ModeIndex, solve_mode


@pytest.fixture(scope="session")
def lam11():
    return solve_mode(ModeIndex(1, 1))


@pytest.fixture(scope="session")
def lam10():
    return solve_mode(ModeIndex(1, 0))
