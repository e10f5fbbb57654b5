import pytest

from module_catalog import build_algebra, get_named_algebra
from result_cache import create_result_cache


def named(name):
    return build_algebra(get_named_algebra(name))


@pytest.fixture(scope="session")
def truncated():
    return named('truncated-p3')


@pytest.fixture(scope="session")
def functions():
    return named('functions-p3-n2')


@pytest.fixture(scope="session")
def no_tpp():
    return named('no-tpp')


@pytest.fixture(scope="session")
def qci():
    return named('qci-l3-n2-standard')


@pytest.fixture(scope="session")
def qci_n1():
    return named('qci-l3-n1')


@pytest.fixture(scope="session")
def heisenberg():
    return named('heisenberg-p3')


@pytest.fixture(scope="session")
def shared_cache():
    """In-memory resolution cache shared by the whole session."""
    return create_result_cache(strategy='LRU', capacity=512, persistent=False)
