import pytest

from sievelab import build_table


@pytest.fixture(scope="session")
def table_small():
    """Covers [1, 6000): enough for every brute-force comparison window."""
    return build_table(1, 6000)


@pytest.fixture(scope="session")
def table_million():
    """Covers [1, 10**6 + 40): shared by the desk-scale diagnostics."""
    return build_table(1, 10**6 + 40)
