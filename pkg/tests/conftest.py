import pytest

from postlab.exactlin import DEFAULT_PRIME


@pytest.fixture
def p():
    return DEFAULT_PRIME
