import pytest

from steplab.zoo import build_registry


@pytest.fixture(scope="session")
def registry():
    return build_registry()
