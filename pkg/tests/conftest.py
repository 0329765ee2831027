"""Test configuration and fixtures."""

import pytest

from qec.config import reset_config
from qec.graph import GraphParams, QuadranceGraph, build


@pytest.fixture(scope="session")
def g72() -> QuadranceGraph:
    """G_{7,2}: 49 vertices."""
    return build(GraphParams.canonical(7, 2))


@pytest.fixture(scope="session")
def g75() -> QuadranceGraph:
    """G_{7,5}: 16807 vertices."""
    return build(GraphParams.canonical(7, 5))


@pytest.fixture(autouse=True)
def fresh_config():
    """Drop the global config between tests."""
    reset_config()
    yield
    reset_config()
