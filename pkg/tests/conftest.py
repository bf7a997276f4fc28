import pytest

from acplus.acceptance import Workspace


@pytest.fixture(scope="session")
def ws():
    """Shared workspace so expensive profiles/runs are computed once per session."""
    return Workspace()


@pytest.fixture(scope="session")
def cubic(ws):
    return ws.nl


@pytest.fixture(scope="session")
def sol08(ws):
    """Reference wave profile for alpha = -0.8 at the default step."""
    return ws.prof(-0.8)
