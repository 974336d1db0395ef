import time

import pytest

SESSION_START = time.monotonic()


def session_elapsed() -> float:
    return time.monotonic() - SESSION_START


def pytest_collection_modifyitems(items):
    # run the acceptance module last so its suite-runtime criterion sees the
    # full session
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


@pytest.fixture
def elapsed():
    return session_elapsed
