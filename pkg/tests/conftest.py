from __future__ import annotations

import pytest

from mu.bundled import bundled_network
from mu.session import SessionStore


@pytest.fixture
def network():
    return bundled_network("chest-pain")


@pytest.fixture
def store(tmp_path):
    store = SessionStore(tmp_path / "sessions")
    yield store
    store.close()


@pytest.fixture
def client(store):
    from fastapi.testclient import TestClient

    from mu.service import create_app

    return TestClient(create_app(store))
