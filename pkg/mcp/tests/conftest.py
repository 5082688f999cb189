import pytest
from fastmcp import FastMCP

from edgelab.config import settings as edgelab_settings

from app.server import create_server


@pytest.fixture(autouse=True)
def serial_jobs(monkeypatch):
    monkeypatch.setattr(edgelab_settings, "n_jobs", 1)


@pytest.fixture
def server() -> FastMCP:
    return create_server()
