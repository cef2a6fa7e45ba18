# tests/conftest.py
"""
Shared fixtures: an isolated data directory and the small groups most tests use.
"""

import pytest

from core.config_manager import DATA_DIR_ENV
from core.groups import build_group


@pytest.fixture(autouse=True)
def data_dir(tmp_path, monkeypatch):
    """Points config.json and reports.db at a temporary directory."""
    path = tmp_path / "data"
    monkeypatch.setenv(DATA_DIR_ENV, str(path))
    return path


@pytest.fixture(scope="session")
def gl2_2():
    return build_group("GL", 2, 2)


@pytest.fixture(scope="session")
def gl3_2():
    return build_group("GL", 3, 2)


@pytest.fixture(scope="session")
def sl2_3():
    return build_group("SL", 2, 3)
