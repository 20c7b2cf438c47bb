from __future__ import annotations

import pytest

from taptrim.config import TrimConfig

import helpers


@pytest.fixture(scope="session")
def cfg() -> TrimConfig:
    return TrimConfig()


@pytest.fixture()
def entry_pkg():
    return helpers.entry_activity_package()


@pytest.fixture(scope="session")
def demo_pkg():
    return helpers.demo_app_package()


@pytest.fixture(scope="session")
def mini_pkg():
    return helpers.demo_mini_package()
