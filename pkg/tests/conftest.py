"""Shared pytest options and fixtures"""
import pytest

from app.modules.graph_model.services import build_complete_like


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-scale statistical tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def triangle():
    return build_complete_like(3, [0, 0, 0])


@pytest.fixture
def triangle_with_leaf():
    return build_complete_like(3, [0, 0, 1])
