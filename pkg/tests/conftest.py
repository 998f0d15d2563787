import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, _ROOT)

import pytest

from testbed import spec_for


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow reproduction tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def sphere5():
    return spec_for("sphere")


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    # logs/ 与 results/ 落在临时目录
    monkeypatch.chdir(tmp_path)
    return tmp_path
