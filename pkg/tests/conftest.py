import json
from importlib import resources

import pytest

from bkb.parser import parse_kb

FIXTURE_NAMES = ["aids", "diamond", "feedback", "empty", "units", "path"]


def fixture_path(name: str):
    return resources.files("bkb.fixtures").joinpath(f"{name}.bkb")


def fixture_kb(name: str):
    return parse_kb(fixture_path(name).read_text())


def golden(name: str) -> dict:
    data = json.loads(resources.files("bkb.fixtures").joinpath(f"{name}.json").read_text())
    return {k: v["value"] for k, v in data["artifacts"].items()}


@pytest.fixture(scope="session")
def aids_kb():
    return fixture_kb("aids")


@pytest.fixture(scope="session")
def path_kb():
    return fixture_kb("path")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[n])
