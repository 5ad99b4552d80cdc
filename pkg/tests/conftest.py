from __future__ import annotations

from importlib import resources

import pytest

from finbox.model import ControlLaw, load_law, load_model

DATA = resources.files("finbox") / "data"


def bundled(name: str):
    return load_model((DATA / name).read_text())


@pytest.fixture(scope="session")
def ex1():
    return bundled("example1.json")


@pytest.fixture(scope="session")
def ex2():
    return bundled("example2.json")


@pytest.fixture(scope="session")
def cx1():
    return bundled("counterexample1.json")


@pytest.fixture(scope="session")
def cx1_law() -> ControlLaw:
    return load_law((DATA / "counterexample1_law.json").read_text())



_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def log(line: str) -> None:
        lines.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
