import random

import pytest
from hypothesis import settings

from filippov import make_semisimple, make_simple, make_zero

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def a3():
    return make_simple(2)


@pytest.fixture(scope="session")
def a4():
    return make_simple(3)


@pytest.fixture(scope="session")
def a3a3():
    return make_semisimple(2, 2)


@pytest.fixture(scope="session")
def zero2():
    return make_zero(2, 2)


# -- acceptance reporting ---------------------------------------------------

def pytest_configure(config):
    config._acceptance_log = []


@pytest.fixture
def criterion(request):
    log = request.config._acceptance_log

    def record(number, name, ok, detail=""):
        log.append((number, name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(log, key=lambda r: (r[0], r[1])):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
