import random
from datetime import datetime

import pytest

from cohort_audit import synthetic

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        status, title = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>2}: {status}  {title}")


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def demo_root(tmp_path):
    return synthetic.write_cohort(tmp_path / "demo", synthetic.demo_students())


@pytest.fixture(scope="session")
def phase1_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("phase1")
    return synthetic.write_cohort(root, synthetic.phase1_students())


@pytest.fixture
def chat_17min():
    return "[2024-04-02 10:00] USER: Hola, empecemos.\n[2024-04-02 10:17] TUTOR: Resumen de la sesión.\n"


@pytest.fixture
def chat_150min():
    return synthetic.transcript(datetime(2024, 5, 10, 9, 0), 150, 12)
