from pathlib import Path

import pytest

from hqmap.hfqasm import parse
from hqmap.qmdg import build_qmdg
from hqmap.requp import STEANE_713
from hqmap.tables import unit_latencies

DATA = Path(__file__).parent / "data"


@pytest.fixture
def fredkin_text() -> str:
    return (DATA / "fredkin.hfq").read_text()


@pytest.fixture
def fredkin_ast(fredkin_text):
    return parse(fredkin_text)


@pytest.fixture
def toffoli(fredkin_ast):
    """QMDG of the Toffoli module with unit gate latencies."""
    return build_qmdg(fredkin_ast.module("Toffoli"), STEANE_713, unit_latencies())


# acceptance criteria report their verdicts here; printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
