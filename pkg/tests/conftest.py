import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

FIXTURES = HERE / "fixtures"


def fixture_code(name: str):
    from wirtgraph.cli import split_codes
    from wirtgraph.gauss import parse

    (chunk,) = split_codes((FIXTURES / name).read_text(), name)
    return parse(chunk.text)


def fixture_diagram(name: str):
    from wirtgraph.diagram import build_diagram

    return build_diagram(fixture_code(name))


SINGLE_FIXTURES = sorted(p.name for p in FIXTURES.iterdir() if p.suffix in (".sg", ".lk") and p.name != "links2.lk")


@pytest.fixture(params=SINGLE_FIXTURES)
def named_fixture(request):
    return request.param, fixture_diagram(request.param)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: (int(s.split()[1].rstrip(":")), s)):
            terminalreporter.write_line(line)
