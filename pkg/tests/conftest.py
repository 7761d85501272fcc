import pytest

from bistable_valve.materials import MaterialModel
from bistable_valve.shell import ShellGeometry


@pytest.fixture
def geom():
    return ShellGeometry(outer_radius=8.0, inner_radius=4.0, thickness=1.0, slope_angle=45.0)


@pytest.fixture
def mat():
    return MaterialModel(1.65)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, with the measured figures."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" or "test_acceptance.py" not in rep.nodeid:
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome.upper()[:4], props.get("detail", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {number}: {status}  {detail}")
