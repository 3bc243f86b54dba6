import numpy as np
import pytest

from arcwidom.conformal import map_arc
from arcwidom.geometry import ArcSpec
from arcwidom.potential import equilibrium_data, szego_data

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def interval():
    return ArcSpec("segment", A=-1, B=1)


@pytest.fixture(scope="session")
def quarter():
    return ArcSpec("circular-arc", r=1.0, alpha=np.pi / 2)


@pytest.fixture(scope="session")
def parabola():
    return ArcSpec("parametric", x=[0, 1], y=[0.3, 0, -0.3])


@pytest.fixture(scope="session")
def interval_map(interval):
    return map_arc(interval)


@pytest.fixture(scope="session")
def quarter_map(quarter):
    return map_arc(quarter)


@pytest.fixture(scope="session")
def parabola_map(parabola):
    return map_arc(parabola)


@pytest.fixture(scope="session")
def interval_eq(interval_map):
    return equilibrium_data(interval_map, 1024)


@pytest.fixture(scope="session")
def quarter_eq(quarter_map):
    return equilibrium_data(quarter_map, 1024)


@pytest.fixture(scope="session")
def parabola_eq(parabola_map):
    return equilibrium_data(parabola_map, 1024)


@pytest.fixture(scope="session")
def interval_sz(interval_eq):
    return szego_data(interval_eq)


@pytest.fixture(scope="session")
def quarter_sz(quarter_eq):
    return szego_data(quarter_eq)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
