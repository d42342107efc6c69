import pytest

from hybridmem.calibration import Calibration
from hybridmem.comparison import default_scale_ladder, sweep


@pytest.fixture(scope="session")
def cal():
    return Calibration.load()


@pytest.fixture(scope="session")
def default_grid(cal):
    """Full default sweep, computed once per session."""
    results = sweep(list(cal.kernels), default_scale_ladder(), 0, cal)
    grid = {}
    for r in results:
        grid.setdefault(r.workload, []).append(r)
    return grid


_criteria: dict[int, list[str]] = {}
_titles: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            item.user_properties.append(("criterion", m.args[0]))
            _titles[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria.setdefault(crit, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        ok = all(o == "passed" for o in _criteria[n])
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {_titles[n]}")
