from __future__ import annotations

import sys
from collections import OrderedDict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            num, title = mark.args
            entry = _criteria.setdefault(num, {"title": title, "nodes": set(), "failed": False,
                                               "ran": 0})
            entry["nodes"].add(item.nodeid)
    for key in sorted(_criteria):
        _criteria.move_to_end(key)


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid in entry["nodes"]:
            if report.when == "call":
                entry["ran"] += 1
            if report.failed:
                entry["failed"] = True


def pytest_terminal_summary(terminalreporter):
    if not any(e["ran"] for e in _criteria.values()):
        return
    terminalreporter.section("acceptance criteria")
    for num, e in _criteria.items():
        if not e["ran"]:
            continue
        status = "FAIL" if e["failed"] else "PASS"
        terminalreporter.write_line(f"criterion {num:2d} {status}  {e['title']}")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240601)
