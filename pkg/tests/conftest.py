from __future__ import annotations

import pytest

from msoexpand.omega import SearchBudget
from msoexpand.types import TypeTable

# One registry for the whole run: types are interned, so sharing it keeps
# identifiers comparable across tests and avoids recomputing memo tables.
_TABLE = TypeTable()


@pytest.fixture(scope="session")
def tt() -> TypeTable:
    return _TABLE


@pytest.fixture(scope="session")
def budget() -> SearchBudget:
    return SearchBudget()


# -- acceptance summary: one line per criterion --------------------------------

_ACCEPTANCE: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_ac" not in report.nodeid:
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.split("::")[-1]
    criterion = name.split("_")[1].upper()
    if hasattr(report, "wasxfail"):
        outcome = "XFAIL" if report.skipped else "XPASS"
    else:
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
    _ACCEPTANCE.setdefault(criterion, []).append(f"{outcome} {name} ({report.duration:.1f}s)")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE, key=lambda c: int(c[2:])):
        results = _ACCEPTANCE[criterion]
        ok = all(r.startswith(("PASS", "XFAIL")) for r in results)
        terminalreporter.write_line(f"{criterion}: {'PASS' if ok else 'FAIL'}")
        for r in results:
            terminalreporter.write_line(f"    {r}")
