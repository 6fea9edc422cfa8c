from __future__ import annotations

import pytest

CRITERIA = {
    1: "Hardy zeros and optimum",
    2: "Hardy conditionals",
    3: "single framework rule",
    4: "Einstein locality on the singlet",
    5: "reduced density matrix invariance",
    6: "ensemble ambiguity",
    7: "lattice correctness",
    8: "probability axioms on frameworks",
    9: "consistency gating",
    10: "dragon toy model",
    11: "Brownian density and marginal ambiguity",
    12: "CLI contract",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes.setdefault(marker.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}  {status:<7}  {title}")
