"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import re

CRITERIA = {
    1: "conifold kernel lattice (Hermite forms equal)",
    2: "conifold arrangement is Z inside the box",
    3: "conifold window at nu = 3/10 is {0, 1}",
    4: "conifold GKZ operators term by term",
    5: "series residuals and Pochhammer match",
    6: "closed-form generators at zero and determinants",
    7: "numeric Gauss monodromy vs closed form",
    8: "Euler equation loop transports",
    9: "Laurent K0 generators specialize to closed form",
    10: "perverse validator fixtures and fuzzing",
    11: "1D collinearity vs interval oracle",
}

_outcomes: dict[int, list[str]] = {}
_pattern = re.compile(r"test_acceptance\.py::test_c(\d\d)_")


def pytest_runtest_logreport(report):
    m = _pattern.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k, title in CRITERIA.items():
        got = _outcomes.get(k)
        if got is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(o == "passed" for o in got) else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d}  {status:7s}  {title}")
