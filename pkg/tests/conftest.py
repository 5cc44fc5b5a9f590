import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    state = {}

    def record(number, text, ok):
        state["line"] = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
        print(state["line"])

    yield record
    if "line" not in state:
        num = int(request.node.name.split("_")[1])
        state["line"] = f"[FAIL] criterion {num}: raised before reporting"
    failed = getattr(request.node, "rep_call", None)
    if "line" in state:
        line = state["line"]
        if failed is not None and failed.failed and line.startswith("[PASS]"):
            line = "[FAIL]" + line[6:] + " (assertion failed after recording)"
        _ACCEPTANCE_LINES.append(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
