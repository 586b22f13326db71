import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ftqec.smt import find_solver  # noqa: E402

HAVE_SOLVER = find_solver() is not None
needs_solver = pytest.mark.skipif(not HAVE_SOLVER, reason="no SMT solver on PATH or in FTQEC_SOLVER")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
