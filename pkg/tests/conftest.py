import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = {
    1: "qubit algebra suite",
    2: "triple-trace golden table",
    3: "qubit bracket closed forms",
    4: "Jacobi no-go",
    5: "qubit dynamics",
    6: "prime-d algebra suite",
    7: "star product equivalence",
    8: "monomial brackets",
    9: "continuum correspondence",
    10: "canonical maps",
    11: "prime-d dynamics",
    12: "difference calculus",
}

_outcomes = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[marker.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _outcomes.get(n, [])
        if not runs:
            tr.write_line(f"ACCEPTANCE {n:>2} NOT RUN  {title}")
            continue
        ok = all(p for _, p in runs)
        failed = [name for name, p in runs if not p]
        tail = f"  failing: {', '.join(failed)}" if failed else ""
        tr.write_line(f"ACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL':<8} {title} ({sum(p for _, p in runs)}/{len(runs)} tests){tail}")
