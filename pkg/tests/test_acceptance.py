"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""
import pytest

from qpot import acceptance as AC
from qpot.checks import all_ok

from conftest import ACCEPTANCE

CRITERIA = [
    (1, "model invariants", "involution"),
    (2, "inequality suite", "inequalities"),
    (3, "static functional equals path action", "closure"),
    (4, "wave-diagram oracle agreement", "oracles"),
    (5, "half-line Hopf solution", "hopf"),
    (6, "envelope optimality", "envelope"),
    (7, "finite-time stationarity", "finite-time"),
    (8, "action ordering", "ordering"),
    (9, "cross-solver agreement", "cross-solver"),
]


@pytest.mark.parametrize("num,title,suite", CRITERIA, ids=[c[2] for c in CRITERIA])
def test_criterion(num, title, suite):
    results = AC.run_suite(suite)
    ok = all_ok(results)
    failed = [r for r in results if not r.ok]
    worst = failed[0] if failed else results[-1]
    line = f"{'PASS' if ok else 'FAIL'} criterion {num} ({title}): {len(results) - len(failed)}/{len(results)} checks"
    if failed:
        line += f"; first failure {worst.name}: {worst.value:.3e} {worst.detail}"
    ACCEPTANCE[num] = line
    print(line)
    for r in results:
        print("  " + r.line())
    assert ok, "\n".join(r.line() for r in failed)
