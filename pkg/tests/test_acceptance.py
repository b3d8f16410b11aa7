"""Acceptance criteria, one test each.

Every criterion records a single PASS/FAIL line (shown in the pytest terminal
summary, or printed when this file is run as a script) and then asserts.
"""
import time

import pytest

from bipswitch import checks
from bipswitch.flow import _buffer_rows

LINES: list[str] = []

CRITERIA = [
    (1, "uniqueness of the half-graph", "uniqueness", 10),
    (2, "hypercube example", "hypercube", 30),
    (3, "transfer-matrix counts equal oracle counts", "transfer", 120),
    (4, "Perron root and primitivity", "perron", 10),
    (5, "non-stability growth probe", "stability", 10),
    (6, "flow bijection on S2 and S4", "bijection", 120),
    (7, "buffer existence", "buffer", 300),
    (8, "canonical paths valid and reconstructible", "reconstruct", 600),
    (9, "encoding count bound with n-independent constant", "encoding", None),
    (10, "chain correctness and Sinclair bound", "chain", 300),
    (11, "decomposition and the three-way equivalence", "decomposition", 300),
    (12, "psi_inverse preserves switches", "psi", 30),
]


def evaluate(number, title, suite, limit):
    if suite == "reconstruct":
        checks._load.cache_clear()
    if suite == "buffer":
        _buffer_rows.cache_clear()
    t = time.perf_counter()
    results = checks.run_suite(suite)
    seconds = time.perf_counter() - t
    in_time = limit is None or seconds < limit
    passed = all(r.passed for r in results) and in_time
    budget = f" < {limit}s" if limit else ""
    details = "; ".join(f"{'ok' if r.passed else 'FAILED'} {r.name}: {r.detail}" for r in results)
    line = f"{'PASS' if passed else 'FAIL'} criterion {number} ({title}) [{seconds:.1f}s{budget}] {details}"
    return passed, in_time, line


@pytest.mark.parametrize("number,title,suite,limit", CRITERIA, ids=[f"criterion_{c[0]:02d}_{c[2]}" for c in CRITERIA])
def test_criterion(number, title, suite, limit):
    passed, in_time, line = evaluate(number, title, suite, limit)
    LINES.append(line)
    print(line)
    assert in_time, f"criterion {number} exceeded {limit}s"
    assert passed, line


if __name__ == "__main__":
    for c in CRITERIA:
        print(evaluate(*c)[2], flush=True)
