"""Acceptance criteria, each run at its stated scale and tolerance.

Every test prints one ``[PASS]``/``[FAIL]`` line, and the lines are
repeated in a summary section at the end of the pytest run.
"""

from __future__ import annotations

import pytest

from ldform import suites

CRITERIA = [
    ("1 canonical forms agree with the oracle", suites.canonical_order, {}),
    ("2 word problem classes", suites.word_problem, {}),
    ("3 linear order axioms", suites.order_axioms, {}),
    ("4 sandwich and cancellation", suites.sandwich_cancellation, {}),
    ("5 confluence", suites.confluence, {}),
    ("6 division", suites.division, {}),
    ("7 sharp products by direct formulas", suites.sharp_products, {}),
    ("8 congruence under the laws", suites.congruence, {}),
    ("9 p-normal forms", suites.normal_forms, {}),
    ("10 least power above", suites.powers, {}),
]


@pytest.mark.parametrize("label,suite,kwargs", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(label, suite, kwargs, acceptance_lines):
    r = suite(**kwargs)
    line = f"criterion {label}: {r.line()}"
    acceptance_lines.append(line)
    print(line)
    if not r.passed:
        for f in r.failures[:5]:
            print("   ", f)
    assert r.passed, r.failures[:5]
