from __future__ import annotations

import pytest
from hypothesis import strategies as st

from ldform.terms import X, app, comp

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def terms_strategy(max_leaves: int = 6, with_comp: bool = True):
    def extend(children):
        ops = [st.builds(app, children, children)]
        if with_comp:
            ops.append(st.builds(comp, children, children))
        return st.one_of(ops)
    return st.recursive(st.just(X), extend, max_leaves=max_leaves)


@pytest.fixture
def acceptance_lines():
    return ACCEPTANCE_LINES
