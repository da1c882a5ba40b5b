import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from lipne.poly import Polynomial

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

VARS3 = ("x", "y", "z")


@st.composite
def polynomials(draw, variables=VARS3, max_degree=4, max_terms=5, height=5, through_origin=False,
                min_terms=0):
    n = len(variables)
    lo = 1 if through_origin else 0
    count = draw(st.integers(min_terms, max_terms))
    terms = {}
    for _ in range(count):
        d = draw(st.integers(lo, max_degree))
        cuts = sorted(draw(st.lists(st.integers(0, d), min_size=n - 1, max_size=n - 1)))
        exps = [b - a for a, b in zip([0] + cuts, cuts + [d])]
        terms[tuple(exps)] = draw(st.integers(-height, height).filter(bool))
    return Polynomial(variables, terms)


def rational_terms(p: Polynomial) -> dict:
    out = {}
    for e, c in p.terms.items():
        assert c.y == 0
        out[e] = Fraction(int(c.x.numerator), int(c.x.denominator))
    return out


@pytest.fixture
def xyz():
    return VARS3


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
