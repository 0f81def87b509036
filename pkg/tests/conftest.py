import random

import pytest
from hypothesis import settings, strategies as st

from henselqf.dsl import parse_element, parse_field, parse_form
from henselqf.oracle import random_element

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

TOWERS = ["GF(5)((t))", "GF(3)((t))((s))", "GF(9)((t))", "Qp(3)((t))", "RCF((t))((s))", "GF(7)((t:Q))((s))"]


def F(src):
    return parse_field(src)


def E(src, K):
    return parse_element(src, K if not isinstance(K, str) else F(K))


def Q(src, K):
    return parse_form(src, K if not isinstance(K, str) else F(K))


@st.composite
def elements(draw, field_src=None, nonzero=True):
    src = field_src or draw(st.sampled_from(TOWERS))
    K = F(src)
    rng = random.Random(draw(st.integers(0, 2**32)))
    a = random_element(K, rng)
    if not nonzero and draw(st.booleans()):
        return K.zero()
    return a


@pytest.fixture
def gf5t():
    return F("GF(5)((t))")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
