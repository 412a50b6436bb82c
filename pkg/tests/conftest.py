import numpy as np
import pytest
from hypothesis import strategies as st

from sparsesuffix.text import Text, family_text

FAMILIES = ("uniform", "periodic", "fibonacci", "equal")


def texts(max_size=60, alphabet=3):
    """Byte texts over a small alphabet (repetitive texts are the hard ones)."""
    return st.lists(st.integers(0, alphabet - 1), min_size=1, max_size=max_size).map(
        lambda xs: Text(bytes(97 + x for x in xs)))


@st.composite
def text_and_positions(draw, max_size=60, alphabet=3):
    t = draw(texts(max_size, alphabet))
    pos = draw(st.sets(st.integers(1, t.n), min_size=1, max_size=t.n))
    return t, sorted(pos)


def make_text(seed, family, n, sigma=4) -> Text:
    return family_text(np.random.default_rng(seed), family, n, sigma)


@pytest.fixture
def banana():
    return Text(b"banana")


ACCEPTANCE_LINES = []


def report(line: str) -> None:
    """Record one acceptance verdict line (echoed in the terminal summary)."""
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
