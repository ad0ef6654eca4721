import numpy as np
import pytest
from hypothesis import strategies as st

from spinhalf.spin import Direction, random_directions

thetas = st.floats(0.0, np.pi, allow_nan=False)
phis = st.floats(0.0, 2 * np.pi, allow_nan=False, exclude_max=True)
directions = st.builds(Direction, thetas, phis)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


@pytest.fixture
def random_triples(rng):
    n = 1000
    return list(zip(random_directions(rng, n), random_directions(rng, n), random_directions(rng, n)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
