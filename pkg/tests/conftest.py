import numpy as np
import pytest
from hypothesis import strategies as st

from qinference.linalg import Projector, ket, outer, random_projector, random_state

UP = ket(1, 0)
DOWN = ket(0, 1)
RIGHT = ket(1, 1)
LEFT = ket(1, -1)


@pytest.fixture
def up():
    return Projector(outer(UP))


@pytest.fixture
def right():
    return Projector(outer(RIGHT))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=6)


def projector_from_seed(dim, seed, rank=None):
    rng = np.random.default_rng(seed)
    if rank is None:
        rank = int(rng.integers(0, dim + 1))
    return random_projector(dim, rank, rng)


def commuting_family(dim, seed, count=3):
    """``count`` projectors spanned by subsets of one random basis."""
    from qinference.linalg import random_unitary, projector_onto_columns

    rng = np.random.default_rng(seed)
    u = random_unitary(dim, rng)
    out = []
    for _ in range(count):
        cols = np.flatnonzero(rng.integers(0, 2, dim))
        out.append(projector_onto_columns(u[:, cols]))
    return out


def state_from_seed(dim, seed, mix=None):
    rng = np.random.default_rng(seed)
    if mix is None:
        mix = float(rng.uniform())
    return random_state(dim, mix, rng)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
