import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from lorentz_calderon.families import corpus
from lorentz_calderon.params import derive
from lorentz_calderon.stepfn import StepFunction

FIXTURES = Path(__file__).parent / "fixtures"

# (p0, q0, p1, q1, q); the first is the reference set, the third is in regime B
PARAM_SETS = [(2, 2, 2, 2, 4), (2, 1, 2, 2, 4), (2, 2, 4, 2, 4), (3, 1, 2, 3, 5)]


@pytest.fixture(scope="session")
def reference():
    return derive(2, 2, 2, 2, 4)


@pytest.fixture(scope="session")
def mixed_corpus():
    return corpus(0, 20)


@pytest.fixture(scope="session")
def monotone_corpus():
    return corpus(9, 20, monotone_only=True)


@pytest.fixture(scope="session")
def calibrated():
    with open(FIXTURES / "calibrated_constants.json") as fh:
        return json.load(fh)


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@st.composite
def step_functions(draw, max_cells=12, monotone=False):
    n = draw(st.integers(1, max_cells))
    lengths = draw(st.lists(st.floats(1e-2, 10.0), min_size=n, max_size=n))
    values = draw(st.lists(st.floats(0.0, 100.0), min_size=n, max_size=n))
    if monotone:
        values = sorted(values, reverse=True)
    return StepFunction(np.cumsum(lengths), values)
