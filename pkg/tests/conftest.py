import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qwlab import markov
from qwlab.numkernel import SeededRng

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def two_state_chain():
    p = markov.TransitionMatrix([[0.5, 0.5], [0.5, 0.5]])
    marked = markov.MarkedSet([1], 2)
    return markov.make_absorbing(p, marked)


def random_marked_chain(index: int, max_states: int = 12, base_seed: int = 9000):
    """Deterministic random ergodic chain with a random nonempty proper marked set."""
    gen = SeededRng(base_seed, index).generator()
    n = int(gen.integers(3, max_states + 1))
    p = markov.random_chain(n, SeededRng(base_seed + 1, index))
    size = int(gen.integers(1, n))
    members = gen.choice(n, size=size, replace=False).tolist()
    return p, markov.MarkedSet(members, n)
