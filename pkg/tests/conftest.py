import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from isobisect.fixtures import circular_ladder, cubic_graphs, named
from isobisect.harness import random_cubic

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def small_cubic(draw, max_n=12):
    """A bundled connected cubic graph on at most ``max_n`` vertices."""
    n = draw(st.sampled_from([k for k in (4, 6, 8, 10, 12) if k <= max_n]))
    graphs = cubic_graphs(n)
    return graphs[draw(st.integers(0, len(graphs) - 1))]


@st.composite
def random_cubic_graph(draw, min_n=4, max_n=60):
    n = 2 * draw(st.integers(min_n // 2, max_n // 2))
    return random_cubic(n, draw(st.integers(0, 10_000)))


@pytest.fixture(scope="session")
def foster():
    return named("foster")


@pytest.fixture(scope="session")
def petersen():
    return named("petersen")


@pytest.fixture(scope="session")
def k4():
    return named("k4")


@pytest.fixture(scope="session")
def k33():
    return named("k33")


@pytest.fixture(scope="session")
def prism():
    return named("prism")


@pytest.fixture(scope="session")
def cl40():
    return circular_ladder(40)
