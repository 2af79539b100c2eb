from __future__ import annotations

import numpy as np
import pytest

from trichain.graph import from_edge_list, named_graph
from trichain.statespace import build_transition_graph, enumerate_states


@pytest.fixture(scope="session")
def space6():
    return enumerate_states(6)


@pytest.fixture(scope="session")
def space8():
    return enumerate_states(8)


@pytest.fixture(scope="session")
def gstar6(space6):
    return build_transition_graph(space6)


@pytest.fixture(scope="session")
def gstar8(space8):
    return build_transition_graph(space8)


@pytest.fixture
def prism():
    return named_graph("Prism")


@pytest.fixture
def q3():
    return named_graph("Q3")


@pytest.fixture
def two_diamonds():
    """Two diamonds whose make(4 2 0 3 5) closes four triangles at once."""
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (3, 5),
             (4, 6), (4, 7), (5, 6), (5, 7), (6, 7)]
    return from_edge_list(8, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
