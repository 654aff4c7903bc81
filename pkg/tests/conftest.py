"""
Shared fixtures for the test suite
"""

from itertools import combinations

import pytest

from src.core.hypergraph import Hypergraph
from src.core.models import GenSpec
from src.structures.generators import random_kgraph


@pytest.fixture
def complete():
    """Factory for the complete k-graph on n vertices"""
    def build(k: int, n: int) -> Hypergraph:
        return Hypergraph(k, n, list(combinations(range(n), k)))
    return build


@pytest.fixture
def random_graph():
    """Factory for seeded binomial random k-graphs"""
    def build(k: int, n: int, p: float, seed: int = 0) -> Hypergraph:
        return random_kgraph(GenSpec(k=k, n=n, p=p, seed=seed))
    return build


@pytest.fixture
def fano():
    """Fano plane: 7 points, 7 lines, any two lines meet in exactly one point"""
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return Hypergraph(3, 7, lines)
