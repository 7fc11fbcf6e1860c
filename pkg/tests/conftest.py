import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from netspectra import DirectedGraph


@pytest.fixture
def t3():
    """Two-cycle 0<->1 plus isolated dangling node 2."""
    return DirectedGraph.from_edges([(0, 1), (1, 0)], n=3)


@pytest.fixture
def two_cycles_dangling():
    """Disjoint 2-cycles {0,1} and {2,3} plus isolated dangling node 4."""
    return DirectedGraph.from_edges([(0, 1), (1, 0), (2, 3), (3, 2)], n=5)


@pytest.fixture
def nested_closure():
    """Node 2's closure {2,0,1} contains the smaller cycle {0,1}; node 4
    feeds the dangling node 3, so the core is {3,4}."""
    return DirectedGraph.from_edges(
        [(0, 1), (1, 0), (2, 0), (2, 1), (4, 3)], n=5
    )
