"""Shared fixtures and strategies for the test suite."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import strategies as st

from gbwishart import (
    Graph,
    Ordering,
    OrderedGraph,
    complete_graph,
    cycle_graph,
    expand_max_vertex,
    grid_graph,
    path_graph,
    star_graph,
)


def star_ordered(p: int) -> OrderedGraph:
    """Star on p vertices ordered center-last (a perfect elimination order)."""
    elim = list(range(2, p + 1)) + [1]
    return OrderedGraph(star_graph(p), Ordering.from_elimination(elim))


def hub_graph_small() -> OrderedGraph:
    """Four stars whose centers form a 4-cycle, the shape used for hub data."""
    base = OrderedGraph.natural(cycle_graph(4))
    parts = [star_ordered(3), star_ordered(2), star_ordered(4), star_ordered(3)]
    return expand_max_vertex(base, parts)


@pytest.fixture(scope="session")
def gb_corpus() -> list[tuple[str, OrderedGraph]]:
    """Named ordered graphs known to satisfy the generalized Bartlett property."""
    return [
        ("cycle4", OrderedGraph.natural(cycle_graph(4))),
        ("cycle5", OrderedGraph.natural(cycle_graph(5))),
        ("cycle7", OrderedGraph.natural(cycle_graph(7))),
        ("cycle12", OrderedGraph.natural(cycle_graph(12))),
        ("path6", OrderedGraph.natural(path_graph(6))),
        ("complete5", OrderedGraph.natural(complete_graph(5))),
        ("star5", star_ordered(5)),
        ("grid4x2", OrderedGraph.natural(grid_graph(4, 2))),
        ("grid5x3", OrderedGraph.natural(grid_graph(5, 3))),
        ("hub", hub_graph_small()),
    ]


@st.composite
def connected_graph_st(draw, min_p: int = 1, max_p: int = 7):
    """Random connected graph: a random spanning tree plus extra edges."""
    p = draw(st.integers(min_p, max_p))
    if p == 1:
        return Graph.of(1, [])
    perm = draw(st.permutations(list(range(1, p + 1))))
    edges = set()
    for i in range(1, p):
        j = draw(st.integers(0, i - 1))
        edges.add(tuple(sorted((perm[i], perm[j]))))
    all_pairs = list(itertools.combinations(range(1, p + 1), 2))
    extra = draw(st.lists(st.sampled_from(all_pairs), max_size=2 * p))
    edges.update(tuple(sorted(e)) for e in extra)
    return Graph.of(p, sorted(edges))


@st.composite
def ordered_graph_st(draw, min_p: int = 1, max_p: int = 7):
    g = draw(connected_graph_st(min_p, max_p))
    ranks = draw(st.permutations(list(range(1, g.p + 1))))
    return OrderedGraph(g, Ordering(tuple(ranks)))
