"""File formats: edge lists, orderings, graph6, matrices, chains, summaries."""

from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gbwishart import Graph, Ordering, complete_graph, cycle_graph, grid_graph
from gbwishart.fileio import (
    FileFormatError,
    chain_labels,
    graph_to_graph6,
    parse_graph6,
    read_chain_csv,
    read_edge_list,
    read_graph6,
    read_matrix,
    read_ordering,
    tracked_entries,
    write_chain_csv,
    write_edge_list,
    write_graph6,
    write_matrix,
    write_ordering,
    write_summary_json,
)

from conftest import connected_graph_st


# ---------------------------------------------------------------------------
# edge lists


def test_edge_list_round_trip(tmp_path):
    g = grid_graph(3, 3)
    path = str(tmp_path / "g.edges")
    write_edge_list(g, path)
    assert read_edge_list(path) == g


def test_edge_list_comments_and_blank_lines(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("# a triangle\n\n3\n1 2  # first\n2 3\n1 3\n")
    g = read_edge_list(str(path))
    assert g == complete_graph(3)


@pytest.mark.parametrize(
    "body, lineno",
    [
        ("", 1),
        ("x\n1 2\n", 1),
        ("3\n1\n", 2),
        ("3\n1 2 3\n", 2),
        ("3\n1 4\n", 2),
        ("3\n2 2\n", 2),
        ("0\n", 1),
    ],
)
def test_edge_list_errors_carry_line_numbers(tmp_path, body, lineno):
    path = tmp_path / "bad.edges"
    path.write_text(body)
    with pytest.raises(FileFormatError) as exc:
        read_edge_list(str(path))
    assert f":{lineno}:" in str(exc.value)


@given(connected_graph_st(min_p=1, max_p=7))
@settings(max_examples=50)
def test_edge_list_round_trip_property(tmp_path_factory, g):
    path = str(tmp_path_factory.mktemp("el") / "g.edges")
    write_edge_list(g, path)
    assert read_edge_list(path) == g


# ---------------------------------------------------------------------------
# orderings


def test_ordering_round_trip(tmp_path):
    sigma = Ordering.from_elimination([3, 1, 4, 2])
    path = str(tmp_path / "o.txt")
    write_ordering(sigma, path)
    assert read_ordering(path, 4) == sigma


def test_ordering_errors(tmp_path):
    path = tmp_path / "o.txt"
    path.write_text("1 2 2\n")
    with pytest.raises(FileFormatError):
        read_ordering(str(path), 3)
    path.write_text("1 2\n")
    with pytest.raises(FileFormatError):
        read_ordering(str(path), 3)
    path.write_text("1 2 3\n1 2 3\n")
    with pytest.raises(FileFormatError):
        read_ordering(str(path), 3)


# ---------------------------------------------------------------------------
# graph6


def test_graph6_k4_is_standard_string():
    assert graph_to_graph6(complete_graph(4)) == "C~"
    assert parse_graph6("C~") == complete_graph(4)


def test_graph6_known_small_strings():
    # single vertex, single edge, path on 3 vertices
    assert graph_to_graph6(Graph.of(1, [])) == "@"
    assert graph_to_graph6(Graph.of(2, [(1, 2)])) == "A_"
    assert parse_graph6("A_") == Graph.of(2, [(1, 2)])


def test_graph6_header_tolerated():
    assert parse_graph6(">>graph6<<C~") == complete_graph(4)


def test_graph6_long_form_round_trip():
    g = cycle_graph(70)
    s = graph_to_graph6(g)
    assert s.startswith("~")
    assert parse_graph6(s) == g


@given(connected_graph_st(min_p=1, max_p=7))
@settings(max_examples=100)
def test_graph6_round_trip_property(g):
    assert parse_graph6(graph_to_graph6(g)) == g


def test_graph6_file_round_trip_and_errors(tmp_path):
    graphs = [complete_graph(4), cycle_graph(5), Graph.of(1, [])]
    path = str(tmp_path / "gs.g6")
    write_graph6(graphs, path)
    assert read_graph6(path) == graphs

    bad = tmp_path / "bad.g6"
    bad.write_text("C~\nC\x07\n")
    with pytest.raises(FileFormatError) as exc:
        read_graph6(str(bad))
    assert ":2:" in str(exc.value)

    trunc = tmp_path / "trunc.g6"
    trunc.write_text("C\n")  # promises 4 vertices, no data bytes
    with pytest.raises(FileFormatError) as exc:
        read_graph6(str(trunc))
    assert ":1:" in str(exc.value)


# ---------------------------------------------------------------------------
# matrices


def test_matrix_round_trip_17_digits(tmp_path):
    rng = np.random.default_rng(7)
    a = rng.standard_normal((5, 5))
    a = a + a.T
    path = str(tmp_path / "m.csv")
    write_matrix(a, path)
    b = read_matrix(path, symmetric=True)
    assert np.array_equal(a, b)


def test_matrix_exact_third_round_trip(tmp_path):
    a = np.array([[1 / 3, 2.0], [2.0, 1e-17]])
    path = str(tmp_path / "m.csv")
    write_matrix(a, path)
    assert np.array_equal(read_matrix(path), a)


def test_matrix_symmetry_enforced(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1.0,2.0\n2.1,1.0\n")
    with pytest.raises(FileFormatError):
        read_matrix(str(path), symmetric=True)
    # asymmetric fine when not requested
    a = read_matrix(str(path))
    assert a[1, 0] == 2.1


def test_matrix_errors(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(FileFormatError) as exc:
        read_matrix(str(path))
    assert ":2:" in str(exc.value)
    path.write_text("1.0,x\n")
    with pytest.raises(FileFormatError):
        read_matrix(str(path))
    path.write_text("1.0,2.0,3.0\n4.0,5.0,6.0\n")
    with pytest.raises(FileFormatError):
        read_matrix(str(path), symmetric=True)  # not square


# ---------------------------------------------------------------------------
# chain CSV


def test_tracked_entries_diag_plus_edges_row_major():
    g = cycle_graph(4)
    assert tracked_entries(g) == [
        (1, 1),
        (1, 2),
        (1, 4),
        (2, 2),
        (2, 3),
        (3, 3),
        (3, 4),
        (4, 4),
    ]
    assert chain_labels(g)[:3] == ["w_1_1", "w_1_2", "w_1_4"]


def test_chain_csv_round_trip(tmp_path):
    g = cycle_graph(4)
    rng = np.random.default_rng(3)
    draws = rng.standard_normal((6, 4, 4))
    draws = draws + draws.transpose(0, 2, 1)
    iters = np.arange(10, 16)
    path = str(tmp_path / "chain.csv")
    write_chain_csv(path, g, iters, draws)
    labels, got_iters, got = read_chain_csv(path)
    assert labels == chain_labels(g)
    assert np.array_equal(got_iters, iters)
    entries = tracked_entries(g)
    expected = np.array([[d[i - 1, j - 1] for i, j in entries] for d in draws])
    assert np.array_equal(got, expected)


# ---------------------------------------------------------------------------
# summaries


def test_summary_json_schema_and_numpy_coercion(tmp_path):
    path = str(tmp_path / "s.json")
    write_summary_json(
        path,
        {
            "mean": np.eye(2),
            "seed": np.int64(5),
            "rate": np.float64(0.25),
        },
    )
    with open(path) as fh:
        doc = json.load(fh)
    assert doc["schema"] == "gbw-summary/1"
    assert doc["mean"] == [[1.0, 0.0], [0.0, 1.0]]
    assert doc["seed"] == 5 and doc["rate"] == 0.25
