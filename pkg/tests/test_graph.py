import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainwalk import (
    CapacityError,
    DimensionError,
    Shape,
    build_graph,
    build_graph_inductive,
    degree_profile,
    edge_sign,
    graph_to_json_dict,
)

entries_strategy = st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=8).map(tuple)


def classify_reference(a_entries, b_entries):
    """Independent classifier, straight from the difference-vector rule."""
    diffs = [y - x for x, y in zip(a_entries, b_entries)]
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        return None
    if any(d not in (-2, 0, 2) for d in diffs):
        return None
    for x, y in zip(nonzero, nonzero[1:]):
        if x * y > 0:
            return None
    return 1 if nonzero[0] < 0 else -1


# -- Shape --------------------------------------------------------------------


@given(entries_strategy)
def test_shape_entries_roundtrip(entries):
    s = Shape.from_entries(entries)
    assert s.entries == entries
    assert Shape.from_string(s.to_string()) == s


def test_shape_rejects_bad_input():
    with pytest.raises(ValueError):
        Shape.from_entries((1, 0, -1))
    with pytest.raises(DimensionError):
        Shape.from_entries(())
    with pytest.raises(ValueError):
        Shape.from_string("+x-")


@given(entries_strategy, st.sampled_from([-1, 1]))
def test_shape_prepend(entries, digit):
    s = Shape.from_entries(entries)
    assert s.prepend(digit).entries == (digit,) + entries


# -- edge classification ------------------------------------------------------


def test_edge_sign_examples():
    assert edge_sign(Shape.from_entries((1, 1)), Shape.from_entries((-1, 1))) == 1
    assert edge_sign(Shape.from_entries((1, -1)), Shape.from_entries((1, 1))) == -1
    assert edge_sign(Shape.from_entries((1, 1)), Shape.from_entries((-1, -1))) is None
    # double flip with alternating signs, first negative
    a, b = Shape.from_entries((1, -1)), Shape.from_entries((-1, 1))
    assert classify_reference(a.entries, b.entries) == 1
    assert edge_sign(a, b) == 1


def test_edge_sign_dimension_error():
    with pytest.raises(DimensionError):
        edge_sign(Shape.from_entries((1,)), Shape.from_entries((1, 1)))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_edge_sign_matches_reference_classifier(k):
    vertices = build_graph(k).vertices
    for a in vertices:
        for b in vertices:
            if a == b:
                continue
            assert edge_sign(a, b) == classify_reference(a.entries, b.entries)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_edge_sign_antisymmetry(k):
    vertices = build_graph(k).vertices
    for a in vertices:
        for b in vertices:
            if a == b:
                continue
            s = edge_sign(a, b)
            assert edge_sign(b, a) == (None if s is None else -s)


# -- adjacency ----------------------------------------------------------------


def test_neighbors_all_ones_k3(graphs):
    g = graphs(3)
    edges = g.neighbors(Shape.from_entries((1, 1, 1)))
    assert len(edges) == 5
    assert edges[0].is_loop and edges[0].step == 1
    assert edges[1].is_loop and edges[1].step == -1
    for e in edges[2:]:
        assert e.step == 1
        assert e.flipped_digits == 1


def test_neighbors_k1(graphs):
    g = graphs(1)
    a = Shape.from_entries((1,))
    edges = g.neighbors(a)
    assert [(e.head.entries, e.step, e.is_loop) for e in edges] == [
        ((1,), 1, True),
        ((1,), -1, True),
        ((-1,), 1, False),
    ]


def test_neighbors_k2_order(graphs):
    g = graphs(2)
    edges = g.neighbors(Shape.from_entries((1, -1)))
    assert len(edges) == 5
    moves = [(e.head.entries, e.step) for e in edges[2:]]
    assert moves == [((-1, -1), 1), ((-1, 1), 1), ((1, 1), -1)]


def test_neighbors_dimension_error(graphs):
    with pytest.raises(DimensionError):
        graphs(2).neighbors(Shape.from_entries((1, 1, 1)))


# -- construction -------------------------------------------------------------


@pytest.mark.parametrize("k", range(1, 8))
def test_build_graph_counts(k, graphs):
    g = graphs(k)
    assert len(g.vertices) == 2**k
    assert g.total_directed_edges == 2 * 3**k
    assert g.crossing_count == 3 ** (k - 1)
    assert g.degree(g.all_ones) == k + 2
    for a in g.vertices:
        loops = [e for e in g.neighbors(a) if e.is_loop]
        assert sorted(e.step for e in loops) == [-1, 1]


def test_build_graph_small_cases(graphs):
    assert graphs(1).total_directed_edges == 6
    assert graphs(2).total_directed_edges == 18
    assert graphs(2).crossing_count == 3
    assert graphs(3).total_directed_edges == 54


@pytest.mark.parametrize("k", range(1, 6))
def test_reverse_edge_present_with_opposite_sign(k, graphs):
    g = graphs(k)
    moves = {
        (e.tail, e.head, e.step)
        for a in g.vertices
        for e in g.neighbors(a)
        if not e.is_loop
    }
    for tail, head, step in moves:
        assert (head, tail, -step) in moves


def test_vertices_lexicographic(graphs):
    g = graphs(2)
    assert [s.entries for s in g.vertices] == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_capacity_errors():
    with pytest.raises(CapacityError):
        build_graph(0)
    with pytest.raises(CapacityError):
        build_graph(15)  # above the default cap
    with pytest.raises(CapacityError):
        build_graph(21, max_k=21)  # above the hard cap
    with pytest.raises(CapacityError):
        build_graph_inductive(15)
    with pytest.raises(CapacityError):
        build_graph(3, max_k=2)
    assert build_graph(3, max_k=3).k == 3


@pytest.mark.parametrize("k", range(1, 8))
def test_inductive_matches_direct(k, graphs):
    assert build_graph_inductive(k) == graphs(k)


def test_inductive_base_case():
    assert build_graph_inductive(1) == build_graph(1)


# -- degree profiles -----------------------------------------------------------


def test_degree_profile_all_ones_k3(graphs):
    g = graphs(3)
    p = degree_profile(g, Shape.from_entries((1, 1, 1)))
    assert p.plus_by_flips == (1, 3, 0, 0)
    assert p.minus_by_flips == (1, 0, 0, 0)


def test_degree_profile_k2_example(graphs):
    p = degree_profile(graphs(2), Shape.from_entries((1, -1)))
    assert p.plus_total == 3  # loop + two moves
    assert p.minus_total == 2  # loop + one move


@pytest.mark.parametrize("k", range(1, 7))
def test_one_flip_counts(k, graphs):
    g = graphs(k)
    for a in g.vertices:
        p = degree_profile(g, a)
        ups = sum(1 for d in a.entries if d == 1)
        assert p.plus_by_flips[1] == ups
        assert p.plus_by_flips[1] + p.minus_by_flips[1] == k
        assert p.plus_by_flips[0] == p.minus_by_flips[0] == 1
        assert p.plus_total == sum(p.plus_by_flips)
        assert p.plus_even + p.plus_odd == p.plus_total
        assert p.minus_even + p.minus_odd == p.minus_total


@pytest.mark.parametrize("k", range(1, 7))
def test_degree_handshake(k, graphs):
    g = graphs(k)
    total = 0
    for a in g.vertices:
        p = degree_profile(g, a)
        total += p.plus_total + p.minus_total
    assert total == 2 * 3**k


# -- serialization --------------------------------------------------------------


def test_graph_json_dump(graphs):
    doc = graph_to_json_dict(graphs(2))
    assert set(doc) == {"k", "vertices", "edges", "d_k", "delta_k"}
    assert doc["k"] == 2
    assert doc["d_k"] == 18
    assert doc["delta_k"] == 3
    assert len(doc["vertices"]) == 4
    assert len(doc["edges"]) == 18
    assert doc["vertices"][0] == [-1, -1]
    first = doc["edges"][0]
    assert first["loop"] is True and first["a"] == 1 and first["tail"] == [-1, -1]
    json.dumps(doc)  # must be JSON-serializable as is


def test_graph_json_deterministic(graphs):
    a = json.dumps(graph_to_json_dict(graphs(3)))
    b = json.dumps(graph_to_json_dict(build_graph(3)))
    assert a == b
