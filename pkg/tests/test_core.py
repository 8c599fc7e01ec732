import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bfs_reach, floyd_warshall
from qcut.core import (DirectedCutMetric, DirectedL1Embedding, GraphError, Quasipartition,
                       QuasimetricSpace, WeightedDigraph, ZeroOneQuasimetric, bound_check,
                       directed_cut_from_set, directed_l1_distance, directed_l1_table,
                       evaluate_embedding, identity_quasipartition, shortest_path_quasimetric,
                       stretch_report, transitive_closure, validate_quasimetric,
                       zero_one_from_quasipartition)


@st.composite
def digraphs(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, n * n))
    edges = [(draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1)),
              draw(st.integers(0, 20))) for _ in range(m)]
    return n, [e for e in edges if e[0] != e[1]]


@st.composite
def relations(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    return np.array(bits, dtype=bool).reshape(n, n)


def test_from_edges_defaults_capacity_to_one():
    g = WeightedDigraph.from_edges(2, [(0, 1, 2.5)])
    assert g.m == 1 and g.capacities[0] == 1.0


@pytest.mark.parametrize("edges", [[(0, 2, 1.0)], [(0, 1, -1.0)], [(0, 1, float("nan"))]])
def test_rejects_bad_edges(edges):
    with pytest.raises(GraphError):
        WeightedDigraph.from_edges(2, edges)


def test_arrays_are_read_only():
    g = WeightedDigraph.from_edges(2, [(0, 1, 1.0)])
    with pytest.raises(ValueError):
        g.weights[0] = 3.0


@given(digraphs())
@settings(max_examples=60, deadline=None)
def test_distances_match_floyd_warshall(case):
    n, edges = case
    g = WeightedDigraph.from_edges(n, edges)
    np.testing.assert_allclose(g.distances, floyd_warshall(n, edges), atol=1e-9)


@given(digraphs())
@settings(max_examples=60, deadline=None)
def test_shortest_path_tables_are_quasimetrics(case):
    n, edges = case
    q = shortest_path_quasimetric(WeightedDigraph.from_edges(n, edges))
    assert validate_quasimetric(q) == []


@given(digraphs())
@settings(max_examples=60, deadline=None)
def test_reachability_matches_bfs(case):
    n, edges = case
    g = WeightedDigraph.from_edges(n, edges)
    assert np.array_equal(g.reachability, bfs_reach(n, edges))


def test_validate_reports_each_axiom():
    d = np.array([[0.0, 1.0, 5.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    kinds = {v.kind for v in validate_quasimetric(d, strict=True)}
    assert kinds == {"separation", "triangle"}
    assert validate_quasimetric(np.array([[1.0]]))[0].kind == "diagonal"


def test_zero_weight_duplicates_are_allowed_only_when_not_strict():
    g = WeightedDigraph.from_edges(2, [(0, 1, 0.0), (1, 0, 0.0)])
    q = shortest_path_quasimetric(g)
    assert validate_quasimetric(q) == []
    assert not q.strict


@given(relations())
@settings(max_examples=80, deadline=None)
def test_closure_is_smallest_quasipartition(r):
    p = transitive_closure(r)
    n = r.shape[0]
    assert np.all(p.rel[r]) and np.all(np.diag(p.rel))
    Quasipartition(p.rel)  # validates reflexive + transitive
    edges = [(int(a), int(b)) for a, b in zip(*np.nonzero(r))]
    assert np.array_equal(p.rel, bfs_reach(n, edges))


@given(relations())
@settings(max_examples=80, deadline=None)
def test_zero_one_image_of_quasipartition_satisfies_triangle(r):
    z = zero_one_from_quasipartition(transitive_closure(r))
    t = z.table.astype(int)
    n = t.shape[0]
    for x in range(n):
        for y in range(n):
            assert t[x, y] <= (t[x] + t[:, y]).min()
    assert z.satisfies_triangle()


def test_quasipartition_rejects_non_transitive():
    r = np.eye(3, dtype=bool)
    r[0, 1] = r[1, 2] = True
    with pytest.raises(ValueError):
        Quasipartition(r)
    with pytest.raises(ValueError):
        zero_one_from_quasipartition(r)


def test_l1_triangle_on_random_triples():
    rng = np.random.default_rng(0)
    x, y, z = (rng.normal(size=(100000, 4)) for _ in range(3))

    def d(a, b):
        diff = a - b
        return np.sum(np.abs(diff) + diff, axis=1)

    assert np.all(d(x, y) >= 0)
    assert np.all(d(x, x) == 0)
    assert np.all(d(x, z) <= d(x, y) + d(y, z) + 1e-9)


@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3),
       st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_l1_distance_formula(x, y):
    want = sum(abs(a - b) for a, b in zip(x, y)) + sum(x) - sum(y)
    assert directed_l1_distance(x, y) == pytest.approx(want, abs=1e-9)
    assert directed_l1_distance(x, y) >= -1e-9


def test_l1_table_matches_pairwise_distance():
    c = np.random.default_rng(1).random((6, 3))
    t = directed_l1_table(c)
    for i in range(6):
        for j in range(6):
            assert t[i, j] == pytest.approx(directed_l1_distance(c[i], c[j]))


def test_every_cut_metric_is_zero_one_quasimetric():
    rng = np.random.default_rng(3)
    for n in (1, 2, 5, 17, 64):
        for _ in range(5):
            c = DirectedCutMetric(n, rng.random(n) < 0.5)
            t = c.as_zero_one().table.astype(int)
            # exhaustive triple scan: t[x, y] <= t[x, z] + t[z, y]
            assert np.all(t[:, None, :] <= t[:, :, None] + t[None, :, :])


def test_cut_metric_table():
    c = directed_cut_from_set(4, [0, 2])
    assert c.table[0, 1] == 1 and c.table[1, 0] == 0 and c.table[0, 2] == 0
    with pytest.raises(ValueError):
        directed_cut_from_set(3, [3])


def test_zero_one_table_validation():
    with pytest.raises(ValueError):
        ZeroOneQuasimetric(np.array([[1, 0], [0, 0]]))
    with pytest.raises(ValueError):
        ZeroOneQuasimetric(np.array([[0, 2], [0, 0]]))


def test_bound_check():
    g = WeightedDigraph.from_edges(3, [(0, 1, 1.0), (1, 2, 3.0)])
    q = shortest_path_quasimetric(g)
    p = transitive_closure(np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]], dtype=bool))
    rep = bound_check(p, q, 3.0)
    assert rep.max_distance == 4.0 and not rep.bounded and rep.offending == [(0, 2)]
    assert bound_check(identity_quasipartition(3), q, 0.1).bounded


def test_stretch_report_handles_infinite_and_zero_pairs():
    src = np.array([[0.0, 1.0], [np.inf, 0.0]])
    rep = stretch_report(src, np.array([[0.0, 2.0], [5.0, 0.0]]))
    assert rep.excluded_pairs == [(1, 0)] and rep.distortion == 1.0
    bad = stretch_report(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert bad.distortion == np.inf


def test_evaluate_embedding_of_a_single_cut():
    e = DirectedL1Embedding(np.array([[0.5], [0.0]]))
    q = QuasimetricSpace(np.array([[0.0, 1.0], [0.0, 0.0]]))
    rep = evaluate_embedding(e, q)
    assert rep.min_stretch == 1.0 and rep.max_stretch == 1.0
