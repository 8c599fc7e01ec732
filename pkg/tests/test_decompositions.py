import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import floyd_warshall
from qcut.core import QuasimetricSpace, WeightedDigraph
from qcut.decompositions import (DecompositionError, PathDecomposition, TreeDecomposition,
                                 as_path_of_cliques, build_complementary, canonicalize,
                                 classify_child_path, complementary_violations,
                                 embed_hexagon_tree, embed_path_of_cliques,
                                 exact_pathwidth_decomposition, is_canonical, path_vertices,
                                 treewidth2_decomposition, verify_isometry)
from qcut.harness.checks import check_canonical, pathwidth_host
from qcut.harness.generators import GeneratorSpec, generate


def bidirected(n, pairs, w=1.0):
    return WeightedDigraph.from_edges(n, [e for a, b in pairs for e in ((a, b, w), (b, a, w))])


def child_path_between(h, a, b):
    """The registered child path whose parent edge joins source vertices a -> b."""
    o = h.origin
    for e, ps in h.child_paths.items():
        if (o[h.host.tails[e]], o[h.host.heads[e]]) == (a, b):
            return e, ps[0]
    raise KeyError((a, b))


# --------------------------------------------------------------------------
# decompositions
# --------------------------------------------------------------------------


def test_tree_decomposition_axioms_detect_problems():
    g = bidirected(4, [(0, 1), (1, 2), (2, 3)])
    good = TreeDecomposition(((0, 1), (1, 2), (2, 3)), (-1, 0, 1))
    assert good.validate(g) == []
    assert good.width == 1
    missing = TreeDecomposition(((0, 1), (2, 3)), (-1, 0))
    assert any("edge" in s for s in missing.validate(g))
    broken = TreeDecomposition(((0, 1), (1, 2), (0, 3), (2, 3)), (-1, 0, 1, 2))
    assert broken.validate(g)


@pytest.mark.parametrize("seed", range(10))
def test_generated_certificates_validate(seed):
    sp = generate(GeneratorSpec("series-parallel", 20, seed=seed))
    assert sp.tree_decomposition.validate(sp.graph) == []
    assert sp.tree_decomposition.width <= 2
    pw = generate(GeneratorSpec("pathwidth-k", 12, seed=seed, k=2))
    assert pw.path_decomposition.validate(pw.graph) == []
    assert pw.path_decomposition.width <= 2


@pytest.mark.parametrize("seed", range(5))
def test_treewidth2_decomposition_of_generated_graph(seed):
    g = generate(GeneratorSpec("series-parallel", 15, seed=seed)).graph
    td = treewidth2_decomposition(g)
    assert td.validate(g) == [] and td.width <= 2


def test_treewidth2_decomposition_rejects_k4():
    g = bidirected(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    with pytest.raises(DecompositionError):
        treewidth2_decomposition(g)


@pytest.mark.parametrize("pairs,width", [
    ([(0, 1), (1, 2), (2, 3)], 1),
    ([(0, 1), (1, 2), (2, 3), (3, 0)], 2),
    ([(0, 1), (0, 2), (0, 3), (0, 4)], 1),
    ([(a, b) for a in range(4) for b in range(a + 1, 4)], 3),
])
def test_exact_pathwidth(pairs, width):
    g = bidirected(max(max(p) for p in pairs) + 1, pairs)
    pd = exact_pathwidth_decomposition(g)
    assert pd.validate(g) == [] and pd.width == width


# --------------------------------------------------------------------------
# trees of hexagons
# --------------------------------------------------------------------------


def test_single_triangle_gives_one_hexagon():
    g = WeightedDigraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)])
    h = embed_hexagon_tree(g)
    assert len(h.hexagons) == 1 and h.host.n == 6
    assert h.isometry_error() == 0.0
    assert sorted(h.origin.tolist()) == [0, 0, 1, 1, 2, 2]


def test_duplicates_are_joined_both_ways_at_zero_weight():
    g = generate(GeneratorSpec("series-parallel", 9, seed=4)).graph
    h = embed_hexagon_tree(g)
    host = h.host
    for hx in h.hexagons:
        for a, b in (("u'", "u''"), ("v'", "v''"), ("w'", "w''")):
            x, y = hx.roles[a], hx.roles[b]
            assert host.distances[x, y] == 0 and host.distances[y, x] == 0


def test_two_triangles_sharing_an_edge():
    g = bidirected(4, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)], 3.0)
    td = TreeDecomposition(((0, 1, 2), (1, 2, 3)), (-1, 0))
    h = embed_hexagon_tree(g, td)
    assert len(h.hexagons) == 2
    assert sum(len(ps) for ps in h.child_paths.values()) == 2
    assert h.isometry_error() == 0.0


def test_k4_minus_edge_random_weights():
    rng = np.random.default_rng(5)
    pairs = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
    edges = [(a, b, float(rng.integers(1, 11))) for x, y in pairs for a, b in ((x, y), (y, x))]
    g = WeightedDigraph.from_edges(4, edges)
    h = embed_hexagon_tree(g)
    host_d = h.host.distances[np.ix_(h.embed, h.embed)]
    np.testing.assert_allclose(host_d, floyd_warshall(4, edges), atol=1e-9)


def test_missing_directions_are_completed_with_distances():
    g = WeightedDigraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)])
    h = embed_hexagon_tree(g)
    o = h.origin
    # the completed edge 1 -> 0 must weigh d(1, 0) = 2
    w = [h.host.weights[e] for e in range(h.host.m)
         if (o[h.host.tails[e]], o[h.host.heads[e]]) == (1, 0)]
    assert w and min(w) == 2.0


@pytest.mark.parametrize("seed", range(15))
def test_hexagon_embedding_is_isometric(seed):
    inst = generate(GeneratorSpec("series-parallel", 5 + 2 * seed, seed=seed))
    h = embed_hexagon_tree(inst.graph, inst.tree_decomposition)
    assert h.isometry_error() <= 1e-9
    assert set(h.origin.tolist()) == set(range(inst.graph.n))


def test_rejects_wide_decomposition():
    g = bidirected(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    with pytest.raises(DecompositionError):
        embed_hexagon_tree(g, TreeDecomposition(((0, 1, 2, 3),), (-1,)))


# --------------------------------------------------------------------------
# canonical form
# --------------------------------------------------------------------------


def _triangle_pair(w12, w21):
    edges = [(1, 0, 1.0), (0, 2, 2.0), (1, 2, w12), (2, 1, w21), (2, 0, 1.0), (0, 1, 1.0),
             (1, 3, 9.0), (3, 1, 9.0), (2, 3, 9.0), (3, 2, 9.0)]
    g = WeightedDigraph.from_edges(4, edges)
    return embed_hexagon_tree(g, TreeDecomposition(((1, 2, 3), (0, 1, 2)), (-1, 0)))


def test_classification_rules():
    h = _triangle_pair(2.0, 1.0)
    e, p = child_path_between(h, 1, 2)
    assert h.host.weights[e] == 2.0 and h.path_length(p) == 3.0
    assert classify_child_path(h, e, p) == "neither"
    e2, p2 = child_path_between(h, 2, 1)
    assert h.host.weights[e2] == 1.0 and h.path_length(p2) == 2.0
    assert classify_child_path(h, e2, p2) == "slack"
    h3 = _triangle_pair(3.0, 2.0)
    e3, p3 = child_path_between(h3, 1, 2)
    assert classify_child_path(h3, e3, p3) == "tight"


def test_canonicalize_rescales_neither_paths_to_tight():
    h = _triangle_pair(2.0, 1.0)
    e, p = child_path_between(h, 1, 2)
    before = h.host.weights[list(p.edges)]
    hc, rep = canonicalize(h)
    assert rep.rescaled_paths == 1
    assert classify_child_path(hc, e, p) == "tight"
    np.testing.assert_allclose(hc.host.weights[list(p.edges)], before * 2.0 / 3.0)
    e2, p2 = child_path_between(h, 2, 1)
    np.testing.assert_array_equal(hc.host.weights[list(p2.edges)], h.host.weights[list(p2.edges)])


def test_canonicalize_is_a_fixpoint():
    inst = generate(GeneratorSpec("series-parallel", 12, seed=1))
    hc, _ = canonicalize(embed_hexagon_tree(inst.graph))
    again, rep = canonicalize(hc)
    assert rep.rescaled_paths == 0 and rep.distortion == 1.0
    np.testing.assert_array_equal(again.host.weights, hc.host.weights)


@pytest.mark.parametrize("seed", range(10))
def test_canonical_invariants(seed):
    res = check_canonical(generate(GeneratorSpec("series-parallel", 20, seed=seed)))
    assert res["pass"], res


# --------------------------------------------------------------------------
# complementary structure
# --------------------------------------------------------------------------


def test_single_hexagon_complementary_paths():
    g = WeightedDigraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0),
                                       (1, 0, 4.0), (2, 1, 4.0), (0, 2, 4.0)])
    hc, _ = canonicalize(embed_hexagon_tree(g))
    cs = build_complementary(hc)
    x, li = cs.x, cs.leaf_vertex[0]
    d = hc.host.distances
    p = cs.p[0]
    assert path_vertices(hc.host, p, x)[-1] == li
    assert sum(hc.host.weights[e] for e in p) == pytest.approx(d[x, li])
    hat = cs.p_hat[0]
    assert hat is not None and not set(hat) & set(p)
    verts = path_vertices(hc.host, hat, x)
    assert verts[0] == x and verts[-1] == li


@pytest.mark.parametrize("seed", range(12))
def test_leaf_paths_intersect_in_paths(seed):
    inst = generate(GeneratorSpec("series-parallel", 18, seed=seed))
    hc, _ = canonicalize(embed_hexagon_tree(inst.graph, inst.tree_decomposition))
    cs = build_complementary(hc)
    assert complementary_violations(hc, cs) == []


def _disagreements(hc, cs, hats_only):
    g = hc.host
    bad = 0
    for hats, mask, dist in ((cs.p_hat, cs.p_bar_mask, cs.dist_p_bar),
                             (cs.q_hat, cs.q_bar_mask, cs.dist_q_bar)):
        for e in np.flatnonzero(mask.sum(axis=0) > 1):
            rows = [r for r in np.flatnonzero(mask[:, e])
                    if not hats_only or (hats[r] is not None and e in hats[r])]
            if len(rows) < 2:
                continue
            for v in (g.tails[e], g.heads[e]):
                vals = dist[rows, v]
                bad += not np.allclose(vals, vals[0], atol=1e-9)
    return bad


def _instances():
    for s in range(40):
        for n in (8, 15, 25):
            inst = generate(GeneratorSpec("series-parallel", n, seed=s))
            hc, _ = canonicalize(embed_hexagon_tree(inst.graph, inst.tree_decomposition))
            yield hc, build_complementary(hc)


def test_shared_complementary_path_edges_have_equal_distances():
    assert sum(_disagreements(hc, cs, True) for hc, cs in _instances()) == 0


@pytest.mark.xfail(strict=True, reason="zero-weight duplicate edges give different flattened "
                                       "routes on about 15% of instances; see the ledger")
def test_shared_flattened_edges_have_equal_distances():
    assert sum(_disagreements(hc, cs, False) for hc, cs in _instances()) == 0


# --------------------------------------------------------------------------
# paths of cliques
# --------------------------------------------------------------------------


def test_bidirected_path_on_three_vertices():
    g = bidirected(3, [(0, 1), (1, 2)], 2.0)
    pc = embed_path_of_cliques(g, PathDecomposition(((0, 1), (1, 2))))
    assert pc.k == 2 and pc.structure_violations() == []
    assert pc.isometry_error() == 0.0


def test_single_bag_is_duplicated():
    g = bidirected(2, [(0, 1)])
    pc = embed_path_of_cliques(g, PathDecomposition(((0, 1),)))
    assert pc.length == 2 and pc.structure_violations() == []
    assert pc.isometry_error() == 0.0


def test_path_of_cliques_is_its_own_host():
    g = bidirected(4, [(0, 1), (1, 2), (2, 3)], 1.5)
    pc = as_path_of_cliques(g, [(0,), (1,), (2,), (3,)])
    np.testing.assert_array_equal(pc.host.distances, g.distances)
    np.testing.assert_array_equal(pc.host.weights, g.distances[g.tails, g.heads])
    with pytest.raises(DecompositionError):
        as_path_of_cliques(g, [(0, 1), (2, 3)])


@given(st.integers(0, 10_000), st.sampled_from([1, 2, 3]), st.integers(4, 14))
@settings(max_examples=25, deadline=None)
def test_paths_of_cliques_are_isometric(seed, k, n):
    inst, pc = pathwidth_host(n, k, seed)
    assert pc.k == k
    assert pc.structure_violations() == []
    assert pc.isometry_error() <= 1e-9


def test_verify_isometry_identity():
    d = generate(GeneratorSpec("cycle", 6, seed=0)).graph.distances
    q = QuasimetricSpace(d)
    assert verify_isometry(q, q, np.arange(6)) == 0.0
    with pytest.raises(ValueError):
        verify_isometry(q, q, np.arange(5))


def test_canonical_flag():
    inst = generate(GeneratorSpec("series-parallel", 10, seed=2))
    hc, _ = canonicalize(embed_hexagon_tree(inst.graph))
    assert is_canonical(hc)
