import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bidirected_cycle
from qcut.core import DirectedCutMetric, DirectedL1Embedding, ZeroOneQuasimetric
from qcut.embeddings import (ConvexCombination, combination_from_distribution, cuts_to_l1,
                             cycle_cut_distribution, cycle_cut_pairs, exact_distortion,
                             tree_cut_distribution)
from qcut.harness.checks import check_cycle, check_tree
from qcut.harness.generators import GeneratorSpec, generate
from qcut.sampling import cycle_law, tree_distribution


def test_convex_combination_validation():
    a = DirectedCutMetric(3, np.array([0]))
    with pytest.raises(ValueError):
        ConvexCombination([(a, 0.4)])
    with pytest.raises(ValueError):
        ConvexCombination([(a, 1.5), (a, -0.5)])
    with pytest.raises(ValueError):
        ConvexCombination([(a, 0.5), (DirectedCutMetric(4, np.array([0])), 0.5)])
    c = ConvexCombination([(a, 0.5), (a.as_zero_one(), 0.5)])
    assert not c.all_cuts
    with pytest.raises(ValueError):
        cuts_to_l1(c)
    np.testing.assert_array_equal(c.table(), a.table)


def test_cut_pairs_on_c4(c4):
    law = cycle_law(c4)
    lay = law.lay
    removed = np.zeros(c4.m, dtype=bool)
    removed[lay.cw_edge[0]] = True
    removed[lay.ccw_edge[2]] = True
    (cp,) = cycle_cut_pairs(law, removed)
    # clockwise arc 3 .. 0 is cut off from 1 and 2
    side = {int(lay.order[j]) for j in (3, 0)}
    assert set(np.flatnonzero(cp.side).tolist()) == side
    # the sibling of the clockwise edge adds no pair, another edge does
    removed[lay.ccw_edge[0]] = True
    assert len(cycle_cut_pairs(law, removed)) == 1
    removed[lay.ccw_edge[1]] = True
    assert len(cycle_cut_pairs(law, removed)) == 2


def test_cut_pair_sides_are_closed_under_the_relation():
    g = bidirected_cycle([1.0, 2.0, 1.0, 3.0, 1.0], [2.0, 1.0, 1.0, 1.0, 2.0])
    law = cycle_law(g)
    for mask, rel in zip(law.removed, law.relations):
        for cp in cycle_cut_pairs(law, mask):
            assert not rel[np.ix_(cp.side, ~cp.side)].any()


@pytest.mark.parametrize("n", [4, 6, 9])
def test_cycle_embeddings_within_bounds(n):
    res = check_cycle(generate(GeneratorSpec("cycle", n, seed=n)).graph)
    assert res["pass"], res
    assert res["zero_one_distortion"] <= 28
    assert res["cut_distortion"] <= 784


def test_cycle_cut_combination_rejects_large_members():
    g = generate(GeneratorSpec("cycle", 12, seed=1)).graph
    law = cycle_law(g)
    with pytest.raises(ValueError):
        cycle_cut_distribution(g, law, max_removed=0)
    with pytest.raises(ValueError):
        cycle_cut_distribution(generate(GeneratorSpec("cycle", 5, seed=1)).graph, law)


def test_zero_one_combination_of_law_matches_separation(c4):
    law = cycle_law(c4)
    combo = combination_from_distribution(law.distribution())
    np.testing.assert_allclose(combo.table(), law.separation(), atol=1e-12)


@given(st.integers(2, 10), st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_tree_l1_is_isometric_after_scaling(n, seed):
    g = generate(GeneratorSpec("tree", n, seed=seed)).graph
    combo = tree_cut_distribution(g)
    w = g.weights.sum()
    emb = cuts_to_l1(combo)
    np.testing.assert_allclose(w * emb.table(), g.distances, atol=1e-9 * w)
    assert check_tree(g)["pass"]


def test_tree_cut_combination_equals_zero_one_law():
    g = generate(GeneratorSpec("tree", 6, seed=2)).graph
    cut_table = tree_cut_distribution(g).table()
    law_table = combination_from_distribution(tree_distribution(g)).table()
    np.testing.assert_allclose(cut_table, law_table, atol=1e-12)


def test_cuts_to_l1_coordinates():
    combo = ConvexCombination([(DirectedCutMetric(3, np.array([0])), 0.25),
                               (DirectedCutMetric(3, np.array([0, 1])), 0.75)])
    emb = cuts_to_l1(combo)
    np.testing.assert_allclose(emb.coords, [[0.125, 0.375], [0, 0.375], [0, 0]])
    np.testing.assert_allclose(emb.table(), combo.table())


def test_exact_distortion_examples():
    d = np.array([[0, 1.0], [2.0, 0]])
    emb = DirectedL1Embedding(np.array([[1.0], [0.0]]))  # d_l1(0,1)=2, d_l1(1,0)=0
    res = exact_distortion(emb, d)
    assert res.distortion == np.inf
    zo = ConvexCombination([(ZeroOneQuasimetric(np.array([[0, 1], [1, 0]], dtype=np.int8)), 1.0)])
    res = exact_distortion(zo, d)
    assert res.alpha == pytest.approx(2.0) and res.distortion == pytest.approx(2.0)
    inf = np.array([[0, 1.0], [np.inf, 0]])
    res = exact_distortion(zo, inf)
    assert res.excluded_pairs == [(1, 0)] and res.distortion == pytest.approx(1.0)
