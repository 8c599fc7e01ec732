import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_cuts, floyd_warshall
from qcut.core import WeightedDigraph
from qcut.cuts import (CutInstance, brute_force_multicut, brute_force_sparsest_cut,
                       lp_feasibility, round_multicut, round_sparsest_cut, separated_pairs,
                       solve_multicut_lp, solve_sparsest_cut_lp, sparsity)
from qcut.harness.generators import GeneratorSpec, generate
from qcut.harness.pipelines import pathwidth_support, tw2_samples


def graph(n, edges):
    return WeightedDigraph.from_edges(n, edges)


def test_single_edge_multicut():
    g = graph(2, [(0, 1, 1.0, 3.0)])
    inst = CutInstance(g, [(0, 1)], [1.0])
    frac = solve_multicut_lp(inst)
    assert frac.objective == pytest.approx(3.0)
    assert brute_force_multicut(inst).cost == 3.0


def test_two_parallel_paths():
    g = graph(4, [(0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0)])
    inst = CutInstance(g, [(0, 3)], [1.0])
    frac = solve_multicut_lp(inst)
    assert frac.objective == pytest.approx(2.0)
    assert lp_feasibility(inst, frac, "multicut") >= 1 - 1e-9
    assert brute_force_multicut(inst).cost == 2.0


def test_c4_sparsest_cut(c4):
    inst = CutInstance.uniform(c4)
    frac = solve_sparsest_cut_lp(inst)
    assert frac.objective == pytest.approx(0.5)
    assert lp_feasibility(inst, frac, "sparsest") == pytest.approx(1.0)
    assert brute_force_sparsest_cut(inst).sparsity == pytest.approx(0.5)


def test_instance_validation(c4):
    with pytest.raises(ValueError):
        CutInstance(c4, [(0, 0)], [1.0])
    with pytest.raises(ValueError):
        CutInstance(c4, [(0, 9)], [1.0])
    with pytest.raises(ValueError):
        CutInstance(c4, [(0, 1)], [-1.0])
    with pytest.raises(ValueError):
        CutInstance(c4, [(0, 1)], [1.0, 2.0])
    assert CutInstance.uniform(c4).is_uniform


def test_sparsity_of_empty_cut(c4):
    inst = CutInstance.uniform(c4)
    assert sparsity(inst, []).sparsity is None
    assert not separated_pairs(inst, []).any()


@st.composite
def small_instances(draw):
    n = draw(st.integers(2, 5))
    m = draw(st.integers(1, 8))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    edges = []
    for _ in range(m):
        a, b = rng.choice(n, 2, replace=False)
        edges.append((int(a), int(b), 1.0, float(rng.integers(1, 5))))
    k = draw(st.integers(1, 3))
    pairs = [tuple(int(v) for v in rng.choice(n, 2, replace=False)) for _ in range(k)]
    dem = [float(v) for v in rng.integers(1, 4, k)]
    return n, edges, pairs, dem


@given(small_instances())
@settings(max_examples=80, deadline=None)
def test_brute_force_matches_plain_enumeration(case):
    n, edges, pairs, dem = case
    inst = CutInstance(graph(n, edges), pairs, dem)
    mc, sp = brute_cuts(n, edges, pairs, dem)
    assert brute_force_multicut(inst).cost == pytest.approx(mc)
    if np.isfinite(sp):
        assert brute_force_sparsest_cut(inst).sparsity == pytest.approx(sp)


@given(small_instances())
@settings(max_examples=60, deadline=None)
def test_lp_lower_bounds_and_distances(case):
    n, edges, pairs, dem = case
    inst = CutInstance(graph(n, edges), pairs, dem)
    mc, sp = brute_cuts(n, edges, pairs, dem)
    frac = solve_multicut_lp(inst)
    assert frac.objective <= mc + 1e-7
    assert lp_feasibility(inst, frac, "multicut") >= 1 - 1e-7
    wedges = [(t, h, x) for (t, h, *_), x in zip(edges, frac.x)]
    np.testing.assert_allclose(frac.distances, floyd_warshall(n, wedges), atol=1e-9)
    if np.isfinite(sp):
        fs = solve_sparsest_cut_lp(inst)
        assert fs.objective <= sp + 1e-7


@pytest.mark.parametrize("seed", range(4))
def test_multicut_rounding_on_series_parallel(seed):
    inst = generate(GeneratorSpec("series-parallel", 6, seed=seed, capacity_range=(1, 5)))
    g = inst.graph
    ci = CutInstance(g, [(0, g.n - 1), (g.n - 1, 0)], [1.0, 1.0])
    eps = 1e-6
    frac = solve_multicut_lp(ci, eps)
    dist = tw2_samples(g, frac.x, 1 - eps, inst.tree_decomposition, 100, seed)
    sol = round_multicut(ci, dist, frac, eps, 100, seed)
    assert len(sol.separated) == 2
    assert sol.cost <= sol.info["beta"] / (1 - eps) * frac.objective + 1e-9
    if g.m <= 20:
        assert frac.objective <= brute_force_multicut(ci).cost + 1e-7


@pytest.mark.parametrize("seed", range(3))
def test_sparsest_rounding_on_small_pathwidth(seed):
    inst = generate(GeneratorSpec("pathwidth-k", 6, seed=seed, k=1, capacity_range=(1, 5)))
    ci = CutInstance.uniform(inst.graph)
    frac = solve_sparsest_cut_lp(ci)
    dist, _ = pathwidth_support(inst.graph, frac.x, 1.0 / (4 * 36), inst.path_decomposition)
    sol = round_sparsest_cut(ci, dist, frac)
    opt = brute_force_sparsest_cut(ci).sparsity
    assert frac.objective <= opt + 1e-7 <= sol.sparsity + 2e-7
    assert sol.info["case"] in ("balanced", "large-component")


def test_rounding_rejects_unbounded_distribution(c4):
    ci = CutInstance(c4, [(0, 2)], [1.0])
    frac = solve_multicut_lp(ci)
    from qcut.core import Quasipartition
    everything = Quasipartition(np.ones((4, 4), dtype=bool))
    with pytest.raises(ValueError):
        round_multicut(ci, [everything], frac)
    with pytest.raises(ValueError):
        round_sparsest_cut(ci, [everything], frac)


def test_brute_force_limits():
    g = generate(GeneratorSpec("series-parallel", 20, seed=0)).graph
    with pytest.raises(ValueError):
        brute_force_multicut(CutInstance(g, [(0, 1)], [1.0]))
    with pytest.raises(ValueError):
        brute_force_sparsest_cut(CutInstance.uniform(g))
