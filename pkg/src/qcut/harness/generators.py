"""Seeded instance families with structural certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import WeightedDigraph
from ..decompositions import PathDecomposition, TreeDecomposition

FAMILIES = ("series-parallel", "pathwidth-k", "cycle", "tree", "kpr-counterexample")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    weight_range: tuple[float, float] = (1.0, 10.0)
    capacity_range: tuple[float, float] = (1.0, 1.0)
    seed: int = 0
    k: int = 2
    integer_weights: bool = True
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.n) < 2:
            raise ValueError("n must be at least 2")
        for lo, hi in (self.weight_range, self.capacity_range):
            if not (0 < lo <= hi):
                raise ValueError("ranges must be positive with lo <= hi")
        if self.family == "pathwidth-k" and self.k < 1:
            raise ValueError("pathwidth-k needs k >= 1")


@dataclass(frozen=True, eq=False)
class Instance:
    graph: WeightedDigraph
    spec: GeneratorSpec
    tree_decomposition: TreeDecomposition | None = None
    path_decomposition: PathDecomposition | None = None
    trace: tuple = ()


def _draw(rng, lo, hi, integer, size):
    if integer:
        return rng.integers(int(np.ceil(lo)), int(np.floor(hi)) + 1, size=size).astype(float)
    return rng.uniform(lo, hi, size=size)


def _bidirect(n, pairs, spec, rng, labels=None) -> WeightedDigraph:
    """Both directions of every pair, with independent weights and capacities."""
    k = len(pairs)
    w = _draw(rng, *spec.weight_range, spec.integer_weights, 2 * k)
    c = _draw(rng, *spec.capacity_range, spec.integer_weights, 2 * k)
    edges = []
    for i, (a, b) in enumerate(pairs):
        edges.append((a, b, w[2 * i], c[2 * i]))
        edges.append((b, a, w[2 * i + 1], c[2 * i + 1]))
    return WeightedDigraph.from_edges(n, edges, labels)


def series_parallel(spec: GeneratorSpec, rng) -> Instance:
    """Grow a partial 2-tree: each new vertex attaches to both ends of an
    existing edge or, with probability ``p_pendant``, to one end only."""
    n = spec.n
    p_pendant = float(spec.extra.get("p_pendant", 0.25))
    pairs = [(0, 1)]
    bags = [(0, 1)]
    parent = [-1]
    bag_of_pair = {(0, 1): 0}
    trace = []
    for x in range(2, n):
        a, b = pairs[int(rng.integers(len(pairs)))]
        host = bag_of_pair[(min(a, b), max(a, b))]
        bags.append((a, b, x))
        parent.append(host)
        me = len(bags) - 1
        if rng.random() < p_pendant:
            end = a if rng.random() < 0.5 else b
            pairs.append((end, x))
            trace.append(("pendant", x, end))
        else:
            pairs.extend([(a, x), (b, x)])
            trace.append(("triangle", x, a, b))
        for u, v in ((a, x), (b, x), (a, b)):
            bag_of_pair.setdefault((min(u, v), max(u, v)), me)
    g = _bidirect(n, pairs, spec, rng)
    return Instance(g, spec, TreeDecomposition(tuple(bags), tuple(parent)), None, tuple(trace))


def pathwidth_k(spec: GeneratorSpec, rng) -> Instance:
    """Sliding window of k+1 vertices; consecutive vertices always adjacent,
    other pairs inside a window present with probability ``density``."""
    n, k = spec.n, spec.k
    density = float(spec.extra.get("density", 0.6))
    pairs = []
    for i in range(n - 1):
        pairs.append((i, i + 1))
        for j in range(i + 2, min(n, i + k + 1)):
            if rng.random() < density:
                pairs.append((i, j))
    bags = [tuple(range(i, min(n, i + k + 1))) for i in range(max(1, n - k))]
    g = _bidirect(n, pairs, spec, rng)
    return Instance(g, spec, None, PathDecomposition(tuple(bags)))


def cycle(spec: GeneratorSpec, rng) -> Instance:
    n = spec.n
    if n < 3:
        raise ValueError("a cycle needs n >= 3")
    pairs = [(i, (i + 1) % n) for i in range(n)]
    return Instance(_bidirect(n, pairs, spec, rng), spec)


def tree(spec: GeneratorSpec, rng) -> Instance:
    """Random recursive tree: vertex i hangs below a uniform earlier vertex."""
    n = spec.n
    pairs = [(int(rng.integers(i)), i) for i in range(1, n)]
    return Instance(_bidirect(n, pairs, spec, rng), spec)


def kpr_counterexample(spec: GeneratorSpec, rng=None) -> Instance:
    """Strip of triangles on v_0 .. v_{n-1} where a ball cut around v_i only
    separates edges pointing back past v_i.

    Forward edges v_i -> v_{i+1} and chords v_i -> v_{i+2} weigh 0; the reverse
    directions weigh ``2r`` and ``4r``. A center v_i therefore sees every later
    vertex at distance 0, so its thresholds cut only backward edges that end
    before v_i. Each round advances the cut frontier by one vertex.
    ``extra['symmetric']`` gives both directions weight ``r`` instead.
    """
    n = spec.n
    r = float(spec.extra.get("r", 1.0))
    sym = bool(spec.extra.get("symmetric", False))
    edges = []
    for i in range(n - 1):
        edges.append((i, i + 1, r if sym else 0.0))
        edges.append((i + 1, i, r if sym else 2 * r))
        if i + 2 < n:
            edges.append((i, i + 2, 2 * r if sym else 0.0))
            edges.append((i + 2, i, 2 * r if sym else 4 * r))
    g = WeightedDigraph.from_edges(n, edges, [f"v{i}" for i in range(n)])
    bags = [tuple(range(i, min(n, i + 3))) for i in range(max(1, n - 2))]
    return Instance(g, spec, None, PathDecomposition(tuple(bags)))


_BUILDERS = {
    "series-parallel": series_parallel,
    "pathwidth-k": pathwidth_k,
    "cycle": cycle,
    "tree": tree,
    "kpr-counterexample": kpr_counterexample,
}


def generate(spec: GeneratorSpec) -> Instance:
    rng = np.random.default_rng(np.random.SeedSequence([int(spec.seed), FAMILIES.index(spec.family)]))
    return _BUILDERS[spec.family](spec, rng)
