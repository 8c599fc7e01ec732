"""Round-limited ball chopping on directed graphs (weakly connected components)."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .. import _kernels
from ..core import Quasipartition, WeightedDigraph, bound_check, shortest_path_quasimetric
from .generators import GeneratorSpec, Instance, generate


class KprResult(NamedTuple):
    relation: Quasipartition
    removed: np.ndarray
    bounded: bool
    worst_pair: tuple | None
    worst_distance: float
    centers: list


def _weak_components(n: int, tails, heads, keep) -> np.ndarray:
    labels = np.arange(n)

    def find(x):
        while labels[x] != x:
            labels[x] = labels[labels[x]]
            x = labels[x]
        return x

    for e in np.flatnonzero(keep):
        a, b = find(int(tails[e])), find(int(heads[e]))
        if a != b:
            labels[max(a, b)] = min(a, b)
    return np.array([find(v) for v in range(n)])


def _pick(policy, comp: np.ndarray, round_index: int, rng) -> int:
    if policy == "random":
        return int(rng.choice(comp))
    if policy == "smallest":
        return int(comp[0])
    seq = list(policy)
    if round_index < len(seq) and seq[round_index] in set(comp.tolist()):
        return int(seq[round_index])
    return int(comp[0])


def kpr_generalized(g: WeightedDigraph, r: float, pick_policy: str | Sequence[int] = "random",
                    rounds: int = 3, seed: int = 0, undirected: bool = False) -> KprResult:
    """Chop every weakly connected component ``rounds`` times, then close.

    Each round and component draws its own z in [0, r] and a center x, and
    removes edges (u, v) with d(x, u) <= i r + z < d(x, v) for some i >= 0,
    measured in the graph that is left. ``pick_policy`` is ``"random"``,
    ``"smallest"`` or an explicit vertex sequence indexed by round (the
    smallest vertex is used when the listed one lies elsewhere).
    ``undirected=True`` removes both directions of a cut edge, which is the
    original undirected scheme on a bidirected graph.
    """
    if not g.is_weakly_connected():
        raise ValueError("graph must be weakly connected")
    if r <= 0:
        raise ValueError("r must be positive")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 8]))
    keep = np.ones(g.m, dtype=bool)
    centers = []
    if undirected:
        idx = g.edge_index()
        twin = np.array([idx.get((int(b), int(a)), e)
                         for e, (a, b) in enumerate(zip(g.tails, g.heads))])
    for rd in range(int(rounds)):
        labels = _weak_components(g.n, g.tails, g.heads, keep)
        w = np.where(keep, g.weights, np.inf)
        d = _kernels.apsp(g.n, g.tails, g.heads, w)
        picked = []
        for lab in np.unique(labels):
            comp = np.flatnonzero(labels == lab)
            x = _pick(pick_policy, comp, rd, rng)
            z = rng.uniform(0.0, r)
            picked.append(x)
            members = labels[g.tails] == lab
            du, dv = d[x, g.tails], d[x, g.heads]
            cut = _kernels.crossed(du, dv, z, r) & keep & members
            if undirected:
                cut |= cut[twin]
            keep &= ~cut
        centers.append(picked)
    rel = _kernels.closure(g.n, g.tails, g.heads, keep)
    q = Quasipartition(rel, check=False)
    rep = bound_check(q, shortest_path_quasimetric(g), r)
    dist = g.distances
    off = rel & ~np.eye(g.n, dtype=bool)
    worst, worst_d = None, 0.0
    if off.any():
        vals = np.where(off, dist, -np.inf)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        worst, worst_d = (int(i), int(j)), float(vals[i, j])
    return KprResult(q, ~keep, bool(rep.bounded), worst, worst_d, centers)


def counterexample(n: int, r: float = 1.0, check: bool = True) -> Instance:
    """The strip instance, accepted only if three adversarial rounds fail."""
    inst = generate(GeneratorSpec("kpr-counterexample", n, extra={"r": r}))
    if check:
        res = kpr_generalized(inst.graph, r, list(range(n)), rounds=3)
        if res.bounded:
            raise RuntimeError("instance does not defeat three adversarial rounds")
    return inst


def symmetric_report(g: WeightedDigraph, r: float, seeds: Sequence[int], rounds: int = 3,
                     undirected: bool = True) -> dict:
    """Worst retained distance over seeds, as a multiple of r."""
    ratios, bounded = [], 0
    for s in seeds:
        res = kpr_generalized(g, r, "random", rounds, seed=s, undirected=undirected)
        ratios.append(res.worst_distance / r)
        bounded += res.bounded
    return {"seeds": len(seeds), "bounded": bounded, "max_ratio": max(ratios, default=0.0),
            "mean_ratio": float(np.mean(ratios)) if ratios else 0.0}
