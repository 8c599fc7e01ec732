import itertools
from collections import deque

import numpy as np
import pytest

from qcut.core import WeightedDigraph


def floyd_warshall(n, edges):
    """Plain-python all-pairs shortest paths used as an independent oracle."""
    d = [[0.0 if i == j else float("inf") for j in range(n)] for i in range(n)]
    for t, h, w, *_ in edges:
        d[t][h] = min(d[t][h], float(w))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return np.array(d)


def bfs_reach(n, edges):
    adj = [[] for _ in range(n)]
    for t, h, *_ in edges:
        adj[t].append(h)
    out = np.zeros((n, n), dtype=bool)
    for s in range(n):
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    q.append(v)
        out[s, list(seen)] = True
    return out


def brute_cuts(n, edges, pairs, dem):
    """Cheapest multicut and sparsest cut over all edge subsets, in plain python."""
    m = len(edges)
    best_mc, best_sp = float("inf"), float("inf")
    for k in range(m + 1):
        for sub in itertools.combinations(range(m), k):
            gone = set(sub)
            kept = [e for i, e in enumerate(edges) if i not in gone]
            reach = bfs_reach(n, kept)
            cost = sum(edges[i][3] if len(edges[i]) > 3 else 1.0 for i in sub)
            sep = [not reach[s, t] for s, t in pairs]
            if all(sep):
                best_mc = min(best_mc, cost)
            d = sum(w for w, s in zip(dem, sep) if s)
            if d > 0:
                best_sp = min(best_sp, cost / d)
    return best_mc, best_sp


def bidirected_cycle(weights_cw, weights_ccw):
    n = len(weights_cw)
    edges = [(i, (i + 1) % n, weights_cw[i]) for i in range(n)]
    edges += [((i + 1) % n, i, weights_ccw[i]) for i in range(n)]
    return WeightedDigraph.from_edges(n, edges)


@pytest.fixture
def c4():
    return bidirected_cycle([1.0] * 4, [1.0] * 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
