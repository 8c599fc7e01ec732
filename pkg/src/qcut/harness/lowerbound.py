"""Average edge stretch of non-contracting tree hosts for the unit one-way cycle.

All arithmetic is exact (``fractions.Fraction``), so the comparison with
n - 1 is an equality-level check rather than a floating-point one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


def cycle_distance(n: int, u: int, v: int) -> int:
    return (v - u) % n


@dataclass(frozen=True)
class TreeEmbeddingCandidate:
    """A directed tree host (both directions of every tree edge present)."""

    name: str
    host_n: int
    edges: tuple  # (tail, head, Fraction weight)
    vertex_map: tuple  # cycle vertex -> host vertex

    def distances(self) -> list[list[Fraction | None]]:
        adj = [[] for _ in range(self.host_n)]
        for a, b, w in self.edges:
            adj[a].append((b, w))
        out = []
        for s in range(self.host_n):
            d: list = [None] * self.host_n
            d[s] = Fraction(0)
            stack = [s]
            while stack:  # tree: each vertex is reached along its unique path
                u = stack.pop()
                for v, w in adj[u]:
                    if d[v] is None:
                        d[v] = d[u] + w
                        stack.append(v)
            out.append(d)
        return out

    def validate_tree(self) -> None:
        und = {(min(a, b), max(a, b)) for a, b, _ in self.edges}
        directed = {(a, b) for a, b, _ in self.edges}
        if len(und) != self.host_n - 1 or len(directed) != 2 * len(und):
            raise ValueError(f"{self.name}: host is not a bidirected tree")
        if any(w < 0 for _, _, w in self.edges):
            raise ValueError(f"{self.name}: negative weight")

    def contraction(self, n: int) -> tuple[int, int] | None:
        """First cycle pair with d_host < d_cycle, or None."""
        d = self.distances()
        f = self.vertex_map
        for u in range(n):
            for v in range(n):
                if u != v:
                    dh = d[f[u]][f[v]]
                    if dh is None or dh < cycle_distance(n, u, v):
                        if dh is None:
                            raise ValueError(f"{self.name}: host is disconnected")
                        return (u, v)
        return None


def _scaled(name: str, n: int, host_n: int, und_edges, vertex_map) -> TreeEmbeddingCandidate:
    """Unit weights both ways, then one uniform factor making it non-contracting."""
    base = TreeEmbeddingCandidate(name, host_n, tuple((a, b, Fraction(1)) for x, y in und_edges
                                                      for a, b in ((x, y), (y, x))), tuple(vertex_map))
    d = base.distances()
    factor = max(Fraction(cycle_distance(n, u, v), d[vertex_map[u]][vertex_map[v]])
                 for u in range(n) for v in range(n) if u != v)
    return TreeEmbeddingCandidate(name, host_n, tuple((a, b, w * factor) for a, b, w in base.edges),
                                  tuple(vertex_map))


def star_candidate(n: int) -> TreeEmbeddingCandidate:
    """Hub n; leaf i -> hub and hub -> leaf both weigh (n - 1) / 2."""
    half = Fraction(n - 1, 2)
    edges = []
    for i in range(n):
        edges += [(i, n, half), (n, i, half)]
    return TreeEmbeddingCandidate("star", n + 1, tuple(edges), tuple(range(n)))


def path_candidate(n: int) -> TreeEmbeddingCandidate:
    """Cycle order along a path; forward steps weigh 1, backward steps n - 1."""
    edges = []
    for i in range(n - 1):
        edges += [(i, i + 1, Fraction(1)), (i + 1, i, Fraction(n - 1))]
    return TreeEmbeddingCandidate("path", n, tuple(edges), tuple(range(n)))


def binary_candidate(n: int) -> TreeEmbeddingCandidate:
    """Heap-shaped binary tree on the cycle vertices, uniformly inflated."""
    return _scaled("binary", n, n, [((i - 1) // 2, i) for i in range(1, n)], range(n))


def random_candidate(n: int, seed: int = 0) -> TreeEmbeddingCandidate:
    """Random recursive tree over a random vertex order, uniformly inflated."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 9]))
    perm = rng.permutation(n).tolist()
    und = [(perm[int(rng.integers(i))], perm[i]) for i in range(1, n)]
    return _scaled(f"random-{seed}", n, n, und, range(n))


def caterpillar_candidate(n: int) -> TreeEmbeddingCandidate:
    """Spine of Steiner vertices n .. n + s - 1 with two cycle vertices hanging off each."""
    s = (n + 1) // 2
    und = [(n + j, n + j + 1) for j in range(s - 1)] + [(n + i // 2, i) for i in range(n)]
    return _scaled("caterpillar", n, n + s, und, range(n))


def default_candidates(n: int, seeds: Sequence[int] = (0, 1)) -> list[TreeEmbeddingCandidate]:
    out = [star_candidate(n), path_candidate(n)]
    if n >= 3:
        out += [binary_candidate(n), caterpillar_candidate(n)]
        out += [random_candidate(n, s) for s in seeds]
    return out


def lowerbound_dual_check(n: int, candidates: Sequence[TreeEmbeddingCandidate]) -> list[dict]:
    """(1/n) sum_i d_H(v_i, v_{i+1}) per candidate, compared exactly with n - 1."""
    if n < 2:
        raise ValueError("n must be at least 2")
    out = []
    for c in candidates:
        c.validate_tree()
        bad = c.contraction(n)
        if bad is not None:
            raise ValueError(f"{c.name}: contracts pair {bad}")
        d = c.distances()
        f = c.vertex_map
        avg = sum(d[f[i]][f[(i + 1) % n]] for i in range(n)) / n
        out.append({"name": c.name, "average_stretch": avg, "bound": n - 1,
                    "holds": avg >= n - 1, "host_vertices": c.host_n})
    return out
