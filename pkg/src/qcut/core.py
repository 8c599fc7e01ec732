"""Directed graphs, quasimetrics, quasipartitions and directed l1 distances.

All containers are immutable after construction: arrays are copied and
flagged read-only, so objects can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels

TOL = 1e-9


def _frozen(a, dtype=None) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeightedDigraph:
    """Directed multigraph with non-negative weights and capacities."""

    n: int
    tails: np.ndarray
    heads: np.ndarray
    weights: np.ndarray
    capacities: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        object.__setattr__(self, "n", n)
        t = _frozen(self.tails, np.int64).reshape(-1)
        h = _frozen(self.heads, np.int64).reshape(-1)
        w = _frozen(self.weights, np.float64).reshape(-1)
        c = _frozen(self.capacities, np.float64).reshape(-1)
        if not (len(t) == len(h) == len(w) == len(c)):
            raise GraphError("edge arrays must have equal length")
        if len(t):
            if t.min() < 0 or h.min() < 0 or t.max() >= n or h.max() >= n:
                raise GraphError("edge endpoint out of range")
            if np.any(t == h):
                raise GraphError("self-loops are not allowed")
            for name, arr in (("weight", w), ("capacity", c)):
                if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                    raise GraphError(f"every {name} must be finite and >= 0")
        if self.labels is not None and len(self.labels) != n:
            raise GraphError("labels must match the vertex count")
        for name, arr in (("tails", t), ("heads", h), ("weights", w), ("capacities", c)):
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[float]],
                   labels: Sequence[str] | None = None) -> "WeightedDigraph":
        """Build from ``(tail, head, weight[, capacity])`` tuples."""
        t, h, w, c = [], [], [], []
        for e in edges:
            if len(e) not in (3, 4):
                raise GraphError(f"bad edge record {e!r}")
            t.append(int(e[0]))
            h.append(int(e[1]))
            w.append(float(e[2]))
            c.append(float(e[3]) if len(e) == 4 else 1.0)
        return cls(n, t, h, w, c, None if labels is None else tuple(labels))

    @property
    def m(self) -> int:
        return len(self.tails)

    def edges(self):
        return list(zip(self.tails.tolist(), self.heads.tolist(),
                        self.weights.tolist(), self.capacities.tolist()))

    def with_weights(self, weights) -> "WeightedDigraph":
        return WeightedDigraph(self.n, self.tails, self.heads, weights,
                               self.capacities, self.labels)

    def with_capacities(self, capacities) -> "WeightedDigraph":
        return WeightedDigraph(self.n, self.tails, self.heads, self.weights,
                               capacities, self.labels)

    def subgraph(self, keep) -> "WeightedDigraph":
        keep = np.asarray(keep, dtype=bool)
        return WeightedDigraph(self.n, self.tails[keep], self.heads[keep],
                               self.weights[keep], self.capacities[keep], self.labels)

    @cached_property
    def distances(self) -> np.ndarray:
        d = _kernels.apsp(self.n, self.tails, self.heads, self.weights)
        d.setflags(write=False)
        return d

    @cached_property
    def reachability(self) -> np.ndarray:
        r = _kernels.closure(self.n, self.tails, self.heads)
        r.setflags(write=False)
        return r

    def undirected_neighbors(self) -> list[set[int]]:
        nb = [set() for _ in range(self.n)]
        for a, b in zip(self.tails.tolist(), self.heads.tolist()):
            nb[a].add(b)
            nb[b].add(a)
        return nb

    def is_weakly_connected(self) -> bool:
        if self.n <= 1:
            return True
        nb = self.undirected_neighbors()
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in nb[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n

    def is_strongly_connected(self) -> bool:
        return bool(self.reachability.all())

    def edge_index(self) -> dict[tuple[int, int], int]:
        """Map ``(tail, head)`` to the lightest parallel edge."""
        idx: dict[tuple[int, int], int] = {}
        for e, (a, b) in enumerate(zip(self.tails.tolist(), self.heads.tolist())):
            if (a, b) not in idx or self.weights[e] < self.weights[idx[(a, b)]]:
                idx[(a, b)] = e
        return idx


class Violation(NamedTuple):
    kind: str
    x: int
    y: int
    z: int = -1


@dataclass(frozen=True, eq=False)
class QuasimetricSpace:
    """Dense distance table; ``inf`` marks unreachable pairs."""

    d: np.ndarray

    def __post_init__(self):
        d = _frozen(self.d, np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance table must be square")
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @cached_property
    def strict(self) -> bool:
        off = ~np.eye(self.n, dtype=bool)
        return bool(np.all(self.d[off] > TOL))

    @cached_property
    def diameter(self) -> float:
        if self.n == 0:
            return 0.0
        return float(self.d.max())


def shortest_path_quasimetric(g: WeightedDigraph) -> QuasimetricSpace:
    return QuasimetricSpace(g.distances)


def validate_quasimetric(q: QuasimetricSpace | np.ndarray, strict: bool = False,
                         tol: float = TOL, limit: int = 100) -> list[Violation]:
    """Axiom violations; an empty list means the table is a quasimetric.

    ``strict`` adds the separation axiom d(x, y) = 0 only for x = y.
    At most ``limit`` triangle violations are listed.
    """
    d = q.d if isinstance(q, QuasimetricSpace) else np.asarray(q, dtype=float)
    n = d.shape[0]
    out: list[Violation] = []
    if d.ndim != 2 or d.shape[1] != n:
        return [Violation("shape", -1, -1)]
    for x in np.flatnonzero(np.abs(np.diag(d)) > tol):
        out.append(Violation("diagonal", int(x), int(x)))
    for x, y in zip(*np.nonzero(d < -tol)):
        out.append(Violation("negative", int(x), int(y)))
    if strict:
        off = ~np.eye(n, dtype=bool)
        for x, y in zip(*np.nonzero((d <= tol) & off)):
            out.append(Violation("separation", int(x), int(y)))
    found = 0
    for z in range(n):
        via = d[:, z, None] + d[None, z, :]
        with np.errstate(invalid="ignore"):
            bad = via < d - tol * np.maximum(1.0, np.abs(via))
        if bad.any():
            for x, y in zip(*np.nonzero(bad)):
                out.append(Violation("triangle", int(x), int(y), z))
                found += 1
                if found >= limit:
                    return out
    return out


def _is_transitive(r: np.ndarray) -> bool:
    ri = r.astype(np.int32)
    return not np.any((ri @ ri > 0) & ~r)


@dataclass(frozen=True, eq=False)
class Quasipartition:
    """Reflexive transitive relation; ``rel[x, y]`` means (x, y) is kept."""

    rel: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        r = _frozen(self.rel, bool)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("relation must be square")
        if self.check:
            if not np.all(np.diag(r)):
                raise ValueError("relation is not reflexive")
            if not _is_transitive(r):
                raise ValueError("relation is not transitive")
        object.__setattr__(self, "rel", r)

    @property
    def n(self) -> int:
        return self.rel.shape[0]

    def separated(self, x: int, y: int) -> bool:
        return not self.rel[x, y]

    def restrict(self, vertices) -> "Quasipartition":
        v = np.asarray(vertices, dtype=np.int64)
        return Quasipartition(self.rel[np.ix_(v, v)], check=False)

    def key(self) -> bytes:
        return np.packbits(self.rel).tobytes()

    def __eq__(self, other):
        return isinstance(other, Quasipartition) and np.array_equal(self.rel, other.rel)

    def __hash__(self):
        return hash(self.key())


def transitive_closure(r) -> Quasipartition:
    """Smallest reflexive transitive relation containing ``r``."""
    r = np.asarray(r, dtype=bool)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError("relation must be square")
    return Quasipartition(_kernels.relation_closure(r), check=False)


def identity_quasipartition(n: int) -> Quasipartition:
    return Quasipartition(np.eye(n, dtype=bool), check=False)


class BoundReport(NamedTuple):
    max_distance: float
    bounded: bool
    offending: list


def bound_check(p: Quasipartition, q: QuasimetricSpace, r: float,
                tol: float = TOL) -> BoundReport:
    """Largest distance over kept pairs (x != y) and whether it is <= r."""
    if p.n != q.n:
        raise ValueError("size mismatch")
    mask = p.rel & ~np.eye(p.n, dtype=bool)
    if not mask.any():
        return BoundReport(0.0, True, [])
    vals = q.d[mask]
    worst = float(vals.max())
    off = [(int(x), int(y)) for x, y in zip(*np.nonzero(mask & (q.d > r + tol)))]
    return BoundReport(worst, not off, off)


@dataclass(frozen=True, eq=False)
class ZeroOneQuasimetric:
    table: np.ndarray

    def __post_init__(self):
        t = _frozen(self.table, np.int8)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("table must be square")
        if not np.all((t == 0) | (t == 1)) or np.any(np.diag(t) != 0):
            raise ValueError("0-1 table must have zero diagonal and 0/1 entries")
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def satisfies_triangle(self) -> bool:
        # d(x,y) = 1 needs a witness z with d(x,z) = 1 or d(z,y) = 1.
        zero = self.table == 0
        return _is_transitive(zero)


def zero_one_from_quasipartition(p: Quasipartition | np.ndarray) -> ZeroOneQuasimetric:
    rel = p.rel if isinstance(p, Quasipartition) else np.asarray(p, dtype=bool)
    if not np.all(np.diag(rel)) or not _is_transitive(rel):
        raise ValueError("input relation is not a quasipartition")
    return ZeroOneQuasimetric((~rel).astype(np.int8))


@dataclass(frozen=True, eq=False)
class DirectedCutMetric:
    """d(x, y) = 1 exactly when x is inside ``side`` and y is outside."""

    n: int
    side: np.ndarray

    def __post_init__(self):
        s = np.zeros(int(self.n), dtype=bool)
        side = np.asarray(self.side)
        if side.dtype == bool:
            if side.shape != (self.n,):
                raise ValueError("side mask has wrong length")
            s[:] = side
        elif side.size:
            if side.min() < 0 or side.max() >= self.n:
                raise ValueError("vertex outside [0, n)")
            s[side.astype(np.int64)] = True
        s.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "side", s)

    @property
    def table(self) -> np.ndarray:
        return (self.side[:, None] & ~self.side[None, :]).astype(np.int8)

    def as_zero_one(self) -> ZeroOneQuasimetric:
        return ZeroOneQuasimetric(self.table)


def directed_cut_from_set(n: int, s: Iterable[int]) -> DirectedCutMetric:
    return DirectedCutMetric(n, np.fromiter((int(v) for v in s), dtype=np.int64))


def directed_l1_distance(x, y) -> float:
    """sum |x_i - y_i| + sum x_i - sum y_i."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("dimension mismatch")
    return float(np.sum(np.abs(x - y)) + np.sum(x) - np.sum(y))


def directed_l1_table(coords: np.ndarray) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    if c.ndim == 1:
        c = c[:, None]
    diff = c[:, None, :] - c[None, :, :]
    return np.sum(np.abs(diff) + diff, axis=2)


@dataclass(frozen=True, eq=False)
class DirectedL1Embedding:
    coords: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        c = _frozen(self.coords, np.float64)
        if c.ndim == 1:
            c = _frozen(c.reshape(-1, 1))
        if not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        if not self.alpha > 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def table(self) -> np.ndarray:
        return directed_l1_table(self.coords)


class DistortionReport(NamedTuple):
    alpha: float
    min_stretch: float
    max_stretch: float
    distortion: float
    contracting_pairs: int
    excluded_pairs: list


def stretch_report(source: np.ndarray, image: np.ndarray, alpha: float = 1.0,
                   tol: float = TOL) -> DistortionReport:
    """Stretch alpha * image / source over off-diagonal pairs.

    Pairs with infinite source distance are excluded and listed. Pairs with
    zero source distance count only if the image is non-zero, where they
    make the distortion infinite.
    """
    source = np.asarray(source, dtype=float)
    image = np.asarray(image, dtype=float) * alpha
    n = source.shape[0]
    off = ~np.eye(n, dtype=bool)
    inf = off & ~np.isfinite(source)
    excluded = [(int(x), int(y)) for x, y in zip(*np.nonzero(inf))]
    use = off & np.isfinite(source)
    zero = use & (source <= tol)
    if np.any(image[zero] > tol):
        return DistortionReport(alpha, 0.0, np.inf, np.inf, 0, excluded)
    pos = use & (source > tol)
    if not pos.any():
        return DistortionReport(alpha, 1.0, 1.0, 1.0, 0, excluded)
    ratio = image[pos] / source[pos]
    lo, hi = float(ratio.min()), float(ratio.max())
    contracting = int(np.sum(ratio < 1.0 - tol))
    dist = np.inf if lo <= 0 else hi / lo
    return DistortionReport(alpha, lo, hi, dist, contracting, excluded)


def evaluate_embedding(e: DirectedL1Embedding, q: QuasimetricSpace) -> DistortionReport:
    """Distortion of ``alpha * d_l1`` against ``q``.

    ``distortion`` is max/min stretch, the best factor any rescaling of the
    embedding achieves; it equals ``max_stretch`` when no pair contracts.
    """
    if e.n != q.n:
        raise ValueError("size mismatch")
    return stretch_report(q.d, e.table(), e.alpha)
