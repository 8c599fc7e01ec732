"""Host graphs for structured inputs.

Treewidth-2 graphs are embedded isometrically into trees of hexagons and
then reweighted so that every child path is tight or slack. Bounded
pathwidth graphs are embedded into paths of cliques. The complementary
path structure consumed by the treewidth-2 sampler also lives here.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import TOL, QuasimetricSpace, WeightedDigraph, stretch_report

# --------------------------------------------------------------------------
# decompositions
# --------------------------------------------------------------------------


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[tuple[int, ...], ...]
    parent: tuple[int, ...]

    def __post_init__(self):
        bags = tuple(tuple(sorted(set(int(v) for v in b))) for b in self.bags)
        parent = tuple(int(p) for p in self.parent)
        if len(bags) != len(parent):
            raise DecompositionError("one parent index per bag is required")
        object.__setattr__(self, "bags", bags)
        object.__setattr__(self, "parent", parent)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @property
    def root(self) -> int:
        roots = [i for i, p in enumerate(self.parent) if p < 0]
        return roots[0] if roots else 0

    def children(self) -> list[list[int]]:
        ch = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(i)
        return ch

    def levels(self) -> list[int]:
        lev = [-1] * len(self.bags)
        ch = self.children()
        stack = [self.root]
        lev[self.root] = 0
        while stack:
            b = stack.pop()
            for c in ch[b]:
                lev[c] = lev[b] + 1
                stack.append(c)
        return lev

    def validate(self, g: WeightedDigraph) -> list[str]:
        return _validate_decomposition(g, self.bags, self.parent)


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(tuple(sorted(set(int(v) for v in b)))
                                               for b in self.bags))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def as_tree(self) -> TreeDecomposition:
        return TreeDecomposition(self.bags, tuple(range(-1, len(self.bags) - 1)))

    def validate(self, g: WeightedDigraph) -> list[str]:
        return _validate_decomposition(g, self.bags, tuple(range(-1, len(self.bags) - 1)))


def _validate_decomposition(g, bags, parent) -> list[str]:
    issues = []
    nb = len(bags)
    roots = [i for i, p in enumerate(parent) if p < 0]
    if nb and len(roots) != 1:
        issues.append(f"expected one root bag, found {len(roots)}")
    for i, p in enumerate(parent):
        if p >= nb:
            issues.append(f"bag {i} has parent {p} out of range")
    # acyclicity of the parent pointers
    for i in range(nb):
        seen, j = set(), i
        while j >= 0 and j < nb and j not in seen:
            seen.add(j)
            j = parent[j]
        if j >= 0 and j < nb:
            issues.append(f"parent pointers cycle through bag {i}")
            break
    holders = [[] for _ in range(g.n)]
    for i, b in enumerate(bags):
        for v in b:
            if not 0 <= v < g.n:
                issues.append(f"bag {i} holds unknown vertex {v}")
            else:
                holders[v].append(i)
    for v in range(g.n):
        if not holders[v]:
            issues.append(f"vertex {v} is in no bag")
            continue
        hs = set(holders[v])
        # the bags holding v must induce a connected subtree
        tops = [i for i in hs if parent[i] not in hs]
        if len(tops) > 1:
            issues.append(f"bags holding vertex {v} are not connected")
    bagsets = [set(b) for b in bags]
    for a, b in zip(g.tails.tolist(), g.heads.tolist()):
        if not any(a in s and b in s for s in bagsets):
            issues.append(f"edge ({a},{b}) is not covered")
    return issues


def _two_tree_build(n: int, nbrs: list[set[int]]):
    """Root triangle and attachment sequence of a 2-tree containing ``nbrs``.

    Vertices of degree at most two are eliminated with fill until three
    remain; replaying the eliminations backwards attaches each vertex to an
    edge of the growing 2-tree. Raises when the graph has treewidth > 2.
    """
    if n < 3:
        raise DecompositionError("at least three vertices are required")
    adj = [set(s) for s in nbrs]
    alive = set(range(n))
    order = []
    buckets = deque(sorted(v for v in alive if len(adj[v]) <= 2))
    queued = set(buckets)
    while len(alive) > 3:
        while buckets and (buckets[0] not in alive or len(adj[buckets[0]]) > 2):
            queued.discard(buckets.popleft())
        if not buckets:
            raise DecompositionError("graph has treewidth greater than 2")
        v = buckets.popleft()
        queued.discard(v)
        nv = sorted(adj[v])
        order.append((v, tuple(nv)))
        for u in nv:
            adj[u].discard(v)
        if len(nv) == 2:
            a, b = nv
            adj[a].add(b)
            adj[b].add(a)
        alive.discard(v)
        adj[v] = set()
        for u in nv:
            if len(adj[u]) <= 2 and u not in queued:
                buckets.append(u)
                queued.add(u)
    root = tuple(sorted(alive))
    tree_adj = {v: set() for v in root}
    for a in root:
        for b in root:
            if a != b:
                tree_adj[a].add(b)
    steps = []
    for v, nv in reversed(order):
        if len(nv) == 2:
            a, b = nv
        elif len(nv) == 1:
            a = nv[0]
            b = min(tree_adj[a])
        else:
            a = min(tree_adj)
            b = min(tree_adj[a])
        steps.append((a, b, v))
        tree_adj[v] = {a, b}
        tree_adj[a].add(v)
        tree_adj[b].add(v)
    return root, steps


def treewidth2_decomposition(g: WeightedDigraph) -> TreeDecomposition:
    """Width-2 tree decomposition with one triangle bag per 2-tree step."""
    root, steps = _two_tree_build(g.n, g.undirected_neighbors())
    bags = [root]
    parent = [-1]
    owner = {frozenset(p): 0 for p in ((root[0], root[1]), (root[1], root[2]),
                                       (root[0], root[2]))}
    for a, b, x in steps:
        idx = len(bags)
        bags.append((a, b, x))
        parent.append(owner[frozenset((a, b))])
        owner.setdefault(frozenset((a, x)), idx)
        owner.setdefault(frozenset((b, x)), idx)
    return TreeDecomposition(tuple(bags), tuple(parent))


def exact_pathwidth_decomposition(g: WeightedDigraph, max_n: int = 20) -> PathDecomposition:
    """Optimal path decomposition by subset dynamic programming.

    Uses the vertex separation formulation: the width of an ordering is the
    largest number of placed vertices that still have unplaced neighbours.
    """
    n = g.n
    if n > max_n:
        raise DecompositionError(f"exhaustive search limited to n <= {max_n}")
    if n == 0:
        return PathDecomposition(())
    nbmask = np.zeros(n, dtype=np.int64)
    for a, b in zip(g.tails.tolist(), g.heads.tolist()):
        nbmask[a] |= 1 << b
        nbmask[b] |= 1 << a
    full = (1 << n) - 1
    subsets = np.arange(1 << n, dtype=np.int64)
    # boundary size of every subset: members with a neighbour outside
    boundary = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        inside = (subsets >> v) & 1
        outside_nb = (nbmask[v] & ~subsets & full) != 0
        boundary += inside * outside_nb
    best = np.full(1 << n, np.iinfo(np.int64).max, dtype=np.int64)
    choice = np.full(1 << n, -1, dtype=np.int64)
    best[0] = 0
    popcount = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        popcount += (subsets >> v) & 1
    for size in range(1, n + 1):
        layer = subsets[popcount == size]
        for v in range(n):
            has = layer[((layer >> v) & 1) == 1]
            prev = has & ~(np.int64(1) << v)
            # placing v after prev: bag is boundary(prev) plus v
            cost = np.maximum(best[prev], boundary[prev] + 1)
            better = cost < best[has]
            best[has[better]] = cost[better]
            choice[has[better]] = v
    order = []
    s = full
    while s:
        v = int(choice[s])
        order.append(v)
        s &= ~(1 << v)
    order.reverse()
    bags = []
    placed = 0
    for v in order:
        bnd = [u for u in range(n) if (placed >> u) & 1 and (nbmask[u] & ~placed & ~(1 << v) & full
                                                            or (nbmask[u] >> v) & 1)]
        bags.append(tuple(sorted(set(bnd) | {v})))
        placed |= 1 << v
    return PathDecomposition(tuple(bags))


# --------------------------------------------------------------------------
# tie-broken shortest paths
# --------------------------------------------------------------------------


def _out_lists(g: WeightedDigraph, keep=None):
    out = [[] for _ in range(g.n)]
    for e, (a, b) in enumerate(zip(g.tails.tolist(), g.heads.tolist())):
        if keep is None or keep[e]:
            out[a].append((b, e))
    for lst in out:
        lst.sort()
    return out


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= TOL * max(1.0, abs(a), abs(b))


def canonical_path(g: WeightedDigraph, src: int, dst: int, dist: np.ndarray | None = None,
                   out=None) -> list[int] | None:
    """Shortest path src -> dst as a list of edge ids.

    Among shortest paths the fewest-edge ones win; remaining ties go to the
    lexicographically smallest vertex sequence.
    """
    d = g.distances if dist is None else dist
    if not np.isfinite(d[src, dst]):
        return None
    if out is None:
        out = _out_lists(g)
    w = g.weights
    target = d[:, dst]
    # hop counts over the tight-edge subgraph, BFS backwards from dst
    radj = [[] for _ in range(g.n)]
    for a in range(g.n):
        if not np.isfinite(target[a]):
            continue
        for b, e in out[a]:
            if np.isfinite(target[b]) and _close(w[e] + target[b], target[a]):
                radj[b].append(a)
    hops = np.full(g.n, -1, dtype=np.int64)
    hops[dst] = 0
    q = deque([dst])
    while q:
        b = q.popleft()
        for a in radj[b]:
            if hops[a] < 0:
                hops[a] = hops[b] + 1
                q.append(a)
    path = []
    u = src
    while u != dst:
        nxt = None
        for b, e in out[u]:
            if (hops[b] >= 0 and hops[b] == hops[u] - 1 and np.isfinite(target[b])
                    and _close(w[e] + target[b], target[u])):
                if nxt is None or b < nxt[0] or (b == nxt[0] and w[e] < w[nxt[1]]):
                    nxt = (b, e)
        if nxt is None:  # pragma: no cover - guarded by the hop table
            raise RuntimeError("tie-broken path reconstruction failed")
        path.append(nxt[1])
        u = nxt[0]
    return path


def path_vertices(g: WeightedDigraph, edges: Sequence[int], start: int) -> list[int]:
    vs = [start]
    for e in edges:
        vs.append(int(g.heads[e]))
    return vs


def _lex_cost_path(g, src, dst, allowed_edges, vertex_cost):
    """Path src -> dst over allowed edges minimising (vertex cost, hops), lex ties."""
    out = [[] for _ in range(g.n)]
    radj = [[] for _ in range(g.n)]
    for e in allowed_edges:
        a, b = int(g.tails[e]), int(g.heads[e])
        out[a].append((b, e))
        radj[b].append((a, e))
    INF = (np.inf, np.inf)
    best = [INF] * g.n
    best[dst] = (0, 0)
    heap = [((0, 0), dst)]
    while heap:
        c, b = heapq.heappop(heap)
        if c > best[b]:
            continue
        for a, _ in radj[b]:
            nc = (c[0] + vertex_cost[b], c[1] + 1)
            if nc < best[a]:
                best[a] = nc
                heapq.heappush(heap, (nc, a))
    if best[src] == INF:
        return None
    path = []
    u = src
    seen = {src}
    while u != dst:
        cands = sorted(out[u])
        nxt = None
        for b, e in cands:
            if best[b] == INF or b in seen:
                continue
            if (best[b][0] + vertex_cost[b], best[b][1] + 1) == best[u]:
                nxt = (b, e)
                break
        if nxt is None:  # pragma: no cover
            raise RuntimeError("complementary path reconstruction failed")
        path.append(nxt[1])
        u = nxt[0]
        seen.add(u)
    return path


# --------------------------------------------------------------------------
# trees of hexagons
# --------------------------------------------------------------------------

ROLES = ("u'", "u''", "w'", "w''", "v'", "v''")


@dataclass(frozen=True)
class ChildPath:
    parent_edge: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Hexagon:
    index: int
    parent: int
    level: int
    triangle: tuple[int, int, int]
    roles: dict
    child_paths: tuple[ChildPath, ...]


@dataclass(frozen=True, eq=False)
class HexagonTree:
    """Tree of hexagons hosting a treewidth-2 graph.

    ``origin[h]`` is the source vertex of host vertex ``h`` and ``embed[v]``
    the host vertex used for source vertex ``v``. ``parent_edge[e]`` is the
    parent edge of host edge ``e`` or -1 for root edges.
    """

    source: WeightedDigraph
    host: WeightedDigraph
    hexagons: tuple[Hexagon, ...]
    origin: np.ndarray
    embed: np.ndarray
    parent_edge: np.ndarray
    child_paths: dict
    duplicate: np.ndarray
    distortion: float = 1.0
    canonical: bool = False

    def children(self) -> list[list[int]]:
        ch = [[] for _ in self.hexagons]
        for h in self.hexagons:
            if h.parent >= 0:
                ch[h.parent].append(h.index)
        return ch

    def leaves(self) -> list[int]:
        ch = self.children()
        return [h.index for h in self.hexagons if not ch[h.index]]

    def path_length(self, path: ChildPath) -> float:
        return float(self.host.weights[list(path.edges)].sum())

    def isometry_error(self) -> float:
        return verify_isometry(QuasimetricSpace(self.source.distances),
                               QuasimetricSpace(self.host.distances), self.embed)


def _complete_bidirected(g: WeightedDigraph, pairs) -> dict:
    d = g.distances
    if not np.all(np.isfinite(d)):
        raise DecompositionError("source graph must be strongly connected")
    return {(a, b): float(d[a, b]) for a, b in pairs}


def embed_hexagon_tree(g: WeightedDigraph, td: TreeDecomposition | None = None) -> HexagonTree:
    """Isometric embedding of a treewidth-2 graph into a tree of hexagons."""
    if td is not None:
        issues = td.validate(g)
        if issues:
            raise DecompositionError("; ".join(issues[:5]))
        if td.width > 2:
            raise DecompositionError("decomposition width exceeds 2")
        nb = g.undirected_neighbors()
        for b in td.bags:
            for a in b:
                for c in b:
                    if a != c:
                        nb[a].add(c)
    else:
        nb = g.undirected_neighbors()
    root, steps = _two_tree_build(g.n, nb)
    sides = {(root[0], root[1]), (root[1], root[2]), (root[2], root[0])}
    for a, b, x in steps:
        sides.add((a, x))
        sides.add((b, x))
    pairs = [(a, b) for a, b in sides] + [(b, a) for a, b in sides]
    w = _complete_bidirected(g, pairs)

    tails, heads, weights = [], [], []
    origin = []
    dup = []
    parent_edge = []

    def vertex(src):
        origin.append(src)
        return len(origin) - 1

    def edge(a, b, wt, is_dup, par):
        tails.append(a)
        heads.append(b)
        weights.append(wt)
        dup.append(is_dup)
        parent_edge.append(par)
        return len(tails) - 1

    hexagons = []
    side_host = {}  # frozenset(a, b) -> (a, host a, b, host b, hexagon, e_ab, e_ba)
    child_paths: dict[int, list[ChildPath]] = {}

    def build(a, b, c, ha2, hb1, parent_hex, level, e_ab, e_ba):
        # a'' = ha2 and b' = hb1 may be inherited from the parent side
        par_ab = e_ab if parent_hex >= 0 else -1
        par_ba = e_ba if parent_hex >= 0 else -1
        ha1 = vertex(a)
        if ha2 is None:
            ha2 = vertex(a)
        if hb1 is None:
            hb1 = vertex(b)
        hb2 = vertex(b)
        hc1 = vertex(c)
        hc2 = vertex(c)
        # parent-side edges exist already for children
        if parent_hex < 0:
            e_ab = edge(ha2, hb1, w[(a, b)], False, -1)
            e_ba = edge(hb1, ha2, w[(b, a)], False, -1)
        d_a1 = edge(ha2, ha1, 0.0, True, par_ab)
        d_a2 = edge(ha1, ha2, 0.0, True, par_ba)
        d_b1 = edge(hb2, hb1, 0.0, True, par_ab)
        d_b2 = edge(hb1, hb2, 0.0, True, par_ba)
        d_c1 = edge(hc2, hc1, 0.0, True, par_ab)
        d_c2 = edge(hc1, hc2, 0.0, True, par_ba)
        e_ac = edge(ha1, hc2, w[(a, c)], False, par_ab)
        e_cb = edge(hc1, hb2, w[(c, b)], False, par_ab)
        e_bc = edge(hb2, hc1, w[(b, c)], False, par_ba)
        e_ca = edge(hc2, ha1, w[(c, a)], False, par_ba)
        idx = len(hexagons)
        roles = {"u'": ha1, "u''": ha2, "v'": hb1, "v''": hb2, "w'": hc1, "w''": hc2}
        paths = []
        if parent_hex >= 0:
            # forward path a'' a' c'' c' b'' b' under a'' -> b'
            p1 = ChildPath(e_ab, (ha2, ha1, hc2, hc1, hb2, hb1), (d_a1, e_ac, d_c1, e_cb, d_b1))
            # backward path b' b'' c' c'' a' a'' under b' -> a''
            p2 = ChildPath(e_ba, (hb1, hb2, hc1, hc2, ha1, ha2), (d_b2, e_bc, d_c2, e_ca, d_a2))
            paths = [p1, p2]
            child_paths.setdefault(e_ab, []).append(p1)
            child_paths.setdefault(e_ba, []).append(p2)
        hexagons.append(Hexagon(idx, parent_hex, level, (a, b, c), roles, tuple(paths)))
        for s in ((b, hb2, c, hc1, e_bc, e_cb), (c, hc2, a, ha1, e_ca, e_ac)):
            key = frozenset((s[0], s[2]))
            if key not in side_host:
                side_host[key] = (s[0], s[1], s[2], s[3], idx, s[4], s[5])
        if parent_hex < 0:
            side_host[frozenset((a, b))] = (a, ha2, b, hb1, idx, e_ab, e_ba)
        return idx

    a, b, c = root
    build(a, b, c, None, None, -1, 0, -1, -1)
    for u, v, x in steps:
        s0, h0, s1, h1, hidx, e01, e10 = side_host[frozenset((u, v))]
        build(s0, s1, x, h0, h1, hidx, hexagons[hidx].level + 1, e01, e10)

    n_host = len(origin)
    host = WeightedDigraph(n_host, tails, heads, weights, np.ones(len(tails)))
    origin_arr = np.asarray(origin, dtype=np.int64)
    embed = np.full(g.n, -1, dtype=np.int64)
    for h in range(n_host - 1, -1, -1):
        embed[origin_arr[h]] = h
    frozen_paths = {e: tuple(v) for e, v in child_paths.items()}
    return HexagonTree(g, host, tuple(hexagons), _ro(origin_arr), _ro(embed),
                       _ro(np.asarray(parent_edge, dtype=np.int64)), frozen_paths,
                       _ro(np.asarray(dup, dtype=bool)))


def _ro(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def classify_child_path(h: HexagonTree, edge: int, path: ChildPath | int,
                        tol: float = TOL) -> str:
    """'tight', 'slack' or 'neither' for a registered child path of ``edge``."""
    paths = h.child_paths.get(edge, ())
    if isinstance(path, int):
        if not 0 <= path < len(paths):
            raise KeyError(f"edge {edge} has no child path #{path}")
        path = paths[path]
    elif path not in paths:
        raise KeyError("path is not a registered child of the edge")
    we = float(h.host.weights[edge])
    ln = h.path_length(path)
    scale = max(1.0, abs(we), abs(ln))
    if abs(ln - we) <= tol * scale:
        return "tight"
    if ln >= 2 * we - tol * scale:
        return "slack"
    return "neither"


@dataclass(frozen=True)
class CanonicalReport:
    rescaled_paths: int
    min_factor: float
    max_factor: float
    distortion: float


def canonicalize(h: HexagonTree) -> tuple[HexagonTree, CanonicalReport]:
    """Rescale child paths top-down until each is tight or slack."""
    w = h.host.weights.copy()
    rescaled = 0
    for hexa in h.hexagons:  # hexagons are stored parents first
        for p in hexa.child_paths:
            we = w[p.parent_edge]
            ln = float(w[list(p.edges)].sum())
            scale = max(1.0, abs(we), abs(ln))
            tight = abs(ln - we) <= TOL * scale
            slack = ln >= 2 * we - TOL * scale
            if not tight and not slack:
                w[list(p.edges)] *= we / ln
                rescaled += 1
    orig = h.host.weights
    pos = orig > 0
    factors = w[pos] / orig[pos]
    host = h.host.with_weights(w)
    rep = stretch_report(h.host.distances, host.distances)
    dist = rep.distortion if np.isfinite(rep.distortion) else np.inf
    out = HexagonTree(h.source, host, h.hexagons, h.origin, h.embed, h.parent_edge,
                      h.child_paths, h.duplicate, dist, True)
    lo = float(factors.min()) if factors.size else 1.0
    hi = float(factors.max()) if factors.size else 1.0
    return out, CanonicalReport(rescaled, lo, hi, dist)


def is_canonical(h: HexagonTree) -> bool:
    return all(classify_child_path(h, e, p) != "neither"
               for e, ps in h.child_paths.items() for p in ps)


# --------------------------------------------------------------------------
# complementary paths
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ComplementaryStructure:
    """Leaf paths and flattened complementary graphs around root vertex x.

    Lists are indexed by leaf hexagon in ``leaves`` order. Entries of
    ``p_hat`` and ``q_hat`` are None when no complementary path exists.
    """

    x: int
    leaves: tuple[int, ...]
    leaf_vertex: tuple[int, ...]
    p: tuple
    q: tuple
    p_hat: tuple
    q_hat: tuple
    p_bar: tuple
    q_bar: tuple
    dist_p_bar: np.ndarray
    dist_q_bar: np.ndarray
    p_bar_mask: np.ndarray
    q_bar_mask: np.ndarray


def _hexagon_path(h: HexagonTree, leaf: int) -> list[int]:
    chain = []
    i = leaf
    while i >= 0:
        chain.append(i)
        i = h.hexagons[i].parent
    return chain[::-1]


def _hexagon_edges(h: HexagonTree) -> list[list[int]]:
    """Host edges inside each hexagon, including the inherited parent side."""
    g = h.host
    owner_vertices = [set(hx.roles.values()) for hx in h.hexagons]
    by_pair = {}
    for e, (a, b) in enumerate(zip(g.tails.tolist(), g.heads.tolist())):
        by_pair.setdefault((a, b), []).append(e)
    out = []
    for hx, vs in zip(h.hexagons, owner_vertices):
        es = []
        for a in vs:
            for b in vs:
                es.extend(by_pair.get((a, b), ()))
        out.append(sorted(set(es)))
    return out


def _flatten(h: HexagonTree, start_edges) -> set[int]:
    tight = {}
    for e, ps in h.child_paths.items():
        tight[e] = [p for p in ps if classify_child_path(h, e, p) == "tight"]
    closed = set(start_edges)
    stack = list(start_edges)
    while stack:
        e = stack.pop()
        for p in tight.get(e, ()):
            for f in p.edges:
                if f not in closed:
                    closed.add(f)
                    stack.append(f)
    return closed


def _masked_dist(g: WeightedDigraph, mask: np.ndarray, src: int, reverse: bool) -> np.ndarray:
    sub = WeightedDigraph(g.n, g.heads[mask] if reverse else g.tails[mask],
                          g.tails[mask] if reverse else g.heads[mask],
                          g.weights[mask], g.capacities[mask])
    d = np.full(g.n, np.inf)
    d[src] = 0.0
    out = [[] for _ in range(g.n)]
    for a, b, wt in zip(sub.tails.tolist(), sub.heads.tolist(), sub.weights.tolist()):
        out[a].append((b, wt))
    heap = [(0.0, src)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > d[u]:
            continue
        for b, wt in out[u]:
            if du + wt < d[b]:
                d[b] = du + wt
                heapq.heappush(heap, (d[b], b))
    return d


def build_complementary(h: HexagonTree, x: int | None = None,
                        leaf_role: str = "w'") -> ComplementaryStructure:
    """Leaf paths, complementary paths and their flattened closures."""
    if not h.canonical and not is_canonical(h):
        raise ValueError("host must be canonical")
    g = h.host
    if x is None:
        x = h.hexagons[0].roles["u'"]
    if x not in h.hexagons[0].roles.values():
        raise ValueError("root vertex must lie in the root hexagon")
    d = g.distances
    out = _out_lists(g)
    hex_edges = _hexagon_edges(h)
    leaves = tuple(h.leaves())
    lv, ps, qs, phs, qhs, pbs, qbs = [], [], [], [], [], [], []
    m = g.m
    dp = np.full((len(leaves), g.n), np.inf)
    dq = np.full((len(leaves), g.n), np.inf)
    pmask = np.zeros((len(leaves), m), dtype=bool)
    qmask = np.zeros((len(leaves), m), dtype=bool)
    for i, leaf in enumerate(leaves):
        li = h.hexagons[leaf].roles[leaf_role]
        lv.append(li)
        chain = _hexagon_path(h, leaf)
        region = sorted(set(e for c in chain for e in hex_edges[c]))
        p = canonical_path(g, x, li, d, out)
        q = canonical_path(g, li, x, d, out)
        ps.append(tuple(p))
        qs.append(tuple(q))
        for path, start, end, store_hat, store_bar, dist, mask, rev in (
                (p, x, li, phs, pbs, dp, pmask, False),
                (q, li, x, qhs, qbs, dq, qmask, True)):
            on_path = set(path)
            on_vertices = set(path_vertices(g, path, start))
            allowed = [e for e in region if e not in on_path]
            cost = [1 if v in on_vertices else 0 for v in range(g.n)]
            hat = _lex_cost_path(g, start, end, allowed, cost)
            if hat is None:
                store_hat.append(None)
                store_bar.append(frozenset())
                continue
            store_hat.append(tuple(hat))
            bar = _flatten(h, hat)
            store_bar.append(frozenset(bar))
            mask[i, sorted(bar)] = True
            dist[i] = _masked_dist(g, mask[i], x, reverse=rev)
    for arr in (dp, dq, pmask, qmask):
        arr.setflags(write=False)
    return ComplementaryStructure(x, leaves, tuple(lv), tuple(ps), tuple(qs), tuple(phs),
                                  tuple(qhs), tuple(pbs), tuple(qbs), dp, dq, pmask, qmask)


def shared_edge_disagreements(h: HexagonTree, cs: ComplementaryStructure) -> list[str]:
    """Edges lying in several flattened graphs whose endpoint distances differ.

    Informational: each flattened graph is thresholded on its own distances,
    so disagreement does not affect sampling.
    """
    g = h.host
    issues = []
    t, hd = g.tails, g.heads
    for name, mask, dist in (("p", cs.p_bar_mask, cs.dist_p_bar),
                             ("q", cs.q_bar_mask, cs.dist_q_bar)):
        shared = mask.sum(axis=0) > 1
        for e in np.flatnonzero(shared):
            rows = np.flatnonzero(mask[:, e])
            for v in (t[e], hd[e]):
                vals = dist[rows, v]
                if not np.allclose(vals, vals[0], rtol=0, atol=1e-9):
                    issues.append(f"{name}-bar distances disagree at edge {e}, vertex {v}")
    return issues


def complementary_violations(h: HexagonTree, cs: ComplementaryStructure) -> list[str]:
    """Leaf paths from x must pairwise share a prefix, paths into x a suffix."""
    issues = []
    # the leaf paths from x share a prefix; the paths into x share a suffix
    for name, paths, prefix in (("p", cs.p, True), ("q", cs.q, False)):
        for i in range(len(paths)):
            for j in range(i + 1, len(paths)):
                a = list(paths[i]) if prefix else list(paths[i])[::-1]
                b = list(paths[j]) if prefix else list(paths[j])[::-1]
                common = set(a) & set(b)
                k = 0
                while k < min(len(a), len(b)) and a[k] == b[k]:
                    k += 1
                if len(common) != k:
                    issues.append(f"{name} paths {i} and {j} intersect in a non-path")
    return issues


# --------------------------------------------------------------------------
# paths of cliques
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PathOfCliques:
    source: WeightedDigraph
    host: WeightedDigraph
    cliques: tuple[tuple[int, ...], ...]
    origin: np.ndarray
    embed: np.ndarray
    layer: np.ndarray
    horizontal: np.ndarray
    forward: np.ndarray

    @property
    def k(self) -> int:
        return len(self.cliques[0]) if self.cliques else 0

    @property
    def length(self) -> int:
        return len(self.cliques)

    def isometry_error(self) -> float:
        return verify_isometry(QuasimetricSpace(self.source.distances),
                               QuasimetricSpace(self.host.distances), self.embed)

    def structure_violations(self) -> list[str]:
        issues = []
        seen = set()
        for i, c in enumerate(self.cliques):
            if len(c) != self.k:
                issues.append(f"clique {i} has size {len(c)}")
            if seen & set(c):
                issues.append(f"clique {i} overlaps an earlier clique")
            seen |= set(c)
        if seen != set(range(self.host.n)):
            issues.append("cliques do not cover the host")
        want = set()
        for i in range(len(self.cliques) - 1):
            block = self.cliques[i] + self.cliques[i + 1]
            want |= {(a, b) for a in block for b in block if a != b}
        have = set(zip(self.host.tails.tolist(), self.host.heads.tolist()))
        if have != want or len(have) != self.host.m:
            issues.append("edge set differs from all ordered pairs of adjacent cliques")
        return issues


def _pad_bags(bags: list[list[int]], size: int) -> list[list[int]]:
    bags = [sorted(b) for b in bags]
    for _ in range(size * len(bags) + 1):
        changed = False
        for i, b in enumerate(bags):
            if len(b) >= size:
                continue
            for j in (i + 1, i - 1):
                if 0 <= j < len(bags):
                    extra = [v for v in bags[j] if v not in b]
                    if extra:
                        b.append(extra[0])
                        b.sort()
                        changed = True
                        break
        if not changed:
            break
    if any(len(b) != size for b in bags):
        raise DecompositionError("could not pad bags to equal size")
    return bags


def embed_path_of_cliques(g: WeightedDigraph, pd: PathDecomposition) -> PathOfCliques:
    """Isometric embedding into a path of (width + 1)-cliques."""
    issues = pd.validate(g)
    if issues:
        raise DecompositionError("; ".join(issues[:5]))
    d = g.distances
    if not np.all(np.isfinite(d)):
        raise DecompositionError("source graph must be strongly connected")
    bags = [list(b) for b in pd.bags]
    # drop bags contained in a neighbour
    changed = True
    while changed and len(bags) > 1:
        changed = False
        for i in range(len(bags)):
            nbrs = [j for j in (i - 1, i + 1) if 0 <= j < len(bags)]
            if any(set(bags[i]) <= set(bags[j]) for j in nbrs):
                del bags[i]
                changed = True
                break
    size = max(len(b) for b in bags)
    bags = _pad_bags(bags, size)
    if len(bags) == 1:
        bags = [bags[0], list(bags[0])]
    origin, layer, cliques = [], [], []
    for i, b in enumerate(bags):
        ids = []
        for v in b:
            ids.append(len(origin))
            origin.append(v)
            layer.append(i)
        cliques.append(tuple(ids))
    origin_arr = np.asarray(origin, dtype=np.int64)
    layer_arr = np.asarray(layer, dtype=np.int64)
    pairs = set()
    for i in range(len(cliques) - 1):
        block = cliques[i] + cliques[i + 1]
        pairs |= {(a, b) for a in block for b in block if a != b}
    pairs = sorted(pairs)
    tails = np.array([a for a, _ in pairs], dtype=np.int64)
    heads = np.array([b for _, b in pairs], dtype=np.int64)
    weights = d[origin_arr[tails], origin_arr[heads]]
    host = WeightedDigraph(len(origin), tails, heads, weights, np.ones(len(pairs)))
    horizontal = layer_arr[tails] != layer_arr[heads]
    forward = layer_arr[heads] == layer_arr[tails] + 1
    embed = np.full(g.n, -1, dtype=np.int64)
    for hv in range(len(origin) - 1, -1, -1):
        embed[origin_arr[hv]] = hv
    return PathOfCliques(g, host, tuple(cliques), _ro(origin_arr), _ro(embed), _ro(layer_arr),
                         _ro(horizontal), _ro(forward))


def as_path_of_cliques(g: WeightedDigraph, cliques: Sequence[Sequence[int]]) -> PathOfCliques:
    """View a graph that already is a path of cliques as its own host.

    Edge weights are replaced by shortest-path distances, which leaves the
    quasimetric unchanged; vertex ids are kept.
    """
    cl = tuple(tuple(int(v) for v in c) for c in cliques)
    if len(cl) < 2:
        raise DecompositionError("need at least two cliques")
    d = g.distances
    if not np.all(np.isfinite(d)):
        raise DecompositionError("graph must be strongly connected")
    layer = np.full(g.n, -1, dtype=np.int64)
    for i, c in enumerate(cl):
        layer[list(c)] = i
    host = g.with_weights(d[g.tails, g.heads])
    ident = np.arange(g.n, dtype=np.int64)
    pc = PathOfCliques(g, host, cl, _ro(ident), _ro(ident.copy()), _ro(layer),
                       _ro(layer[g.tails] != layer[g.heads]), _ro(layer[g.heads] == layer[g.tails] + 1))
    issues = pc.structure_violations()
    if issues:
        raise DecompositionError("; ".join(issues))
    return pc


# --------------------------------------------------------------------------
# isometry
# --------------------------------------------------------------------------


def verify_isometry(source: QuasimetricSpace, host: QuasimetricSpace, mapping) -> float:
    """Largest |d_host(f(u), f(v)) - d_source(u, v)| over ordered pairs."""
    f = np.asarray(mapping, dtype=np.int64)
    if f.shape != (source.n,):
        raise ValueError("mapping must cover every source vertex")
    a = source.d
    b = host.d[np.ix_(f, f)]
    both_inf = np.isinf(a) & np.isinf(b)
    diff = np.where(both_inf, 0.0, np.abs(a - b))
    diff = np.where(np.isnan(diff), np.inf, diff)
    return float(diff.max()) if diff.size else 0.0
