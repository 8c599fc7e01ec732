"""Text and JSON formats.

Graph text: first line ``n m``, then ``m`` lines ``tail head weight [capacity]``.
Pairs: lines ``s t dem``. Decompositions: one bag per line, ``parent v1 v2 ...``
where ``parent`` is the index of the parent bag (-1 for the root).
In every text format ``#`` starts a comment and blank lines are ignored.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import DirectedCutMetric, DirectedL1Embedding, GraphError, WeightedDigraph
from .decompositions import PathDecomposition, TreeDecomposition

INF = "inf"


def _lines(source):
    text = Path(source).read_text() if isinstance(source, Path) or (
        isinstance(source, str) and source and "\n" not in source and Path(source).is_file()) else str(source)
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield num, line.split()


# --------------------------------------------------------------------------
# graphs
# --------------------------------------------------------------------------


def read_graph(source) -> WeightedDigraph:
    """Parse a path or the text itself."""
    it = _lines(source)
    try:
        num, head = next(it)
    except StopIteration:
        raise GraphError("empty graph file") from None
    if len(head) != 2:
        raise GraphError(f"line {num}: header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    edges = []
    for num, parts in it:
        if len(parts) not in (3, 4):
            raise GraphError(f"line {num}: expected 'tail head weight [capacity]'")
        edges.append((int(parts[0]), int(parts[1]), *map(float, parts[2:])))
    if len(edges) != m:
        raise GraphError(f"header says {m} edges, found {len(edges)}")
    return WeightedDigraph.from_edges(n, edges)


def format_graph(g: WeightedDigraph, capacities: bool = True) -> str:
    out = [f"{g.n} {g.m}"]
    for e in range(g.m):
        row = f"{int(g.tails[e])} {int(g.heads[e])} {g.weights[e]:.17g}"
        if capacities:
            row += f" {g.capacities[e]:.17g}"
        out.append(row)
    return "\n".join(out) + "\n"


def write_graph(g: WeightedDigraph, path) -> None:
    Path(path).write_text(format_graph(g))


# --------------------------------------------------------------------------
# pairs and decompositions
# --------------------------------------------------------------------------


def read_pairs(source) -> tuple[list[tuple[int, int]], np.ndarray]:
    pairs, dem = [], []
    for num, parts in _lines(source):
        if len(parts) not in (2, 3):
            raise ValueError(f"line {num}: expected 's t [dem]'")
        pairs.append((int(parts[0]), int(parts[1])))
        dem.append(float(parts[2]) if len(parts) == 3 else 1.0)
    return pairs, np.array(dem)


def read_decomposition(source) -> TreeDecomposition | PathDecomposition:
    """A chain (parent i - 1 on line i) comes back as a path decomposition."""
    bags, parent = [], []
    for num, parts in _lines(source):
        if len(parts) < 2:
            raise ValueError(f"line {num}: expected 'parent v1 [v2 ...]'")
        parent.append(int(parts[0]))
        bags.append(tuple(int(v) for v in parts[1:]))
    if parent == list(range(-1, len(bags) - 1)):
        return PathDecomposition(tuple(bags))
    return TreeDecomposition(tuple(bags), tuple(parent))


def format_decomposition(dec: TreeDecomposition | PathDecomposition) -> str:
    if isinstance(dec, PathDecomposition):
        parent = list(range(-1, len(dec.bags) - 1))
    else:
        parent = list(dec.parent)
    return "".join(f"{p} {' '.join(map(str, b))}\n" for p, b in zip(parent, dec.bags))


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def to_jsonable(obj):
    """Numpy arrays to lists, infinities to "inf", fractions to strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return INF if x > 0 else "-" + INF
        if math.isnan(x):
            return None
        return x
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    return json.dumps(to_jsonable(obj), indent=indent)


def distances_from_json(rows) -> np.ndarray:
    return np.array([[np.inf if v == INF else float(v) for v in row] for row in rows])


def rle_rows(rel: np.ndarray) -> list[list[list[int]]]:
    """Each row as ``[start, length]`` runs of True entries."""
    out = []
    for row in np.asarray(rel, dtype=bool):
        padded = np.concatenate([[False], row, [False]])
        change = np.flatnonzero(padded[1:] != padded[:-1])
        out.append([[int(a), int(b - a)] for a, b in zip(change[::2], change[1::2])])
    return out


def rle_decode(rows, n: int) -> np.ndarray:
    rel = np.zeros((len(rows), n), dtype=bool)
    for i, runs in enumerate(rows):
        for a, length in runs:
            rel[i, a:a + length] = True
    return rel


def combination_to_json(c) -> dict:
    members = []
    for m, w in c.members:
        if isinstance(m, DirectedCutMetric):
            members.append({"type": "cut", "side": np.flatnonzero(m.side).tolist(), "weight": w})
        else:
            members.append({"type": "zero-one", "table": m.table.astype(int).tolist(), "weight": w})
    return {"n": c.n, "members": members, "info": to_jsonable(c.info)}


def l1_to_json(e: DirectedL1Embedding) -> dict:
    return {"n": e.n, "dim": e.dim, "alpha": e.alpha, "coords": e.coords.tolist()}


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(v, dict) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def to_csv(obj) -> str:
    """A list of flat records becomes a table; anything else becomes key,value rows."""
    data = to_jsonable(obj)
    buf = io.StringIO()
    w = csv.writer(buf)
    if isinstance(data, list) and data and all(isinstance(r, dict) for r in data):
        rows = [dict(_flatten(r)) for r in data]
        keys = list(dict.fromkeys(k for r in rows for k in r))
        w.writerow(keys)
        for r in rows:
            w.writerow([json.dumps(r[k]) if isinstance(r.get(k), list) else r.get(k, "") for k in keys])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(data):
            w.writerow([k, json.dumps(v) if isinstance(v, list) else v])
    return buf.getvalue()
