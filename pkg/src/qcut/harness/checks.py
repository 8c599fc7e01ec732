"""Verification routines shared by the experiment runner, the CLI and the tests.

Each function returns a plain dict with a boolean ``pass`` plus the measured
quantities, so results serialize directly to JSON.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..core import TOL, QuasimetricSpace, WeightedDigraph
from ..decompositions import (PathOfCliques, as_path_of_cliques, build_complementary,
                              canonicalize, classify_child_path, embed_hexagon_tree,
                              embed_path_of_cliques, verify_isometry)
from ..embeddings import (combination_from_distribution, cuts_to_l1, cycle_cut_distribution, cycle_cut_pairs,
                          exact_distortion, tree_cut_distribution)
from ..sampling.base import rng_for
from ..sampling.cycle import cycle_law, structure_violations
from ..sampling.pathwidth import (_relation, enumerate_pathwidth_support, prepare_pathwidth,
                                  removals_for_offset, scale_for, sweep_breakpoints)
from ..sampling.tree import tree_law
from ..sampling.tw2 import host_relation, prepare_tw2, tw2_removals
from .generators import GeneratorSpec, Instance, generate

TW2_BETA = 18.0
CYCLE_LOW, CYCLE_HIGH = 0.5, 14.0
CYCLE_ZERO_ONE_DISTORTION = 28.0
CYCLE_CUT_DISTORTION = 784.0
CYCLE_MAX_PAIRS = 378


def _diameter(d: np.ndarray) -> float:
    fin = d[np.isfinite(d)]
    return float(fin.max()) if fin.size else 0.0


# --------------------------------------------------------------------------
# hosts
# --------------------------------------------------------------------------


def pathwidth_host(n: int, clique_size: int, seed: int = 0, **extra) -> tuple[Instance, PathOfCliques]:
    """Random instance whose host is a path of ``clique_size``-cliques.

    Clique size 1 uses a bidirected path, which is its own host.
    """
    if clique_size < 1:
        raise ValueError("clique size must be at least 1")
    width = max(1, clique_size - 1)
    inst = generate(GeneratorSpec("pathwidth-k", n, seed=seed, k=width, extra=extra))
    if clique_size == 1:
        return inst, as_path_of_cliques(inst.graph, [(v,) for v in range(n)])
    return inst, embed_path_of_cliques(inst.graph, inst.path_decomposition)


def tw2_host(inst: Instance):
    h = embed_hexagon_tree(inst.graph, inst.tree_decomposition)
    hc, rep = canonicalize(h)
    return h, hc, rep, build_complementary(hc)


def check_isometry_tw2(inst: Instance, tol: float = 1e-9) -> dict:
    h = embed_hexagon_tree(inst.graph, inst.tree_decomposition)
    err = h.isometry_error()
    return {"pass": err <= tol, "error": err, "host_n": h.host.n}


def check_isometry_pathwidth(g: WeightedDigraph, pc: PathOfCliques, tol: float = 1e-9) -> dict:
    err = verify_isometry(QuasimetricSpace(g.distances), QuasimetricSpace(pc.host.distances), pc.embed)
    issues = pc.structure_violations()
    return {"pass": err <= tol and not issues, "error": err, "structure": issues[:3], "k": pc.k}


def check_canonical(inst: Instance) -> dict:
    h, hc, rep, _ = tw2_host(inst)
    labels = [classify_child_path(hc, e, p) for e, ps in hc.child_paths.items() for p in ps]
    pos = h.host.weights > 0
    f = hc.host.weights[pos] / h.host.weights[pos]
    zero_ok = bool(np.all(hc.host.weights[~pos] == 0))
    lo = float(f.min()) if f.size else 1.0
    hi = float(f.max()) if f.size else 1.0
    ok = ("neither" not in labels and lo >= 0.5 - TOL and hi <= 2 + TOL and zero_ok
          and rep.distortion <= 2 + TOL)
    return {"pass": bool(ok), "paths": len(labels), "neither": labels.count("neither"),
            "min_factor": lo, "max_factor": hi, "distortion": float(rep.distortion)}


# --------------------------------------------------------------------------
# samplers
# --------------------------------------------------------------------------


def _edge_frequency_check(freq, d_edge, r, beta, samples):
    """freq <= beta d / r + 4 binomial standard errors, edge by edge."""
    se = np.sqrt(freq * (1 - freq) / samples)
    allowed = beta * d_edge / r + 4 * se
    bad = freq > allowed + TOL
    pos = d_edge > TOL
    witness = np.where(pos, freq * r / np.where(pos, d_edge, 1.0), np.where(freq > 0, np.inf, 0.0))
    return {"pass": not bad.any(), "violations": int(bad.sum()), "edges": int(len(freq)),
            "max_witness": float(witness.max()) if witness.size else 0.0, "bound": beta}


def check_tw2_bounded(inst: Instance, r_fraction: float, samples: int, seed: int = 0,
                      host=None) -> dict:
    """Every sample must keep only pairs within 6r on the canonical host."""
    _, hc, _, cs = host or tw2_host(inst)
    d = hc.host.distances
    r = r_fraction * _diameter(d)
    plan = prepare_tw2(hc, cs, r)
    worst = 0.0
    failures = 0
    for i in range(samples):
        rel = host_relation(plan, tw2_removals(plan, rng_for(seed, i)))
        m = float(d[rel].max())
        worst = max(worst, m)
        failures += m > 6 * r + TOL * max(1.0, r)
    return {"pass": failures == 0, "samples": samples, "failures": failures, "r": r,
            "max_ratio": worst / r}


def check_tw2_lipschitz(inst: Instance, r_fraction: float, samples: int, seed: int = 0,
                        host=None) -> dict:
    _, hc, _, cs = host or tw2_host(inst)
    g = hc.host
    d = g.distances
    r = r_fraction * _diameter(d)
    plan = prepare_tw2(hc, cs, r)
    sep = np.zeros(g.m)
    for i in range(samples):
        rel = host_relation(plan, tw2_removals(plan, rng_for(seed, i)))
        sep += ~rel[g.tails, g.heads]
    out = _edge_frequency_check(sep / samples, d[g.tails, g.heads], r, TW2_BETA, samples)
    out.update(r=r, samples=samples)
    return out


def check_pathwidth_lipschitz(pc: PathOfCliques, r_fraction: float, samples: int,
                              seed: int = 0) -> dict:
    """Per-edge removal frequency against (2k^2 + 1) d / r."""
    g = pc.host
    d = g.distances
    r = r_fraction * _diameter(d)
    plan = prepare_pathwidth(pc, r)
    rem = np.zeros(g.m)
    for i in range(samples):
        z = rng_for(seed, i).uniform(0.0, r)
        rem += removals_for_offset(plan, z)
    out = _edge_frequency_check(rem / samples, d[g.tails, g.heads], r, 2 * pc.k ** 2 + 1, samples)
    out.update(r=r, samples=samples, k=pc.k)
    return out


def pathwidth_bounded_fraction(pc: PathOfCliques, alpha: float, samples: int, seed: int = 0,
                               delta_fraction: float = 0.25) -> dict:
    """Samples at r = delta / 2^(alpha k^2) must keep only pairs within delta.

    delta is ``delta_fraction`` times the host diameter; at the full diameter
    every finite pair is trivially within delta.
    """
    g = pc.host
    d = g.distances
    delta = delta_fraction * _diameter(d)
    r = scale_for(delta, pc.k, alpha)
    plan = prepare_pathwidth(pc, r)
    bad = 0
    worst = 0.0
    for i in range(samples):
        z = rng_for(seed, i).uniform(0.0, r)
        rel = _relation(plan, removals_for_offset(plan, z), True)
        m = float(d[rel].max())
        worst = max(worst, m)
        bad += m > delta + TOL * max(1.0, delta)
    return {"pass": bad == 0, "alpha": alpha, "r": r, "delta": delta, "samples": samples,
            "failures": bad, "max_ratio": worst / delta if delta > 0 else 0.0}


def check_pathwidth_support(pc: PathOfCliques, r_fraction: float, samples: int, seed: int = 0,
                            tv_limit: float = 0.02) -> dict:
    """Breakpoints per sweep direction and Monte Carlo agreement with the exact law."""
    g = pc.host
    r = r_fraction * _diameter(g.distances)
    plan = prepare_pathwidth(pc, r)
    _, per_dir = sweep_breakpoints(plan)
    limit = (g.n - 1) * pc.k ** 2
    exact = enumerate_pathwidth_support(pc, r, host=True, plan=plan)
    cache: dict[bytes, bytes] = {}
    counts: dict[bytes, int] = {}
    zs = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 4]))).uniform(0.0, r, samples)
    for z in zs:
        mask = removals_for_offset(plan, float(z))
        mk = np.packbits(mask).tobytes()
        key = cache.get(mk)
        if key is None:
            rel = _kernels.closure(g.n, g.tails, g.heads, ~mask)
            key = np.packbits(rel).tobytes()
            cache[mk] = key
        counts[key] = counts.get(key, 0) + 1
    tv = 0.0
    for q, p in exact.members:
        tv += abs(p - counts.pop(np.packbits(q.rel).tobytes(), 0) / samples)
    tv = 0.5 * (tv + sum(counts.values()) / samples)
    ok = max(per_dir) <= limit and tv <= tv_limit
    return {"pass": bool(ok), "breakpoints": per_dir, "limit": limit, "support": exact.support_size,
            "tv": tv, "samples": samples}


# --------------------------------------------------------------------------
# cycles and trees
# --------------------------------------------------------------------------


def check_cycle(g: WeightedDigraph, cut_embedding: bool = True) -> dict:
    """Exact separation bounds, 0-1 distortion, and the directed-cut combination."""
    law = cycle_law(g)
    lay = law.lay
    d = g.distances
    delta = lay.delta
    p = law.separation()
    off = ~np.eye(g.n, dtype=bool)
    low = float((p[off] - d[off] / (2 * delta)).min())
    high = float((CYCLE_HIGH * d[off] / delta - p[off]).min())
    zo = exact_distortion(combination_from_distribution(law.distribution()), d)
    out = {"n": g.n, "delta": delta, "support": len(law.probs), "low_slack": low, "high_slack": high,
           "structure": structure_violations(lay)[:3], "zero_one_distortion": zo.distortion,
           "removed_max": int(law.removed.sum(axis=1).max())}
    ok = low >= -1e-9 and high >= -1e-9 and zo.distortion <= CYCLE_ZERO_ONE_DISTORTION + 1e-9
    if cut_embedding:
        combo = cycle_cut_distribution(g, law, max_removed=None)
        cd = exact_distortion(combo, d)
        pairs = max(combo.info["pair_counts"])
        valid = all(not rel[np.ix_(cp.side, ~cp.side)].any()
                    for mask, rel in zip(law.removed, law.relations)
                    for cp in cycle_cut_pairs(law, mask))
        out.update(cut_distortion=cd.distortion, max_pairs=pairs, cuts=len(combo))
        ok = ok and valid and cd.distortion <= CYCLE_CUT_DISTORTION + 1e-9 and pairs <= CYCLE_MAX_PAIRS
    out["pass"] = bool(ok)
    return out


def check_tree(g: WeightedDigraph) -> dict:
    """Pr[(u, v) not in Q] = d(u, v) / W and directed l1 distortion 1."""
    w = float(np.sum(g.weights))
    d = g.distances
    p = np.zeros((g.n, g.n))
    for _, q, pr in tree_law(g):
        p += pr * (~q.rel)
    err = float(np.abs(p - d / w).max())
    combo = tree_cut_distribution(g)
    emb = cuts_to_l1(combo, alpha=w)
    dist = exact_distortion(emb, d)
    scale_err = float(np.abs(w * emb.table() - d).max())
    ok = err <= 1e-9 and abs(dist.distortion - 1.0) <= 1e-9 and scale_err <= 1e-9 * max(1.0, w)
    return {"pass": bool(ok), "n": g.n, "probability_error": err, "distortion": dist.distortion,
            "l1_error": scale_err}
