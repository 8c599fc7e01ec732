"""Command line interface: ``qcut <command> ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io as qio
from .core import TOL, Quasipartition
from .cuts import (CutInstance, brute_force_multicut, brute_force_sparsest_cut, round_multicut,
                   round_sparsest_cut, solve_multicut_lp, solve_sparsest_cut_lp)
from .decompositions import (DecompositionError, PathDecomposition, TreeDecomposition,
                             build_complementary, canonicalize, embed_hexagon_tree,
                             embed_path_of_cliques, exact_pathwidth_decomposition,
                             treewidth2_decomposition)
from .embeddings import (combination_from_distribution, cuts_to_l1, cycle_cut_distribution,
                         exact_distortion, tree_cut_distribution)
from .harness import checks as ck
from .harness.experiment import run_experiment
from .harness.generators import FAMILIES, GeneratorSpec, Instance, generate
from .harness.kpr import counterexample, kpr_generalized
from .harness.lowerbound import (binary_candidate, caterpillar_candidate, lowerbound_dual_check,
                                 path_candidate, random_candidate, star_candidate)
from .harness.pipelines import pathwidth_support, tw2_samples
from .sampling.base import rng_for
from .sampling.cycle import cycle_law, cycle_layout, sample_cycle
from .sampling.pathwidth import prepare_pathwidth, sample_pathwidth, scale_for
from .sampling.tree import sample_tree, tree_distribution
from .sampling.tw2 import prepare_tw2, sample_tw2


def _range(text: str) -> tuple[float, float]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected LO,HI")
    return parts[0], parts[1]


def _decomposition(g, path, kind):
    if path:
        return qio.read_decomposition(Path(path))
    if kind == "tree":
        return treewidth2_decomposition(g)
    return exact_pathwidth_decomposition(g)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_gen(a):
    spec = GeneratorSpec(a.family, a.n, _range(a.weights), _range(a.capacities), a.seed, a.k,
                         not a.real, {"r": a.r, "symmetric": a.symmetric})
    inst = generate(spec)
    if a.decomposition_out:
        dec = inst.tree_decomposition or inst.path_decomposition
        if dec is not None:
            Path(a.decomposition_out).write_text(qio.format_decomposition(dec))
    if a.format == "json":
        return {"n": inst.graph.n, "edges": [list(e) for e in inst.graph.edges()],
                "family": a.family, "seed": a.seed}
    return qio.format_graph(inst.graph)


def _source_bound(d, rels, r):
    worst = 0.0
    for rel in rels:
        off = rel & ~np.eye(len(rel), dtype=bool)
        if off.any():
            worst = max(worst, float(d[off].max()))
    return {"max_distance": worst, "r": r, "ratio": worst / r if r > 0 else None}


def cmd_sample(a):
    g = qio.read_graph(Path(a.graph))
    d = g.distances
    diam = float(d[np.isfinite(d)].max())
    report = {"algorithm": a.algorithm, "seed": a.seed, "samples": a.samples}
    if a.algorithm == "tw2":
        td = _decomposition(g, a.decomposition, "tree")
        hc, _ = canonicalize(embed_hexagon_tree(g, td))
        cs = build_complementary(hc)
        r = a.r or diam / 4
        plan = prepare_tw2(hc, cs, r)
        host = [sample_tw2(hc, cs, r, rng_for(a.seed, i), host=True, plan=plan) for i in range(a.samples)]
        hd = hc.host.distances
        report["host_bound"] = {**_source_bound(hd, [q.rel for q in host], r), "limit": 6 * r}
        f = hc.embed
        qs = [Quasipartition(q.rel[np.ix_(f, f)], check=False) for q in host]
    elif a.algorithm == "pathwidth":
        pd = _decomposition(g, a.decomposition, "path")
        pc = embed_path_of_cliques(g, pd)
        r = scale_for(diam, pc.k, a.alpha) if a.alpha is not None else (a.r or diam / 4)
        plan = prepare_pathwidth(pc, r)
        qs = [sample_pathwidth(pc, r, rng_for(a.seed, i), plan=plan) for i in range(a.samples)]
        report["k"] = pc.k
    elif a.algorithm == "cycle":
        lay = cycle_layout(g)
        r = a.r or lay.delta
        qs = [sample_cycle(g, rng_for(a.seed, i), lay) for i in range(a.samples)]
    else:
        r = a.r or float(np.sum(g.weights))
        qs = [sample_tree(g, rng_for(a.seed, i)) for i in range(a.samples)]
    rels = [q.rel for q in qs]
    report["bound"] = _source_bound(d, rels, r)
    sep = np.mean([~rel for rel in rels], axis=0)
    off = ~np.eye(g.n, dtype=bool)
    use = off & (d > TOL) & np.isfinite(d)
    witness = np.zeros_like(sep)
    witness[use] = sep[use] * r / d[use]
    report.update(r=r, separation=sep, witness=witness, max_witness=float(witness.max()),
                  relations=[qio.rle_rows(rel) for rel in rels] if not a.no_relations else None)
    return report


def cmd_embed(a):
    g = qio.read_graph(Path(a.graph))
    d = g.distances
    if a.kind == "cycle-l1":
        combo = cycle_cut_distribution(g, cycle_law(g), max_removed=None)
        emb = cuts_to_l1(combo)
        rep = exact_distortion(emb, d)
        return {"embedding": qio.l1_to_json(emb), "alpha": rep.alpha, "distortion": rep.distortion,
                "max_pairs": max(combo.info["pair_counts"])}
    if a.kind == "tree-l1":
        combo = tree_cut_distribution(g)
        emb = cuts_to_l1(combo, alpha=combo.info["scale"])
        rep = exact_distortion(emb, d)
        return {"embedding": qio.l1_to_json(emb), "alpha": rep.alpha, "distortion": rep.distortion}
    try:
        dist = tree_distribution(g)
    except ValueError:
        dist = cycle_law(g).distribution()
    combo = combination_from_distribution(dist)
    rep = exact_distortion(combo, d)
    return {"combination": qio.combination_to_json(combo), "alpha": rep.alpha,
            "distortion": rep.distortion}


def _rounding_family(g, x, bound, dec_path, samples, seed):
    dec = qio.read_decomposition(Path(dec_path)) if dec_path else None
    if isinstance(dec, PathDecomposition):
        dist, alpha = pathwidth_support(g, x, bound, dec)
        return dist, {"family": "pathwidth", "alpha": alpha}
    try:
        td = dec if isinstance(dec, TreeDecomposition) else treewidth2_decomposition(g)
        return tw2_samples(g, x, bound, td, samples, seed), {"family": "tw2"}
    except (DecompositionError, ValueError):
        pd = exact_pathwidth_decomposition(g)
        dist, alpha = pathwidth_support(g, x, bound, pd)
        return dist, {"family": "pathwidth", "alpha": alpha}


def cmd_cut(a):
    g = qio.read_graph(Path(a.graph))
    if a.problem == "multicut":
        if not a.pairs:
            raise SystemExit("multicut needs --pairs")
        pairs, dem = qio.read_pairs(Path(a.pairs))
        inst = CutInstance(g, pairs, dem)
        frac = solve_multicut_lp(inst, a.eps)
        dist, meta = _rounding_family(g, frac.x, 1 - a.eps, a.decomposition, a.samples, a.seed)
        sol = round_multicut(inst, dist, frac, a.eps, a.samples, a.seed)
        oracle = brute_force_multicut(inst).cost if a.oracle else None
    else:
        inst = CutInstance.uniform(g)
        frac = solve_sparsest_cut_lp(inst, a.eps)
        dist, meta = _rounding_family(g, frac.x, 1 / (4 * g.n ** 2), a.decomposition, a.samples, a.seed)
        sol = round_sparsest_cut(inst, dist, frac, a.samples, a.seed)
        oracle = brute_force_sparsest_cut(inst).sparsity if a.oracle else None
    return {"problem": a.problem, "x": frac.x, "lp": frac.objective, "cut_edges": list(sol.edges),
            "cost": sol.cost, "demand": sol.demand, "sparsity": sol.sparsity,
            "separated_pairs": len(sol.separated), "oracle": oracle, "rounding": {**meta, **sol.info}}


def cmd_verify(a):
    g = qio.read_graph(Path(a.graph))
    if a.check in ("isometry-tw2", "canonical", "tw2"):
        td = _decomposition(g, a.decomposition, "tree")
        inst = Instance(g, None, td)
        if a.check == "isometry-tw2":
            return ck.check_isometry_tw2(inst)
        if a.check == "canonical":
            return ck.check_canonical(inst)
        host = ck.tw2_host(inst)
        return {"bounded": ck.check_tw2_bounded(inst, a.r_fraction, a.samples, a.seed, host),
                "lipschitz": ck.check_tw2_lipschitz(inst, a.r_fraction, a.samples, a.seed, host)}
    if a.check in ("isometry-pathwidth", "pathwidth"):
        pc = embed_path_of_cliques(g, _decomposition(g, a.decomposition, "path"))
        if a.check == "isometry-pathwidth":
            return ck.check_isometry_pathwidth(g, pc)
        return {"lipschitz": ck.check_pathwidth_lipschitz(pc, a.r_fraction, a.samples, a.seed),
                "support": ck.check_pathwidth_support(pc, a.r_fraction, max(a.samples, 1000), a.seed)}
    if a.check == "cycle":
        return ck.check_cycle(g)
    return ck.check_tree(g)


def cmd_kpr(a):
    if a.graph:
        g = qio.read_graph(Path(a.graph))
        policy = "random"
    else:
        g = counterexample(a.n, a.r, check=False).graph
        policy = list(range(a.n))
    if a.policy != "auto":
        policy = a.policy if a.policy in ("random", "smallest") else [int(v) for v in a.policy.split(",")]
    res = kpr_generalized(g, a.r, policy, a.rounds, a.seed, a.undirected)
    return {"rounds": a.rounds, "r": a.r, "bounded": res.bounded, "worst_pair": res.worst_pair,
            "worst_distance": res.worst_distance, "removed_edges": int(res.removed.sum()),
            "centers": res.centers, "relation": qio.rle_rows(res.relation.rel)}


_CANDIDATES = {"star": star_candidate, "path": path_candidate, "binary": binary_candidate,
               "caterpillar": caterpillar_candidate}


def cmd_lowerbound(a):
    cands = []
    for name in a.candidates.split(","):
        if name.startswith("random"):
            cands.append(random_candidate(a.n, a.seed + len(cands)))
        elif name in _CANDIDATES:
            cands.append(_CANDIDATES[name](a.n))
        else:
            raise SystemExit(f"unknown candidate {name!r}")
    rows = lowerbound_dual_check(a.n, cands)
    return [{**r, "average_stretch": str(r["average_stretch"]),
             "average_stretch_float": float(r["average_stretch"])} for r in rows]


def cmd_experiment(a):
    return run_experiment(a.config)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="qcut", parents=[common],
                                description="Random quasipartitions, directed embeddings and cut rounding.")
    p.set_defaults(seed=0, out=None, format="json")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="generate an instance")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, default=2, help="width for pathwidth-k")
    s.add_argument("--weights", default="1,10")
    s.add_argument("--capacities", default="1,1")
    s.add_argument("--real", action="store_true", help="real-valued instead of integer weights")
    s.add_argument("--r", type=float, default=1.0, help="scale for kpr-counterexample")
    s.add_argument("--symmetric", action="store_true")
    s.add_argument("--decomposition-out")
    s.set_defaults(func=cmd_gen, format="text")

    s = sub.add_parser("sample", parents=[common], help="draw random quasipartitions")
    s.add_argument("algorithm", choices=("tw2", "pathwidth", "cycle", "tree"))
    s.add_argument("--graph", required=True)
    s.add_argument("--decomposition")
    s.add_argument("--r", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--no-relations", action="store_true", help="omit per-sample relations")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("embed", parents=[common], help="directed l1 / convex combinations")
    s.add_argument("kind", choices=("cycle-l1", "tree-l1", "combo"))
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("cut", parents=[common], help="LP and rounding for cut problems")
    s.add_argument("problem", choices=("multicut", "sparsest"))
    s.add_argument("--graph", required=True)
    s.add_argument("--pairs")
    s.add_argument("--uniform", action="store_true", help="uniform demands (sparsest)")
    s.add_argument("--eps", type=float, default=1e-6)
    s.add_argument("--decomposition")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--oracle", action="store_true", help="compare with exhaustive search")
    s.set_defaults(func=cmd_cut)

    s = sub.add_parser("verify", parents=[common], help="run a verification check on a graph")
    s.add_argument("check", choices=("isometry-tw2", "canonical", "tw2", "isometry-pathwidth",
                                     "pathwidth", "cycle", "tree"))
    s.add_argument("--graph", required=True)
    s.add_argument("--decomposition")
    s.add_argument("--r-fraction", type=float, default=0.25)
    s.add_argument("--samples", type=int, default=1000)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("kpr", parents=[common], help="round-limited ball chopping")
    s.add_argument("--graph", help="default: the strip counterexample")
    s.add_argument("--n", type=int, default=16)
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--rounds", type=int, default=3)
    s.add_argument("--policy", default="auto", help="auto, random, smallest, or v0,v1,...")
    s.add_argument("--undirected", action="store_true", help="cut both directions of an edge")
    s.set_defaults(func=cmd_kpr)

    s = sub.add_parser("lowerbound", parents=[common], help="tree-host average stretch on a cycle")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--candidates", default="star,path,binary,caterpillar,random")
    s.set_defaults(func=cmd_lowerbound)

    s = sub.add_parser("experiment", parents=[common], help="run a key-value config")
    s.add_argument("config")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    result = a.func(a)
    if isinstance(result, str):
        text = result
    elif a.format == "csv":
        text = qio.to_csv(result)
    else:
        text = qio.dumps(result) + "\n"
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    if isinstance(result, dict) and result.get("pass") is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
