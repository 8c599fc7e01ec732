"""Config-driven experiment runner.

Config files are ``key = value`` lines; ``#`` starts a comment. Lists are
comma separated. Recognized keys:

    algorithm   tw2 | pathwidth | cycle | tree | multicut | sparsest | kpr | lowerbound
    family      generator family (defaults per algorithm)
    n           instance size, or a comma-separated list of sizes
    instances   instances per size (default 1)
    seed        base seed (default 0)
    k           width for pathwidth-k, clique size for the pathwidth sampler
    r_fraction  r as a fraction of the host diameter (samplers)
    samples     samples per instance
    support_samples  Monte Carlo draws for the exact-law comparison (default 100000)
    alpha       pathwidth scale exponent
    delta_fraction  target bound as a fraction of the host diameter (default 0.25)
    pairs       terminal pairs per multicut instance
    rounds      KPR rounds (default 3)
    checks      subset of the algorithm's checks (default: all)
    workers     process pool size (default 1)
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..cuts import (CutInstance, brute_force_multicut, brute_force_sparsest_cut, round_multicut,
                    round_sparsest_cut, solve_multicut_lp, solve_sparsest_cut_lp)
from . import checks as ck
from .generators import FAMILIES, GeneratorSpec, generate
from .kpr import counterexample, kpr_generalized
from .lowerbound import default_candidates, lowerbound_dual_check
from .pipelines import pathwidth_support, tw2_samples

ALGORITHMS = {
    "tw2": ("series-parallel", ("isometry", "canonical", "bounded", "lipschitz")),
    "pathwidth": ("pathwidth-k", ("isometry", "lipschitz", "bounded", "support")),
    "cycle": ("cycle", ("law",)),
    "tree": ("tree", ("law",)),
    "multicut": ("series-parallel", ("sandwich",)),
    "sparsest": ("series-parallel", ("sandwich",)),
    "kpr": ("kpr-counterexample", ("fails", "rounds_n")),
    "lowerbound": (None, ("dual",)),
}


class ConfigError(ValueError):
    pass


def _value(text: str):
    text = text.strip()
    if "," in text:
        return [_value(t) for t in text.split(",") if t.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    return text


def parse_config(text: str) -> dict:
    cfg = {}
    for num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {num}: expected 'key = value'")
        key, val = line.split("=", 1)
        key = key.strip().lower().replace("-", "_")
        if not key:
            raise ConfigError(f"line {num}: empty key")
        cfg[key] = _value(val)
    return normalize_config(cfg)


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


def normalize_config(cfg: dict) -> dict:
    cfg = dict(cfg)
    algo = cfg.get("algorithm")
    if algo not in ALGORITHMS:
        raise ConfigError(f"algorithm must be one of {sorted(ALGORITHMS)}")
    fam, all_checks = ALGORITHMS[algo]
    cfg.setdefault("family", fam)
    if cfg["family"] is not None and cfg["family"] not in FAMILIES:
        raise ConfigError(f"unknown family {cfg['family']!r}")
    sizes = cfg.get("n", 8)
    cfg["n"] = [int(x) for x in (sizes if isinstance(sizes, list) else [sizes])]
    checks = cfg.get("checks", list(all_checks))
    checks = checks if isinstance(checks, list) else [checks]
    unknown = set(checks) - set(all_checks)
    if unknown:
        raise ConfigError(f"unknown checks {sorted(unknown)} for {algo}")
    cfg["checks"] = checks
    for key, default in (("instances", 1), ("seed", 0), ("workers", 1), ("rounds", 3), ("pairs", 3)):
        cfg[key] = int(cfg.get(key, default))
    cfg["samples"] = int(cfg.get("samples", 200))
    cfg["r_fraction"] = float(cfg.get("r_fraction", 0.25))
    cfg["k"] = int(cfg.get("k", 2))
    return cfg


# --------------------------------------------------------------------------
# per-instance jobs
# --------------------------------------------------------------------------


def _tw2(cfg, n, seed):
    inst = generate(GeneratorSpec(cfg["family"], n, seed=seed))
    out = {}
    if "isometry" in cfg["checks"]:
        out["isometry"] = ck.check_isometry_tw2(inst)
    if "canonical" in cfg["checks"]:
        out["canonical"] = ck.check_canonical(inst)
    host = ck.tw2_host(inst)
    if "bounded" in cfg["checks"]:
        out["bounded"] = ck.check_tw2_bounded(inst, cfg["r_fraction"], cfg["samples"], seed, host)
    if "lipschitz" in cfg["checks"]:
        out["lipschitz"] = ck.check_tw2_lipschitz(inst, cfg["r_fraction"], cfg["samples"], seed, host)
    return out


def _pathwidth(cfg, n, seed):
    inst, pc = ck.pathwidth_host(n, cfg["k"], seed)
    out = {}
    if "isometry" in cfg["checks"]:
        out["isometry"] = ck.check_isometry_pathwidth(inst.graph, pc)
    if "lipschitz" in cfg["checks"]:
        out["lipschitz"] = ck.check_pathwidth_lipschitz(pc, cfg["r_fraction"], cfg["samples"], seed)
    if "bounded" in cfg["checks"]:
        out["bounded"] = ck.pathwidth_bounded_fraction(pc, float(cfg.get("alpha", 1)), cfg["samples"],
                                                       seed, float(cfg.get("delta_fraction", 0.25)))
    if "support" in cfg["checks"]:
        out["support"] = ck.check_pathwidth_support(pc, cfg["r_fraction"],
                                                    int(cfg.get("support_samples", 100000)), seed)
    return out


def _cycle(cfg, n, seed):
    return {"law": ck.check_cycle(generate(GeneratorSpec("cycle", n, seed=seed)).graph)}


def _tree(cfg, n, seed):
    return {"law": ck.check_tree(generate(GeneratorSpec("tree", n, seed=seed)).graph)}


def _terminal_pairs(n, count, seed):
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    pairs = []
    while len(pairs) < min(count, n * (n - 1)):
        s, t = (int(v) for v in rng.choice(n, 2, replace=False))
        if (s, t) not in pairs:
            pairs.append((s, t))
    return pairs


def _lipschitz_family(inst, x, bound, seed, samples):
    if inst.tree_decomposition is not None:
        return tw2_samples(inst.graph, x, bound, inst.tree_decomposition, samples, seed), {}
    dist, alpha = pathwidth_support(inst.graph, x, bound, inst.path_decomposition)
    return dist, {"alpha": alpha}


def _multicut(cfg, n, seed):
    inst = generate(GeneratorSpec(cfg["family"], n, seed=seed, k=cfg["k"], capacity_range=(1, 5)))
    ci = CutInstance(inst.graph, _terminal_pairs(n, cfg["pairs"], seed), np.ones(cfg["pairs"]))
    eps = float(cfg.get("eps", 1e-6))
    frac = solve_multicut_lp(ci, eps)
    dist, extra = _lipschitz_family(inst, frac.x, 1 - eps, seed, cfg["samples"])
    sol = round_multicut(ci, dist, frac, eps, cfg["samples"], seed)
    opt = brute_force_multicut(ci).cost if inst.graph.m <= 20 else None
    beta = sol.info["beta"]
    ok = sol.cost <= beta / (1 - eps) * frac.objective + 1e-9 and (
        opt is None or frac.objective <= opt + 1e-7)
    return {"sandwich": {"pass": bool(ok), "lp": frac.objective, "opt": opt, "rounded": sol.cost,
                         "beta": beta, "m": inst.graph.m, **extra}}


def _sparsest(cfg, n, seed):
    inst = generate(GeneratorSpec(cfg["family"], n, seed=seed, k=cfg["k"], capacity_range=(1, 5)))
    ci = CutInstance.uniform(inst.graph)
    frac = solve_sparsest_cut_lp(ci)
    dist, extra = _lipschitz_family(inst, frac.x, 1.0 / (4 * n * n), seed, cfg["samples"])
    sol = round_sparsest_cut(ci, dist, frac, cfg["samples"], seed)
    opt = brute_force_sparsest_cut(ci).sparsity if n <= 8 else None
    ratio = sol.sparsity / opt if opt else None
    ok = opt is None or (frac.objective <= opt + 1e-7 and opt <= sol.sparsity + 1e-9)
    if "max_ratio" in cfg and ratio is not None:
        ok = ok and ratio <= float(cfg["max_ratio"])
    return {"sandwich": {"pass": bool(ok), "lp": frac.objective, "opt": opt, "rounded": sol.sparsity,
                         "ratio": ratio, "case": sol.info["case"], **extra}}


def _kpr(cfg, n, seed):
    r = float(cfg.get("r", 1.0))
    out = {}
    if cfg["family"] == "kpr-counterexample":
        g = counterexample(n, r, check=False).graph
        policy = list(range(n))
    else:
        g = generate(GeneratorSpec(cfg["family"], n, seed=seed)).graph
        policy = "random"
    if "fails" in cfg["checks"]:
        res = kpr_generalized(g, r, policy, cfg["rounds"], seed)
        out["fails"] = {"pass": not res.bounded, "worst_pair": res.worst_pair,
                        "worst_distance": res.worst_distance, "r": r}
    if "rounds_n" in cfg["checks"]:
        res = kpr_generalized(g, r, policy, n, seed)
        out["rounds_n"] = {"pass": res.bounded, "worst_distance": res.worst_distance, "r": r}
    return out


def _lowerbound(cfg, n, seed):
    rows = lowerbound_dual_check(n, default_candidates(n, seeds=(seed, seed + 1)))
    return {"dual": {"pass": all(r["holds"] for r in rows),
                     "candidates": [{**r, "average_stretch": str(r["average_stretch"])} for r in rows]}}


_JOBS = {"tw2": _tw2, "pathwidth": _pathwidth, "cycle": _cycle, "tree": _tree,
         "multicut": _multicut, "sparsest": _sparsest, "kpr": _kpr, "lowerbound": _lowerbound}


def _job(args):
    cfg, n, seed = args
    t0 = time.perf_counter()
    res = _JOBS[cfg["algorithm"]](cfg, n, seed)
    return {"n": n, "seed": seed, "checks": res, "seconds": time.perf_counter() - t0}


def run_experiment(config) -> dict:
    """Run every (size, instance) job and collect verdicts; deterministic given seeds."""
    if isinstance(config, (str, Path)):
        cfg = load_config(config)
    else:
        cfg = normalize_config(config)
    jobs = [(cfg, n, cfg["seed"] + i) for n in cfg["n"] for i in range(cfg["instances"])]
    t0 = time.perf_counter()
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(cfg["workers"]) as pool:
            rows = list(pool.map(_job, jobs))
    else:
        rows = [_job(j) for j in jobs]
    verdicts = {}
    for row in rows:
        for name, res in row["checks"].items():
            verdicts[name] = verdicts.get(name, True) and bool(res["pass"])
    return {"config": cfg, "results": rows, "verdicts": verdicts, "pass": all(verdicts.values()),
            "seconds": time.perf_counter() - t0}
