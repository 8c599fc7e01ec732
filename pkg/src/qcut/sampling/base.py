"""Sampler configuration, distributions over quasipartitions, Lipschitz estimates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

from ..core import TOL, Quasipartition, QuasimetricSpace


@dataclass(frozen=True)
class SamplerConfig:
    r: float
    seed: int = 0
    samples: int = 1000

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("r must be positive")
        if int(self.samples) < 1:
            raise ValueError("sample budget must be at least 1")


def rng_for(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for sample ``index`` of run ``seed``."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(index)])
    return np.random.Generator(np.random.Philox(ss))


class QuasipartitionDistribution:
    """Either an explicit finite support or a seeded sampler.

    Explicit supports merge equal relations and must sum to one.
    """

    def __init__(self, members=None, sampler: Callable[[np.random.Generator], Quasipartition] | None = None,
                 config: SamplerConfig | None = None, n: int | None = None):
        if (members is None) == (sampler is None):
            raise ValueError("give exactly one of members or sampler")
        self.sampler = sampler
        self.config = config
        if members is not None:
            merged: dict[bytes, list] = {}
            for q, p in members:
                if p < -TOL:
                    raise ValueError("negative probability")
                k = q.key() + q.n.to_bytes(4, "little")
                if k in merged:
                    merged[k][1] += float(p)
                else:
                    merged[k] = [q, float(p)]
            self.members = tuple((q, p) for q, p in merged.values() if p > 0)
            total = sum(p for _, p in self.members)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"probabilities sum to {total}, not 1")
            sizes = {q.n for q, _ in self.members}
            if len(sizes) > 1:
                raise ValueError("members differ in size")
            self.n = sizes.pop() if sizes else (n or 0)
        else:
            self.members = None
            self.n = n

    @property
    def is_explicit(self) -> bool:
        return self.members is not None

    @property
    def support_size(self) -> int:
        if not self.is_explicit:
            raise ValueError("sampler distributions have no explicit support")
        return len(self.members)

    def sample(self, index: int, seed: int | None = None) -> Quasipartition:
        s = self.config.seed if seed is None and self.config else (seed or 0)
        rng = rng_for(s, index)
        if self.is_explicit:
            probs = np.array([p for _, p in self.members])
            j = int(np.searchsorted(np.cumsum(probs), rng.random() * probs.sum(), side="right"))
            return self.members[min(j, len(self.members) - 1)][0]
        return self.sampler(rng)

    def draw(self, count: int, seed: int | None = None) -> list[Quasipartition]:
        return [self.sample(i, seed) for i in range(count)]

    def separation(self) -> np.ndarray:
        """Exact Pr[(u, v) not in Q] for an explicit support."""
        if not self.is_explicit:
            raise ValueError("exact probabilities need an explicit support")
        out = np.zeros((self.n, self.n))
        for q, p in self.members:
            out += p * (~q.rel)
        return out

    def total_variation(self, samples: Iterable[Quasipartition]) -> float:
        """TV distance between the explicit law and an empirical sample."""
        counts: dict[bytes, int] = {}
        total = 0
        for q in samples:
            counts[q.key()] = counts.get(q.key(), 0) + 1
            total += 1
        tv = 0.0
        for q, p in self.members:
            tv += abs(p - counts.pop(q.key(), 0) / total)
        tv += sum(counts.values()) / total
        return 0.5 * tv


class LipschitzReport(NamedTuple):
    prob: np.ndarray
    witness: np.ndarray
    max_witness: float
    halfwidth: np.ndarray | None
    samples: int


def wilson_interval(k, n, z: float = 1.96):
    """Wilson score interval (low, high) for k successes out of n."""
    k = np.asarray(k, dtype=float)
    p = k / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return mid - half, mid + half


def separation_counts(samples: Iterable[Quasipartition]) -> tuple[np.ndarray, int]:
    acc = None
    n = 0
    for q in samples:
        if acc is None:
            acc = np.zeros(q.rel.shape, dtype=np.int64)
        acc += ~q.rel
        n += 1
    return acc, n


def estimate_lipschitz(dist: QuasipartitionDistribution, q: QuasimetricSpace, r: float,
                       samples: int | None = None, seed: int | None = None,
                       z: float = 1.96) -> LipschitzReport:
    """Separation probabilities and beta witnesses Pr * r / d.

    Witnesses are reported for pairs with 0 < d <= r; pairs at distance zero
    that are ever separated get an infinite witness.
    """
    if dist.is_explicit:
        prob = dist.separation()
        half = None
        count = 0
    else:
        count = samples or (dist.config.samples if dist.config else 1000)
        acc, _ = separation_counts(dist.draw(count, seed))
        prob = acc / count
        lo, hi = wilson_interval(acc, count, z)
        half = (hi - lo) / 2
    d = q.d
    off = ~np.eye(q.n, dtype=bool)
    witness = np.zeros_like(prob)
    use = off & (d > TOL) & (d <= r + TOL)
    witness[use] = prob[use] * r / d[use]
    zero = off & (d <= TOL) & (prob > 0)
    witness[zero] = np.inf
    mx = float(witness.max()) if witness.size else 0.0
    return LipschitzReport(prob, witness, mx, half, count)
