"""K-contingency results and the exhaustive (exact) solver."""

from __future__ import annotations

import enum
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

from .cascade import DamageMetric, engine_for
from .entities import tokens
from .errors import ContingencyError
from .idr import Model


class Solver(str, enum.Enum):
    EXACT = "exact"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class ContingencyResult:
    """Tie group of K-sets with the maximal damage.

    ``ranked`` is the K=1 contingency list in priority order (P-type first),
    which the heuristic and the self-updating list expose alongside the sets.
    """

    k: int
    best_sets: tuple
    damage_value: int
    metric: DamageMetric = DamageMetric.STATE_LOSS
    solver: Solver = Solver.EXACT
    elapsed_ms: float = 0.0
    ranked: tuple = ()
    coloring: Mapping | None = field(default=None, compare=False)

    def __post_init__(self):
        sets = tuple(sorted(tuple(sorted(s)) for s in self.best_sets))
        for s in sets:
            if len(s) != self.k or len(set(s)) != self.k:
                raise ContingencyError(f"set {tokens(s)} does not have {self.k} distinct entities")
        object.__setattr__(self, "best_sets", sets)
        object.__setattr__(self, "ranked", tuple(self.ranked))
        object.__setattr__(self, "metric", DamageMetric(self.metric))
        object.__setattr__(self, "solver", Solver(self.solver))

    @property
    def best(self):
        """First set of the tie group in canonical order."""
        return self.best_sets[0]

    def to_json(self, timing=True):
        doc = {
            "k": self.k,
            "damage": self.damage_value,
            "metric": self.metric.value,
            "solver": self.solver.value,
            "sets": [tokens(s) for s in self.best_sets],
            "list": [str(e) for e in self.ranked],
            "elapsed_ms": round(self.elapsed_ms, 3) if timing else 0.0,
        }
        return doc


def eligible(network, exclude=(), states=None):
    """Entities an attack may target: operational, non-hardened graph vertices.

    Lines and channels are never eligible.
    """
    states = network.states if states is None else states
    exclude = frozenset(exclude)
    return sorted(
        e for e in network.entities
        if e.is_node and states[e] > 0 and e not in network.hardened and e not in exclude
    )


def default_workers():
    raw = os.environ.get("GRIDCON_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class Scorer:
    """Damage of failure sets on top of the settled state of a network."""

    def __init__(self, network, model=Model.MIIM, metric=DamageMetric.STATE_LOSS):
        self.network = network
        self.model = Model(model)
        self.metric = DamageMetric(metric)
        self.engine = engine_for(network, self.model)
        eng = self.engine
        self.hard = eng.mask(network.hardened)
        self.base = eng.settle(eng.encode(network.states), self.hard)
        self.settled = eng.decode(self.base)
        self._cache = {}

    def __call__(self, entities):
        key = frozenset(entities)
        v = self._cache.get(key)
        if v is None:
            v = self._cache[key] = self.indices([self.engine.index[e] for e in key])
        return v

    def indices(self, seeds):
        eng = self.engine
        final, touched = eng.strike(self.base, self.hard, seeds)
        return eng.loss(self.base, final, touched, self.metric)


def _scan(job):
    """Worker body: best damage and tie group for combinations led by ``firsts``."""
    network, model, metric, k, cands, firsts = job
    scorer = Scorer(network, model, metric)
    idx = [scorer.engine.index[e] for e in cands]
    best, group = -1, []
    for f in firsts:
        for rest in itertools.combinations(range(f + 1, len(idx)), k - 1):
            combo = (f, *rest)
            v = scorer.indices([idx[i] for i in combo])
            if v > best:
                best, group = v, [combo]
            elif v == best:
                group.append(combo)
    return best, group


def exact_k_contingency(
    network,
    k,
    metric=DamageMetric.STATE_LOSS,
    model=Model.MIIM,
    exclude=(),
    workers=None,
) -> ContingencyResult:
    """Enumerate every K-subset of eligible entities and return the argmax group.

    Damage is measured against the network's settled state, so pre-existing
    failures in ``network.states`` are propagated before any subset is scored.
    """
    start = time.perf_counter()
    metric = DamageMetric(metric)
    scorer = Scorer(network, model, metric)
    cands = eligible(network, exclude, scorer.settled)
    if not isinstance(k, int) or k < 1:
        raise ContingencyError(f"k must be a positive integer, got {k!r}")
    if k > len(cands):
        raise ContingencyError(f"k={k} exceeds the {len(cands)} eligible entities")
    workers = default_workers() if workers is None else max(1, workers)
    firsts = list(range(len(cands) - k + 1))
    if workers > 1 and math.comb(len(cands), k) > 5000:
        # round-robin split keeps the per-worker load balanced; merge is order-free
        jobs = [
            (network, scorer.model, metric, k, cands, firsts[w::workers]) for w in range(workers)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan, jobs))
        best = max(p[0] for p in parts)
        group = sorted(c for v, g in parts if v == best for c in g)
    else:
        idx = [scorer.engine.index[e] for e in cands]
        best, group = -1, []
        for combo in itertools.combinations(range(len(cands)), k):
            v = scorer.indices([idx[i] for i in combo])
            if v > best:
                best, group = v, [combo]
            elif v == best:
                group.append(combo)
    sets = [tuple(cands[i] for i in combo) for combo in group]
    ranked = ()
    if k == 1:
        ranked = tuple(sorted((s[0] for s in sets), key=lambda e: (e.layer != "P", e)))
    return ContingencyResult(
        k, sets, best, metric, Solver.EXACT, (time.perf_counter() - start) * 1000, ranked
    )
