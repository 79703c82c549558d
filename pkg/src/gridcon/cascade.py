"""Synchronous failure propagation through the IDR system.

One step re-evaluates every IDR against the previous step's states
(Jacobi-style) and lowers each target to ``min(current, evaluated)``. Entities
at 0 are absorbing. Line and channel entities have no IDR; a link drops to 0 in
the same step in which both of its endpoints are at 0. Hardened entities are
clamped at their current state.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Mapping

from .entities import tokens
from .errors import CascadeError, EvaluationError, UnknownEntityError
from .idr import REDUCED, Model, leaves, to_python


class DamageMetric(str, enum.Enum):
    STATE_LOSS = "state-loss"
    FAILED_COUNT = "failed-count"


def _xor(vals):
    first = vals[0]
    for v in vals:
        if v != first:
            return 1
    return first


class Engine:
    """IDRs of one network compiled to closures over an integer state list.

    The engine depends only on the network structure (entities, IDRs, links),
    so networks derived with :meth:`Network.with_states` share it.
    """

    def __init__(self, network, model=Model.MIIM):
        self.model = Model(model)
        self.order = tuple(sorted(network.entities))
        self.index = {e: i for i, e in enumerate(self.order)}
        n = len(self.order)
        self.n = n
        self.dependents = [[] for _ in range(n)]
        self.links_at = [[] for _ in range(n)]
        self.targets = []
        sources = []
        for target in sorted(network.idrs):
            idr = network.idrs[target]
            t = self.index[target]
            self.targets.append(t)
            sources.append(f"lambda s: {to_python(idr.expr, self.index, self.model)}")
            for leaf in leaves(idr.expr):
                self.dependents[self.index[leaf]].append(t)
        fns = eval("[" + ",\n".join(sources) + "]", {"_xor": _xor, "min": min, "max": max}) if sources else []
        self.fns = [None] * n
        for t, fn in zip(self.targets, fns):
            self.fns[t] = fn
        self.link_ends = {}
        for link, (a, b) in sorted(network.links.items()):
            li, ai, bi = self.index[link], self.index[a], self.index[b]
            self.link_ends[li] = (ai, bi)
            self.links_at[ai].append(li)
            self.links_at[bi].append(li)
        self.all_links = sorted(self.link_ends)

    # -- conversion ---------------------------------------------------------

    def encode(self, states: Mapping):
        return [states[e] for e in self.order]

    def decode(self, values):
        return dict(zip(self.order, values))

    def mask(self, entities):
        m = [False] * self.n
        for e in entities:
            m[self.index[e]] = True
        return m

    # -- propagation --------------------------------------------------------

    def step(self, s, hard, targets, link_candidates):
        """Apply one synchronous step to ``s`` in place; return changed indices."""
        fns = self.fns
        updates = []
        for i in targets:
            c = s[i]
            if c == 0 or hard[i]:
                continue
            v = fns[i](s)
            if v < c:
                updates.append((i, v))
        for i, v in updates:
            s[i] = v
        cands = set(link_candidates)
        for i, _ in updates:
            cands.update(self.links_at[i])
        ends = self.link_ends
        dead = [
            li for li in sorted(cands)
            if s[li] > 0 and not hard[li] and s[ends[li][0]] == 0 and s[ends[li][1]] == 0
        ]
        for li in dead:
            s[li] = 0
        return [i for i, _ in updates] + dead

    def propagate(self, s, hard, seeds=None, on_step=None, max_steps=None):
        """Run steps until a fixpoint; mutate ``s``; return every changed index.

        With ``seeds=None`` the first step re-evaluates everything. Otherwise
        ``s`` must be a fixpoint apart from the seed entities.
        """
        if seeds is None:
            targets, lcands = self.targets, self.all_links
        else:
            targets, lcands = self._dirty(seeds)
            lcands = set(lcands)
            for i in seeds:
                if i in self.link_ends:
                    lcands.add(i)
        touched = set(seeds or ())
        steps = 0
        while True:
            changed = self.step(s, hard, targets, lcands)
            if not changed:
                return touched
            steps += 1
            if max_steps is not None and steps > max_steps:
                raise CascadeError("cascade did not reach a fixpoint")
            touched.update(changed)
            if on_step is not None:
                on_step(changed)
            targets, lcands = self._dirty(changed)

    def _dirty(self, changed):
        targets = set()
        links = set()
        for i in changed:
            targets.update(self.dependents[i])
            links.update(self.links_at[i])
        return sorted(targets), links

    def settle(self, s, hard):
        s = list(s)
        self.propagate(s, hard, max_steps=2 * self.n + 1)
        return s

    def strike(self, base, hard, seeds):
        """Fail ``seeds`` on top of the fixpoint ``base``; return (final, touched)."""
        s = list(base)
        for i in seeds:
            s[i] = 0
        touched = self.propagate(s, hard, seeds=list(seeds))
        return s, touched

    def loss(self, base, final, touched, metric):
        if metric is DamageMetric.FAILED_COUNT:
            return sum(1 for i in touched if base[i] > 0 and final[i] == 0)
        return sum(base[i] - final[i] for i in touched)


def engine_for(network, model=Model.MIIM) -> Engine:
    """Compiled engine for ``network``, cached on the (immutable) network."""
    model = Model(model)
    cache = network.__dict__.get("_engines")
    if cache is None:
        cache = {}
        object.__setattr__(network, "_engines", cache)
    eng = cache.get(model)
    if eng is None:
        eng = cache[model] = Engine(network, model)
    return eng


def _check_states(states, model):
    if model is Model.IIM:
        bad = [e for e, v in states.items() if v == REDUCED]
        if bad:
            raise EvaluationError(f"IIM runs need binary states; reduced: {tokens(bad)[:5]}")


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class Snapshot:
    t: int
    states: Mapping
    changed: frozenset


@dataclass(frozen=True)
class CascadeTrace:
    baseline: Mapping
    steps: tuple
    initial_failures: frozenset
    hardened: frozenset
    model: Model = Model.MIIM

    @property
    def final(self):
        return self.steps[-1].states

    def __len__(self):
        return len(self.steps)

    def dropped(self):
        """Entities whose final state is below the pre-failure baseline."""
        fin = self.final
        return frozenset(e for e, v in self.baseline.items() if fin[e] < v)

    def to_json(self):
        return [
            {"t": s.t, "states": {str(e): v for e, v in sorted(s.states.items())}, "changed": tokens(s.changed)}
            for s in self.steps
        ]

    def to_csv(self):
        rows = ["t,entity,state"]
        for s in self.steps:
            rows.extend(f"{s.t},{e},{v}" for e, v in sorted(s.states.items()))
        return "\n".join(rows) + "\n"

    def dumps(self):
        return json.dumps(self.to_json())


def cascade_step(network, states=None, model=Model.MIIM, hardened=None):
    """One synchronous step from ``states`` (default: the network's own).

    Returns ``(next_states, changed)``.
    """
    model = Model(model)
    eng = engine_for(network, model)
    states = dict(network.states if states is None else states)
    missing = network.entities - states.keys()
    if missing:
        raise CascadeError(f"states missing for {tokens(missing)[:5]}")
    _check_states(states, model)
    hard = eng.mask(network.hardened | frozenset(hardened or ()))
    s = eng.encode(states)
    changed = eng.step(s, hard, eng.targets, eng.all_links)
    return eng.decode(s), frozenset(eng.order[i] for i in changed)


def run_cascade(network, initial_failures=(), hardened=(), model=Model.MIIM) -> CascadeTrace:
    """Fail ``initial_failures`` at t=0 and step to a steady state."""
    model = Model(model)
    failures = frozenset(initial_failures)
    hard_set = network.hardened | frozenset(hardened)
    unknown = failures - network.entities
    if unknown:
        raise UnknownEntityError(f"unknown entities in failure set: {tokens(unknown)}")
    clash = failures & hard_set
    if clash:
        raise CascadeError(f"cannot fail hardened entities: {tokens(clash)}")
    _check_states(network.states, model)
    eng = engine_for(network, model)
    baseline = dict(network.states)
    s = eng.encode(baseline)
    for e in failures:
        s[eng.index[e]] = 0
    snaps = [Snapshot(0, eng.decode(s), frozenset(e for e in failures if baseline[e] != 0))]

    def record(changed):
        snaps.append(Snapshot(len(snaps), eng.decode(s), frozenset(eng.order[i] for i in changed)))

    eng.propagate(s, eng.mask(hard_set), on_step=record, max_steps=2 * eng.n + 1)
    return CascadeTrace(baseline, tuple(snaps), failures, hard_set, model)


def damage(trace: CascadeTrace, metric=DamageMetric.STATE_LOSS) -> int:
    """Damage of the final snapshot relative to the pre-failure baseline.

    ``STATE_LOSS`` sums state decreases; ``FAILED_COUNT`` counts entities that
    were operational before the failures and sit at 0 at the steady state.
    """
    metric = DamageMetric(metric)
    base, fin = trace.baseline, trace.final
    if metric is DamageMetric.FAILED_COUNT:
        return sum(1 for e, v in base.items() if v > 0 and fin[e] == 0)
    return sum(v - fin[e] for e, v in base.items())


def settle(network, model=Model.MIIM):
    """Copy of ``network`` with its state table advanced to a steady state."""
    trace = run_cascade(network, model=model)
    return network.with_states(trace.final)
