"""Event-driven, self-updating contingency list.

Time advances in 1 ms ticks. Each tick first lets the ongoing cascade take
one synchronous step, then applies the events stamped with that tick, and,
if any state changed, recomputes the list:

1. the K=1 list (red vertices, power entities first),
2. communication vertices already dragged below their state at the last
   event by the unfolding cascade,
3. communication vertices whose every bus or every communication neighbor
   is failed or listed (see :func:`gridcon.heuristic.augment`).

Entities at 0 stay at 0, which has the same effect as dropping their IDRs.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from pathlib import Path

from .cascade import DamageMetric, engine_for
from .contingency import ContingencyResult, Solver, exact_k_contingency
from .entities import parse_token, tokens
from .errors import ContingencyError, EntityError, UnknownEntityError
from .heuristic import augment, heuristic_k_contingency
from .idr import STATES, Model

DEFAULT_BUDGET_MS = 33.0


@dataclass(frozen=True, order=True)
class FailureEvent:
    time: int
    entity: object
    new_state: int

    def __post_init__(self):
        if self.new_state not in STATES:
            raise ContingencyError(f"event state must be 0, 1 or 2, got {self.new_state!r}")
        if self.time < 0:
            raise ContingencyError(f"event time must be non-negative, got {self.time}")


def read_events(source):
    """Parse ``time_ms,entity,new_state`` lines (header and ``#`` comments allowed)."""
    text = Path(source).read_text() if isinstance(source, Path) else source
    out = []
    for n, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if row[0].strip() == "time_ms":
            continue
        if len(row) != 3:
            raise ContingencyError(f"event line {n}: expected time_ms,entity,new_state")
        try:
            out.append(FailureEvent(int(row[0]), parse_token(row[1].strip()), int(row[2])))
        except (ValueError, EntityError) as exc:
            raise ContingencyError(f"event line {n}: {exc}") from None
    return out


def write_events(events):
    rows = ["time_ms,entity,new_state"]
    rows += [f"{e.time},{e.entity},{e.new_state}" for e in events]
    return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class ListUpdate:
    """State of the self-updating list after one tick."""

    t: int | None
    events: tuple
    result: ContingencyResult
    recomputed: bool
    elapsed_ms: float
    over_budget: bool

    @property
    def entities(self):
        return self.result.ranked

    def to_json(self, timing=True):
        return {
            "t": self.t,
            "events": [[e.time, str(e.entity), e.new_state] for e in self.events],
            "list": [str(e) for e in self.result.ranked],
            "sets": [tokens(s) for s in self.result.best_sets],
            "damage": self.result.damage_value,
            "recomputed": self.recomputed,
            "elapsed_ms": round(self.elapsed_ms, 3) if timing else 0.0,
            "over_budget": self.over_budget if timing else False,
        }


def _solve(network, k, solver, metric, model):
    if solver is Solver.EXACT:
        return exact_k_contingency(network, k, metric, model)
    return heuristic_k_contingency(network, k, metric, model)


def _recompute(network, k, solver, metric, model, reference):
    res = _solve(network, k, solver, metric, model)
    reds = res.ranked
    if k > 1 and solver is Solver.EXACT:
        reds = exact_k_contingency(network, 1, metric, model).ranked
    states = network.states
    listed = list(reds)
    affected = sorted(
        e for e in network.nodes
        if e.is_comm_node and states[e] < reference[e] and e not in listed
    )
    listed += affected
    listed += [e for e in augment(network, listed) if e not in listed]
    return ContingencyResult(
        res.k, res.best_sets, res.damage_value, res.metric, res.solver, res.elapsed_ms, listed, res.coloring
    )


def self_updating_list(
    network,
    events=(),
    k=1,
    solver=Solver.HEURISTIC,
    metric=DamageMetric.STATE_LOSS,
    model=Model.MIIM,
    horizon_ms=0,
    budget_ms=DEFAULT_BUDGET_MS,
):
    """Replay ``events`` and return one :class:`ListUpdate` per tick.

    Ticks run from the first event to ``max(last event, first + horizon_ms)``.
    With no events the single update is the plain solver result.
    """
    solver = Solver(solver)
    metric = DamageMetric(metric)
    model = Model(model)
    events = sorted(events, key=lambda e: e.time)
    for ev in events:
        if ev.entity not in network.entities:
            raise UnknownEntityError(f"event references unknown entity {ev.entity}")
    if not events:
        start = time.perf_counter()
        res = _solve(network, k, solver, metric, model)
        ms = (time.perf_counter() - start) * 1000
        return [ListUpdate(None, (), res, True, ms, ms > budget_ms)]

    eng = engine_for(network, model)
    hard = eng.mask(network.hardened)
    s = eng.encode(network.states)
    t0 = events[0].time
    t_end = max(events[-1].time, t0 + horizon_ms)
    pending = list(events)
    reference = None
    result = None
    updates = []
    for t in range(t0, t_end + 1):
        changed = False
        if t > t0:
            changed = bool(eng.step(s, hard, eng.targets, eng.all_links))
        fired = []
        while pending and pending[0].time == t:
            ev = pending.pop(0)
            i = eng.index[ev.entity]
            if s[i] != ev.new_state:
                s[i] = ev.new_state
                changed = True
            fired.append(ev)
        if fired:
            reference = eng.decode(s)
        if changed or result is None:
            start = time.perf_counter()
            current = network.with_states(eng.decode(s))
            result = _recompute(current, k, solver, metric, model, reference)
            ms = (time.perf_counter() - start) * 1000
            updates.append(ListUpdate(t, tuple(fired), result, True, ms, ms > budget_ms))
        else:
            updates.append(ListUpdate(t, tuple(fired), result, False, 0.0, False))
    return updates
