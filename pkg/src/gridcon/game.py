"""Leader-follower attack/defense games on a smart-grid network.

Three game types are supported:

1. defender leads: it hardens its K-contingency set, the attacker answers
   with the M most damaging non-hardened entities, then the defender arrests
   the cascade with :func:`adaptive_harden`;
2. attacker leads with a predictable footprint (a region): the defender
   hardens the K region members with the highest impact factor, then every
   other region member fails;
3. attacker leads at random: L eligible entities fail (seeded draw) and the
   defender arrests the cascade adaptively with budget K.

Every outcome is compared with an unhardened counterfactual.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .cascade import CascadeTrace, DamageMetric, damage, engine_for, run_cascade
from .contingency import Solver, eligible, exact_k_contingency
from .entities import parse_token, tokens
from .errors import EntityError, GameError, UnknownEntityError
from .events import _recompute
from .heuristic import heuristic_k_contingency
from .idr import Model


class HardeningMode(str, enum.Enum):
    CLAMP = "clamp"
    ISOLATE = "isolate"


# -- payoffs ----------------------------------------------------------------


@dataclass(frozen=True)
class Payoff:
    defender_hardened: int
    defender_not_hardened: int
    attacker_hardened: int
    attacker_not_hardened: int


@dataclass(frozen=True)
class PayoffTable:
    """Per-target utilities; hardening must never hurt the defender or help the attacker."""

    rows: dict

    def __post_init__(self):
        rows = {}
        for target, p in dict(self.rows).items():
            p = p if isinstance(p, Payoff) else Payoff(*p)
            for v in (p.defender_hardened, p.defender_not_hardened, p.attacker_hardened, p.attacker_not_hardened):
                if not isinstance(v, int) or isinstance(v, bool):
                    raise GameError(f"payoff for {target} must be integers, got {v!r}")
            if p.defender_hardened < p.defender_not_hardened:
                raise GameError(f"{target}: defender must gain from hardening")
            if p.attacker_not_hardened < p.attacker_hardened:
                raise GameError(f"{target}: attacker must gain from an unhardened target")
            rows[str(target)] = p
        object.__setattr__(self, "rows", rows)

    def __getitem__(self, target):
        return self.rows[str(target)]

    def defender(self, target, hardened):
        p = self[target]
        return p.defender_hardened if hardened else p.defender_not_hardened

    def attacker(self, target, hardened):
        p = self[target]
        return p.attacker_hardened if hardened else p.attacker_not_hardened

    @classmethod
    def from_json(cls, doc):
        try:
            return cls({t: Payoff(**row) for t, row in doc.items()})
        except TypeError as exc:
            raise GameError(f"bad payoff row: {exc}") from None

    def to_json(self):
        return {t: vars(p).copy() for t, p in sorted(self.rows.items())}


def derived_payoffs(damage_hardened, damage_unhardened, label="attack"):
    """Utilities from damage counts: the defender earns the entities saved."""
    saved = damage_unhardened - damage_hardened
    return PayoffTable({label: Payoff(saved, -damage_unhardened, -saved, damage_unhardened)})


# -- scenarios --------------------------------------------------------------


@dataclass(frozen=True)
class GameScenario:
    game_type: int
    k: int
    m: int = 0
    l: int = 0
    region: tuple = ()
    region_substations: tuple = ()
    attack: tuple = ()
    arrest_k: int | None = None
    seed: int = 0
    solver: Solver = Solver.HEURISTIC
    metric: DamageMetric = DamageMetric.STATE_LOSS
    model: Model = Model.MIIM
    hardening_mode: HardeningMode = HardeningMode.CLAMP

    def __post_init__(self):
        set_ = object.__setattr__
        try:
            set_(self, "solver", Solver(self.solver))
            set_(self, "metric", DamageMetric(self.metric))
            set_(self, "model", Model(self.model))
            set_(self, "hardening_mode", HardeningMode(self.hardening_mode))
        except ValueError as exc:
            raise GameError(str(exc)) from None
        set_(self, "region", tuple(sorted(set(self.region))))
        set_(self, "region_substations", tuple(sorted(set(self.region_substations))))
        set_(self, "attack", tuple(sorted(set(self.attack))))
        if self.game_type not in (1, 2, 3):
            raise GameError(f"game_type must be 1, 2 or 3, got {self.game_type!r}")
        if not isinstance(self.k, int) or self.k < 0:
            raise GameError(f"k must be a non-negative integer, got {self.k!r}")
        if self.game_type == 1 and self.m < 1:
            raise GameError("type 1 games need an attacker budget m >= 1")
        if self.game_type == 2 and not (self.region or self.region_substations):
            raise GameError("type 2 games need a target region")
        if self.game_type == 3 and self.l < 1 and not self.attack:
            raise GameError("type 3 games need l >= 1 (or an explicit attack)")

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, (str, Path)):
            doc = json.loads(Path(doc).read_text())
        known = {
            "game_type", "k", "m", "l", "region", "region_substations", "attack",
            "arrest_k", "seed", "solver", "metric", "model", "hardening_mode",
        }
        extra = set(doc) - known
        if extra:
            raise GameError(f"unknown scenario keys: {sorted(extra)}")
        if "game_type" not in doc or "k" not in doc:
            raise GameError("scenario needs game_type and k")
        args = dict(doc)
        try:
            for key in ("region", "attack"):
                if key in args:
                    args[key] = tuple(parse_token(t) for t in args[key])
        except EntityError as exc:
            raise GameError(f"scenario: {exc}") from None
        if "region_substations" in args:
            args["region_substations"] = tuple(int(s) for s in args["region_substations"])
        return cls(**args)

    def to_json(self):
        doc = {
            "game_type": self.game_type,
            "k": self.k,
            "m": self.m,
            "l": self.l,
            "region": tokens(self.region),
            "region_substations": list(self.region_substations),
            "attack": tokens(self.attack),
            "arrest_k": self.arrest_k,
            "seed": self.seed,
            "solver": self.solver.value,
            "metric": self.metric.value,
            "model": self.model.value,
            "hardening_mode": self.hardening_mode.value,
        }
        return doc


@dataclass(frozen=True)
class GameOutcome:
    scenario: GameScenario
    hardened: frozenset
    attacked: frozenset
    trace: CascadeTrace
    unhardened_trace: CascadeTrace
    damage_hardened: int
    damage_unhardened: int
    operational_before: int
    operational_after_hardened: int
    operational_after_unhardened: int
    predicted: tuple = ()
    ranking: tuple = field(default=())

    @property
    def payoffs(self):
        return derived_payoffs(self.damage_hardened, self.damage_unhardened)

    @property
    def defender_payoff(self):
        return self.payoffs["attack"].defender_hardened

    @property
    def attacker_payoff(self):
        return self.payoffs["attack"].attacker_hardened

    def operational(self):
        return (self.operational_before, self.operational_after_hardened, self.operational_after_unhardened)

    def to_json(self):
        return {
            "scenario": self.scenario.to_json(),
            "hardened": tokens(self.hardened),
            "attacked": tokens(self.attacked),
            "predicted": [str(e) for e in self.predicted],
            "ranking": [[str(e), v] for e, v in self.ranking],
            "damage_hardened": self.damage_hardened,
            "damage_unhardened": self.damage_unhardened,
            "operational_before": self.operational_before,
            "operational_after_hardened": self.operational_after_hardened,
            "operational_after_unhardened": self.operational_after_unhardened,
            "payoffs": self.payoffs.to_json(),
            "defender_payoff": self.defender_payoff,
            "attacker_payoff": self.attacker_payoff,
            "cascade_steps": len(self.trace),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["condition", "operational"])
        w.writerow(["before", self.operational_before])
        w.writerow(["after_hardened", self.operational_after_hardened])
        w.writerow(["after_unhardened", self.operational_after_unhardened])
        return buf.getvalue()


# -- building blocks --------------------------------------------------------


def harden(network, entities, mode=HardeningMode.CLAMP):
    """Copy of ``network`` with ``entities`` hardened.

    Both modes pin the entity's state. ``isolate`` also drops its graph edges,
    so the coloring heuristic sees it as an island.
    """
    out = network.with_hardened(entities)
    if HardeningMode(mode) is HardeningMode.ISOLATE:
        for e in sorted(entities):
            out = out.without_edges_of(e)
    return out


def impact_factor(network, entity, model=Model.MIIM):
    """Number of other entities whose steady state drops when ``entity`` fails."""
    if entity not in network.entities:
        raise UnknownEntityError(f"unknown entity {entity}")
    if entity in network.hardened:
        raise GameError(f"{entity} is hardened and cannot fail")
    eng = engine_for(network, model)
    hard = eng.mask(network.hardened)
    base = eng.settle(eng.encode(network.states), hard)
    i = eng.index[entity]
    if base[i] == 0:
        raise GameError(f"{entity} has already failed")
    final, touched = eng.strike(base, hard, [i])
    return sum(1 for j in touched if j != i and final[j] < base[j])


def _ranked_by_impact(network, candidates, model):
    scored = [(e, impact_factor(network, e, model)) for e in candidates]
    return sorted(scored, key=lambda p: (-p[1], p[0]))


def _solve(network, k, solver, metric, model, exclude=()):
    if Solver(solver) is Solver.EXACT:
        return exact_k_contingency(network, k, metric, model, exclude)
    return heuristic_k_contingency(network, k, metric, model, exclude)


def _seed_failures(network, failures):
    for e in failures:
        if e not in network.entities:
            raise UnknownEntityError(f"unknown entity {e}")
    return network.with_states({e: 0 for e in failures})


def _drops_beyond(trace, seeds):
    return any(e not in seeds for e in trace.dropped())


def adaptive_harden(
    network,
    active_failures=(),
    budget=1,
    solver=Solver.HEURISTIC,
    metric=DamageMetric.STATE_LOSS,
    model=Model.MIIM,
    mode=HardeningMode.CLAMP,
):
    """Harden one highest-impact listed entity at a time until the cascade stops.

    Each round lists the entities the unfolding cascade threatens (the
    self-updating K-contingency list on the predicted steady state), ranks
    them by impact factor on the pre-attack network, and hardens the top
    one. Returns ``(hardened, arrested trace, ranking rounds)``.
    """
    if budget < 0:
        raise GameError(f"budget must be non-negative, got {budget}")
    active = frozenset(active_failures)
    if active & network.hardened:
        raise GameError(f"cannot fail hardened entities {tokens(active & network.hardened)}")
    chosen = []
    rounds = []
    current = network
    trace = run_cascade(current, active, model=model)
    for _ in range(budget):
        if not _drops_beyond(trace, active):
            break
        struck = _seed_failures(current, active)
        settled = struck.with_states(trace.final)
        k = min(budget - len(chosen), max(1, len(eligible(settled))))
        res = _recompute(settled, k, Solver(solver), DamageMetric(metric), Model(model), struck.states)
        listed = [e for e in res.ranked]
        listed += [e for s in res.best_sets for e in s if e not in listed]
        cands = [
            e for e in listed
            if e not in active and e not in current.hardened and current.states[e] > 0
        ]
        if not cands:
            break
        ranking = _ranked_by_impact(current, cands, model)
        rounds.append(tuple(ranking))
        top = ranking[0][0]
        chosen.append(top)
        current = harden(current, [top], mode)
        trace = run_cascade(current, active, model=model)
    return frozenset(chosen), trace, tuple(rounds)


def best_response_attack(
    network, hardened=(), budget=1, metric=DamageMetric.STATE_LOSS,
    model=Model.MIIM, solver=Solver.EXACT,
):
    """Most damaging ``budget`` non-hardened entities (canonical argmax set)."""
    hardened = frozenset(hardened) | network.hardened
    pool = eligible(network, hardened)
    if budget < 1 or budget > len(pool):
        raise GameError(f"attack budget {budget} must be between 1 and {len(pool)} eligible entities")
    res = _solve(network.with_hardened(hardened), budget, solver, metric, model, hardened)
    return frozenset(res.best)


def region_entities(network, region=(), substations=()):
    """Region tokens plus every bus and terminal of the listed substations."""
    ents = set(region)
    for sid in substations:
        if sid not in network.substations:
            raise GameError(f"unknown substation {sid}")
        sub = network.substations[sid]
        ents.update(sub.buses)
        ents.update(sub.entities)
    missing = ents - network.entities
    if missing:
        raise UnknownEntityError(f"unknown region entities {tokens(missing)}")
    return frozenset(ents)


def predicted_vulnerable(network, region, model=Model.MIIM):
    """Entities whose state would drop if the whole region failed."""
    trace = run_cascade(network, region, model=model)
    return tuple(sorted(trace.dropped()))


def _operational(states):
    return sum(1 for v in states.values() if v > 0)


def _outcome(network, scenario, hardened, attacked, predicted=(), ranking=(), footprint=None):
    """Score an attack; ``footprint`` is what fails when nothing is hardened."""
    hardened = frozenset(hardened)
    attacked = frozenset(attacked)
    footprint = attacked if footprint is None else frozenset(footprint)
    if hardened & attacked:
        raise GameError("attacked and hardened sets overlap")
    model = scenario.model
    defended = harden(network, hardened, scenario.hardening_mode)
    trace = run_cascade(defended, attacked, model=model)
    plain = run_cascade(network, footprint, model=model)
    return GameOutcome(
        scenario,
        hardened,
        attacked,
        trace,
        plain,
        damage(trace, scenario.metric),
        damage(plain, scenario.metric),
        _operational(plain.baseline),
        _operational(trace.final),
        _operational(plain.final),
        tuple(predicted),
        tuple(ranking),
    )


def run_game(network, scenario: GameScenario) -> GameOutcome:
    """Play one scenario against its unhardened counterfactual.

    The counterfactual replays the same attack with no hardening; for type 2
    that is the whole region, since hardened members only escape the storm
    because they were hardened.
    """
    sc = scenario
    if sc.game_type == 1:
        pre = frozenset()
        if sc.k:
            pre = frozenset(_solve(network, sc.k, sc.solver, sc.metric, sc.model).best)
        attacked = best_response_attack(network, pre, sc.m, sc.metric, sc.model, sc.solver)
        arrest = sc.k if sc.arrest_k is None else sc.arrest_k
        extra, _, rounds = adaptive_harden(
            harden(network, pre, sc.hardening_mode), attacked, arrest,
            sc.solver, sc.metric, sc.model, sc.hardening_mode,
        )
        ranking = rounds[0] if rounds else ()
        return _outcome(network, sc, pre | extra, attacked, ranking=ranking)

    if sc.game_type == 2:
        region = region_entities(network, sc.region, sc.region_substations)
        pool = [e for e in sorted(region) if network.states[e] > 0 and e not in network.hardened]
        if not sc.k < len(pool):
            raise GameError(f"type 2 needs k < region size ({sc.k} vs {len(pool)})")
        predicted = predicted_vulnerable(network, frozenset(pool), sc.model)
        cands = [e for e in predicted if e in region]
        ranking = _ranked_by_impact(network, cands, sc.model)
        hardened = frozenset(e for e, _ in ranking[: sc.k])
        attacked = frozenset(pool) - hardened
        return _outcome(network, sc, hardened, attacked, predicted, ranking, footprint=pool)

    if sc.attack:
        attacked = frozenset(sc.attack)
        for e in attacked:
            if e not in network.entities:
                raise UnknownEntityError(f"unknown entity {e}")
    else:
        pool = sorted(eligible(network))
        if sc.l > len(pool):
            raise GameError(f"l={sc.l} exceeds the {len(pool)} eligible entities")
        attacked = frozenset(random.Random(sc.seed).sample(pool, sc.l))
    hardened, _, rounds = adaptive_harden(
        network, attacked, sc.k, sc.solver, sc.metric, sc.model, sc.hardening_mode
    )
    ranking = rounds[0] if rounds else ()
    return _outcome(network, sc, hardened, attacked, ranking=ranking)
