"""Acceptance criteria 1-10, one PASS/FAIL line each (see the terminal summary)."""

import itertools
import random
import statistics
import time
from contextlib import contextmanager

import pytest

import conftest
from _netgen import oracle_best, oracle_cascade, oracle_candidates, random_network
from _reference import HURRICANE_BUSES, HURRICANE_SUBSTATIONS, REFERENCE_IMPACT, SUBSTATIONS_118
from gridcon.cascade import DamageMetric, cascade_step, damage, run_cascade
from gridcon.contingency import Solver, eligible, exact_k_contingency
from gridcon.entities import Kind, parse_token as T
from gridcon.events import FailureEvent, self_updating_list
from gridcon.game import GameScenario, adaptive_harden, impact_factor, predicted_vulnerable, region_entities, run_game
from gridcon.heuristic import heuristic_k_contingency
from gridcon.idr import Model, eval_expr, leaves, parse_expr
from gridcon.lpexport import build_model, export_ilp
from gridcon.network import load_network


@contextmanager
def criterion(n, title):
    start = time.perf_counter()
    notes = []
    try:
        yield notes
    except BaseException:
        line = f"criterion {n}: FAIL  {title}"
        conftest.ACCEPTANCE.append(line)
        print(line)
        raise
    extra = f" [{'; '.join(notes)}]" if notes else ""
    line = f"criterion {n}: PASS  {title} ({time.perf_counter() - start:.2f}s){extra}"
    conftest.ACCEPTANCE.append(line)
    print(line)


def test_criterion_01_operator_exactness():
    from _reference import TRUTH_TABLE

    with criterion(1, "operator truth table, exhaustive over {0,1,2}^2") as notes:
        start = time.perf_counter()
        a, b = T("P1"), T("P2")
        ops = {"&": min, "|": max, "#": lambda x, y: x if x == y else 1}
        for x, y in itertools.product(range(3), repeat=2):
            for sym, ref in ops.items():
                assert eval_expr(parse_expr(f"P1 {sym} P2"), {a: x, b: y}) == ref(x, y)
        for x, y, and_, or_, xor in TRUTH_TABLE:
            st = {a: x, b: y}
            got = tuple(eval_expr(parse_expr(f"P1 {s} P2"), st) for s in "&|#")
            assert got == (and_, or_, xor)
        elapsed = time.perf_counter() - start
        assert elapsed < 1.0
        notes.append("9 rows exact")


def test_criterion_02_reduced_vs_failed_walkthrough():
    with criterion(2, "example IDR with its last operand failed: MIIM 1, IIM 0"):
        e = parse_expr("((C1_2_1_1 & P1) | (C1_3_1_1 & P2)) # C1_2_2_2")
        st = {x: 2 for x in leaves(e)}
        st[T("C1_2_2_2")] = 0
        assert eval_expr(e, st, Model.MIIM) == 1
        assert eval_expr(e, st, Model.IIM) == 0


def test_criterion_03_fourteen_bus_case_study(net14, net14_p12):
    with criterion(3, "14-bus case study after P12 fails") as notes:
        start = time.perf_counter()
        pair_group = {(T("P7"), T("C1_1_6_6")), (T("P7"), T("C1_2_6_6"))}
        for solve in (exact_k_contingency, heuristic_k_contingency):
            assert solve(net14_p12, 1).best_sets == ((T("P7"),),)
            assert set(solve(net14_p12, 2).best_sets) == pair_group
        ev = [FailureEvent(0, T("P12"), 0)]
        miim = self_updating_list(net14, ev, k=1, horizon_ms=5)
        expected = {T("P7"), T("C1_2_6_6"), T("C1_1_6_6")}
        assert len(miim) == 6
        assert all(set(u.entities) == expected and u.entities[0] == T("P7") for u in miim)
        iim = self_updating_list(net14, ev, k=1, model=Model.IIM, horizon_ms=5)
        assert set(iim[3].entities) > set(miim[3].entities)
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0
        notes.append(f"IIM list sizes {[len(u.entities) for u in iim]}")


def test_criterion_04_oracle_equivalence(net14, net14_p12):
    with criterion(4, "exact solver equals brute force on random networks") as notes:
        start = time.perf_counter()
        ratios = []
        checked = 0
        for seed in range(24):
            net = random_network(seed)
            assert len(net.entities) <= 15 and len(net.idrs) <= 12
            base = oracle_cascade(net)[-1]
            n_cand = len(oracle_candidates(net, base))
            for k in (1, 2, 3):
                if k > n_cand:
                    continue
                for metric in ("state-loss", "failed-count"):
                    best, group = oracle_best(net, k, metric)
                    res = exact_k_contingency(net, k, metric)
                    assert (res.damage_value, list(res.best_sets)) == (best, group)
                    h = heuristic_k_contingency(net, k, metric)
                    assert h.damage_value <= res.damage_value
                    if res.damage_value:
                        ratios.append(h.damage_value / res.damage_value)
                checked += 1
        for net in (net14, net14_p12):
            for k in (1, 2):
                assert heuristic_k_contingency(net, k).damage_value == exact_k_contingency(net, k).damage_value
        assert time.perf_counter() - start < 60
        notes.append(f"{checked} (network, k) cases; mean heuristic/exact {statistics.mean(ratios):.3f}")


def test_criterion_05_cascade_properties():
    with criterion(5, "monotone, fixpoint, bounded, hardening and superset dominance") as notes:
        rng = random.Random(5)
        trials = 0
        for trial in range(220):
            net = random_network(50_000 + trial)
            nodes = sorted(net.entities)
            f1 = set(rng.sample(nodes, rng.randint(0, 2)))
            f2 = set(rng.sample(nodes, rng.randint(0, 2)))
            h1 = set(rng.sample(nodes, rng.randint(0, 2))) - f1 - f2
            h2 = (h1 | set(rng.sample(nodes, rng.randint(0, 3)))) - f1 - f2
            trace = run_cascade(net, f1 | f2)
            for a, b in zip(trace.steps, trace.steps[1:]):
                assert all(b.states[e] <= a.states[e] for e in nodes)
            assert not cascade_step(net, trace.final)[1]
            assert len(trace) - 1 <= len(net.entities)
            for metric in DamageMetric:
                d1 = damage(run_cascade(net, f1 | f2, h1), metric)
                d2 = damage(run_cascade(net, f1 | f2, h2), metric)
                assert d2 <= d1
                assert damage(trace, metric) >= damage(run_cascade(net, f1), metric)
            trials += 1
        notes.append(f"{trials} trials")


def test_criterion_06_latency(net14):
    with criterion(6, "per-event recompute on the 14-bus within 33 ms (median)") as notes:
        rng = random.Random(6)
        nodes = [e for e in sorted(net14.entities) if e.is_node]
        times = []
        stream = 0
        while len(times) < 100:
            stream += 1
            victims = rng.sample(nodes, 10)
            events = [FailureEvent(3 * i, e, rng.choice((0, 1))) for i, e in enumerate(victims)]
            ups = self_updating_list(net14, events, k=1 + stream % 3)
            times += [u.elapsed_ms for u in ups if u.events and u.recomputed]
        assert len(times) >= 100
        med = statistics.median(times)
        notes.append(f"median {med:.2f} ms over {len(times)} events, max {max(times):.2f} ms")
        assert med <= 33.0


def _game_checks(net, sc):
    o = run_game(net, sc)
    assert not o.hardened & o.attacked
    assert o.damage_hardened <= o.damage_unhardened
    assert o.operational_after_hardened >= o.operational_after_unhardened
    return o


def test_criterion_07_games(net14, net118):
    with criterion(7, "game invariants over seeded scenarios on both datasets") as notes:
        rng = random.Random(7)
        count = 0
        for i in range(90):
            kind = i % 3 + 1
            k = rng.randint(1, 3)
            if kind == 1:
                sc = GameScenario(1, k, m=rng.randint(1, 2), solver=rng.choice(list(Solver)), seed=i)
            elif kind == 2:
                subs = rng.sample(sorted(net14.substations), rng.randint(2, 4))
                sc = GameScenario(2, 1, region_substations=subs)
            else:
                sc = GameScenario(3, k, l=rng.randint(1, 3), seed=rng.randrange(10**6))
            _game_checks(net14, sc)
            count += 1
        for i in range(15):
            kind = i % 3 + 1
            if kind == 1:
                sc = GameScenario(1, 2, m=1, arrest_k=2)
            elif kind == 2:
                zone_subs = sorted(net118.substations)[i * 7: i * 7 + 4]
                sc = GameScenario(2, 2, region_substations=zone_subs)
            else:
                sc = GameScenario(3, 2, l=2, seed=1000 + i)
            _game_checks(net118, sc)
            count += 1
        assert count >= 100
        for net in (net14, net118):
            sc = GameScenario(3, 2, l=3, seed=99)
            assert run_game(net, sc).to_json() == run_game(net, sc).to_json()
        for budget in range(4):
            hardened, _, rounds = adaptive_harden(net14, [T("P12"), T("P3")], budget)
            assert len(hardened) <= budget and len(rounds) <= budget
        # scenario analogs on the 118-bus: hurricane, EMP on the backup center, gateway self-failure
        region = region_entities(net118, substations=HURRICANE_SUBSTATIONS)
        assert {e.indices[0] for e in predicted_vulnerable(net118, region) if e.is_bus} == HURRICANE_BUSES
        triples = {}
        hurricane = _game_checks(net118, GameScenario(2, 5, region_substations=HURRICANE_SUBSTATIONS))
        emp = _game_checks(net118, GameScenario(1, 5, m=2, arrest_k=3))
        gateway = _game_checks(net118, GameScenario(3, 3, attack=(T("C1_2_85_85"),)))
        for name, o in (("hurricane", hurricane), ("emp", emp), ("gateway", gateway)):
            triples[name] = o.operational()
        notes.append(f"{count} scenarios; before/hardened/unhardened {triples}")


def test_criterion_08_dataset_fidelity(net14, net118):
    with criterion(8, "bundled datasets match the required counts and substation table"):
        got = {sid: tuple(b.indices[0] for b in sub.buses) for sid, sub in net118.substations.items()}
        assert got == SUBSTATIONS_118
        for bus in range(1, 119):
            homes = [sid for sid, buses in got.items() if bus in buses]
            assert len(homes) == 1 and bus in SUBSTATIONS_118[homes[0]]
        sadm = sum(1 for e in net118.entities if e.kind is Kind.SONET and e.indices[0] == 1)
        oadm = sum(1 for e in net118.entities if e.kind is Kind.DWDM and e.indices[0] == 1)
        assert (sadm, oadm) == (54, 31)
        assert net118.control_centers == (61, 16)
        assert len(net14.buses) == 14
        assert sum(1 for e in net14.entities if e.is_comm_node) == 34
        assert len(net14.idrs) == 48
        assert net14.neighbors(T("P8"), "pp") == {T("P7")}


def test_criterion_09_impact_factor_consistency(net14, net118):
    with criterion(9, "impact factor equals a fresh-cascade recount on every entity") as notes:
        checked = 0
        for net in (net14, net118):
            base = run_cascade(net).final
            for e in sorted(net.entities):
                fin = run_cascade(net, [e]).final
                recount = sum(1 for x, v in base.items() if x != e and fin[x] < v)
                assert impact_factor(net, e) == recount
                checked += 1
        ours = {tok: impact_factor(net118, T(tok)) for tok in REFERENCE_IMPACT}
        notes.append(f"{checked} entities; reference magnitudes not reproducible, ours {ours}")


def test_criterion_10_lp_export():
    with criterion(10, "LP export variable and constraint families on a 3-entity network") as notes:
        net = load_network({"entities": ["P1", "P2", "P3"], "idrs": ["P3 <- P1 & P2"]})
        m, horizon = build_model(net, 1)
        assert horizon == 2
        text = export_ilp(net, 1)
        xs = {g for g in m.general if g.startswith("x_")}
        assert len(xs) == 3 * (horizon + 1)
        assert len(m.aux) == 1 * horizon and all(a.startswith("z_") for a in m.aux)
        assert sorted(m.binary) == ["f_P1", "f_P2", "f_P3"]
        assert "budget: f_P1 + f_P2 + f_P3 = 1" in text
        names = [r.split(":")[0] for r in m.rows]
        assert sum(n.startswith("mono_") for n in names) == 3 * horizon
        assert sum(n.startswith("z_") for n in names) == 2 * horizon
        notes.append("optional external MILP cross-check not run (no solver bundled)")
