from hypothesis import given, settings, strategies as st

from _netgen import oracle_cascade, random_network
from gridcon.cascade import DamageMetric, cascade_step, damage, run_cascade
from gridcon.contingency import eligible, exact_k_contingency
from gridcon.entities import EntityId
from gridcon.game import impact_factor
from gridcon.heuristic import heuristic_k_contingency
from gridcon.idr import Leaf, MaxOr, MinAnd, Model, NewXor, eval_expr, format_expr, new_xor, parse_expr

STATE = st.integers(0, 2)
LEAVES = [EntityId.bus(i) for i in range(1, 6)]


def exprs(ops=(MinAnd, MaxOr, NewXor)):
    leaf = st.sampled_from(LEAVES).map(Leaf)
    return st.recursive(
        leaf,
        lambda kids: st.builds(lambda op, cs: op(tuple(cs)), st.sampled_from(ops), st.lists(kids, min_size=2, max_size=3)),
        max_leaves=10,
    )


def tables():
    return st.lists(STATE, min_size=len(LEAVES), max_size=len(LEAVES)).map(lambda v: dict(zip(LEAVES, v)))


@given(st.integers(0, 2), st.integers(1, 6))
def test_xor_all_equal(v, n):
    assert new_xor([v] * n) == v


@given(st.lists(STATE, min_size=2, max_size=6).filter(lambda vs: len(set(vs)) > 1))
def test_xor_mixed_is_reduced(vs):
    assert new_xor(vs) == 1


@given(st.lists(STATE, min_size=2, max_size=5), st.randoms())
def test_and_or_commutative_idempotent(vs, rnd):
    tbl = {LEAVES[i]: v for i, v in enumerate(vs)}
    kids = [Leaf(LEAVES[i]) for i in range(len(vs))]
    shuffled = list(kids)
    rnd.shuffle(shuffled)
    for op, ref in ((MinAnd, min), (MaxOr, max)):
        assert eval_expr(op(tuple(kids)), tbl) == eval_expr(op(tuple(shuffled)), tbl) == ref(vs)
        assert eval_expr(op((kids[0], kids[0])), tbl) == vs[0]


@given(tables())
def test_and_or_associative(tbl):
    a, b, c = (Leaf(e) for e in LEAVES[:3])
    for op in (MinAnd, MaxOr):
        left = eval_expr(op((op((a, b)), c)), tbl)
        right = eval_expr(op((a, op((b, c)))), tbl)
        assert left == right == eval_expr(op((a, b, c)), tbl)


@given(exprs(), tables())
def test_eval_in_range(expr, tbl):
    assert eval_expr(expr, tbl) in (0, 1, 2)


@given(exprs())
def test_print_parse_fixpoint(expr):
    once = parse_expr(format_expr(expr))
    assert format_expr(parse_expr(format_expr(once))) == format_expr(once)
    assert all(eval_expr(once, t) == eval_expr(expr, t) for t in (dict.fromkeys(LEAVES, 1), {e: i % 3 for i, e in enumerate(LEAVES)}))


@given(exprs(), tables())
def test_evaluation_monotone_in_inputs(expr, tbl):
    raised = {e: min(2, v + 1) for e, v in tbl.items()}
    assert eval_expr(expr, raised) >= eval_expr(expr, tbl)


# -- cascades on random networks ------------------------------------------------

SEEDS = st.integers(0, 10_000)


def pick(net, data, label, lo=0, hi=3):
    nodes = sorted(net.entities)
    return data.draw(st.sets(st.sampled_from(nodes), min_size=lo, max_size=hi), label=label)


@settings(max_examples=60, deadline=None)
@given(SEEDS, st.data())
def test_engine_matches_oracle(seed, data):
    net = random_network(seed)
    failed = pick(net, data, "failed")
    hard = pick(net, data, "hard") - failed
    for model in (Model.MIIM, Model.IIM):
        trace = run_cascade(net, failed, hard, model)
        hist = oracle_cascade(net, failed, hard, binary=model is Model.IIM)
        assert trace.final == hist[-1]
        assert len(trace) == len(hist)


@settings(max_examples=60, deadline=None)
@given(SEEDS, st.data())
def test_monotone_and_fixpoint(seed, data):
    net = random_network(seed)
    trace = run_cascade(net, pick(net, data, "failed"))
    for a, b in zip(trace.steps, trace.steps[1:]):
        assert all(b.states[e] <= a.states[e] for e in net.entities)
    assert len(trace) - 1 <= len(net.entities)
    assert not cascade_step(net, trace.final)[1]


@settings(max_examples=60, deadline=None)
@given(SEEDS, st.data())
def test_hardening_dominance(seed, data):
    net = random_network(seed)
    failed = pick(net, data, "failed", 1)
    h1 = pick(net, data, "h1") - failed
    h2 = (h1 | pick(net, data, "extra")) - failed
    for metric in DamageMetric:
        assert damage(run_cascade(net, failed, h2), metric) <= damage(run_cascade(net, failed, h1), metric)


@settings(max_examples=60, deadline=None)
@given(SEEDS, st.data())
def test_attack_superset(seed, data):
    net = random_network(seed)
    f1 = pick(net, data, "f1")
    f2 = pick(net, data, "f2")
    for metric in DamageMetric:
        assert damage(run_cascade(net, f1 | f2), metric) >= damage(run_cascade(net, f1), metric)


@settings(max_examples=30, deadline=None)
@given(SEEDS, st.integers(1, 3))
def test_solvers_deterministic_and_sound(seed, k):
    net = random_network(seed)
    if k > len(eligible(net)):
        return
    a = exact_k_contingency(net, k)
    assert a.best_sets == exact_k_contingency(net, k).best_sets
    h = heuristic_k_contingency(net, k)
    assert h.best_sets == heuristic_k_contingency(net, k).best_sets
    assert h.damage_value <= a.damage_value
    for s in (*a.best_sets, *h.best_sets):
        assert all(e.is_node and e not in net.hardened for e in s)


@settings(max_examples=30, deadline=None)
@given(SEEDS)
def test_impact_factor_identity(seed):
    net = random_network(seed)
    base = run_cascade(net).final
    for e in sorted(net.entities):
        if base[e] == 0:
            continue
        fin = run_cascade(net.with_states(base), [e]).final
        assert impact_factor(net, e) == sum(1 for x in net.entities if x != e and fin[x] < base[x])
