"""Graph-coloring heuristic for K-contingency lists.

The search works on the power graph (live buses and transmission edges) to
pick candidate vertices, and scores every candidate set by running the IDR
cascade. Colors:

* yellow / blue / green: generator bus / PMU bus / both
* pink: K=1 candidates (neighbors of pendant buses, or minimum-degree buses)
* red: members of the K=1 list
* grey: neighbors of buses with exactly two transmission edges (K=2 candidates)

Pink and grey are transient and are restored before a call returns.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from types import MappingProxyType

from .cascade import DamageMetric
from .contingency import ContingencyResult, Scorer, Solver, eligible
from .errors import ContingencyError
from .idr import Model

# cap on pair combinations scored per K>2 round
_COMBO_LIMIT = 20000


class Color(str, enum.Enum):
    WHITE = "white"
    YELLOW = "yellow"
    BLUE = "blue"
    GREEN = "green"
    PINK = "pink"
    RED = "red"
    GREY = "grey"


BASE_COLORS = (Color.YELLOW, Color.BLUE, Color.GREEN)


class ColoringState:
    """Vertex colors with undo support for transient markings."""

    def __init__(self, colors):
        self.color = dict(colors)
        self._saved = {}

    def __getitem__(self, e):
        return self.color.get(e, Color.WHITE)

    def mark(self, entities, color):
        saved = self._saved.setdefault(color, {})
        for e in entities:
            prev = self[e]
            if prev is not color:
                saved.setdefault(e, prev)
                self.color[e] = color

    def restore(self, color):
        """Give every vertex marked ``color`` back its previous color."""
        for e, prev in self._saved.pop(color, {}).items():
            if self.color.get(e) is color:
                self.color[e] = prev

    def members(self, color):
        return sorted(e for e, c in self.color.items() if c is color)

    def snapshot(self):
        return MappingProxyType(dict(self.color))


def color_base(network) -> ColoringState:
    colors = {}
    for e in network.nodes:
        gen = e in network.generators
        pmu = e in network.pmu_buses
        if gen and pmu:
            colors[e] = Color.GREEN
        elif gen:
            colors[e] = Color.YELLOW
        elif pmu:
            colors[e] = Color.BLUE
        else:
            colors[e] = Color.WHITE
    return ColoringState(colors)


def _priority(e):
    # power-layer entities first, then canonical order
    return (e.layer != "P", e)


def augment(network, klist, states=None):
    """Communication vertices to append to a K=1 list after a failure.

    A live, non-hardened communication vertex joins when all of its bus
    neighbors, or all of its communication neighbors, have failed (state 0).
    Vertices already in ``klist`` are skipped; the additions come back sorted.
    """
    states = network.states if states is None else states
    failed = {e for e in network.nodes if states[e] == 0}
    listed = set(klist)
    added = []
    for v in sorted(network.nodes):
        if not v.is_comm_node or states[v] == 0 or v in network.hardened or v in listed:
            continue
        pc = {n for n in network.neighbors(v, "pc") if n.is_bus}
        cc = {n for n in network.neighbors(v, "cc") if n.is_comm_node}
        if (pc and pc <= failed) or (cc and cc <= failed):
            added.append(v)
    return added


def _without(adj, removed):
    return {b: nb - removed for b, nb in adj.items() if b not in removed}


class _Search:
    def __init__(self, network, model, metric, exclude):
        self.scorer = Scorer(network, model, metric)
        self.network = network.with_states(self.scorer.settled)
        self.elig = frozenset(eligible(self.network, exclude))
        self.coloring = color_base(self.network)
        self.graph = self.network.bus_adjacency()

    def score(self, entities):
        return self.scorer(entities)

    def best_of(self, candidates):
        """Argmax tie group (canonical order) over candidate sets."""
        best, group = None, []
        for c in sorted({tuple(sorted(c)) for c in candidates}):
            v = self.score(c)
            if best is None or v > best:
                best, group = v, [c]
            elif v == best:
                group.append(c)
        return group, best

    # -- K = 1 --------------------------------------------------------------

    def k1(self, adj, skip=frozenset()):
        deg = {b: len(nb) for b, nb in adj.items()}
        pendants = [b for b, d in deg.items() if d == 1]
        if pendants:
            pink = {n for p in pendants for n in adj[p]}
        else:
            linked = [d for d in deg.values() if d >= 1]
            low = min(linked) if linked else 0
            pink = {b for b, d in deg.items() if d == low}
        pink = sorted(b for b in pink if b in self.elig and b not in skip)
        if not pink:
            cands = [b for b in adj if b in self.elig and b not in skip]
            if cands:
                low = min(deg[b] for b in cands)
                pink = sorted(b for b in cands if deg[b] == low)
        if not pink:
            return [], None
        self.coloring.mark(pink, Color.PINK)
        scores = {b: self.score((b,)) for b in pink}
        best = max(scores.values())
        reds = sorted((b for b in pink if scores[b] == best), key=_priority)
        self.coloring.restore(Color.PINK)
        self.coloring.mark(reds, Color.RED)
        return reds, best

    # -- K = 2 --------------------------------------------------------------

    def k2(self, adj, skip=frozenset()):
        reds, _ = self.k1(adj, skip)
        listed = list(reds)
        extra = [e for e in augment(self.network, reds) if e in self.elig and e not in skip]
        self.coloring.mark(extra, Color.RED)
        listed += extra
        cands = list(itertools.combinations(listed, 2))
        colored = [
            b for b in sorted(adj)
            if self.coloring[b] in BASE_COLORS and b in self.elig and b not in skip
        ]
        cands += [(r, c) for r in reds for c in colored if c != r]
        deg2 = [b for b, nb in adj.items() if len(nb) == 2]
        grey = sorted({n for b in deg2 for n in adj[b]} & self.elig - set(skip))
        self.coloring.mark(grey, Color.GREY)
        cands += list(itertools.combinations(grey, 2))
        self.coloring.restore(Color.GREY)
        if not cands:
            return [], None
        return self.best_of(cands)

    # -- fallbacks ----------------------------------------------------------

    def extend(self, chosen, count):
        """Grow ``chosen`` greedily by ``count`` entities (K=1 passes on the residual graph)."""
        chosen = list(chosen)
        for _ in range(count):
            taken = frozenset(chosen)
            reds, _ = self.k1(_without(self.graph, taken), taken)
            pool = reds or [e for e in sorted(self.elig) if e not in taken]
            if not pool:
                raise ContingencyError("ran out of eligible entities")
            group, _ = self.best_of([(*chosen, c) for c in pool])
            chosen = list(group[0])
        return tuple(sorted(chosen))

    # -- K > 2 --------------------------------------------------------------

    def kmany(self, k):
        need = k // 2
        g2 = {b: set(nb) for b, nb in self.graph.items()}
        used = set()
        tlist1 = []
        tlist2 = []
        while not tlist2:
            pairs, _ = self.k2(g2, frozenset(used))
            if not pairs:
                break
            tlist1.extend(pairs)
            round_ents = {e for p in pairs for e in p}
            used |= round_ents
            g2 = _without(g2, round_ents)
            if len(tlist1) >= need:
                pool = tlist1
                while len(pool) > need and math.comb(len(pool), need) > _COMBO_LIMIT:
                    pool = pool[:-1]
                sets = [
                    {e for p in combo for e in p} for combo in itertools.combinations(pool, need)
                ]
                sets = [s for s in sets if len(s) == 2 * need]
                if sets:
                    tlist2, _ = self.best_of(sets)
        if not tlist2:
            # graph exhausted before enough disjoint pairs accumulated
            chosen = set()
            for p in tlist1:
                if len(chosen) < 2 * need and not chosen & set(p):
                    chosen |= set(p)
            tlist2 = [self.extend(chosen, 2 * need - len(chosen))]
        if k % 2 == 0:
            return self.best_of(tlist2)
        self.coloring.restore(Color.RED)
        taken = frozenset(e for s in tlist2 for e in s)
        reds, _ = self.k1(_without(self.graph, taken), taken)
        if reds:
            return self.best_of([(*s, r) for s in tlist2 for r in reds])
        return self.best_of([self.extend(s, 1) for s in tlist2])


def heuristic_k_contingency(
    network, k, metric=DamageMetric.STATE_LOSS, model=Model.MIIM, exclude=()
) -> ContingencyResult:
    """Colored-graph heuristic; every returned set is scored by a real cascade."""
    start = time.perf_counter()
    metric = DamageMetric(metric)
    search = _Search(network, model, metric, exclude)
    if not isinstance(k, int) or k < 1:
        raise ContingencyError(f"k must be a positive integer, got {k!r}")
    if k > len(search.elig):
        raise ContingencyError(f"k={k} exceeds the {len(search.elig)} eligible entities")
    if not search.graph:
        raise ContingencyError("power graph has no operational buses")
    reds, _ = search.k1(search.graph)
    if k == 1:
        if reds:
            sets, value = search.best_of([(r,) for r in reds])
        else:
            sets, value = search.best_of([(e,) for e in search.elig])
    elif k == 2:
        sets, value = search.k2(search.graph)
        if not sets:
            sets, value = search.best_of([search.extend((), 2)])
    else:
        sets, value = search.kmany(k)
    search.coloring.restore(Color.PINK)
    search.coloring.restore(Color.GREY)
    return ContingencyResult(
        k,
        sets,
        value,
        metric,
        Solver.HEURISTIC,
        (time.perf_counter() - start) * 1000,
        ranked=tuple(sorted(reds, key=_priority)),
        coloring=search.coloring.snapshot(),
    )
