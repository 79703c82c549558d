"""Shared construction scheme for the bundled smart-grid networks.

Every substation ``s`` gets a server ``C1_1_s_s``, a gateway ``C1_2_s_s``, a
battery ``PBATT<s>`` and an RTU ``R<s>``. Entity and IDR conventions:

* bus ``P<a>``: live while some neighbor is live over a live line,
  ``P<a> <- (P<b> & PL<a>_<b>) | (P<c> & PL<a>_<c>) | ...``
* server: primary supply from its substation buses, battery as a reduced
  fallback, and it needs its gateway,
  ``s <- ((prim | (PBATT & L5)) # prim) & g`` with ``prim = (P & L1) | ...``
* gateway: the same supply pattern over ``L2`` lines, new-XOR'd with ring
  access ``(C1_4 & SADM) | (C1_5 & OADM)`` and, when control centers are
  configured, with ``(main server | backup server)``; it also needs its server
* ring node (SADM ``C2_1_y_0`` / OADM ``C3_1_y_0``): fed either directly
  from buses (``L3``/``L4`` lines) or from the host gateway's ``L2`` line,
  with the host battery as reduced fallback.

Lines and channels carry no IDRs; they are links that die with both ends:
``L1``..``L5`` supply lines, ``C1_3`` server-gateway LAN (optional),
``C1_4``/``C1_5`` gateway fibers to SADMs/OADMs, ``C1_6`` RTU channels,
``C1_7`` PMU channels and ``C2_2_y_z``/``C3_2_y_z`` ring spans.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..entities import GATEWAY, LAN, OADM_FIBER, PMU_CHANNEL, RTU_CHANNEL, SADM_FIBER, SERVER, EntityId
from ..idr import Idr, Leaf, MaxOr, MinAnd, NewXor
from ..network import Network, Substation


def AND(*xs):
    return xs[0] if len(xs) == 1 else MinAnd(xs)


def OR(*xs):
    return xs[0] if len(xs) == 1 else MaxOr(xs)


def XOR(*xs):
    return xs[0] if len(xs) == 1 else NewXor(xs)


@dataclass(frozen=True)
class RingNode:
    kind: str  # "sadm" or "oadm"
    index: int
    host: int
    feed: tuple = ()  # buses with a direct supply line; empty = host gateway line

    @property
    def entity(self):
        make = EntityId.sonet if self.kind == "sadm" else EntityId.dwdm
        return make(1, self.index, 0)


@dataclass
class GridPlan:
    name: str
    buses: list
    branches: list
    generators: list
    pmu_buses: list
    substations: dict  # id -> (bus numbers, zone)
    ring_nodes: list
    rings: list = field(default_factory=list)  # lists of (kind, index) in ring order
    attachments: dict = field(default_factory=dict)  # substation -> [(kind, index)]
    supply: dict = field(default_factory=dict)  # substation -> feeding buses (default: all)
    control_centers: tuple = ()
    lan: bool = False


def server(s):
    return EntityId.substation(SERVER, s, s)


def gateway(s):
    return EntityId.substation(GATEWAY, s, s)


def ring_entity(kind, index):
    return RingNode(kind, index, 0).entity


class _Counter:
    def __init__(self):
        self.next = {}

    def take(self, k):
        n = self.next.get(k, 1)
        self.next[k] = n + 1
        return EntityId.supply(k, n)


def build(plan: GridPlan) -> Network:
    P = EntityId.bus
    ents = set()
    idrs = {}
    pp, cc, pc = set(), set(), set()
    links = {}
    lines = _Counter()

    def link(e, a, b):
        ents.add(e)
        links[e] = (a, b)

    # power layer
    nbrs = {b: [] for b in plan.buses}
    for a, b in plan.branches:
        nbrs[a].append(b)
        nbrs[b].append(a)
        ents.add(EntityId.line(a, b))
        pp.add((P(a), P(b)))
    for b in plan.buses:
        ents.add(P(b))
        terms = [AND(Leaf(P(n)), Leaf(EntityId.line(b, n))) for n in sorted(nbrs[b])]
        if terms:
            idrs[P(b)] = Idr(P(b), OR(*terms))

    def supplied(target, buses, klass, battery):
        """``(prim | (battery & L5)) # prim`` with fresh supply lines."""
        prim = []
        for b in buses:
            ln = lines.take(klass)
            link(ln, P(b), target)
            pc.add((P(b), target))
            prim.append(AND(Leaf(P(b)), Leaf(ln)))
        bl = lines.take(5)
        link(bl, battery, target)
        return XOR(OR(*prim, AND(Leaf(battery), Leaf(bl))), OR(*prim))

    hosts = {}
    for node in plan.ring_nodes:
        hosts.setdefault(node.host, []).append(node)
    gw_lines = {}

    subs = {}
    for s in sorted(plan.substations):
        buses, zone = plan.substations[s]
        srv, gw, batt = server(s), gateway(s), EntityId.battery(s)
        ents.update((srv, gw, batt))
        cc.add((srv, gw))
        members = [srv, gw]
        feeds = plan.supply.get(s, buses)
        srv_expr = AND(supplied(srv, feeds, 1, batt), Leaf(gw))
        before = dict(lines.next)
        gw_power = supplied(gw, feeds, 2, batt)
        gw_lines[s] = [EntityId.supply(2, n) for n in range(before.get(2, 1), lines.next[2])]
        access = []
        for kind, index in plan.attachments.get(s, []):
            node = ring_entity(kind, index)
            fiber = EntityId.substation(SADM_FIBER if kind == "sadm" else OADM_FIBER, s, index)
            link(fiber, gw, node)
            cc.add((gw, node))
            access.append(AND(Leaf(fiber), Leaf(node)))
        core = gw_power
        if access:
            # losing every ring path leaves the gateway in reduced operation
            core = XOR(core, OR(*access))
        if plan.control_centers:
            ccs = [server(c) for c in plan.control_centers]
            core = XOR(core, OR(*(Leaf(c) for c in ccs)))
        gw_expr = AND(core, Leaf(srv))
        idrs[srv] = Idr(srv, srv_expr)
        idrs[gw] = Idr(gw, gw_expr)
        if plan.lan:
            lan = EntityId.substation(LAN, s, s)
            link(lan, srv, gw)
            members.append(lan)
        rtu = EntityId.rtu(s)
        ents.add(rtu)
        link(EntityId.substation(RTU_CHANNEL, s, s), rtu, srv)
        for b in buses:
            if b in plan.pmu_buses:
                pmu = EntityId.pmu(b)
                ents.add(pmu)
                link(EntityId.substation(PMU_CHANNEL, s, b), pmu, gw)
        subs[s] = (buses, members, zone)

    for node in plan.ring_nodes:
        e = node.entity
        ents.add(e)
        batt = EntityId.battery(node.host)
        if node.feed:
            expr = supplied(e, node.feed, 3 if node.kind == "sadm" else 4, batt)
        else:
            # powered through the host gateway's supply line(s)
            feed = OR(*(Leaf(ln) for ln in gw_lines[node.host]))
            bl = lines.take(5)
            link(bl, batt, e)
            expr = XOR(OR(feed, AND(Leaf(batt), Leaf(bl))), feed)
        idrs[e] = Idr(e, expr)
        subs[node.host][1].append(e)

    for ring in plan.rings:
        if len(ring) < 2:
            continue
        pairs = list(zip(ring, ring[1:]))
        if len(ring) > 2:
            pairs.append((ring[-1], ring[0]))
        for (ka, a), (kb, b) in pairs:
            ea, eb = ring_entity(ka, a), ring_entity(kb, b)
            make = EntityId.sonet if ka == "sadm" else EntityId.dwdm
            link(make(2, min(a, b), max(a, b)), ea, eb)
            cc.add((ea, eb))

    substations = {
        s: Substation(tuple(sorted(P(b) for b in buses)), tuple(sorted(members)), zone)
        for s, (buses, members, zone) in subs.items()
    }
    return Network(
        entities=ents,
        idrs=idrs,
        pp=pp,
        cc=cc,
        pc=pc,
        links=links,
        generators=[P(b) for b in plan.generators],
        pmu_buses=[P(b) for b in plan.pmu_buses],
        substations=substations,
        control_centers=plan.control_centers,
        name=plan.name,
    )
