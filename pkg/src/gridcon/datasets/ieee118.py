"""IEEE 118-bus smart grid with a synthetic communication layer.

Buses are grouped into the 107 substations of ``ieee118_substations.csv``;
substation 61 hosts the main control center and substation 16 the backup.
The communication layer follows :mod:`gridcon.datasets.builder` with:

* zones: contiguous substation ranges, 8 in total (see ``ZONES``)
* 54 SADMs: SADM ``y`` sits in the substation of the ``y``-th generator bus
  (ascending bus number) and is fed from that bus; SADMs form one ring per
  zone in index order
* 31 OADMs: OADM ``j`` sits in substation ``1 + (j - 1) * 107 // 31`` and is
  fed from all of its buses; the OADMs form a single backbone ring
* every gateway reaches the SADMs and OADMs of its own substation, or else
  the nearest one (by substation id, same zone preferred for SADMs)
* PMUs on buses with at least five transmission neighbors
"""

from __future__ import annotations

import csv
import io
from functools import lru_cache
from importlib import resources

from .builder import GridPlan, RingNode, build

MAIN_CONTROL_CENTER = 61
BACKUP_CONTROL_CENTER = 16

# zone -> inclusive substation id range
ZONES = {
    2: (1, 15),
    4: (16, 30),
    5: (31, 45),
    6: (46, 60),
    7: (61, 75),
    1: (76, 90),
    3: (91, 98),
    8: (99, 107),
}


def _rows(name):
    text = resources.files(__package__).joinpath(name).read_text()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


@lru_cache(maxsize=None)
def branches():
    return tuple((int(r["from_bus"]), int(r["to_bus"])) for r in _rows("ieee118_branches.csv"))


@lru_cache(maxsize=None)
def generators():
    return tuple(int(r["bus"]) for r in _rows("ieee118_generators.csv"))


@lru_cache(maxsize=None)
def substation_map():
    """Substation id -> tuple of bus numbers."""
    return {int(r["substation"]): tuple(int(b) for b in r["buses"].split()) for r in _rows("ieee118_substations.csv")}


def zone_of(sid):
    for zone, (lo, hi) in ZONES.items():
        if lo <= sid <= hi:
            return zone
    raise KeyError(sid)


def _nearest(sid, hosts, same_zone=False):
    pool = hosts
    if same_zone:
        local = [(h, i) for h, i in hosts if zone_of(h) == zone_of(sid)]
        pool = local or hosts
    best = min(abs(h - sid) for h, _ in pool)
    return [min(i for h, i in pool if abs(h - sid) == best)]


def plan():
    subs = substation_map()
    home = {b: s for s, buses in subs.items() for b in buses}
    gens = generators()
    degree = {}
    for a, b in branches():
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1

    nodes = [RingNode("sadm", y, home[bus], (bus,)) for y, bus in enumerate(gens, start=1)]
    oadm_hosts = [1 + (j - 1) * len(subs) // 31 for j in range(1, 32)]
    nodes += [RingNode("oadm", j, s, subs[s]) for j, s in enumerate(oadm_hosts, start=1)]

    rings = []
    for zone in sorted(ZONES):
        members = [("sadm", n.index) for n in nodes if n.kind == "sadm" and zone_of(n.host) == zone]
        rings.append(members)
    rings.append([("oadm", j) for j in range(1, 32)])

    sadm_hosts = [(n.host, n.index) for n in nodes if n.kind == "sadm"]
    oadm_pairs = [(n.host, n.index) for n in nodes if n.kind == "oadm"]
    attachments = {}
    for s in subs:
        own_s = [i for h, i in sadm_hosts if h == s] or _nearest(s, sadm_hosts, same_zone=True)
        own_o = [i for h, i in oadm_pairs if h == s] or _nearest(s, oadm_pairs)
        attachments[s] = [("sadm", i) for i in own_s] + [("oadm", i) for i in own_o]

    return GridPlan(
        name="ieee118",
        buses=list(range(1, 119)),
        branches=list(branches()),
        generators=list(gens),
        pmu_buses=sorted(b for b, d in degree.items() if d >= 5),
        substations={s: (buses, zone_of(s)) for s, buses in subs.items()},
        ring_nodes=nodes,
        rings=rings,
        attachments=attachments,
        control_centers=(MAIN_CONTROL_CENTER, BACKUP_CONTROL_CENTER),
        lan=True,
    )


def build_ieee118():
    return build(plan())
