"""IEEE 14-bus smart grid: standard transmission topology plus a synthetic
communication layer (11 substations, 22 servers/gateways, 6 SADMs, 6 OADMs).

Substation 6 holds bus P12 and hosts SADM 1, which draws power through the
substation-6 gateway supply line. Substation 7 holds P7 and P8 (bus 8 hangs
off bus 7 only); its server and gateway are fed from P7 and it hosts SADMs
2-3 and OADMs 1-2, fed from both of its buses.
"""

from .builder import GridPlan, RingNode, build

BRANCHES = [
    (1, 2), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5), (4, 7), (4, 9), (5, 6),
    (6, 11), (6, 12), (6, 13), (7, 8), (7, 9), (9, 10), (9, 14), (10, 11), (12, 13), (13, 14),
]
GENERATORS = [1, 2, 3, 6, 8]
PMU_BUSES = [2, 6, 9]

SUBSTATIONS = {
    1: (1,), 2: (2,), 3: (3,), 4: (4, 9), 5: (5, 6), 6: (12,),
    7: (7, 8), 8: (10,), 9: (11,), 10: (13,), 11: (14,),
}

RING_NODES = [
    RingNode("sadm", 1, 6),
    RingNode("sadm", 2, 7, (7, 8)),
    RingNode("sadm", 3, 7, (7, 8)),
    RingNode("sadm", 4, 1, (1,)),
    RingNode("sadm", 5, 8),
    RingNode("sadm", 6, 9),
    RingNode("oadm", 1, 7, (7, 8)),
    RingNode("oadm", 2, 7, (7, 8)),
    RingNode("oadm", 3, 1, (1,)),
    RingNode("oadm", 4, 10),
    RingNode("oadm", 5, 11),
    RingNode("oadm", 6, 4),
]

RINGS = [
    [("sadm", i) for i in (1, 2, 3, 4, 5, 6)],
    [("oadm", i) for i in (1, 2, 3, 4, 5, 6)],
]

# gateway -> ring nodes it reaches over fiber
ATTACHMENTS = {
    1: [("sadm", 4), ("oadm", 3)],
    2: [("sadm", 4), ("oadm", 6)],
    3: [("sadm", 5), ("oadm", 3)],
    4: [("sadm", 6), ("oadm", 6)],
    5: [("sadm", 5), ("oadm", 4)],
    6: [("sadm", 1), ("oadm", 5)],
    7: [("sadm", 2), ("sadm", 3), ("oadm", 1), ("oadm", 2)],
    8: [("sadm", 5), ("oadm", 2)],
    9: [("sadm", 6), ("oadm", 4)],
    10: [("sadm", 1), ("oadm", 4)],
    11: [("sadm", 3), ("oadm", 5)],
}


def plan():
    return GridPlan(
        name="ieee14",
        buses=list(range(1, 15)),
        branches=BRANCHES,
        generators=GENERATORS,
        pmu_buses=PMU_BUSES,
        substations={s: (buses, None) for s, buses in SUBSTATIONS.items()},
        ring_nodes=RING_NODES,
        rings=RINGS,
        attachments=ATTACHMENTS,
        supply={7: (7,)},
    )


def build_ieee14():
    return build(plan())
