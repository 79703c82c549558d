"""Entity identifiers for the two-layer (power + communication) grid model.

Every entity has a textual token used in IDR lines, network files and reports:

=====================  ====================  =========================
kind                   token                 example
=====================  ====================  =========================
Bus                    ``P<a>``              ``P12``
TransmissionLine       ``PL<a>_<b>``         ``PL7_8``
Battery                ``PBATT<x>``          ``PBATT6``
SubstationEntity       ``C1_<X>_<Y>_<Z>``    ``C1_2_6_6`` (gateway)
SonetEntity            ``C2_<X>_<Y>_<Z>``    ``C2_1_1_0`` (SADM)
DwdmEntity             ``C3_<X>_<Y>_<Z>``    ``C3_1_4_0`` (OADM)
PowerSupplyLine        ``L<k>_<i>``          ``L5_3``
Pmu                    ``U<i>``              ``U2``
Rtu                    ``R<i>``              ``R6``
=====================  ====================  =========================

Identifiers order by kind (table order) and then by their indices, which is
the canonical tie-break order used throughout the package.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import EntityError


class Kind(enum.IntEnum):
    BUS = 0
    TRANSMISSION_LINE = 1
    BATTERY = 2
    SUBSTATION = 3
    SONET = 4
    DWDM = 5
    POWER_SUPPLY_LINE = 6
    PMU = 7
    RTU = 8


_ARITY = {
    Kind.BUS: 1,
    Kind.TRANSMISSION_LINE: 2,
    Kind.BATTERY: 1,
    Kind.SUBSTATION: 3,
    Kind.SONET: 3,
    Kind.DWDM: 3,
    Kind.POWER_SUPPLY_LINE: 2,
    Kind.PMU: 1,
    Kind.RTU: 1,
}

# Substation subtypes (first index of a C1 token).
SERVER, GATEWAY, LAN, SADM_FIBER, OADM_FIBER, RTU_CHANNEL, PMU_CHANNEL = range(1, 8)
# Ring subtypes (first index of C2/C3 tokens).
RING_NODE, RING_LINK = 1, 2

_TOKEN_RE = re.compile(
    r"^(?:"
    r"PBATT(?P<batt>\d+)"
    r"|PL(?P<la>\d+)_(?P<lb>\d+)"
    r"|P(?P<bus>\d+)"
    r"|C(?P<ctype>[123])_(?P<cx>\d+)_(?P<cy>\d+)_(?P<cz>\d+)"
    r"|L(?P<lk>\d+)_(?P<li>\d+)"
    r"|U(?P<pmu>\d+)"
    r"|R(?P<rtu>\d+)"
    r")$"
)

TOKEN_PATTERN = r"PBATT\d+|PL\d+_\d+|P\d+|C[123]_\d+_\d+_\d+|L\d+_\d+|U\d+|R\d+"


@dataclass(frozen=True, order=True)
class EntityId:
    kind: Kind
    indices: tuple[int, ...]

    def __post_init__(self):
        kind = Kind(self.kind)
        indices = tuple(int(i) for i in self.indices)
        if len(indices) != _ARITY[kind]:
            raise EntityError(f"{kind.name} takes {_ARITY[kind]} indices, got {len(indices)}")
        if any(i < 0 for i in indices):
            raise EntityError(f"negative index in {kind.name}{indices}")
        if kind is Kind.TRANSMISSION_LINE:
            a, b = indices
            if a == b:
                raise EntityError(f"transmission line endpoints must differ: PL{a}_{b}")
            indices = (min(a, b), max(a, b))
        elif kind is Kind.SUBSTATION and not 1 <= indices[0] <= 7:
            raise EntityError(f"substation entity subtype must be 1..7, got {indices[0]}")
        elif kind in (Kind.SONET, Kind.DWDM) and indices[0] not in (1, 2):
            raise EntityError(f"ring entity subtype must be 1 or 2, got {indices[0]}")
        elif kind is Kind.POWER_SUPPLY_LINE and not 1 <= indices[0] <= 6:
            raise EntityError(f"power supply line class must be 1..6, got {indices[0]}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "indices", indices)

    # -- constructors -------------------------------------------------------

    @classmethod
    def bus(cls, a):
        return cls(Kind.BUS, (a,))

    @classmethod
    def line(cls, a, b):
        return cls(Kind.TRANSMISSION_LINE, (a, b))

    @classmethod
    def battery(cls, x):
        return cls(Kind.BATTERY, (x,))

    @classmethod
    def substation(cls, x, y, z):
        return cls(Kind.SUBSTATION, (x, y, z))

    @classmethod
    def sonet(cls, x, y, z):
        return cls(Kind.SONET, (x, y, z))

    @classmethod
    def dwdm(cls, x, y, z):
        return cls(Kind.DWDM, (x, y, z))

    @classmethod
    def supply(cls, k, i):
        return cls(Kind.POWER_SUPPLY_LINE, (k, i))

    @classmethod
    def pmu(cls, i):
        return cls(Kind.PMU, (i,))

    @classmethod
    def rtu(cls, i):
        return cls(Kind.RTU, (i,))

    @classmethod
    def parse(cls, token):
        return parse_token(token)

    # -- classification -----------------------------------------------------

    @property
    def layer(self):
        """``"P"``, ``"C"`` or ``"CP"`` (connecting entities)."""
        if self.kind <= Kind.BATTERY:
            return "P"
        if self.kind <= Kind.DWDM:
            return "C"
        return "CP"

    @property
    def is_bus(self):
        return self.kind is Kind.BUS

    @property
    def is_node(self):
        """Graph vertex: a bus (V_P) or a communication terminal (V_C)."""
        k = self.kind
        if k is Kind.BUS:
            return True
        if k is Kind.SUBSTATION:
            return self.indices[0] in (SERVER, GATEWAY)
        if k in (Kind.SONET, Kind.DWDM):
            return self.indices[0] == RING_NODE
        return False

    @property
    def is_comm_node(self):
        return self.is_node and self.layer == "C"

    @property
    def is_link(self):
        """Line or channel entity; it dies when both of its endpoints have failed."""
        k = self.kind
        if k in (Kind.TRANSMISSION_LINE, Kind.POWER_SUPPLY_LINE):
            return True
        if k is Kind.SUBSTATION:
            return self.indices[0] >= LAN
        if k in (Kind.SONET, Kind.DWDM):
            return self.indices[0] == RING_LINK
        return False

    @property
    def token(self):
        return _format(self)

    def __str__(self):
        return _format(self)

    def __repr__(self):
        return f"EntityId({_format(self)})"


def _format(e):
    k, ix = e.kind, e.indices
    if k is Kind.BUS:
        return f"P{ix[0]}"
    if k is Kind.TRANSMISSION_LINE:
        return f"PL{ix[0]}_{ix[1]}"
    if k is Kind.BATTERY:
        return f"PBATT{ix[0]}"
    if k in (Kind.SUBSTATION, Kind.SONET, Kind.DWDM):
        c = k - Kind.SUBSTATION + 1
        return f"C{c}_{ix[0]}_{ix[1]}_{ix[2]}"
    if k is Kind.POWER_SUPPLY_LINE:
        return f"L{ix[0]}_{ix[1]}"
    if k is Kind.PMU:
        return f"U{ix[0]}"
    return f"R{ix[0]}"


@lru_cache(maxsize=65536)
def parse_token(token):
    """Parse an entity token such as ``"C1_2_6_6"`` into an :class:`EntityId`."""
    if isinstance(token, EntityId):
        return token
    m = _TOKEN_RE.match(token.strip()) if isinstance(token, str) else None
    if m is None:
        raise EntityError(f"not an entity token: {token!r}")
    g = m.groupdict()
    if g["batt"] is not None:
        return EntityId(Kind.BATTERY, (int(g["batt"]),))
    if g["la"] is not None:
        return EntityId(Kind.TRANSMISSION_LINE, (int(g["la"]), int(g["lb"])))
    if g["bus"] is not None:
        return EntityId(Kind.BUS, (int(g["bus"]),))
    if g["ctype"] is not None:
        kind = Kind.SUBSTATION + int(g["ctype"]) - 1
        return EntityId(Kind(kind), (int(g["cx"]), int(g["cy"]), int(g["cz"])))
    if g["lk"] is not None:
        return EntityId(Kind.POWER_SUPPLY_LINE, (int(g["lk"]), int(g["li"])))
    if g["pmu"] is not None:
        return EntityId(Kind.PMU, (int(g["pmu"]),))
    return EntityId(Kind.RTU, (int(g["rtu"]),))


def tokens(entities):
    """Canonically sorted token list."""
    return [str(e) for e in sorted(entities)]
