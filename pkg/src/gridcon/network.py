"""Joint power/communication network and its JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .entities import EntityId, Kind, parse_token, tokens
from .errors import EntityError, GridconError, NetworkError
from .idr import FULL, STATES, Idr, leaves, parse_idr


@dataclass(frozen=True)
class Substation:
    buses: tuple = ()
    entities: tuple = ()
    zone: int | None = None


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


def _freeze(mapping):
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True, eq=False)
class Network:
    """Entities, IDRs, edge classes, annotations and the current state table.

    Instances are treated as immutable values; use :meth:`with_states` and
    :meth:`with_hardened` to derive modified copies. Entities missing from
    ``states`` are fully operational.
    """

    entities: frozenset = frozenset()
    idrs: Mapping = field(default_factory=dict)
    pp: frozenset = frozenset()
    cc: frozenset = frozenset()
    pc: frozenset = frozenset()
    links: Mapping = field(default_factory=dict)
    generators: frozenset = frozenset()
    pmu_buses: frozenset = frozenset()
    substations: Mapping = field(default_factory=dict)
    control_centers: tuple = ()
    states: Mapping = field(default_factory=dict)
    hardened: frozenset = frozenset()
    name: str = ""

    def __post_init__(self):
        ents = frozenset(self.entities)
        links = dict(self.links)
        # transmission lines carry their endpoints in the token itself
        for e in ents:
            if e.kind is Kind.TRANSMISSION_LINE and e not in links:
                a, b = (EntityId.bus(i) for i in e.indices)
                if a in ents and b in ents:
                    links[e] = (a, b)
        states = {e: FULL for e in ents}
        states.update(self.states)
        set_ = object.__setattr__
        set_(self, "entities", ents)
        set_(self, "idrs", _freeze(self.idrs))
        set_(self, "pp", frozenset(_pair(*p) for p in self.pp))
        set_(self, "cc", frozenset(_pair(*p) for p in self.cc))
        set_(self, "pc", frozenset(_pair(*p) for p in self.pc))
        set_(self, "links", _freeze(links))
        set_(self, "generators", frozenset(self.generators))
        set_(self, "pmu_buses", frozenset(self.pmu_buses))
        set_(self, "substations", _freeze(self.substations))
        set_(self, "control_centers", tuple(self.control_centers))
        set_(self, "states", _freeze(states))
        set_(self, "hardened", frozenset(self.hardened))
        self.validate()

    # -- invariants ---------------------------------------------------------

    def validate(self):
        ents = self.entities
        for target, idr in self.idrs.items():
            if idr.target != target:
                raise NetworkError(f"IDR keyed under {target} targets {idr.target}")
            if target not in ents:
                raise NetworkError(f"IDR target {target} is not a declared entity")
            missing = leaves(idr.expr) - ents
            if missing:
                raise NetworkError(f"IDR for {target} references undeclared {tokens(missing)}")
        for label, edges, check in (
            ("pp", self.pp, lambda a, b: a.is_bus and b.is_bus),
            ("cc", self.cc, lambda a, b: a.layer == "C" and b.layer == "C"),
            ("pc", self.pc, lambda a, b: {a.layer, b.layer} == {"P", "C"}),
        ):
            for a, b in edges:
                if a == b or a not in ents or b not in ents or not check(a, b):
                    raise NetworkError(f"malformed {label} edge ({a}, {b})")
        for link, ends in self.links.items():
            if link not in ents or not link.is_link:
                raise NetworkError(f"{link} is not a declared line/channel entity")
            if len(ends) != 2 or ends[0] == ends[1] or any(x not in ents for x in ends):
                raise NetworkError(f"bad endpoints for {link}: {ends}")
        for e, v in self.states.items():
            if e not in ents:
                raise NetworkError(f"state given for undeclared entity {e}")
            if v not in STATES:
                raise NetworkError(f"state of {e} must be 0, 1 or 2, got {v!r}")
        if not self.hardened <= ents:
            raise NetworkError(f"hardened entities not declared: {tokens(self.hardened - ents)}")
        for label, group in (("generators", self.generators), ("pmu_buses", self.pmu_buses)):
            bad = [e for e in group if e not in ents or not e.is_bus]
            if bad:
                raise NetworkError(f"{label} must be declared buses: {tokens(bad)}")
        for sid, sub in self.substations.items():
            bad = [e for e in (*sub.buses, *sub.entities) if e not in ents]
            if bad:
                raise NetworkError(f"substation {sid} lists undeclared {tokens(bad)}")
        for cc in self.control_centers:
            if cc not in self.substations:
                raise NetworkError(f"control center {cc} is not a substation")

    # -- views --------------------------------------------------------------

    def state(self, e):
        return self.states[e]

    @property
    def P(self):
        return frozenset(e for e in self.entities if e.layer == "P")

    @property
    def C(self):
        return frozenset(e for e in self.entities if e.layer == "C")

    @property
    def CP(self):
        return frozenset(e for e in self.entities if e.layer == "CP")

    @property
    def buses(self):
        return frozenset(e for e in self.entities if e.is_bus)

    @property
    def nodes(self):
        """Vertices of the heuristic graph: buses and communication terminals."""
        return frozenset(e for e in self.entities if e.is_node)

    def failed(self):
        return frozenset(e for e, v in self.states.items() if v == 0)

    def bus_adjacency(self, include_failed=False):
        """Adjacency of the power graph (V_P, E_PP); failed buses are dropped by default."""
        alive = {b for b in self.buses if include_failed or self.states[b] > 0}
        adj = {b: set() for b in alive}
        for a, b in self.pp:
            if a in alive and b in alive:
                adj[a].add(b)
                adj[b].add(a)
        return adj

    @cached_property
    def _adjacency(self):
        adj = {}
        for label in ("pp", "cc", "pc"):
            table = adj[label] = {}
            for a, b in getattr(self, label):
                table.setdefault(a, set()).add(b)
                table.setdefault(b, set()).add(a)
        return adj

    def neighbors(self, e, edge_class):
        return set(self._adjacency[edge_class].get(e, ()))

    def substation_of(self, e):
        for sid, sub in self.substations.items():
            if e in sub.buses or e in sub.entities:
                return sid
        return None

    # -- derived copies -----------------------------------------------------

    def _derive(self, **changes):
        out = replace(self, **changes)
        # compiled cascade engines depend on structure only, so share them
        cache = self.__dict__.get("_engines")
        if cache is not None:
            object.__setattr__(out, "_engines", cache)
        return out

    def with_states(self, updates):
        states = dict(self.states)
        states.update(updates)
        return self._derive(states=states)

    def with_hardened(self, extra, replace_all=False):
        hardened = frozenset(extra) if replace_all else self.hardened | frozenset(extra)
        return self._derive(hardened=hardened)

    def without_edges_of(self, entity):
        """Copy with every graph edge incident to ``entity`` removed."""

        def keep(edges):
            return frozenset(p for p in edges if entity not in p)

        return replace(self, pp=keep(self.pp), cc=keep(self.cc), pc=keep(self.pc))

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return save_network(self) == save_network(other)

    __hash__ = None

    def __reduce__(self):
        # mapping proxies do not pickle; ship the canonical document instead
        return (load_network, (save_network(self),))


# ---------------------------------------------------------------------------
# file format


def _ent(token, where):
    try:
        return parse_token(token)
    except (EntityError, TypeError) as exc:
        raise NetworkError(f"{where}: {exc}") from None


def load_network(document) -> Network:
    """Build a validated :class:`Network` from a JSON document (dict or text)."""
    if isinstance(document, (str, bytes)):
        document = json.loads(document)
    if not isinstance(document, dict):
        raise NetworkError("network document must be a JSON object")
    ents = [_ent(t, "entities") for t in document.get("entities", [])]
    known = frozenset(ents)
    if len(known) != len(ents):
        raise NetworkError("duplicate entity in 'entities'")

    idrs = {}
    for n, line in enumerate(document.get("idrs", []), start=1):
        try:
            idr = parse_idr(line, known=known, line=n)
        except GridconError as exc:
            raise NetworkError(f"idrs[{n - 1}]: {exc}") from None
        if idr.target in idrs:
            raise NetworkError(f"duplicate IDR for {idr.target}")
        idrs[idr.target] = idr

    edges = document.get("edges", {})
    parsed_edges = {}
    for key in ("pp", "cc", "pc"):
        out = set()
        for pair in edges.get(key, []):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise NetworkError(f"malformed {key} edge {pair!r}")
            out.add(_pair(_ent(pair[0], key), _ent(pair[1], key)))
        parsed_edges[key] = out

    links = {}
    for tok, ends in document.get("links", {}).items():
        if not isinstance(ends, (list, tuple)) or len(ends) != 2:
            raise NetworkError(f"malformed link endpoints for {tok}")
        links[_ent(tok, "links")] = tuple(_ent(x, "links") for x in ends)

    ann = document.get("annotations", {})
    subs = {}
    for sid, spec in ann.get("substations", {}).items():
        if isinstance(spec, dict):
            buses = [_ent(t, "substations") for t in spec.get("buses", [])]
            others = [_ent(t, "substations") for t in spec.get("entities", [])]
            zone = spec.get("zone")
        else:
            members = [_ent(t, "substations") for t in spec]
            buses = [m for m in members if m.is_bus]
            others = [m for m in members if not m.is_bus]
            zone = None
        subs[int(sid)] = Substation(tuple(sorted(buses)), tuple(sorted(others)), zone)

    states = {}
    for tok, v in document.get("initial_states", {}).items():
        states[_ent(tok, "initial_states")] = v

    return Network(
        entities=known,
        idrs=idrs,
        pp=parsed_edges["pp"],
        cc=parsed_edges["cc"],
        pc=parsed_edges["pc"],
        links=links,
        generators=[_ent(t, "generators") for t in ann.get("generators", [])],
        pmu_buses=[_ent(t, "pmu_buses") for t in ann.get("pmu_buses", [])],
        substations=subs,
        control_centers=[int(c) for c in ann.get("control_centers", [])],
        states=states,
        hardened=[_ent(t, "hardened") for t in document.get("hardened", [])],
        name=document.get("name", ""),
    )


def save_network(network: Network) -> dict:
    """Canonical JSON-ready document; ``load_network(save_network(n)) == n``."""
    links = {}
    for link, (a, b) in sorted(network.links.items()):
        if link.kind is Kind.TRANSMISSION_LINE and {a, b} == {EntityId.bus(i) for i in link.indices}:
            continue
        links[str(link)] = [str(a), str(b)]
    subs = {}
    for sid in sorted(network.substations):
        sub = network.substations[sid]
        entry = {"buses": tokens(sub.buses), "entities": tokens(sub.entities)}
        if sub.zone is not None:
            entry["zone"] = sub.zone
        subs[str(sid)] = entry
    doc = {}
    if network.name:
        doc["name"] = network.name
    doc.update(
        {
            "entities": tokens(network.entities),
            "idrs": [str(network.idrs[t]) for t in sorted(network.idrs)],
            "edges": {
                k: [[str(a), str(b)] for a, b in sorted(getattr(network, k))] for k in ("pp", "cc", "pc")
            },
            "links": links,
            "annotations": {
                "generators": tokens(network.generators),
                "pmu_buses": tokens(network.pmu_buses),
                "substations": subs,
                "control_centers": list(network.control_centers),
            },
            "initial_states": {str(e): v for e, v in sorted(network.states.items()) if v != FULL},
            "hardened": tokens(network.hardened),
        }
    )
    return doc


def dumps_network(network):
    return json.dumps(save_network(network), indent=1, sort_keys=False) + "\n"


def read_network(path) -> Network:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise NetworkError(f"cannot read network file {path}: {exc}") from None
    try:
        return load_network(json.loads(text))
    except json.JSONDecodeError as exc:
        raise NetworkError(f"{path} is not valid JSON: {exc}") from None


def write_network(network, path):
    Path(path).write_text(dumps_network(network))
