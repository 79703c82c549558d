"""Export of the K-contingency integer program in CPLEX LP format.

The model minimizes the summed states at the last time step subject to the
failure-budget, monotonicity and IDR linearization constraints. It is meant
for external MILP solvers; in-package optimality comes from the exact solver.
"""

from __future__ import annotations

import textwrap

from .contingency import eligible
from .errors import ContingencyError
from .idr import FULL, Leaf, MaxOr, MinAnd

_AUX_PREFIX = {MinAnd: "z", MaxOr: "h"}

_HEADER = """\\ K-contingency model for network {name!r}: {n} entities, k = {k}, T = {T}
\\ x_<entity>_<t> in {{0,1,2}}: state of an entity at step t (t = 0..T, T = |E| - 1)
\\ f_<entity> binary: entity fails at t = 0
\\ objective: minimize the summed states at step T
\\ failure budget: sum f = k and x_<e>_0 = s_e - s_e * f_<e> for eligible entities,
\\   x_<e>_0 = s_e otherwise. The literal form "sum of x at step 0 equals k" is
\\   not used: over states {{0,1,2}} it does not count failed entities.
\\ monotonicity: x_<e>_t <= x_<e>_(t-1)
\\ IDR linearization, one auxiliary per operator node per step (pre-order numbering):
\\   z (min-AND): z <= every operand
\\   h (max-OR):  h >= every operand
\\   g (new-XOR): 0 <= g <= 2 and N * g <= sum of its N operands
\\   target:      x_<target>_t <= auxiliary of the root operator
\\   operands are x_<leaf>_(t-1) or the auxiliary of a nested operator at step t
\\ note: the g rows do not pin the full new-XOR table (g = 1 stays feasible
\\   when every operand is 2); the package's evaluator is the reference semantics.
\\ lines and channels are only bound by monotonicity here.
"""


def _x(e, t):
    return f"x_{e}_{t}"


def _aux_name(node, target, j, t):
    prefix = _AUX_PREFIX.get(type(node), "g")
    return f"{prefix}_{target}_{j}_{t}"


class LpModel:
    """Rows and variable families of the exported program."""

    def __init__(self):
        self.objective = []
        self.rows = []
        self.bounds = []
        self.general = []
        self.binary = []
        self.aux = []

    def row(self, name, expr):
        self.rows.append(f"{name}: {expr}")


def _emit(m, node, target, t, counter):
    """Rows for ``node`` at step t; returns the name standing for its value."""
    if isinstance(node, Leaf):
        return _x(node.entity, t - 1)
    a = _aux_name(node, target, counter[0], t)
    counter[0] += 1
    m.aux.append(a)
    refs = [_emit(m, child, target, t, counter) for child in node.children]
    if isinstance(node, MinAnd):
        for c, r in enumerate(refs):
            m.row(f"{a}_c{c}", f"{a} - {r} <= 0")
    elif isinstance(node, MaxOr):
        for c, r in enumerate(refs):
            m.row(f"{a}_c{c}", f"{a} - {r} >= 0")
    else:
        m.row(f"{a}_n", f"{len(refs)} {a} - " + " - ".join(refs) + " <= 0")
    return a


def build_model(network, k, horizon=None):
    ents = sorted(network.entities)
    T = len(ents) - 1 if horizon is None else horizon
    if T < 1:
        raise ContingencyError("the time horizon needs at least one step (two entities)")
    cands = set(eligible(network))
    if not 1 <= k <= len(cands):
        raise ContingencyError(f"k={k} must be between 1 and the {len(cands)} eligible entities")
    m = LpModel()
    m.objective = [_x(e, T) for e in ents]

    for e in ents:
        s = network.states[e]
        if e in cands:
            m.row(f"init_{e}", f"{_x(e, 0)} + {s} f_{e} = {s}")
            m.binary.append(f"f_{e}")
        else:
            m.row(f"init_{e}", f"{_x(e, 0)} = {s}")
    m.row("budget", " + ".join(f"f_{e}" for e in sorted(cands)) + f" = {k}")

    for t in range(1, T + 1):
        for e in ents:
            m.row(f"mono_{e}_{t}", f"{_x(e, t)} - {_x(e, t - 1)} <= 0")
        for target in sorted(network.idrs):
            root = _emit(m, network.idrs[target].expr, target, t, [0])
            m.row(f"idr_{target}_{t}", f"{_x(target, t)} - {root} <= 0")

    for t in range(T + 1):
        for e in ents:
            m.bounds.append(f" 0 <= {_x(e, t)} <= {FULL}")
            m.general.append(_x(e, t))
    for a in m.aux:
        m.bounds.append(f" 0 <= {a} <= {FULL}")
        m.general.append(a)
    return m, T


def _wrap(text, first, rest="   ", width=100):
    return textwrap.wrap(
        text, width, initial_indent=first, subsequent_indent=rest,
        break_long_words=False, break_on_hyphens=False,
    )


def export_ilp(network, k, horizon=None) -> str:
    """LP-format text of the K-contingency program (sections Minimize .. End)."""
    m, T = build_model(network, k, horizon)
    out = [_HEADER.format(name=network.name or "unnamed", n=len(network.entities), k=k, T=T)]
    out.append("Minimize")
    out.extend(_wrap(" + ".join(m.objective), " obj: "))
    out.append("Subject To")
    for r in m.rows:
        out.extend(_wrap(r, " "))
    out.append("Bounds")
    out.extend(m.bounds)
    out.append("General")
    out.extend(_wrap(" ".join(m.general), " ", " "))
    if m.binary:
        out.append("Binary")
        out.extend(_wrap(" ".join(m.binary), " ", " "))
    out.append("End")
    return "\n".join(out) + "\n"
