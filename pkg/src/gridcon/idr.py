"""Interdependency relations (IDRs): expression trees, surface syntax, evaluation.

An IDR binds a target entity to an expression over other entities::

    C1_1_6_6 <- ((C1_2_6_6 & P12) | (C1_3_1_6 & P6)) # L1_6

``&`` is min-AND, ``|`` is max-OR and ``#`` is new-XOR, binding in that order
(``&`` tightest). Parentheses always win. ``%`` starts a comment.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Mapping, Union

from .entities import TOKEN_PATTERN, EntityId, parse_token
from .errors import EntityError, EvaluationError, IdrSyntaxError, UnknownEntityError

FAILED, REDUCED, FULL = 0, 1, 2
STATES = (FAILED, REDUCED, FULL)


class Model(str, enum.Enum):
    MIIM = "miim"
    IIM = "iim"


@dataclass(frozen=True)
class Leaf:
    entity: EntityId


@dataclass(frozen=True)
class _Op:
    children: tuple

    symbol = "?"
    precedence = -1

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) < 2:
            raise ValueError(f"{type(self).__name__} needs at least 2 children")
        object.__setattr__(self, "children", children)


@dataclass(frozen=True)
class MinAnd(_Op):
    symbol = "&"
    precedence = 2


@dataclass(frozen=True)
class MaxOr(_Op):
    symbol = "|"
    precedence = 1


@dataclass(frozen=True)
class NewXor(_Op):
    symbol = "#"
    precedence = 0


Expr = Union[Leaf, MinAnd, MaxOr, NewXor]


@dataclass(frozen=True)
class Idr:
    target: EntityId
    expr: Expr

    def __post_init__(self):
        if self.target in leaves(self.expr):
            raise IdrSyntaxError(f"self-dependency: {self.target} appears in its own IDR")

    def __str__(self):
        return f"{self.target} <- {format_expr(self.expr)}"


def leaves(expr):
    """Set of entities referenced by ``expr``."""
    out = set()
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.add(node.entity)
        else:
            stack.extend(node.children)
    return out


def operator_nodes(expr):
    """Operator nodes in pre-order (the numbering used by the LP exporter)."""
    out = []

    def walk(node):
        if isinstance(node, Leaf):
            return
        out.append(node)
        for c in node.children:
            walk(c)

    walk(expr)
    return out


# ---------------------------------------------------------------------------
# evaluation


def new_xor(values):
    """Common value when all inputs agree, otherwise reduced operation (1)."""
    it = iter(values)
    first = next(it)
    for v in it:
        if v != first:
            return REDUCED
    return first


def eval_expr(expr, states: Mapping[EntityId, int], model=Model.MIIM):
    """Evaluate ``expr`` against a state table.

    Under IIM the state table must be binary ({0, 2}) and new-XOR degenerates
    to AND (minimum).
    """
    model = Model(model)
    if isinstance(expr, Leaf):
        try:
            v = states[expr.entity]
        except KeyError:
            raise EvaluationError(f"no state for {expr.entity}") from None
        if v not in STATES:
            raise EvaluationError(f"invalid state {v!r} for {expr.entity}")
        if model is Model.IIM and v == REDUCED:
            raise EvaluationError(f"IIM state table holds reduced value for {expr.entity}")
        return v
    vals = [eval_expr(c, states, model) for c in expr.children]
    if isinstance(expr, MaxOr):
        return max(vals)
    if isinstance(expr, MinAnd) or model is Model.IIM:
        return min(vals)
    return new_xor(vals)


def to_python(expr, index, model=Model.MIIM):
    """Python source evaluating ``expr`` over a state list ``s``.

    ``index`` maps entities to list positions. Used by the cascade engine to
    compile IDRs; :func:`eval_expr` stays the reference semantics.
    """
    model = Model(model)
    if isinstance(expr, Leaf):
        return f"s[{index[expr.entity]}]"
    parts = ", ".join(to_python(c, index, model) for c in expr.children)
    if isinstance(expr, MaxOr):
        return f"max({parts})"
    if isinstance(expr, MinAnd) or model is Model.IIM:
        return f"min({parts})"
    return f"_xor(({parts},))"


# ---------------------------------------------------------------------------
# surface syntax

_LEXEME = re.compile(
    r"(?P<ws>[ \t]+)|(?P<comment>%[^\n]*)|(?P<arrow><-)|(?P<op>[&|#])"
    r"|(?P<lpar>\()|(?P<rpar>\))|(?P<word>[A-Za-z0-9_]+)|(?P<bad>.)"
)
_ENTITY = re.compile(rf"^(?:{TOKEN_PATTERN})$")


class _Parser:
    def __init__(self, text, line, known):
        self.line = line
        self.known = known
        self.toks = []
        for m in _LEXEME.finditer(text):
            kind = m.lastgroup
            if kind in ("ws", "comment"):
                continue
            if kind == "bad":
                raise IdrSyntaxError(f"unexpected character {m.group()!r}", line, m.start() + 1)
            self.toks.append((kind, m.group(), m.start() + 1))
        self.end_col = len(text.rstrip()) + 1
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else ("eof", "", self.end_col)

    def take(self, kind, what):
        tok = self.peek()
        if tok[0] != kind:
            shown = tok[1] or "end of line"
            raise IdrSyntaxError(f"expected {what}, found {shown!r}", self.line, tok[2])
        self.pos += 1
        return tok

    def entity(self):
        _, text, col = self.take("word", "entity")
        if not _ENTITY.match(text):
            raise UnknownEntityError(f"unknown entity token {text!r} (line {self.line}, column {col})")
        try:
            e = parse_token(text)
        except EntityError as exc:
            raise UnknownEntityError(f"{exc} (line {self.line}, column {col})") from None
        if self.known is not None and e not in self.known:
            raise UnknownEntityError(f"undeclared entity {text} (line {self.line}, column {col})")
        return e

    def idr(self):
        target = self.entity()
        self.take("arrow", "'<-'")
        expr = self.expr()
        self.finish()
        if target in leaves(expr):
            raise IdrSyntaxError(f"self-dependency: {target} appears in its own IDR", self.line, 1)
        return Idr(target, expr)

    def finish(self):
        tok = self.peek()
        if tok[0] != "eof":
            raise IdrSyntaxError(f"unexpected {tok[1]!r}", self.line, tok[2])

    def _chain(self, sub, symbol, cls):
        first = sub()
        items = [first]
        while self.peek()[0] == "op" and self.peek()[1] == symbol:
            self.pos += 1
            items.append(sub())
        return items[0] if len(items) == 1 else cls(tuple(items))

    def expr(self):
        return self._chain(self.or_expr, "#", NewXor)

    def or_expr(self):
        return self._chain(self.and_expr, "|", MaxOr)

    def and_expr(self):
        return self._chain(self.atom, "&", MinAnd)

    def atom(self):
        tok = self.peek()
        if tok[0] == "lpar":
            self.pos += 1
            inner = self.expr()
            self.take("rpar", "')'")
            return inner
        if tok[0] == "word":
            return Leaf(self.entity())
        shown = tok[1] or "end of line"
        raise IdrSyntaxError(f"expected entity or '(', found {shown!r}", self.line, tok[2])


def parse_idr(text, known=None, line=1):
    """Parse one IDR line. ``known`` optionally restricts the entity universe."""
    return _Parser(text, line, known).idr()


def parse_expr(text, known=None):
    p = _Parser(text, 1, known)
    e = p.expr()
    p.finish()
    return e


def parse_idrs(text, known=None):
    """Parse a block of IDR lines; blank and comment-only lines are skipped."""
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        if not raw.split("%", 1)[0].strip():
            continue
        out.append(parse_idr(raw, known, line=n))
    return out


def format_expr(expr):
    """Inverse of :func:`parse_expr` (minimal parentheses, tree-preserving)."""
    if isinstance(expr, Leaf):
        return str(expr.entity)
    parts = []
    for c in expr.children:
        s = format_expr(c)
        if not isinstance(c, Leaf) and c.precedence <= expr.precedence:
            s = f"({s})"
        parts.append(s)
    return f" {expr.symbol} ".join(parts)


def format_idr(idr):
    return str(idr)
