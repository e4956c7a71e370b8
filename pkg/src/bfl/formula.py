"""BFL formulas: syntax tree, parser and expansion of derived operators.

Concrete syntax, loosest binding first::

    exists f   forall f            quantify over all status vectors
    f <=> g    f != g              equivalence / non-equivalence
    f => g                         implication (right associative)
    f | g
    f & g
    !f
    f[x:=0, y:=1, others:=1]       evidence on basic events (postfix)

plus the primaries ``name``, ``"quoted name"``, ``(f)``, ``MCS(f)``, ``MPS(f)``,
``IDP(f, g)``, ``SUP(name)`` and ``VOT(>=k; f1, ..., fn)`` where the
comparison is one of ``< <= = >= >``.

``exists``, ``forall``, ``IDP`` and ``SUP`` form the second layer: they may
only appear at the root of a formula.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, fields
from functools import reduce
from typing import Iterator

from .fault_tree import FaultTree

__all__ = [
    "Formula", "Atom", "Const", "Not", "And", "Or", "Implies", "Iff", "Neq",
    "Evidence", "MCS", "MPS", "Vot", "Exists", "Forall", "IDP", "SUP",
    "Layer", "FormulaError", "FormulaSyntaxError",
    "parse_formula", "desugar", "layer_of", "is_core", "subformulas",
    "contains_minimality", "vot_threshold", "vot_subset_expansion", "format_formula",
]


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}" + (f": {text!r}" if text else ""))
        self.pos = pos


class Layer(enum.Enum):
    VECTOR = 1
    TREE = 2


class Formula:
    """Base of all syntax tree nodes.

    Nodes are immutable and compare structurally.  The hash is cached because
    expanded voting formulas share subterms heavily.
    """

    def _key(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Formula) else False
        return hash(self) == hash(other) and self._key() == other._key()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self):
        return format_formula(self)

    # operator sugar for building formulas in Python
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    name: str


@dataclass(frozen=True, eq=False)
class Const(Formula):
    value: bool


@dataclass(frozen=True, eq=False)
class Not(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


class Iff(_Binary):
    pass


class Neq(_Binary):
    pass


@dataclass(frozen=True, eq=False)
class Evidence(Formula):
    """``arg[x:=v, ...]``; ``others`` assigns every basic event not listed."""

    arg: Formula
    assignments: tuple[tuple[str, bool], ...]
    others: bool | None = None

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class MCS(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class MPS(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Vot(Formula):
    cmp: str
    k: int
    args: tuple[Formula, ...]

    def children(self):
        return self.args


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Forall(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class IDP(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class SUP(Formula):
    name: str


LAYER2 = (Exists, Forall, IDP, SUP)
CMPS = ("<", "<=", "=", ">=", ">")


def layer_of(f: Formula) -> Layer:
    return Layer.TREE if isinstance(f, LAYER2) else Layer.VECTOR


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk; shared subterms are visited once."""
    seen = set()
    todo = [f]
    while todo:
        g = todo.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        todo.extend(reversed(g.children()))


def contains_minimality(f: Formula) -> bool:
    return any(isinstance(g, (MCS, MPS)) for g in subformulas(f))


def is_core(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, (Or, Implies, Iff, Neq, Vot, SUP)):
            return False
        if isinstance(g, Evidence) and (len(g.assignments) != 1 or g.others is not None):
            return False
    return True


# -- printing --------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"exists", "forall", "others", "MCS", "MPS", "IDP", "SUP", "VOT"})


def _name(n: str) -> str:
    return n if _NAME.match(n) and n not in KEYWORDS else f'"{n}"'


_PREC = {Iff: 1, Neq: 1, Implies: 2, Or: 3, And: 4}


def format_formula(f: Formula) -> str:
    """Render in the concrete syntax; the output parses back to an equal tree."""

    def go(g: Formula, ctx: int) -> str:
        if isinstance(g, Atom):
            return _name(g.name)
        if isinstance(g, Const):
            return "true" if g.value else "false"
        if isinstance(g, Not):
            s = "!" + go(g.arg, 5)
            return f"({s})" if ctx > 5 else s
        if isinstance(g, _Binary):
            p = _PREC[type(g)]
            op = {Iff: "<=>", Neq: "!=", Implies: "=>", Or: "|", And: "&"}[type(g)]
            if isinstance(g, Implies):
                s = f"{go(g.left, p + 1)} {op} {go(g.right, p)}"
            else:
                s = f"{go(g.left, p)} {op} {go(g.right, p + 1)}"
            return f"({s})" if p < ctx else s
        if isinstance(g, Evidence):
            items = [f"{_name(n)}:={int(v)}" for n, v in g.assignments]
            if g.others is not None:
                items.append(f"others:={int(g.others)}")
            return f"{go(g.arg, 6)}[{', '.join(items)}]"
        if isinstance(g, (MCS, MPS)):
            return f"{type(g).__name__}({go(g.arg, 0)})"
        if isinstance(g, Vot):
            return f"VOT({g.cmp}{g.k}; {', '.join(go(a, 0) for a in g.args)})"
        if isinstance(g, (Exists, Forall)):
            s = f"{type(g).__name__.lower()} {go(g.arg, 0)}"
            return f"({s})" if ctx > 0 else s
        if isinstance(g, IDP):
            return f"IDP({go(g.left, 0)}, {go(g.right, 0)})"
        if isinstance(g, SUP):
            return f"SUP({_name(g.name)})"
        raise TypeError(type(g))

    return go(f, 0)


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    \s*(?:
      (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<quoted>"[^"]*")
    | (?P<int>[0-9]+)
    | (?P<op><=>|=>|!=|:=|>=|<=|[!&|()\[\],;<>=])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "quoted":
            value = value[1:-1]
            if not value:
                raise FormulaSyntaxError("empty quoted name", start)
        elif kind == "op":
            kind = value
        toks.append((kind, value, start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ft: FaultTree | None):
        self.text = text
        self.ft = ft
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> tuple[str, str, int]:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(msg, tok[2], tok[1])

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            self.fail(f"expected {kind!r}" + ("" if tok[0] != "eof" else ", found end of input"))
        return self.take()

    def is_keyword(self, word: str) -> bool:
        return self.peek()[0] == "name" and self.peek()[1] == word

    def element(self, tok) -> str:
        name = tok[1]
        if self.ft is not None and name not in self.ft.elements:
            raise FormulaError(f"unknown element {name!r} at position {tok[2]}")
        return name

    def parse(self) -> Formula:
        f = self.formula()
        if self.peek()[0] != "eof":
            self.fail("unexpected token")
        return f

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        f = self.implies()
        while self.peek()[0] in ("<=>", "!="):
            op = self.take()[0]
            g = self.implies()
            f = Iff(f, g) if op == "<=>" else Neq(f, g)
        return f

    def implies(self) -> Formula:
        f = self.disj()
        if self.peek()[0] == "=>":
            self.take()
            return Implies(f, self.implies())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[0] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.peek()[0] == "!":
            self.take()
            return Not(self.unary())
        return self.postfix()

    def postfix(self) -> Formula:
        f = self.primary()
        while self.peek()[0] == "[":
            f = self.evidence(f)
        return f

    def evidence(self, f: Formula) -> Formula:
        self.expect("[")
        assignments: list[tuple[str, bool]] = []
        others = None
        seen = set()
        while True:
            tok = self.peek()
            if tok[0] not in ("name", "quoted"):
                self.fail("expected an evidence target")
            self.take()
            self.expect(":=")
            val_tok = self.expect("int")
            if val_tok[1] not in ("0", "1"):
                self.fail("evidence value must be 0 or 1", val_tok)
            value = val_tok[1] == "1"
            if tok[0] == "name" and tok[1] == "others":
                if others is not None:
                    self.fail("duplicate 'others'", tok)
                others = value
            else:
                name = self.element(tok)
                if name in seen:
                    raise FormulaError(f"duplicate evidence target {name!r} at position {tok[2]}")
                if self.ft is not None and not self.ft.is_basic(name):
                    raise FormulaError(
                        f"evidence target {name!r} is an intermediate element; only basic events can be set"
                    )
                seen.add(name)
                assignments.append((name, value))
            if self.peek()[0] == ",":
                self.take()
                continue
            self.expect("]")
            break
        return Evidence(f, tuple(assignments), others)

    def primary(self) -> Formula:
        tok = self.peek()
        kind, value, _ = tok
        if kind == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "quoted":
            self.take()
            return Atom(self.element(tok))
        if kind != "name":
            self.fail("expected a formula")
        if value in ("exists", "forall"):
            self.take()
            body = self.formula()
            return Exists(body) if value == "exists" else Forall(body)
        if value in ("MCS", "MPS", "IDP", "SUP", "VOT") and self.peek(1)[0] == "(":
            self.take()
            self.take()
            if value == "SUP":
                name_tok = self.peek()
                if name_tok[0] not in ("name", "quoted"):
                    self.fail("SUP expects an element name")
                self.take()
                f = SUP(self.element(name_tok))
            elif value == "IDP":
                left = self.formula()
                self.expect(",")
                f = IDP(left, self.formula())
            elif value == "VOT":
                f = self.vot()
            else:
                arg = self.formula()
                f = MCS(arg) if value == "MCS" else MPS(arg)
            self.expect(")")
            return f
        if value in ("true", "false") and (self.ft is None or value not in self.ft.elements):
            self.take()
            return Const(value == "true")
        self.take()
        return Atom(self.element(tok))

    def vot(self) -> Formula:
        tok = self.peek()
        if tok[0] not in CMPS:
            self.fail("VOT expects a comparison such as '>=2'")
        cmp = self.take()[0]
        k = int(self.expect("int")[1])
        self.expect(";")
        args = [self.formula()]
        while self.peek()[0] == ",":
            self.take()
            args.append(self.formula())
        if cmp == ">=" and k > len(args):
            raise FormulaError(f"VOT(>={k}) over {len(args)} operands can never hold")
        return Vot(cmp, k, tuple(args))


def check_layers(f: Formula) -> None:
    """Second-layer constructs are only allowed at the root."""
    for child in f.children():
        for g in subformulas(child):
            if isinstance(g, LAYER2):
                raise FormulaError(
                    f"layer violation: {type(g).__name__} cannot appear inside another operator ({format_formula(f)})"
                )


def parse_formula(text: str, ft: FaultTree | None = None) -> Formula:
    """Parse BFL text; with a tree, names are checked against its elements."""
    f = _Parser(text, ft).parse()
    check_layers(f)
    return f


# -- desugaring ------------------------------------------------------------

def _or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def _implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def _ite(c: Formula, t: Formula, e: Formula) -> Formula:
    return _or(And(c, t), And(Not(c), e))


def vot_threshold(k: int, args: tuple[Formula, ...]) -> Formula:
    """Core formula for "at least k of args", by splitting on the first operand."""
    memo: dict[tuple[int, int], Formula] = {}

    def at_least(k: int, i: int) -> Formula:
        if k <= 0:
            return Const(True)
        if len(args) - i < k:
            return Const(False)
        key = (k, i)
        if key not in memo:
            memo[key] = _ite(args[i], at_least(k - 1, i + 1), at_least(k, i + 1))
        return memo[key]

    return at_least(k, 0)


def vot_subset_expansion(k: int, args: tuple[Formula, ...]) -> Formula:
    """The enumerated form: some set U of at least k operands hold and the rest do not."""
    terms = []
    n = len(args)
    for size in range(k, n + 1):
        for chosen in itertools.combinations(range(n), size):
            lits = [args[i] if i in chosen else Not(args[i]) for i in range(n)]
            terms.append(reduce(And, lits))
    if not terms:
        return Const(False)
    return reduce(Or, terms)


def _vot_core(cmp: str, k: int, args: tuple[Formula, ...]) -> Formula:
    if cmp == ">=":
        return vot_threshold(k, args)
    if cmp == ">":
        return vot_threshold(k + 1, args)
    if cmp == "<":
        return Not(vot_threshold(k, args))
    if cmp == "<=":
        return Not(vot_threshold(k + 1, args))
    return And(vot_threshold(k, args), Not(vot_threshold(k + 1, args)))


def desugar(f: Formula, ft: FaultTree) -> Formula:
    """Rewrite into core operators: Atom, Const, Not, And, single Evidence, MCS, MPS,
    Exists, Forall and IDP."""
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        hit = memo.get(id(g))
        if hit is not None:
            return hit
        if isinstance(g, (Atom, Const)):
            res = g
        elif isinstance(g, Not):
            res = Not(go(g.arg))
        elif isinstance(g, And):
            res = And(go(g.left), go(g.right))
        elif isinstance(g, Or):
            res = _or(go(g.left), go(g.right))
        elif isinstance(g, Implies):
            res = _implies(go(g.left), go(g.right))
        elif isinstance(g, Iff):
            a, b = go(g.left), go(g.right)
            res = And(_implies(a, b), _implies(b, a))
        elif isinstance(g, Neq):
            a, b = go(g.left), go(g.right)
            res = Not(And(_implies(a, b), _implies(b, a)))
        elif isinstance(g, Evidence):
            res = go(g.arg)
            listed = [n for n, _ in g.assignments]
            if len(set(listed)) != len(listed):
                raise FormulaError("duplicate evidence target")
            items = list(g.assignments)
            if g.others is not None:
                items += [(n, g.others) for n in ft.be_order if n not in listed]
            for name, value in items:
                if not ft.is_basic(name):
                    raise FormulaError(f"evidence target {name!r} is not a basic event")
                res = Evidence(res, ((name, bool(value)),))
        elif isinstance(g, MCS):
            res = MCS(go(g.arg))
        elif isinstance(g, MPS):
            res = MPS(go(g.arg))
        elif isinstance(g, Vot):
            res = _vot_core(g.cmp, g.k, tuple(go(a) for a in g.args))
        elif isinstance(g, Exists):
            res = Exists(go(g.arg))
        elif isinstance(g, Forall):
            res = Forall(go(g.arg))
        elif isinstance(g, IDP):
            res = IDP(go(g.left), go(g.right))
        elif isinstance(g, SUP):
            if g.name not in ft.elements:
                raise FormulaError(f"unknown element {g.name!r}")
            res = IDP(Atom(g.name), Atom(ft.top))
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[id(g)] = res
        return res

    check_layers(f)
    return go(f)
