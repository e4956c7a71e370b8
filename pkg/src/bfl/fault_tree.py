"""Static fault trees: data model, text format, validation and the structure function.

A tree file looks like this::

    # comments run to end of line
    toplevel CP_R;
    CP_R = or(CP, CR);
    CP = and(IW, H3);
    CR = and(IT, H2);
    V = vot(2; a, b, c);      # at least 2 of 3; "vot(2/3; a, b, c)" also accepted

Names that are only ever used as children are basic events.  The order in
which basic events first appear in the file fixes their index in status
vectors and their position in the BDD variable order.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "GateType",
    "Element",
    "FaultTree",
    "StatusVector",
    "Violation",
    "FaultTreeError",
    "FaultTreeSyntaxError",
    "parse_fault_tree",
    "load_fault_tree",
    "serialize",
    "validate",
    "eval_structure",
    "basic_event_order",
    "to_dot",
    "iter_vectors",
]

IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"toplevel", "and", "or", "vot"})


class GateType(enum.Enum):
    AND = "and"
    OR = "or"
    VOT = "vot"


@dataclass(frozen=True)
class Element:
    """A fault tree element: a basic event when ``gate`` is None, else a gate."""

    name: str
    gate: GateType | None = None
    children: tuple[str, ...] = ()
    k: int | None = None

    @property
    def is_basic(self) -> bool:
        return self.gate is None

    def describe(self) -> str:
        if self.gate is None:
            return "BE"
        if self.gate is GateType.VOT:
            return f"VOT({self.k}/{len(self.children)})"
        return self.gate.name


@dataclass(frozen=True)
class Violation:
    kind: str
    element: str | None
    message: str

    def __str__(self) -> str:
        return self.message


class FaultTreeError(ValueError):
    def __init__(self, message: str, violations: Sequence[Violation] = ()):
        super().__init__(message)
        self.violations = tuple(violations)


class FaultTreeSyntaxError(FaultTreeError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True, eq=False)
class FaultTree:
    """Immutable fault tree.

    ``elements`` holds gates in definition order followed by basic events in
    ``be_order``.  Construct through :meth:`from_gates` or
    :func:`parse_fault_tree` unless a custom basic event order is wanted;
    :func:`serialize` can only reproduce the first-occurrence order.
    """

    elements: Mapping[str, Element]
    top: str
    be_order: tuple[str, ...]
    _index: Mapping[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "elements", MappingProxyType(dict(self.elements)))
        object.__setattr__(self, "be_order", tuple(self.be_order))
        object.__setattr__(
            self, "_index", MappingProxyType({n: i for i, n in enumerate(self.be_order)})
        )

    @classmethod
    def from_gates(
        cls,
        top: str,
        gates: Mapping[str, tuple[GateType | str, Sequence[str]] | tuple[GateType | str, Sequence[str], int]],
    ) -> "FaultTree":
        """Build a tree from ``{name: (type, children[, k])}`` in definition order."""
        elements: dict[str, Element] = {}
        for name, spec in gates.items():
            gate = GateType(spec[0]) if isinstance(spec[0], str) else spec[0]
            k = spec[2] if len(spec) > 2 else None
            elements[name] = Element(name, gate, tuple(spec[1]), k)
        order: list[str] = []
        seen: set[str] = set()
        for el in list(elements.values()):
            for child in el.children:
                if child not in elements and child not in seen:
                    seen.add(child)
                    order.append(child)
        for name in order:
            elements[name] = Element(name)
        return cls(elements, top, tuple(order))

    def __eq__(self, other):
        if not isinstance(other, FaultTree):
            return NotImplemented
        return (
            self.top == other.top
            and self.be_order == other.be_order
            and list(self.elements.items()) == list(other.elements.items())
        )

    def __hash__(self):
        return hash((self.top, self.be_order, tuple(self.elements.items())))

    def __contains__(self, name: str) -> bool:
        return name in self.elements

    def __getitem__(self, name: str) -> Element:
        try:
            return self.elements[name]
        except KeyError:
            raise KeyError(f"unknown element {name!r}") from None

    @property
    def gates(self) -> list[Element]:
        return [el for el in self.elements.values() if not el.is_basic]

    @property
    def basic_events(self) -> tuple[str, ...]:
        return self.be_order

    def is_basic(self, name: str) -> bool:
        return self[name].is_basic

    def index(self, name: str) -> int:
        """Position of a basic event in status vectors."""
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a basic event") from None

    def vector(self, bits: Mapping[str, int | bool] | Sequence[int | bool] | int) -> "StatusVector":
        return StatusVector.of(self, bits)


@dataclass(frozen=True)
class StatusVector:
    """Total assignment of failed (1) / operational (0) to a tree's basic events."""

    names: tuple[str, ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.bits):
            raise ValueError("status vector length does not match basic event count")
        object.__setattr__(self, "bits", tuple(1 if b else 0 for b in self.bits))

    @classmethod
    def of(cls, ft: FaultTree, bits) -> "StatusVector":
        """Accept a mapping (missing names default to 0), a sequence, or an int bitmask."""
        names = ft.be_order
        if isinstance(bits, StatusVector):
            if bits.names != names:
                raise ValueError("status vector belongs to a different tree")
            return bits
        if isinstance(bits, int):
            return cls(names, tuple((bits >> i) & 1 for i in range(len(names))))
        if isinstance(bits, Mapping):
            unknown = set(bits) - set(names)
            if unknown:
                raise ValueError(f"not basic events: {', '.join(sorted(unknown))}")
            return cls(names, tuple(int(bool(bits.get(n, 0))) for n in names))
        bits = tuple(bits)
        if len(bits) != len(names):
            raise ValueError(f"expected {len(names)} bits, got {len(bits)}")
        return cls(names, bits)

    def __getitem__(self, name: str) -> int:
        return self.bits[self.names.index(name)]

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.names, self.bits))

    def as_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def replace(self, **changes: int) -> "StatusVector":
        d = self.as_dict()
        for k, v in changes.items():
            if k not in d:
                raise KeyError(k)
            d[k] = int(bool(v))
        return StatusVector(self.names, tuple(d[n] for n in self.names))

    def with_bit(self, name: str, value: int | bool) -> "StatusVector":
        return self.replace(**{name: value})

    @property
    def failed(self) -> frozenset[str]:
        return frozenset(n for n, b in zip(self.names, self.bits) if b)

    @property
    def operational(self) -> frozenset[str]:
        return frozenset(n for n, b in zip(self.names, self.bits) if not b)

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.bits)) + ")"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<quoted>"[^"\n]*")
  | (?P<int>[0-9]+)
  | (?P<punct>[=();,/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    value: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FaultTreeSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "name":
            toks.append(_Tok("name", m.group(), line, col))
        elif kind == "quoted":
            if len(m.group()) == 2:
                raise FaultTreeSyntaxError("empty quoted name", line, col)
            toks.append(_Tok("qname", m.group()[1:-1], line, col))
        elif kind in ("int", "punct"):
            toks.append(_Tok(kind if kind == "int" else m.group(), m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _FTParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            found = tok.value or "end of input"
            raise FaultTreeSyntaxError(f"expected {what or kind!r}, found {found!r}", tok.line, tok.col)
        return tok

    def name(self) -> _Tok:
        tok = self.next()
        if tok.kind not in ("name", "qname"):
            found = tok.value or "end of input"
            raise FaultTreeSyntaxError(f"expected a name, found {found!r}", tok.line, tok.col)
        return tok

    def parse(self) -> FaultTree:
        top: _Tok | None = None
        gates: dict[str, Element] = {}
        order: list[str] = []
        seen_children: set[str] = set()
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "name" and tok.value == "toplevel":
                self.next()
                name = self.name()
                self.expect(";")
                if top is not None:
                    raise FaultTreeSyntaxError("duplicate toplevel declaration", tok.line, tok.col)
                top = name
                continue
            name = self.name()
            self.expect("=")
            kind = self.expect("name", "gate type")
            if kind.value not in ("and", "or", "vot"):
                raise FaultTreeSyntaxError(f"unknown gate type {kind.value!r}", kind.line, kind.col)
            gate = GateType(kind.value)
            self.expect("(")
            k = None
            if gate is GateType.VOT:
                k_tok = self.expect("int", "threshold")
                k = int(k_tok.value)
                n_declared = None
                if self.peek().kind == "/":
                    self.next()
                    n_declared = int(self.expect("int", "arity").value)
                self.expect(";")
            children = [self.name()]
            while self.peek().kind == ",":
                self.next()
                children.append(self.name())
            self.expect(")")
            self.expect(";")
            if name.value in gates:
                raise FaultTreeSyntaxError(f"duplicate definition of gate {name.value!r}", name.line, name.col)
            if gate is GateType.VOT:
                n = len(children)
                if n_declared is not None and n_declared != n:
                    raise FaultTreeSyntaxError(
                        f"vot gate {name.value!r} declares {n_declared} inputs but lists {n}", kind.line, kind.col
                    )
                if n < 2 or not 1 <= k <= n:
                    raise FaultTreeSyntaxError(
                        f"vot gate {name.value!r}: need 2 <= N and 1 <= k <= N, got k={k}, N={n}", kind.line, kind.col
                    )
            gates[name.value] = Element(name.value, gate, tuple(c.value for c in children), k)
            for c in children:
                if c.value not in seen_children:
                    seen_children.add(c.value)
                    order.append(c.value)
        basics = [n for n in order if n not in gates]
        elements = dict(gates)
        elements.update((n, Element(n)) for n in basics)
        return FaultTree(elements, top.value if top else "", tuple(basics))


def parse_fault_tree(text: str, *, check: bool = True) -> FaultTree:
    """Parse the tree format; with ``check`` raise if the tree is not well formed."""
    ft = _FTParser(text).parse()
    if check:
        report = validate(ft)
        if report:
            raise FaultTreeError("; ".join(v.message for v in report), report)
    return ft


def load_fault_tree(path, *, check: bool = True) -> FaultTree:
    with open(path, encoding="utf-8") as fh:
        return parse_fault_tree(fh.read(), check=check)


def _quote(name: str) -> str:
    if IDENTIFIER.match(name) and name not in KEYWORDS:
        return name
    return f'"{name}"'


def serialize(ft: FaultTree) -> str:
    lines = [f"toplevel {_quote(ft.top)};"]
    for el in ft.gates:
        args = ", ".join(_quote(c) for c in el.children)
        if el.gate is GateType.VOT:
            args = f"{el.k}; {args}"
        lines.append(f"{_quote(el.name)} = {el.gate.value}({args});")
    return "\n".join(lines) + "\n"


# -- validation ------------------------------------------------------------

def _find_cycles(ft: FaultTree) -> list[list[str]]:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(ft.elements, WHITE)
    cycles = []

    for root in ft.elements:
        if colour[root] != WHITE:
            continue
        colour[root] = GREY
        path = [root]
        stack = [iter(ft.elements[root].children)]
        while stack:
            child = next(stack[-1], None)
            if child is None:
                stack.pop()
                colour[path.pop()] = BLACK
                continue
            if child not in colour:
                continue
            if colour[child] == GREY:
                cycles.append(path[path.index(child):] + [child])
            elif colour[child] == WHITE:
                colour[child] = GREY
                path.append(child)
                stack.append(iter(ft.elements[child].children))
    return cycles


def validate(ft: FaultTree) -> list[Violation]:
    """Return every well-formedness violation; an empty list means the tree is valid.

    Reachability is checked from the top element along child edges.
    """
    report: list[Violation] = []
    els = ft.elements
    for name, el in els.items():
        if el.name != name:
            report.append(Violation("name", name, f"element stored under {name!r} is named {el.name!r}"))
    if not ft.top:
        report.append(Violation("top", None, "missing 'toplevel' declaration"))
    elif ft.top not in els:
        report.append(Violation("top", ft.top, f"top element {ft.top!r} does not exist"))
    elif els[ft.top].is_basic:
        report.append(Violation("top", ft.top, f"top element {ft.top!r} is a basic event, not a gate"))
    for el in els.values():
        if el.is_basic:
            if el.children or el.k is not None:
                report.append(Violation("basic", el.name, f"basic event {el.name!r} has gate data"))
            continue
        if not el.children:
            report.append(Violation("children", el.name, f"gate {el.name!r} has no children"))
        for c in el.children:
            if c not in els:
                report.append(Violation("undefined", el.name, f"gate {el.name!r} refers to undefined element {c!r}"))
        if el.gate is GateType.VOT:
            n = len(el.children)
            if el.k is None or n < 2 or not 1 <= el.k <= n:
                report.append(
                    Violation("vot", el.name, f"vot gate {el.name!r}: need 2 <= N and 1 <= k <= N, got k={el.k}, N={n}")
                )
        elif el.k is not None:
            report.append(Violation("vot", el.name, f"{el.gate.name} gate {el.name!r} carries a threshold"))
    for cyc in _find_cycles(ft):
        report.append(Violation("cycle", cyc[0], "cycle: " + " -> ".join(cyc)))
    if ft.top in els:
        reached = {ft.top}
        todo = [ft.top]
        while todo:
            for c in els[todo.pop()].children:
                if c in els and c not in reached:
                    reached.add(c)
                    todo.append(c)
        for name in els:
            if name not in reached:
                report.append(Violation("orphan", name, f"element {name!r} is not reachable from {ft.top!r}"))
    basics = [n for n, el in els.items() if el.is_basic]
    if sorted(ft.be_order) != sorted(basics) or len(set(ft.be_order)) != len(ft.be_order):
        report.append(Violation("order", None, "be_order must list every basic event exactly once"))
    return report


# -- semantics -------------------------------------------------------------

def eval_structure(ft: FaultTree, b: StatusVector | Mapping[str, int] | Sequence[int], e: str) -> bool:
    """Structure function: is element ``e`` failed under status vector ``b``?"""
    b = StatusVector.of(ft, b)
    if e not in ft.elements:
        raise KeyError(f"unknown element {e!r}")
    bits = b.as_dict()
    memo: dict[str, bool] = {}

    def phi(name: str) -> bool:
        if name in memo:
            return memo[name]
        el = ft.elements[name]
        if el.is_basic:
            val = bool(bits[name])
        elif el.gate is GateType.OR:
            val = any(phi(c) for c in el.children)
        elif el.gate is GateType.AND:
            val = all(phi(c) for c in el.children)
        else:
            val = sum(phi(c) for c in el.children) >= el.k
        memo[name] = val
        return val

    return phi(e)


def basic_event_order(ft: FaultTree) -> list[str]:
    return list(ft.be_order)


# -- rendering -------------------------------------------------------------

def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(ft: FaultTree, vector: StatusVector | None = None, *, name: str = "fault_tree") -> str:
    """Graphviz rendering; with a vector, failed elements are filled red."""
    failed: set[str] = set()
    if vector is not None:
        failed = {e for e in ft.elements if eval_structure(ft, vector, e)}
    out = [f"digraph {_dot_id(name)} {{", "  rankdir=TB;", "  node [fontname=\"Helvetica\"];"]
    for el in ft.elements.values():
        attrs = []
        if el.is_basic:
            attrs += ["shape=circle", f"label={_dot_id(el.name)}"]
        else:
            attrs += ["shape=box", "label=" + _dot_id(el.name)[:-1] + "\\n" + el.describe() + '"']
        if el.name == ft.top:
            attrs.append("peripheries=2")
        if el.name in failed:
            attrs += ["style=filled", 'fillcolor="#f4a6a6"']
        out.append(f"  {_dot_id(el.name)} [{', '.join(attrs)}];")
    for el in ft.gates:
        for c in el.children:
            out.append(f"  {_dot_id(el.name)} -> {_dot_id(c)};")
    out.append("}")
    return "\n".join(out) + "\n"


def iter_vectors(ft: FaultTree) -> Iterable[StatusVector]:
    """All 2^n status vectors, bit i of the counter driving basic event i."""
    n = len(ft.be_order)
    for x in range(1 << n):
        yield StatusVector.of(ft, x)
