"""Model checking queries on a fault tree.

* :meth:`Analyzer.evaluate` decides ``b, T |= chi`` by walking the formula's BDD.
* :meth:`Analyzer.enumerate` lists all satisfying vectors as cubes.
* :meth:`Analyzer.counterexample` revises a violating vector with a greedy
  BDD descent; every flipped bit is individually necessary.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .bdd import is_primed
from .compiler import Compiler, ScopeMode, TreeVerdict
from .fault_tree import FaultTree, StatusVector, eval_structure
from .formula import (
    MCS,
    MPS,
    And,
    Atom,
    Const,
    Evidence,
    Formula,
    Layer,
    Not,
    contains_minimality,
    desugar,
    layer_of,
    parse_formula,
)
from .oracle import oracle_evaluate

__all__ = [
    "Analyzer",
    "Verdict",
    "Counterexample",
    "ResultSet",
    "AnalysisError",
    "evaluate",
    "enumerate_satisfying",
    "counterexample",
    "oracle_evaluate",
    "substitute",
]

DEFAULT_EXPAND_LIMIT = 4096


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    holds: bool
    formula_layer: Layer
    mode: ScopeMode

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class Counterexample:
    revised: StatusVector
    flipped: tuple[str, ...]


@dataclass
class ResultSet:
    """Satisfying vectors of a formula, one disjoint cube per BDD path.

    ``polarity`` says how a cube is reported: ``"failed"`` lists the basic
    events set to 1 (cut-set style), ``"operational"`` those set to 0
    (path-set style).  Events absent from a cube are don't-cares.
    """

    names: tuple[str, ...]
    cubes: list[dict[str, int]]
    polarity: str = "failed"
    scope: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def failed(self, cube: dict[str, int]) -> list[str]:
        return [n for n in self.names if cube.get(n) == 1]

    def operational(self, cube: dict[str, int]) -> list[str]:
        return [n for n in self.names if cube.get(n) == 0]

    def dont_care(self, cube: dict[str, int]) -> list[str]:
        return [n for n in self.names if n not in cube]

    def reported(self, cube: dict[str, int]) -> list[str]:
        return self.operational(cube) if self.polarity == "operational" else self.failed(cube)

    def sets(self) -> list[frozenset[str]]:
        return [frozenset(self.reported(c)) for c in self.cubes]

    def vector_count(self) -> int:
        return sum(1 << len(self.dont_care(c)) for c in self.cubes)

    def expand(self, limit: int = DEFAULT_EXPAND_LIMIT) -> Iterator[StatusVector]:
        """Multiply out don't-cares into total vectors."""
        total = self.vector_count()
        if total > limit:
            raise AnalysisError(f"{total} vectors exceed the expansion limit of {limit}")
        for cube in self.cubes:
            free = self.dont_care(cube)
            for bits in itertools.product((0, 1), repeat=len(free)):
                full = dict(cube)
                full.update(zip(free, bits))
                yield StatusVector(self.names, tuple(full[n] for n in self.names))

    def to_json(self) -> list[dict]:
        return [
            {
                "set": self.reported(c),
                "failed": self.failed(c),
                "operational": self.operational(c),
                "dont_care": self.dont_care(c),
                "cube": {n: c[n] for n in self.names if n in c},
            }
            for c in self.cubes
        ]


def _polarity(f: Formula) -> str:
    """Report path-set style when the formula's conjunctive spine only uses MPS."""
    kinds = set()
    todo = [f]
    while todo:
        g = todo.pop()
        if isinstance(g, And):
            todo += [g.left, g.right]
        elif isinstance(g, Evidence):
            todo.append(g.arg)
        elif isinstance(g, (MCS, MPS)):
            kinds.add(type(g))
    return "operational" if kinds == {MPS} else "failed"


def substitute(ft: FaultTree, b: StatusVector, f: Formula) -> bool:
    """Direct evaluation of a core formula without minimality operators."""
    memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def go(f: Formula, b: StatusVector) -> bool:
        key = (id(f), b.bits)
        if key in memo:
            return memo[key]
        if isinstance(f, Atom):
            res = eval_structure(ft, b, f.name)
        elif isinstance(f, Const):
            res = f.value
        elif isinstance(f, Not):
            res = not go(f.arg, b)
        elif isinstance(f, And):
            res = go(f.left, b) and go(f.right, b)
        elif isinstance(f, Evidence):
            for name, value in f.assignments:
                b = b.with_bit(name, value)
            res = go(f.arg, b)
        else:
            raise AnalysisError(f"cannot substitute into {type(f).__name__}")
        memo[key] = res
        return res

    return go(f, b)


class Analyzer:
    """Analysis session over one tree; owns a compiler and its caches."""

    def __init__(self, ft: FaultTree, mode: ScopeMode | str = ScopeMode.SUPPORT):
        self.ft = ft
        self.compiler = Compiler(ft, mode)

    @property
    def mode(self) -> ScopeMode:
        return self.compiler.mode

    @property
    def bdd(self):
        return self.compiler.bdd

    def parse(self, chi: Formula | str) -> Formula:
        return parse_formula(chi, self.ft) if isinstance(chi, str) else chi

    def vector(self, b) -> StatusVector:
        try:
            return StatusVector.of(self.ft, b)
        except ValueError as exc:
            raise AnalysisError(str(exc)) from None

    def predicate(self, chi: Formula | str):
        chi = self.parse(chi)
        if layer_of(chi) is Layer.TREE:
            raise AnalysisError("second-layer formulas have no satisfying vectors; use evaluate")
        return self.compiler.predicate(chi)

    def _walk(self, root, b: StatusVector) -> bool:
        bits = b.bits
        return self.bdd.evaluate(root, lambda level: bits[level >> 1])

    def evaluate(self, chi: Formula | str, b=None, *, fast_path: bool = True) -> Verdict:
        chi = self.parse(chi)
        layer = layer_of(chi)
        if layer is Layer.TREE:
            res = self.compiler.compile(chi)
            assert isinstance(res, TreeVerdict)
            return Verdict(res.value, layer, self.mode)
        if b is None:
            raise AnalysisError("a status vector is required for first-layer formulas")
        b = self.vector(b)
        if fast_path and not contains_minimality(chi):
            return Verdict(substitute(self.ft, b, desugar(chi, self.ft)), layer, self.mode)
        return Verdict(self._walk(self.predicate(chi), b), layer, self.mode)

    def enumerate(self, chi: Formula | str) -> ResultSet:
        chi = self.parse(chi)
        root = self.predicate(chi)
        bdd = self.bdd
        order = self.ft.be_order
        cubes = []
        for cube in bdd.all_sat_cubes(root):
            assert not any(is_primed(v) for v in cube)
            cubes.append({order[v >> 1]: bit for v, bit in cube.items()})
        scope = tuple(self.compiler.names_of(bdd.support(root)))
        return ResultSet(order, cubes, _polarity(chi), scope)

    def counterexample(self, chi: Formula | str, b) -> Counterexample | None:
        """Greedy revision of ``b``; None when ``chi`` is unsatisfiable."""
        chi = self.parse(chi)
        root = self.predicate(chi)
        b = self.vector(b)
        if self._walk(root, b):
            raise AnalysisError("the vector already satisfies the formula")
        if root == self.bdd.false:
            return None
        bits = list(b.bits)
        flipped = []
        node = root
        while not node.is_terminal:
            i = int(node.level) >> 1
            nxt = node.high if bits[i] else node.low
            if nxt == self.bdd.false:
                bits[i] = 1 - bits[i]
                flipped.append(self.ft.be_order[i])
                nxt = node.high if bits[i] else node.low
            node = nxt
        revised = StatusVector(b.names, tuple(bits))
        return Counterexample(revised, tuple(flipped))

    def influencing_basic_events(self, chi: Formula | str) -> list[str]:
        return self.compiler.influencing_basic_events(self.parse(chi))

    def independent(self, a: Formula | str, b: Formula | str) -> bool:
        return self.compiler.independent(self.parse(a), self.parse(b))


def evaluate(ft: FaultTree, b, chi: Formula | str, mode: ScopeMode | str = ScopeMode.SUPPORT) -> Verdict:
    return Analyzer(ft, mode).evaluate(chi, b)


def enumerate_satisfying(ft: FaultTree, chi: Formula | str, mode: ScopeMode | str = ScopeMode.SUPPORT) -> ResultSet:
    return Analyzer(ft, mode).enumerate(chi)


def counterexample(ft: FaultTree, b, chi: Formula | str, mode: ScopeMode | str = ScopeMode.SUPPORT):
    return Analyzer(ft, mode).counterexample(chi, b)

