"""Translation of fault tree elements and BFL formulas into BDDs.

Minimal cut sets are computed symbolically.  For a predicate ``B`` over plain
variables ``V`` the vectors that are minimal in ones are::

    B(V) & ~exists V'. (V' strictly below V) & B(V')

where ``V'`` are the primed copies and "strictly below" is
``AND_k (v'_k => v_k) & OR_k (v'_k != v_k)``.  Minimal path sets use the
mirrored relation on the complement of ``B``: a vector qualifies when it does
not satisfy ``B`` and every vector with strictly more failed events does.

Which variables take part in the comparison is the scope mode:
``SUPPORT`` uses the operand's own influencing basic events, ``GLOBAL`` uses
every basic event of the tree.
"""
from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass
from functools import reduce
from typing import Iterable

from .bdd import BDD, BddRef, is_primed, primed
from .fault_tree import FaultTree, GateType
from .formula import (
    IDP,
    MCS,
    MPS,
    And,
    Atom,
    Const,
    Evidence,
    Exists,
    Forall,
    Formula,
    FormulaError,
    Layer,
    Not,
    desugar,
    is_core,
    layer_of,
    parse_formula,
)

__all__ = ["ScopeMode", "VectorPredicate", "TreeVerdict", "Compiler", "CompileError"]


class ScopeMode(enum.Enum):
    SUPPORT = "support"
    GLOBAL = "global"


class CompileError(FormulaError):
    pass


@dataclass(frozen=True)
class VectorPredicate:
    """A first-layer result: the set of satisfying status vectors."""

    bdd: BddRef


@dataclass(frozen=True)
class TreeVerdict:
    """A second-layer result: holds or not, independent of any vector."""

    value: bool


class Compiler:
    """A compilation session: one BDD manager plus caches for elements and formulas."""

    def __init__(self, ft: FaultTree, mode: ScopeMode | str = ScopeMode.SUPPORT):
        self.ft = ft
        self.mode = ScopeMode(mode)
        self.bdd = BDD(ft.be_order)
        self._elements: dict[str, BddRef] = {}
        self._formulas: dict[Formula, BddRef] = {}
        self._relations: dict[tuple, BddRef] = {}
        self.stats: Counter[str] = Counter()

    # -- variables -----------------------------------------------------------

    def var(self, name: str) -> int:
        """Plain BDD level of a basic event."""
        return 2 * self.ft.index(name)

    def names_of(self, levels: Iterable[int]) -> list[str]:
        order = self.ft.be_order
        return [order[v // 2] for v in sorted(levels) if not is_primed(v)]

    @property
    def all_vars(self) -> list[int]:
        return self.bdd.plain_levels

    # -- elements ------------------------------------------------------------

    def element(self, name: str) -> BddRef:
        """BDD of the structure function of one element, cached per element."""
        hit = self._elements.get(name)
        if hit is not None:
            return hit
        el = self.ft[name]
        self.stats["element"] += 1
        if el.is_basic:
            res = self.bdd.mk_var(self.var(name))
        else:
            kids = [self.element(c) for c in el.children]
            if el.gate is GateType.AND:
                res = reduce(lambda a, b: a & b, kids)
            elif el.gate is GateType.OR:
                res = reduce(lambda a, b: a | b, kids)
            else:
                res = self.threshold(el.k, kids)
        self._elements[name] = res
        return res

    def threshold(self, k: int, kids: list[BddRef]) -> BddRef:
        """At least ``k`` of ``kids`` hold, splitting on one child at a time."""
        memo: dict[tuple[int, int], BddRef] = {}

        def at_least(k: int, i: int) -> BddRef:
            if k <= 0:
                return self.bdd.true
            if len(kids) - i < k:
                return self.bdd.false
            if (k, i) not in memo:
                memo[k, i] = self.bdd.ite(kids[i], at_least(k - 1, i + 1), at_least(k, i + 1))
            return memo[k, i]

        return at_least(k, 0)

    def vot_by_subsets(self, name: str) -> BddRef:
        """Voting gate as the disjunction, over all k-subsets of its children,
        of their conjunction.  Exponential; kept as a cross-check of :meth:`threshold`."""
        el = self.ft[name]
        if el.gate is not GateType.VOT:
            raise CompileError(f"{name!r} is not a voting gate")
        kids = [self.element(c) for c in el.children]
        res = self.bdd.false
        for chosen in itertools.combinations(range(len(kids)), el.k):
            res = res | reduce(lambda a, b: a & b, (kids[i] for i in chosen))
        return res

    # -- formulas ------------------------------------------------------------

    def _prepare(self, f: Formula | str) -> Formula:
        if isinstance(f, str):
            f = parse_formula(f, self.ft)
        if not is_core(f):
            f = desugar(f, self.ft)
        return f

    def compile(self, f: Formula | str) -> VectorPredicate | TreeVerdict:
        f = self._prepare(f)
        if isinstance(f, Exists):
            b = self.predicate(f.arg)
            return TreeVerdict(self.bdd.is_constant(self.bdd.exists(b, self.all_vars)) is not False)
        if isinstance(f, Forall):
            b = self.predicate(f.arg)
            return TreeVerdict(self.bdd.is_constant(~self.bdd.exists(~b, self.all_vars)) is True)
        if isinstance(f, IDP):
            return TreeVerdict(self.independent(f.left, f.right))
        return VectorPredicate(self.predicate(f))

    def predicate(self, f: Formula | str) -> BddRef:
        """BDD of a first-layer formula over the plain variables."""
        f = self._prepare(f)
        if layer_of(f) is not Layer.VECTOR:
            raise CompileError(f"{type(f).__name__} is a second-layer formula and has no vector predicate")
        return self._predicate(f)

    def _predicate(self, f: Formula) -> BddRef:
        hit = self._formulas.get(f)
        if hit is not None:
            return hit
        self.stats["formula"] += 1
        bdd = self.bdd
        if isinstance(f, Atom):
            res = self.element(f.name)
        elif isinstance(f, Const):
            res = bdd.constant(f.value)
        elif isinstance(f, Not):
            res = ~self._predicate(f.arg)
        elif isinstance(f, And):
            res = self._predicate(f.left) & self._predicate(f.right)
        elif isinstance(f, Evidence):
            (name, value), = f.assignments
            if not self.ft.is_basic(name):
                raise CompileError(f"evidence target {name!r} is not a basic event")
            res = bdd.restrict(self._predicate(f.arg), self.var(name), value)
        elif isinstance(f, MCS):
            b = self._predicate(f.arg)
            res = self.minimize_cuts(b, self.scope(b))
        elif isinstance(f, MPS):
            b = self._predicate(f.arg)
            res = self.maximize_paths(b, self.scope(b))
        else:
            raise CompileError(f"{type(f).__name__} cannot appear inside a first-layer formula")
        self._formulas[f] = res
        return res

    def scope(self, b: BddRef) -> list[int]:
        """Variables over which minimality of ``b``'s satisfying vectors is judged."""
        if self.mode is ScopeMode.GLOBAL:
            return self.all_vars
        return sorted(self.bdd.support(b))

    def _relation(self, vars: tuple[int, ...], direction: str) -> BddRef:
        key = (direction, vars)
        hit = self._relations.get(key)
        if hit is not None:
            return hit
        bdd = self.bdd
        ordered = bdd.true
        differs = bdd.false
        for v in reversed(vars):
            x, xp = bdd.mk_var(v), bdd.mk_var(primed(v))
            step = xp.implies(x) if direction == "below" else x.implies(xp)
            ordered = step & ordered
            differs = (x ^ xp) | differs
        rel = ordered & differs
        self._relations[key] = rel
        return rel

    def _check_vars(self, b: BddRef, vars: Iterable[int]) -> tuple[int, ...]:
        vars = tuple(sorted(set(vars)))
        if any(is_primed(v) for v in vars):
            raise CompileError("minimality scope must contain plain variables only")
        extra = self.bdd.support(b) - set(vars)
        if extra:
            raise CompileError(f"support exceeds scope: {', '.join(self.bdd.var_name(v) for v in sorted(extra))}")
        return vars

    def minimize_cuts(self, b: BddRef, vars: Iterable[int]) -> BddRef:
        """Satisfying vectors of ``b`` with no satisfying vector strictly below them on ``vars``."""
        vars = self._check_vars(b, vars)
        if not vars:
            return b
        bdd = self.bdd
        below = self._relation(vars, "below")
        shifted = bdd.rename_to_primed(b, vars)
        smaller = bdd.exists(below & shifted, [primed(v) for v in vars])
        return b & ~smaller

    def maximize_paths(self, b: BddRef, vars: Iterable[int]) -> BddRef:
        """Vectors violating ``b`` such that every vector strictly above them on ``vars`` satisfies it."""
        vars = self._check_vars(b, vars)
        bdd = self.bdd
        nb = ~b
        if not vars:
            return nb
        above = self._relation(vars, "above")
        shifted = bdd.rename_to_primed(nb, vars)
        larger = bdd.exists(above & shifted, [primed(v) for v in vars])
        return nb & ~larger

    # -- influence -----------------------------------------------------------

    def influencing_basic_events(self, f: Formula | str) -> list[str]:
        """Basic events that can change the truth value of a first-layer formula,
        in basic event order."""
        b = self.predicate(f)
        return self.names_of(self.bdd.support(b))

    def independent(self, f1: Formula | str, f2: Formula | str) -> bool:
        s1 = set(self.influencing_basic_events(f1))
        s2 = set(self.influencing_basic_events(f2))
        return not (s1 & s2)
