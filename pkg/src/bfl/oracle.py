"""Exhaustive reference semantics for testing.

Every first-layer formula is evaluated to a truth table over all ``2**n``
status vectors (index bit ``i`` is basic event ``i``).  Elements come from
the structure function, minimality is checked by scanning every candidate
smaller (or larger) vector, and influence by flipping each basic event.  No
BDDs are involved.
"""
from __future__ import annotations

import numpy as np

from .fault_tree import FaultTree, StatusVector, eval_structure
from .formula import (
    IDP,
    MCS,
    MPS,
    SUP,
    And,
    Atom,
    Const,
    Evidence,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Neq,
    Not,
    Or,
    Vot,
    parse_formula,
)

__all__ = ["Oracle", "oracle_evaluate", "OracleTooLarge"]

MAX_EVENTS = 16


class OracleTooLarge(ValueError):
    pass


class Oracle:
    def __init__(self, ft: FaultTree, mode: str = "support"):
        n = len(ft.be_order)
        if n > MAX_EVENTS:
            raise OracleTooLarge(f"{n} basic events; exhaustive evaluation is limited to {MAX_EVENTS}")
        self.ft = ft
        self.mode = getattr(mode, "value", mode)
        if self.mode not in ("support", "global"):
            raise ValueError(f"unknown scope mode {mode!r}")
        self.n = n
        self.size = 1 << n
        self.idx = np.arange(self.size, dtype=np.int64)
        self._elements: dict[str, np.ndarray] = {}
        self._tables: dict[Formula, np.ndarray] = {}

    def element(self, name: str) -> np.ndarray:
        if name not in self._elements:
            self._elements[name] = np.array(
                [eval_structure(self.ft, StatusVector.of(self.ft, x), name) for x in range(self.size)],
                dtype=bool,
            )
        return self._elements[name]

    def influencing(self, table: np.ndarray) -> list[str]:
        out = []
        for i, name in enumerate(self.ft.be_order):
            bit = 1 << i
            if np.any(table[self.idx & ~bit] != table[self.idx | bit]):
                out.append(name)
        return out

    def _scope_mask(self, table: np.ndarray) -> int:
        if self.mode == "global":
            return self.size - 1
        return sum(1 << self.ft.index(n) for n in self.influencing(table))

    def _minimal(self, table: np.ndarray, scope: int) -> np.ndarray:
        idx = self.idx
        out = np.zeros(self.size, dtype=bool)
        for x in np.flatnonzero(table):
            smaller = ((idx & ~x) == 0) & (idx != x) & (((idx ^ x) & ~scope) == 0)
            out[x] = not np.any(table[smaller])
        return out

    def _maximal(self, table: np.ndarray, scope: int) -> np.ndarray:
        idx = self.idx
        out = np.zeros(self.size, dtype=bool)
        for x in np.flatnonzero(table):
            larger = ((x & ~idx) == 0) & (idx != x) & (((idx ^ x) & ~scope) == 0)
            out[x] = not np.any(table[larger])
        return out

    def table(self, f: Formula) -> np.ndarray:
        """Truth table of a first-layer formula (sugar allowed)."""
        hit = self._tables.get(f)
        if hit is not None:
            return hit
        t = self.table
        if isinstance(f, Atom):
            res = self.element(f.name)
        elif isinstance(f, Const):
            res = np.full(self.size, bool(f.value))
        elif isinstance(f, Not):
            res = ~t(f.arg)
        elif isinstance(f, And):
            res = t(f.left) & t(f.right)
        elif isinstance(f, Or):
            res = t(f.left) | t(f.right)
        elif isinstance(f, Implies):
            res = ~t(f.left) | t(f.right)
        elif isinstance(f, Iff):
            res = t(f.left) == t(f.right)
        elif isinstance(f, Neq):
            res = t(f.left) != t(f.right)
        elif isinstance(f, Evidence):
            x = self.idx.copy()
            listed = set()
            for name, value in f.assignments:
                listed.add(name)
                bit = 1 << self.ft.index(name)
                x = (x | bit) if value else (x & ~bit)
            if f.others is not None:
                for name in self.ft.be_order:
                    if name not in listed:
                        bit = 1 << self.ft.index(name)
                        x = (x | bit) if f.others else (x & ~bit)
            res = t(f.arg)[x]
        elif isinstance(f, MCS):
            inner = t(f.arg)
            res = self._minimal(inner, self._scope_mask(inner))
        elif isinstance(f, MPS):
            inner = t(f.arg)
            res = self._maximal(~inner, self._scope_mask(inner))
        elif isinstance(f, Vot):
            count = sum(t(a).astype(np.int64) for a in f.args)
            res = {
                "<": count < f.k,
                "<=": count <= f.k,
                "=": count == f.k,
                ">=": count >= f.k,
                ">": count > f.k,
            }[f.cmp]
        else:
            raise TypeError(f"{type(f).__name__} is not a first-layer formula")
        self._tables[f] = res
        return res

    def holds(self, f: Formula) -> bool:
        """Truth of a second-layer formula."""
        if isinstance(f, Exists):
            return bool(np.any(self.table(f.arg)))
        if isinstance(f, Forall):
            return bool(np.all(self.table(f.arg)))
        if isinstance(f, IDP):
            return not (set(self.influencing(self.table(f.left))) & set(self.influencing(self.table(f.right))))
        if isinstance(f, SUP):
            return self.holds(IDP(Atom(f.name), Atom(self.ft.top)))
        raise TypeError(f"{type(f).__name__} is not a second-layer formula")

    def evaluate(self, b: StatusVector | None, f: Formula) -> bool:
        if isinstance(f, (Exists, Forall, IDP, SUP)):
            return self.holds(f)
        if b is None:
            raise ValueError("a status vector is required for first-layer formulas")
        return bool(self.table(f)[StatusVector.of(self.ft, b).as_int()])


def oracle_evaluate(ft: FaultTree, b, chi: Formula | str, mode: str = "support") -> bool:
    """Brute-force truth of ``chi`` under vector ``b`` (ignored for second-layer formulas)."""
    if isinstance(chi, str):
        chi = parse_formula(chi, ft)
    return Oracle(ft, mode).evaluate(b, chi)
