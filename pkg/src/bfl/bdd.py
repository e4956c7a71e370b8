"""Hash-consed reduced ordered BDDs over basic events and their primed copies.

Every basic event ``x`` at position ``i`` of the variable list owns two levels:
``2*i`` for ``x`` and ``2*i + 1`` for its primed copy ``x'``.  Keeping the copy
next to the original makes renaming order preserving and keeps the
"strictly smaller vector" relation between the two copies linear in size.

Nodes are created only through :meth:`BDD._mk`, which refuses redundant nodes
and returns existing ones for repeated triples, so every function has exactly
one node and equivalence is identity.  There are no complement edges.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Iterator, Mapping, Sequence

__all__ = ["BDD", "BddRef", "BddError", "primed", "is_primed", "unprimed"]

_TERMINAL_LEVEL = math.inf


def primed(v: int) -> int:
    return v | 1


def unprimed(v: int) -> int:
    return v & ~1


def is_primed(v: int) -> bool:
    return bool(v & 1)


class BddError(Exception):
    pass


class BddRef:
    """Handle to a node of one manager; equality is node identity."""

    __slots__ = ("bdd", "node")

    def __init__(self, bdd: "BDD", node: int):
        self.bdd = bdd
        self.node = node

    def __eq__(self, other):
        if not isinstance(other, BddRef):
            return NotImplemented
        return self.bdd is other.bdd and self.node == other.node

    def __hash__(self):
        return hash((id(self.bdd), self.node))

    def __repr__(self):
        if self.node <= 1:
            return f"BddRef({self.node})"
        level, _, _ = self.bdd._nodes[self.node]
        return f"BddRef({self.node}: {self.bdd.var_name(level)})"

    def __invert__(self):
        return self.bdd.negate(self)

    def __and__(self, other):
        return self.bdd.apply("and", self, other)

    def __or__(self, other):
        return self.bdd.apply("or", self, other)

    def __xor__(self, other):
        return self.bdd.apply("xor", self, other)

    def implies(self, other):
        return self.bdd.apply("implies", self, other)

    @property
    def is_terminal(self) -> bool:
        return self.node <= 1

    @property
    def level(self) -> float:
        return self.bdd._nodes[self.node][0]

    @property
    def low(self) -> "BddRef":
        return BddRef(self.bdd, self.bdd._nodes[self.node][1])

    @property
    def high(self) -> "BddRef":
        return BddRef(self.bdd, self.bdd._nodes[self.node][2])


_OPS: dict[str, Callable[[int, int], int]] = {
    "and": lambda a, b: a & b,
    "or": lambda a, b: a | b,
    "xor": lambda a, b: a ^ b,
    "implies": lambda a, b: (1 - a) | b,
}


class BDD:
    """A BDD manager with a fixed, interleaved plain/primed variable order.

    Nodes live in ``_nodes`` as ``(level, low, high)`` triples; index 0 is the
    0-terminal and index 1 the 1-terminal.  One operation cache serves
    ``apply``, ``negate``, ``restrict``, ``exists`` and renaming.
    """

    def __init__(self, names: Sequence[str]):
        if len(set(names)) != len(names):
            raise BddError("duplicate variable names")
        self.names = tuple(names)
        self._level = {}
        self._var_names = []
        for i, name in enumerate(self.names):
            self._level[name] = 2 * i
            self._level[name + "'"] = 2 * i + 1
            self._var_names += [name, name + "'"]
        self._nodes: list[tuple[float, int, int]] = [
            (_TERMINAL_LEVEL, 0, 0),
            (_TERMINAL_LEVEL, 1, 1),
        ]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}
        self.false = BddRef(self, 0)
        self.true = BddRef(self, 1)

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self):
        return f"BDD({len(self.names)} vars, {len(self._nodes)} nodes)"

    # -- variables ---------------------------------------------------------

    @property
    def levels(self) -> range:
        return range(2 * len(self.names))

    @property
    def plain_levels(self) -> list[int]:
        return list(range(0, 2 * len(self.names), 2))

    def level_of(self, name: str) -> int:
        try:
            return self._level[name]
        except KeyError:
            raise BddError(f"unregistered variable {name!r}") from None

    def var_name(self, level: int) -> str:
        return self._var_names[level]

    def _check_level(self, v: int) -> int:
        if not isinstance(v, int) or not 0 <= v < len(self._var_names):
            raise BddError(f"unregistered variable {v!r}")
        return v

    # -- node table ----------------------------------------------------------

    def _mk(self, level: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (level, low, high)
        node = self._unique.get(key)
        if node is None:
            node = len(self._nodes)
            self._nodes.append(key)
            self._unique[key] = node
        return node

    def _own(self, u: BddRef) -> int:
        if not isinstance(u, BddRef):
            raise TypeError(f"expected BddRef, got {type(u).__name__}")
        if u.bdd is not self:
            raise BddError("BDD belongs to a different manager")
        return u.node

    def _ref(self, node: int) -> BddRef:
        return BddRef(self, node)

    def node(self, u: BddRef) -> tuple[float, BddRef, BddRef]:
        level, low, high = self._nodes[self._own(u)]
        return level, self._ref(low), self._ref(high)

    def iter_nodes(self) -> Iterator[tuple[int, float, int, int]]:
        """Yield ``(index, level, low, high)`` for every nonterminal in the table."""
        for i, (level, low, high) in enumerate(self._nodes):
            if i > 1:
                yield i, level, low, high

    def cache_size(self) -> int:
        return len(self._cache)

    # -- construction --------------------------------------------------------

    def mk_var(self, v: int | str) -> BddRef:
        if isinstance(v, str):
            v = self.level_of(v)
        return self._ref(self._mk(self._check_level(v), 0, 1))

    def constant(self, value: bool) -> BddRef:
        return self.true if value else self.false

    def apply(self, op: str, a: BddRef, b: BddRef) -> BddRef:
        if op not in _OPS:
            raise BddError(f"unknown operator {op!r}")
        return self._ref(self._apply(op, self._own(a), self._own(b)))

    def _apply(self, op: str, a: int, b: int) -> int:
        if a <= 1 and b <= 1:
            return _OPS[op](a, b)
        if op == "and":
            if a == 0 or b == 0:
                return 0
            if a == 1 or a == b:
                return b
            if b == 1:
                return a
        elif op == "or":
            if a == 1 or b == 1:
                return 1
            if a == 0 or a == b:
                return b
            if b == 0:
                return a
        elif op == "xor":
            if a == b:
                return 0
            if a == 0:
                return b
            if b == 0:
                return a
        elif op == "implies":
            if a == 0 or b == 1 or a == b:
                return 1
            if a == 1:
                return b
        if op in ("and", "or", "xor") and a > b:
            a, b = b, a
        key = (op, a, b)
        res = self._cache.get(key)
        if res is not None:
            return res
        la, a0, a1 = self._nodes[a]
        lb, b0, b1 = self._nodes[b]
        level = min(la, lb)
        if la != level:
            a0 = a1 = a
        if lb != level:
            b0 = b1 = b
        res = self._mk(level, self._apply(op, a0, b0), self._apply(op, a1, b1))
        self._cache[key] = res
        return res

    def negate(self, a: BddRef) -> BddRef:
        return self._ref(self._negate(self._own(a)))

    def _negate(self, a: int) -> int:
        if a <= 1:
            return 1 - a
        key = ("not", a)
        res = self._cache.get(key)
        if res is None:
            level, low, high = self._nodes[a]
            res = self._mk(level, self._negate(low), self._negate(high))
            self._cache[key] = res
        return res

    def ite(self, c: BddRef, t: BddRef, e: BddRef) -> BddRef:
        return (c & t) | (~c & e)

    # -- cofactors and quantification ---------------------------------------

    def restrict(self, a: BddRef, v: int | str, value: bool) -> BddRef:
        if isinstance(v, str):
            v = self.level_of(v)
        return self._ref(self._restrict(self._own(a), self._check_level(v), 1 if value else 0))

    def _restrict(self, a: int, v: int, value: int) -> int:
        level, low, high = self._nodes[a]
        if level > v:
            return a
        if level == v:
            return high if value else low
        key = ("restrict", a, v, value)
        res = self._cache.get(key)
        if res is None:
            res = self._mk(level, self._restrict(low, v, value), self._restrict(high, v, value))
            self._cache[key] = res
        return res

    def exists(self, a: BddRef, vs: Iterable[int | str]) -> BddRef:
        levels = frozenset(self._check_level(self.level_of(v) if isinstance(v, str) else v) for v in vs)
        if not levels:
            return a
        return self._ref(self._exists(self._own(a), levels, max(levels)))

    def _exists(self, a: int, vs: frozenset[int], last: int) -> int:
        level, low, high = self._nodes[a]
        if level > last:
            return a
        key = ("exists", a, vs)
        res = self._cache.get(key)
        if res is not None:
            return res
        r0 = self._exists(low, vs, last)
        if level in vs:
            res = 1 if r0 == 1 else self._apply("or", r0, self._exists(high, vs, last))
        else:
            res = self._mk(level, r0, self._exists(high, vs, last))
        self._cache[key] = res
        return res

    def forall(self, a: BddRef, vs: Iterable[int | str]) -> BddRef:
        return ~self.exists(~a, vs)

    def rename_to_primed(self, a: BddRef, vs: Iterable[int | str]) -> BddRef:
        """Replace every plain variable in ``vs`` by its primed copy."""
        levels = frozenset(self.level_of(v) if isinstance(v, str) else v for v in vs)
        for v in levels:
            self._check_level(v)
            if is_primed(v):
                raise BddError(f"{self.var_name(v)} is already primed")
        node = self._own(a)
        bad = [v for v in self._support(node) if is_primed(v)]
        if bad:
            raise BddError(f"support contains primed variable {self.var_name(bad[0])}")
        return self._ref(self._rename(node, levels))

    def _rename(self, a: int, vs: frozenset[int]) -> int:
        if a <= 1:
            return a
        key = ("rename", a, vs)
        res = self._cache.get(key)
        if res is None:
            level, low, high = self._nodes[a]
            new_level = primed(level) if level in vs else level
            res = self._mk(new_level, self._rename(low, vs), self._rename(high, vs))
            self._cache[key] = res
        return res

    # -- inspection ----------------------------------------------------------

    def support(self, a: BddRef) -> set[int]:
        return self._support(self._own(a))

    def _support(self, a: int) -> set[int]:
        seen = set()
        levels = set()
        todo = [a]
        while todo:
            u = todo.pop()
            if u <= 1 or u in seen:
                continue
            seen.add(u)
            level, low, high = self._nodes[u]
            levels.add(level)
            todo += (low, high)
        return levels

    def support_names(self, a: BddRef) -> list[str]:
        return [self.var_name(v) for v in sorted(self.support(a))]

    def is_constant(self, a: BddRef) -> bool | None:
        node = self._own(a)
        return None if node > 1 else bool(node)

    def evaluate(self, a: BddRef, values: Mapping[int, bool] | Callable[[int], bool]) -> bool:
        """Follow low/high edges according to ``values`` (keyed by level)."""
        get = values if callable(values) else values.__getitem__
        node = self._own(a)
        while node > 1:
            level, low, high = self._nodes[node]
            node = high if get(level) else low
        return bool(node)

    def all_sat_cubes(self, a: BddRef) -> list[dict[int, int]]:
        """One partial assignment per path to the 1-terminal, low branches first."""
        cubes: list[dict[int, int]] = []
        path: list[tuple[int, int]] = []

        def walk(u: int):
            if u == 0:
                return
            if u == 1:
                cubes.append(dict(path))
                return
            level, low, high = self._nodes[u]
            path.append((level, 0))
            walk(low)
            path[-1] = (level, 1)
            walk(high)
            path.pop()

        walk(self._own(a))
        return cubes

    def count(self, a: BddRef, levels: Iterable[int]) -> int:
        """Number of satisfying assignments over ``levels`` (must cover the support)."""
        levels = sorted(levels)
        node = self._own(a)
        if not self._support(node) <= set(levels):
            raise BddError("support exceeds the counted variables")
        pos = {v: i for i, v in enumerate(levels)}
        n = len(levels)
        memo: dict[int, int] = {}

        def depth(u):
            return n if u <= 1 else pos[self._nodes[u][0]]

        def go(u):
            if u <= 1:
                return u
            if u not in memo:
                level, low, high = self._nodes[u]
                d = pos[level]
                memo[u] = (go(low) << (depth(low) - d - 1)) + (go(high) << (depth(high) - d - 1))
            return memo[u]

        return go(node) << depth(node)

    def to_dot(self, roots: BddRef | Sequence[BddRef], *, name: str = "bdd") -> str:
        """Graphviz text: dashed edges go to the low child, solid to the high child."""
        if isinstance(roots, BddRef):
            roots = [roots]
        start = [self._own(r) for r in roots]
        seen: set[int] = set()
        order: list[int] = []
        todo = list(reversed(start))
        while todo:
            u = todo.pop()
            if u in seen:
                continue
            seen.add(u)
            order.append(u)
            if u > 1:
                _, low, high = self._nodes[u]
                todo += (high, low)
        lines = [f'digraph "{name}" {{']
        for u in sorted(order):
            if u <= 1:
                lines.append(f'  n{u} [shape=box, label="{u}"];')
            else:
                level = self._nodes[u][0]
                lines.append(f'  n{u} [shape=circle, label="{self.var_name(level)}"];')
        for u in sorted(order):
            if u > 1:
                _, low, high = self._nodes[u]
                lines.append(f"  n{u} -> n{low} [style=dashed];")
                lines.append(f"  n{u} -> n{high};")
        lines.append("}")
        return "\n".join(lines) + "\n"
