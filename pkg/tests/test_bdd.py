import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bfl.bdd import BDD, BddError, primed
from strategies import build_expr, eval_expr, random_expr, rewrite


@pytest.fixture
def bdd():
    return BDD(["b1", "b2", "x"])


@pytest.fixture
def or_bdd(bdd):
    return bdd.apply("or", bdd.mk_var("b1"), bdd.mk_var("b2"))


def table(bdd, u, levels):
    return [bdd.evaluate(u, dict(zip(levels, bits))) for bits in itertools.product((0, 1), repeat=len(levels))]


def reachable(bdd, u):
    seen, todo = set(), [u]
    while todo:
        w = todo.pop()
        if not w.is_terminal and w not in seen:
            seen.add(w)
            todo += [w.low, w.high]
    return len(seen)


def test_hash_consing(bdd):
    assert bdd.mk_var("x") == bdd.mk_var("x")
    assert bdd.mk_var("x").node == bdd.mk_var(4).node


def test_var_evaluates(bdd):
    x = bdd.mk_var("x")
    assert bdd.evaluate(x, {4: 1}) is True
    assert bdd.evaluate(x, {4: 0}) is False


def test_or_shape(bdd, or_bdd):
    level, low, high = bdd.node(or_bdd)
    assert level == bdd.level_of("b1")
    assert high == bdd.true
    assert low == bdd.mk_var("b2")
    assert reachable(bdd, or_bdd) == 2


def test_identity_and_cancellation(bdd, or_bdd):
    assert bdd.apply("and", or_bdd, bdd.true) == or_bdd
    assert bdd.apply("xor", or_bdd, or_bdd) == bdd.false
    assert bdd.apply("or", bdd.mk_var("x"), ~bdd.mk_var("x")) == bdd.true


def test_negate(bdd, or_bdd):
    assert bdd.negate(bdd.false) == bdd.true
    assert not bdd.evaluate(~bdd.mk_var("x"), {4: 1})
    assert table(bdd, ~or_bdd, [0, 2]) == [True, False, False, False]


def test_restrict(bdd, or_bdd):
    assert bdd.restrict(or_bdd, "b1", 1) == bdd.true
    assert bdd.restrict(or_bdd, "x", 0) == or_bdd
    assert bdd.restrict(bdd.mk_var("x"), "x", 0) == bdd.false


def test_exists(bdd, or_bdd):
    assert bdd.exists(or_bdd, ["b1", "b2"]) == bdd.true
    assert bdd.exists(bdd.false, [0, 2, 4]) == bdd.false
    assert bdd.exists(or_bdd, []) == or_bdd
    assert bdd.exists(or_bdd, ["b1"]) == bdd.exists(or_bdd, [0])
    assert bdd.forall(or_bdd, ["b1"]) == bdd.mk_var("b2")


def test_rename(bdd, or_bdd):
    assert bdd.rename_to_primed(bdd.mk_var("x"), [4]) == bdd.mk_var("x'")
    assert bdd.rename_to_primed(bdd.true, [0, 2]) == bdd.true
    shifted = bdd.rename_to_primed(or_bdd, [0, 2])
    assert bdd.support(shifted) == {1, 3}
    assert bdd.restrict(shifted, "b1'", 1) == bdd.true


def test_rename_rejects_primed(bdd):
    with pytest.raises(BddError):
        bdd.rename_to_primed(bdd.mk_var("x'"), [4])
    with pytest.raises(BddError):
        bdd.rename_to_primed(bdd.mk_var("x"), [5])


def test_support(bdd, or_bdd):
    assert bdd.support(bdd.true) == set()
    assert bdd.support_names(or_bdd) == ["b1", "b2"]
    x = bdd.mk_var("x")
    assert bdd.support(x & ~x) == set()


def test_all_sat_cubes(bdd, or_bdd):
    assert bdd.all_sat_cubes(or_bdd) == [{0: 0, 2: 1}, {0: 1}]
    assert bdd.all_sat_cubes(bdd.false) == []
    assert bdd.all_sat_cubes(bdd.true) == [{}]


def test_is_constant(bdd, or_bdd):
    x = bdd.mk_var("x")
    assert bdd.is_constant(x | ~x) is True
    assert bdd.is_constant(x) is None
    assert bdd.is_constant(bdd.exists(or_bdd, bdd.support(or_bdd))) is True


def test_count(bdd, or_bdd):
    assert bdd.count(or_bdd, [0, 2]) == 3
    assert bdd.count(or_bdd, [0, 2, 4]) == 6


def test_mixing_managers_fails(bdd):
    other = BDD(["b1"])
    with pytest.raises(BddError):
        bdd.apply("and", bdd.mk_var("b1"), other.mk_var("b1"))


def test_unknown_variable(bdd):
    with pytest.raises(BddError):
        bdd.mk_var("zz")
    with pytest.raises(BddError):
        bdd.mk_var(6)


def test_primed_helpers():
    assert primed(4) == 5 and primed(5) == 5


def test_to_dot(bdd, or_bdd):
    text = bdd.to_dot(or_bdd)
    assert text.startswith("digraph") and "dashed" in text
    assert text == bdd.to_dot(or_bdd)


def assert_reduced_and_ordered(bdd):
    seen = set()
    for _, level, low, high in bdd.iter_nodes():
        assert low != high
        assert (level, low, high) not in seen
        seen.add((level, low, high))
        for child in (low, high):
            assert bdd._nodes[child][0] > level


def picker(data):
    return lambda n: data.draw(st.integers(0, n - 1))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.data())
def test_canonicity(n, data):
    pick = picker(data)
    bdd = BDD([f"v{i}" for i in range(n)])
    f = random_expr(pick, n)
    g = rewrite(pick, f) if data.draw(st.booleans()) else random_expr(pick, n)
    rows = list(itertools.product((0, 1), repeat=n))
    same = all(eval_expr(f, r) == eval_expr(g, r) for r in rows)
    assert (build_expr(bdd, f) == build_expr(bdd, g)) == same
    assert_reduced_and_ordered(bdd)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.data())
def test_evaluation_agrees(n, data):
    pick = picker(data)
    bdd = BDD([f"v{i}" for i in range(n)])
    f = random_expr(pick, n, depth=6)
    u = build_expr(bdd, f)
    rows = itertools.product((0, 1), repeat=n) if n <= 6 else (
        tuple(data.draw(st.integers(0, 1)) for _ in range(n)) for _ in range(64))
    for r in rows:
        assert bdd.evaluate(u, {2 * i: b for i, b in enumerate(r)}) == eval_expr(f, r)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.data())
def test_quantifiers_and_cubes(n, data):
    pick = picker(data)
    bdd = BDD([f"v{i}" for i in range(n)])
    f = random_expr(pick, n)
    u = build_expr(bdd, f)
    v = data.draw(st.integers(0, n - 1))
    ex = bdd.exists(u, [2 * v])
    assert ex == bdd.restrict(u, 2 * v, 0) | bdd.restrict(u, 2 * v, 1)
    assert bdd.forall(u, [2 * v]) == bdd.restrict(u, 2 * v, 0) & bdd.restrict(u, 2 * v, 1)
    # cubes are disjoint and cover exactly the satisfying rows
    cubes = bdd.all_sat_cubes(u)
    for r in itertools.product((0, 1), repeat=n):
        hits = sum(all(r[lv // 2] == bit for lv, bit in c.items()) for c in cubes)
        assert hits == int(eval_expr(f, r))
    assert bdd.count(u, [2 * i for i in range(n)]) == sum(eval_expr(f, r) for r in itertools.product((0, 1), repeat=n))
    assert_reduced_and_ordered(bdd)
