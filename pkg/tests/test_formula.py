import pytest
from hypothesis import given, settings

from bfl.compiler import Compiler
from bfl.fault_tree import iter_vectors, parse_fault_tree
from bfl.formula import (
    IDP, MCS, MPS, And, Atom, Const, Evidence, Exists, Forall, FormulaError, FormulaSyntaxError,
    Iff, Implies, Layer, Not, Or, Vot, desugar, format_formula, is_core, layer_of, parse_formula,
    vot_subset_expansion, vot_threshold,
)
from bfl.oracle import Oracle
from strategies import trees_and_formulas

A, B, C = Atom("a"), Atom("b"), Atom("c")
ABC = parse_fault_tree("toplevel t; t = or(a, b, c);")


def p(text, ft=ABC):
    return parse_formula(text, ft)


def test_forall_example(reservoir):
    assert parse_formula("forall (CP => CP_R)", reservoir) == Forall(Implies(Atom("CP"), Atom("CP_R")))


def test_single_atom():
    ft = parse_fault_tree("toplevel t; t = or(x, x);")
    assert parse_formula("x", ft) == Atom("x")


def test_evidence_with_others(covid):
    f = parse_formula("MPS(IWoS)[H1:=0, H2:=0, H3:=0, H4:=0, H5:=0, others:=1]", covid)
    assert isinstance(f, Evidence)
    assert f.arg == MPS(Atom("IWoS"))
    assert f.assignments == tuple((f"H{i}", False) for i in range(1, 6))
    assert f.others is True


@pytest.mark.parametrize(
    "text, expected",
    [
        ("a | b & c", Or(A, And(B, C))),
        ("!a & b", And(Not(A), B)),
        ("a => b => c", Implies(A, Implies(B, C))),
        ("a <=> b | c", Iff(A, Or(B, C))),
        ("a & b & c", And(And(A, B), C)),
        ("!a[a:=1]", Not(Evidence(A, (("a", True),)))),
        ("(a | b)[a:=0]", Evidence(Or(A, B), (("a", False),))),
        ("VOT(>=2; a, b, c)", Vot(">=", 2, (A, B, C))),
        ("true & !false", And(Const(True), Not(Const(False)))),
        ("exists a & b", Exists(And(A, B))),
        ("MCS(t)", MCS(Atom("t"))),
    ],
)
def test_precedence(text, expected):
    assert p(text) == expected


@pytest.mark.parametrize(
    "text",
    [
        "a & (b",
        "a &",
        "MCS(a",
        "a[a:=2]",
        "VOT(>=3; a, b)",
        "VOT(2; a, b)",
        "a b",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(FormulaError):
        p(text)


def test_syntax_error_has_position():
    with pytest.raises(FormulaSyntaxError) as err:
        p("a & & b")
    assert err.value.pos == 4


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("nope", "unknown element"),
        ("MCS(forall a)", "layer"),
        ("a & exists b", "layer"),
        ("IDP(a, exists b)", "layer"),
        ("a[t:=1]", "basic event"),
        ("a[b:=1, b:=0]", "duplicate"),
        ("a[others:=1, others:=0]", "others"),
    ],
)
def test_semantic_errors(text, fragment):
    with pytest.raises(FormulaError, match=fragment):
        p(text)


def test_layers(reservoir):
    assert layer_of(parse_formula("exists (CP & CR)", reservoir)) is Layer.TREE
    assert layer_of(parse_formula("MCS(CP_R)", reservoir)) is Layer.VECTOR
    assert layer_of(parse_formula("IW", reservoir)) is Layer.VECTOR


def test_or_desugars_to_de_morgan():
    assert desugar(p("a | b"), ABC) == Not(And(Not(A), Not(B)))


def test_sup_desugars_to_idp(covid):
    assert desugar(parse_formula("SUP(PP)", covid), covid) == IDP(Atom("PP"), Atom("IWoS"))


def test_others_expands_in_event_order():
    f = desugar(p("a[b:=1, others:=0]"), ABC)
    targets = []
    while isinstance(f, Evidence):
        targets += f.assignments
        f = f.arg
    assert sorted(targets) == [("a", False), ("b", True), ("c", False)]
    assert f == A


def test_desugar_is_core(covid):
    f = parse_formula("VOT(=2; H1, H2, H3) <=> MPS(IWoS)[H1:=0, others:=1] != (IS | !IT)", covid)
    assert is_core(desugar(f, covid))


def test_vot_one_is_or():
    cc = Compiler(ABC)
    assert cc.predicate(p("VOT(>=1; a, b)")) == cc.predicate(p("a | b"))


def test_vot_threshold_and_subset_forms_agree():
    o = Oracle(ABC)
    for k in range(0, 4):
        for args in [(A,), (A, B), (A, B, C), (A, A, B)]:
            assert (o.table(vot_threshold(k, args)) == o.table(vot_subset_expansion(k, args))).all()


def test_evidence_is_not_conjunction():
    o = Oracle(ABC)
    assert o.table(p("(!a)[a:=0]")).all()
    both = o.table(p("!a & !a"))
    for b in iter_vectors(ABC):
        if b["a"]:
            assert not both[b.as_int()]


@settings(max_examples=60, deadline=None)
@given(trees_and_formulas(max_events=6, max_depth=4, layer2=False))
def test_evidence_commutes(case):
    ft, f = case
    if len(ft.be_order) < 2:
        return
    x, y = ft.be_order[:2]
    cc = Compiler(ft)
    one = Evidence(Evidence(f, ((x, True),)), ((y, False),))
    two = Evidence(Evidence(f, ((y, False),)), ((x, True),))
    assert cc.predicate(one) == cc.predicate(two)


@settings(max_examples=150, deadline=None)
@given(trees_and_formulas(max_events=6))
def test_desugar_preserves_meaning(case):
    ft, f = case
    o = Oracle(ft)
    g = desugar(f, ft)
    if layer_of(f) is Layer.TREE:
        assert o.holds(f) == o.holds(g)
    else:
        assert (o.table(f) == o.table(g)).all()


@settings(max_examples=150, deadline=None)
@given(trees_and_formulas())
def test_format_parse_round_trip(case):
    ft, f = case
    assert parse_formula(format_formula(f), ft) == f
