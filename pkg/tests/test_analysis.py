import itertools

import pytest
from hypothesis import given, settings

from bfl.analysis import (
    AnalysisError,
    Analyzer,
    counterexample,
    enumerate_satisfying,
    evaluate,
    oracle_evaluate,
)
from bfl.fault_tree import StatusVector, iter_vectors
from bfl.formula import Layer, contains_minimality, layer_of
from bfl.oracle import Oracle, OracleTooLarge
from strategies import trees_and_formulas

RESERVOIR_PROPERTIES = [
    "forall (CP => CP_R)",
    "exists (CP & CR)",
    "MCS(CP_R)",
    "MPS(CP_R)",
    "MCS(CP_R) & IW",
    "VOT(>=2; IW, H3, IT, H2) => CP_R",
    "CP_R[IW:=1, H3:=1]",
    "IDP(CP, CR)",
    "SUP(IW)",
    "CP <=> CR",
    "CP != CR",
]


def satisfies_contract(an, chi, b, cex):
    if not an.evaluate(chi, cex.revised).holds:
        return False
    changed = [n for n, x, y in zip(b.names, b.bits, cex.revised.bits) if x != y]
    if sorted(changed) != sorted(cex.flipped):
        return False
    return all(not an.evaluate(chi, cex.revised.with_bit(n, b[n])).holds for n in changed)


def test_reservoir_evaluate(reservoir):
    assert not evaluate(reservoir, {"H3": 1, "IT": 1}, "MCS(CP_R)").holds
    assert evaluate(reservoir, [0, 0, 1, 1], "MCS(CP_R)").holds


def test_or_gate_mcs(or2):
    assert evaluate(or2, [0, 1], "MCS(e_top)").holds


def test_tautology(covid):
    an = Analyzer(covid)
    for b in (0, 1, 0b1010101010101, (1 << 13) - 1):
        assert an.evaluate("IW | !IW", b).holds


def test_verdict_fields(reservoir):
    v = Analyzer(reservoir, "global").evaluate("exists CP")
    assert v and v.formula_layer is Layer.TREE and v.mode.value == "global"


def test_layer2_ignores_vector(reservoir):
    an = Analyzer(reservoir)
    assert all(an.evaluate("forall (CP => CP_R)", b).holds for b in range(16))


def test_first_layer_needs_vector(reservoir):
    with pytest.raises(AnalysisError):
        Analyzer(reservoir).evaluate("CP")


def test_vector_must_match_tree(reservoir):
    with pytest.raises(AnalysisError):
        Analyzer(reservoir).evaluate("CP", [1, 0])


def test_or_gate_enumeration(or2):
    result = enumerate_satisfying(or2, "MCS(e_top)")
    vectors = {str(v) for v in result.expand()}
    assert vectors == {"(0, 1)", "(1, 0)"}


def test_covid_mcs_of_mot_with_is(covid):
    result = enumerate_satisfying(covid, "MCS(MoT) & IS")
    assert result.sets() == [frozenset({"IS", "H1", "H5"})]
    cube = result.cubes[0]
    assert set(result.dont_care(cube)) == {"H2", "H3", "VW"}


def test_contradiction_is_empty(reservoir):
    result = enumerate_satisfying(reservoir, "IW & !IW")
    assert len(result) == 0 and result.vector_count() == 0


def test_second_layer_cannot_be_enumerated(reservoir):
    with pytest.raises(AnalysisError):
        enumerate_satisfying(reservoir, "exists IW")


def test_expand_limit(covid):
    result = enumerate_satisfying(covid, "IW | !IW")
    with pytest.raises(AnalysisError):
        list(result.expand(limit=100))


def test_mps_reports_operational_sets(reservoir):
    result = enumerate_satisfying(reservoir, "MPS(CP_R)")
    assert result.polarity == "operational"
    assert set(result.sets()) == {frozenset(s) for s in (("IW", "IT"), ("IW", "H2"), ("H3", "IT"), ("H3", "H2"))}


def test_json_shape(reservoir):
    rows = enumerate_satisfying(reservoir, "MCS(CP_R)").to_json()
    assert sorted(tuple(r["set"]) for r in rows) == [("IT", "H2"), ("IW", "H3")]
    assert all(set(r) == {"set", "failed", "operational", "dont_care", "cube"} for r in rows)


@pytest.mark.parametrize(
    "chi, b, expected",
    [
        ("MCS(e1)", (0, 1, 0), (1, 1, 0)),
        ("MPS(e1)", (1, 0, 1), (1, 0, 0)),
        ("MCS(e1)", (1, 1, 1), (1, 1, 0)),
        ("MPS(e1)", (0, 0, 0), (0, 1, 1)),
    ],
)
def test_greedy_counterexamples(patterns, chi, b, expected):
    an = Analyzer(patterns)
    b = StatusVector.of(patterns, b)
    cex = an.counterexample(chi, b)
    assert cex.revised.bits == expected
    assert satisfies_contract(an, chi, b, cex)


def test_unsatisfiable_has_no_counterexample(reservoir):
    assert counterexample(reservoir, 0, "IW & !IW") is None


def test_counterexample_preconditions(reservoir):
    an = Analyzer(reservoir)
    with pytest.raises(AnalysisError):
        an.counterexample("CP_R", [1, 1, 0, 0])
    with pytest.raises(AnalysisError):
        an.counterexample("exists CP_R", 0)


def test_oracle_guard():
    from bfl.fault_tree import FaultTree

    ft = FaultTree.from_gates("t", {"t": ("or", [f"x{i}" for i in range(17)])})
    with pytest.raises(OracleTooLarge):
        Oracle(ft)


def test_oracle_trivia(reservoir, covid):
    assert not oracle_evaluate(covid, 0, "IWoS")
    assert oracle_evaluate(reservoir, None, "forall (CP => CP_R)")


@pytest.mark.parametrize("chi", RESERVOIR_PROPERTIES)
def test_reservoir_properties_against_oracle(reservoir, chi):
    an = Analyzer(reservoir)
    o = Oracle(reservoir)
    for b in iter_vectors(reservoir):
        assert an.evaluate(chi, b).holds == o.evaluate(b, an.parse(chi))


@settings(max_examples=150, deadline=None)
@given(trees_and_formulas())
def test_matches_oracle(case):
    ft, chi = case
    for mode in ("support", "global"):
        an, o = Analyzer(ft, mode), Oracle(ft, mode)
        if layer_of(chi) is Layer.TREE:
            assert an.evaluate(chi).holds == o.holds(chi)
            continue
        t = o.table(chi)
        for b in iter_vectors(ft):
            assert an.evaluate(chi, b).holds == bool(t[b.as_int()])


@settings(max_examples=100, deadline=None)
@given(trees_and_formulas(layer2=False))
def test_enumeration_consistency(case):
    ft, chi = case
    an = Analyzer(ft)
    result = an.enumerate(chi)
    listed = [v.as_int() for v in result.expand(limit=1 << 8)]
    assert len(listed) == len(set(listed))
    assert set(listed) == {b.as_int() for b in iter_vectors(ft) if an.evaluate(chi, b).holds}


@settings(max_examples=100, deadline=None)
@given(trees_and_formulas(layer2=False))
def test_counterexample_contract(case):
    ft, chi = case
    an = Analyzer(ft)
    empty = len(an.enumerate(chi)) == 0
    for b in iter_vectors(ft):
        if an.evaluate(chi, b).holds:
            continue
        cex = an.counterexample(chi, b)
        assert (cex is None) == empty
        if cex is not None:
            assert satisfies_contract(an, chi, b, cex)


@settings(max_examples=100, deadline=None)
@given(trees_and_formulas(layer2=False))
def test_fast_path_agrees_with_walk(case):
    ft, chi = case
    if contains_minimality(chi):
        return
    an = Analyzer(ft)
    for b in itertools.islice(iter_vectors(ft), 64):
        assert an.evaluate(chi, b).holds == an.evaluate(chi, b, fast_path=False).holds
