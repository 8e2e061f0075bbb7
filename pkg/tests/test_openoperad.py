import itertools

import pytest
from hypothesis import given, strategies as st

import oracles
from factalg.errors import ComplementNotInUniverse, InvalidComposite, NotAMorphism
from factalg.openoperad import (Chart, EqRel, OMorphism, OTuple, all_partitions, check_pushout_assumptions,
                                complement_op, compose, decode, encode_active, encode_cocart,
                                enumerate_cocart_into, factorization_poset, identity, is_cocartesian,
                                operation)
from factalg.stratline import LINE, STAR, Universe

R = LINE()
S1 = STAR(1)
S2 = STAR(2)


def spread(n):
    """``(0,1)+(2,3)+...`` with ``n`` components."""
    return R.open("+".join(f"({2 * i},{2 * i + 1})" for i in range(n))) if n else R.empty()


def test_morphism_validation():
    a, b = R.open("(0,1)"), R.open("(0,2)")
    with pytest.raises(NotAMorphism):
        operation([a, R.open("(1/2,3/2)")], b)
    with pytest.raises(NotAMorphism):
        operation([R.open("(0,3)")], b)
    m = operation([a], b)
    assert m.is_active() and not m.is_inert()


def test_composition_and_identity():
    a, b, c = R.open("(0,1)"), R.open("(0,2)"), R.open("(0,3)")
    f, g = operation([a], b), operation([b], c)
    assert compose(g, f) == operation([a], c)
    assert compose(f, identity(f.src)) == f == compose(identity(f.dst), f)
    with pytest.raises(InvalidComposite):
        compose(f, g)


def test_inert_active_factorization():
    a, b, c = R.open("(0,1)"), R.open("(2,3)"), R.open("(0,2)")
    f = OMorphism([a, b], [c], [0, None])
    inert, active = f.factor()
    assert inert.is_inert() and active.is_active()
    assert compose(active, inert) == f


def test_cocartesian():
    b = spread(2)
    assert is_cocartesian(operation([R.open("(0,1)"), R.open("(2,3)")], b))
    assert not is_cocartesian(operation([R.open("(0,1)")], b))


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_partitions_are_bell(n):
    parts = list(all_partitions(n))
    assert len(parts) == oracles.bell(n) == len(set(parts))
    as_sets = {frozenset(frozenset(b) for b in r.blocks) for r in parts}
    assert as_sets == set(oracles.set_partitions(n))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_codec_exhaustive(n):
    b = spread(n)
    ms = enumerate_cocart_into(b)
    assert len(ms) == oracles.bell(n)
    for m in ms:
        assert is_cocartesian(m) and decode(encode_cocart(m), b) == m
    for rel in all_partitions(n):
        assert encode_cocart(decode(rel, b)) == rel


def test_cocart_restricted_by_universe():
    b = spread(3)
    un = Universe(R, [decode(r, b).src[0] for r in all_partitions(3)] + list(b.components()))
    assert len(enumerate_cocart_into(b, Universe(R, b.components()))) == 1
    assert len(enumerate_cocart_into(b, un)) >= 2


@given(st.integers(1, 5), st.data())
def test_eqrel_lattice(n, data):
    parts = list(all_partitions(n))
    r = data.draw(st.sampled_from(parts))
    s = data.draw(st.sampled_from(parts))
    m, j = r.meet(s), r.join(s)
    assert m.refines(r) and m.refines(s) and r.refines(j) and s.refines(j)
    for t in parts:
        if t.refines(r) and t.refines(s):
            assert t.refines(m)


def test_active_encoding_merges_through_sources():
    b = spread(3)
    alpha = operation([R.open("(0,1)"), R.open("(4,5)")], b)
    enc = encode_active(alpha)
    assert len(enc.blocks) == 3
    merged = operation([R.open("(0,3)")], R.open("(0,3)+(4,5)"))
    assert len(encode_active(merged).blocks) == 2


def test_factorization_poset_codirected():
    b = spread(3)
    alpha = operation([R.open("(0,1)")], b)
    all_unions = Universe(R, [decode(r, b).src[k] for r in all_partitions(3) for k in range(len(r.blocks))])
    rep = factorization_poset(alpha, all_unions)
    assert rep.kind == "codirected" and len(rep.relations) == 5
    rep2 = factorization_poset(alpha, Universe(R, [R.open("(0,1)")]))
    assert rep2.kind == "empty"


def test_complement_operation():
    c1, c2 = S1.open("C(1)"), S1.open("C(2)")
    a, o2 = complement_op(operation([c1], c2))
    assert o2 == S1.open("r0(1,2)")
    assert a.src[1] == o2
    _, whole = complement_op(OMorphism([], [c2], []))
    assert whole == S1.open("r0(0,2)")
    with pytest.raises(ComplementNotInUniverse):
        complement_op(operation([c1], c2), Universe(S1, [c1, c2]))
    with pytest.raises(NotAMorphism):
        complement_op(operation([S1.open("r0(1,2)")], S1.open("r0(0,3)")))


def test_chart_split_and_assumptions():
    ch = Chart(Universe.parse(S2, ["C(1)", "C(2)", "r0(0,1) + r1(0,1)", "r0(0,2) + r1(0,2)",
                                   "r0(1,2) + r1(1,2)", "r0(1,2)", "r1(1,2)"]).opens)
    assert ch.is_cone and sum(ch.O) == 2 and sum(ch.N) == 5
    assert check_pushout_assumptions(ch, 3).ok
    assert ch.max_arity() == 3      # C(1), r0(1,2), r1(1,2) inside C(2)


def test_assumption_a6_detects_missing_complement():
    ch = Chart(Universe.parse(S1, ["C(1)", "C(2)", "r0(0,1)"]).opens)
    rep = check_pushout_assumptions(ch, 2)
    assert not rep.results["A6"][0]


def test_assumption_a1_detects_non_horizontal():
    ch = Chart(Universe.parse(S2, ["C(1)", "C(1) + r1(1,2)"]).opens)
    assert not check_pushout_assumptions(ch, 2).results["A1"][0]


def test_input_families_distinct_unless_empty():
    ch = Chart(Universe.parse(R, ["empty", "(0,1)", "(2,3)", "(0,3)"]).opens, None)
    t = ch.index[R.open("(0,3)")]
    fams = ch.input_families(t, 2)
    e = ch.index[R.empty()]
    assert (e, e) in fams
    assert all(len(set(f)) == 2 for f in fams if e not in f)
