import itertools
import random

import pytest
from hypothesis import given, strategies as st

import oracles
from factalg.errors import BadConfiguration, IncoherentDiagram, NotAPoset, NotContained
from factalg.finposet import (CompactSet, FinPoset, SetDiagram, UnionFind, is_final_inclusion, pi0_delta,
                              poset_predicate, set_colimit, weiss_localization_probe)


def chain(n):
    return FinPoset(range(n), [(i, i + 1) for i in range(n - 1)])


@st.composite
def posets(draw, n_max=6):
    n = draw(st.integers(1, n_max))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rel = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return FinPoset(range(n), rel)


def test_transitive_closure_and_covers():
    p = FinPoset("abc", [("a", "b"), ("b", "c")])
    assert p.leq("a", "c") and not p.leq("c", "a")
    assert set(p.covers()) == {("a", "b"), ("b", "c")}
    assert p.maximal() == ("c",) and p.minimal() == ("a",)


def test_cycle_rejected():
    with pytest.raises(NotAPoset):
        FinPoset("ab", [("a", "b"), ("b", "a")])


def test_unknown_element_rejected():
    with pytest.raises(NotAPoset):
        FinPoset("ab", [("a", "z")])


@given(posets())
def test_covers_generate_order(p):
    """The order relation is the reflexive-transitive closure of the covers."""
    q = FinPoset(p.elements, p.covers())
    for a, b in itertools.product(p, repeat=2):
        assert p.leq(a, b) == q.leq(a, b)
    for a, b in p.covers():
        assert not any(p.lt(a, c) and p.lt(c, b) for c in p)


@given(posets())
def test_opposite_reverses(p):
    op = p.opposite()
    for a, b in itertools.product(p, repeat=2):
        assert p.leq(a, b) == op.leq(b, a)


def test_predicates_on_small_examples():
    v = FinPoset("abc", [("a", "b"), ("a", "c")])
    assert poset_predicate(v, "connected")
    assert poset_predicate(v, "has_initial") and poset_predicate(v, "has_min")
    assert not poset_predicate(v, "has_terminal")
    assert poset_predicate(v, "codirected") and not poset_predicate(v, "directed")
    assert poset_predicate(chain(3), "directed") and poset_predicate(chain(3), "has_max")
    assert not poset_predicate(FinPoset("ab"), "connected")
    with pytest.raises(ValueError):
        poset_predicate(v, "lattice")


@given(posets())
def test_terminal_implies_directed(p):
    if poset_predicate(p, "has_terminal"):
        assert poset_predicate(p, "directed")
    if poset_predicate(p, "directed"):
        assert poset_predicate(p, "connected")


def brute_final(s, p):
    for q in p:
        sl = [x for x in s if p.leq(q, x)]
        if not sl:
            return False
        # connectivity by BFS over comparabilities
        seen, todo = {sl[0]}, [sl[0]]
        while todo:
            a = todo.pop()
            for b in sl:
                if b not in seen and (p.leq(a, b) or p.leq(b, a)):
                    seen.add(b)
                    todo.append(b)
        if len(seen) != len(sl):
            return False
    return True


@given(posets(5), st.data())
def test_final_inclusion_matches_brute_force(p, data):
    s = data.draw(st.sets(st.sampled_from(p.elements)))
    assert is_final_inclusion(s, p) == brute_final(s, p)


def test_maximum_is_final():
    p = chain(4)
    assert is_final_inclusion([3], p)
    assert not is_final_inclusion([2], p)


def test_union_find():
    uf = UnionFind(range(5))
    uf.union(0, 1)
    uf.union(3, 4)
    uf.union(1, 0)
    assert uf.find(0) == uf.find(1) and uf.find(2) != uf.find(0)
    assert sorted(len(c) for c in uf.classes()) == [1, 2, 2]


def random_set_diagram(rng):
    n = rng.randint(1, 5)
    p = FinPoset(range(n), [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4])
    sets, maps = {}, {}
    covers = p.covers()
    # maps into later elements factor through an arbitrary function on a
    # join-like set: build each set as images of tagged points
    for q in p.elements:
        sets[q] = [(q, i) for i in range(rng.randint(0, 3))]
    # make coherent by choosing, for each element, a "label" function into
    # a common pool and sending x to an element with the same label if any
    pool = {q: {x: rng.randint(0, 2) for x in sets[q]} for q in p}
    for a, b in covers:
        tgt = {}
        for y in sets[b]:
            tgt.setdefault(pool[b][y], y)
        maps[(a, b)] = {}
        for x in list(sets[a]):
            lab = pool[a][x]
            if lab not in tgt:
                y = (b, len(sets[b]))
                sets[b].append(y)
                pool[b][y] = lab
                tgt[lab] = y
            maps[(a, b)][x] = tgt[lab]
    return p, sets, maps


def test_set_colimit_against_bfs():
    rng = random.Random(3)
    done = 0
    while done < 200:
        p, sets, maps = random_set_diagram(rng)
        try:
            d = SetDiagram(p, sets, maps)
        except IncoherentDiagram:
            continue
        # later covers may have added points after earlier maps were drawn
        full = {(a, b): d.transport(a, b) for a in p for b in p if p.lt(a, b)}
        want = oracles.set_colimit_classes(p.elements, p.leq, sets, full)
        assert len(set_colimit(d)) == want
        done += 1


def test_set_diagram_validation():
    p = chain(2)
    with pytest.raises(IncoherentDiagram):
        SetDiagram(p, {0: [1], 1: [2]}, {})
    with pytest.raises(IncoherentDiagram):
        SetDiagram(p, {0: [1], 1: [2]}, {(0, 1): {1: 3}})


def test_incoherent_square_detected():
    p = FinPoset("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    sets = {"a": [0], "b": [0], "c": [0], "d": [0, 1]}
    maps = {("a", "b"): {0: 0}, ("a", "c"): {0: 0}, ("b", "d"): {0: 0}, ("c", "d"): {0: 1}}
    with pytest.raises(IncoherentDiagram):
        SetDiagram(p, sets, maps)


def test_compact_sets_and_pi0():
    k = CompactSet([(0, 1), (2, 3)])
    big = CompactSet([(-1, 4)])
    assert pi0_delta(k) == (2, None, None)
    assert pi0_delta(k, big) == (2, (0, 0), False)
    assert pi0_delta(k, CompactSet([(-1, 1), (2, 5)])) == (2, (0, 1), True)
    with pytest.raises(NotContained):
        pi0_delta(big, k)
    with pytest.raises(BadConfiguration):
        CompactSet([(0, 1), (1, 2)])
    assert k.gaps() == [(None, 0), (1, 2), (3, None)]


def test_weiss_probe_directed():
    s = [0, 5, 10]
    samples = [CompactSet([(1, 2), (6, 7)]), CompactSet([(2, 4), (8, 9)]), CompactSet([(1, 3), (7, 8)])]
    rep = weiss_localization_probe(s, samples)
    assert rep.directed
    assert rep.witnesses[(0, 1)] == CompactSet([(1, 4), (6, 9)])
    with pytest.raises(BadConfiguration):
        weiss_localization_probe(s, [CompactSet([(1, 2)])])
