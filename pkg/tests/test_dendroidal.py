import itertools
import math

import pytest

import oracles
from factalg import dendroidal as dd
from factalg.dendroidal import (Dendrex, PosetOperad, Representable, SpawnTable, SpawnTime, Tree, anodyne_hypothesis,
                                corolla, enumerate_trees, eta, is_normal, lambda_less, lambda_less_by_spawn,
                                m_reduce, nerve_colorings, r_special, spawn_analysis, spawn_time,
                                spawn_times_upto, verify_attaching_pushout, verify_union_gluing)
from factalg.errors import BadConfiguration
from factalg.openoperad import Chart
from factalg.stratline import LINE, STAR, Universe, close_universe

S1, S2, R = STAR(1), STAR(2), LINE()

STAR1 = ["C(1/2)", "C(1)", "r0(0,1/2)", "r0(0,1)", "r0(1/2,1)"]
STAR2 = ["C(1)", "C(2)", "r0(0,1) + r1(0,1)", "r0(0,2) + r1(0,2)", "r0(1,2) + r1(1,2)", "r0(1,2)", "r1(1,2)"]


@pytest.fixture(scope="module")
def chart1():
    return Chart(Universe.parse(S1, STAR1).opens)


@pytest.fixture(scope="module")
def chart2():
    return Chart(Universe.parse(S2, STAR2).opens)


@pytest.fixture(scope="module")
def table2(chart2):
    return SpawnTable(chart2, 4)


def grid_sieve(pts, with_empty=False):
    lits = [f"({a},{b})" for i, a in enumerate(pts) for b in pts[i + 1:]]
    un = close_universe(Universe.parse(R, lits), "disjoint_unions")
    return un if with_empty else un.without_empty()


@pytest.mark.parametrize("arity,counts", [(2, [1, 4, 10, 28, 82]), (3, [1, 5, 17, 73, 357])])
def test_tree_enumeration_counts(arity, counts):
    got = [len(enumerate_trees(v, arity)) for v in range(5)]
    assert got == counts == [len(oracles.nonplanar_trees(v, arity)) for v in range(5)]


def test_enumeration_order_and_canonical():
    ts = enumerate_trees(3, 2)
    assert ts[0] == eta()
    assert [dd.tree_sort_key(t) for t in ts] == sorted(dd.tree_sort_key(t) for t in ts)
    for t in ts:
        c, _ = t.canonical()
        assert c.code == t.code


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_corolla_automorphisms(k):
    assert len(corolla(k).automorphisms()) == math.factorial(k)


def small_trees():
    return enumerate_trees(4, 3)


def test_face_counts_and_codimension():
    for t in small_trees():
        for f in t.faces():
            if f.kind == "inner":
                assert f.tree.n_vertices == t.n_vertices - 1
            elif not t.is_corolla():
                assert f.tree.n_vertices == t.n_vertices - 1
        assert len([f for f in t.faces() if f.kind == "inner"]) == len(t.inner_edges())


def test_degeneracy_then_face_is_identity():
    for t in small_trees():
        for e in t.edges:
            s, new = t.degeneracy(e)
            assert s.n_vertices == t.n_vertices + 1
            assert any(f.tree.canonical()[0].code == t.code for f in s.faces())


def test_inner_faces_commute():
    for t in small_trees():
        for a, b in itertools.combinations(t.inner_edges(), 2):
            x = t.contract(a).contract(b)
            y = t.contract(b).contract(a)
            assert x == y


def brute_nerve(operad, tree):
    cols = operad.colors
    return {c for c in itertools.product(cols, repeat=len(tree.edges)) if Dendrex(tree, c).is_valid(operad)}


def test_nerve_matches_brute_force(chart1):
    op = PosetOperad(chart1)
    for t in enumerate_trees(3, 2):
        assert set(nerve_colorings(op, t)) == brute_nerve(op, t)


def test_representable_nerve():
    t = Tree(0, {0: (1, 2), 1: (3, 4)})
    rep = Representable(t)
    assert len(nerve_colorings(rep, eta())) == len(t.edges)
    assert tuple(t.edges) in nerve_colorings(rep, t)
    assert brute_nerve(rep, corolla(2)) == set(nerve_colorings(rep, corolla(2)))


def test_faces_of_dendrices_are_dendrices(chart2):
    op = PosetOperad(chart2)
    for t in enumerate_trees(3, 2):
        for c in nerve_colorings(op, t):
            d = Dendrex(t, c)
            assert all(x.is_valid(op) for _, x in d.faces())
            assert all(x.is_valid(op) and x.is_degenerate() for x in d.degeneracies())


def test_normality_with_and_without_empty():
    bad = is_normal(Chart(grid_sieve([0, 1, 2, 3], with_empty=True).opens, None), 4, 3)
    assert not bad.ok
    code, labels, _ = bad.failures[0]
    assert code == "(||)" and labels == ("empty", "empty", "empty")
    assert is_normal(Chart(grid_sieve([0, 1, 2, 3]).opens, None), 4).ok


def test_spawn_times_upto():
    ts = spawn_times_upto(SpawnTime(2, 2), 5)
    assert ts == [SpawnTime(), SpawnTime(1, 1), SpawnTime(1, 2), SpawnTime(1, 3), SpawnTime(1, 4),
                  SpawnTime(2, 1), SpawnTime(2, 2)]
    with pytest.raises(BadConfiguration):
        SpawnTime(1, 0)


def test_star1_is_all_horizontal(chart1):
    assert all(chart1.H)
    table = SpawnTable(chart1, 3)
    assert table.times() == {SpawnTime()}


def test_spawn_monotone_and_degeneracy_invariant(chart2, table2):
    for t in table2.trees:
        for c, s in table2.rows[t.code]:
            d = Dendrex(t, c)
            for _, f in d.faces():
                assert spawn_time(f, chart2) <= s
                assert spawn_time(f, chart2) <= SpawnTime(2, 2) or s > SpawnTime(2, 2)
            if t.n_vertices < 4:
                for g in d.degeneracies():
                    assert spawn_time(g, chart2) == s


def test_m_and_r_commute_and_detect_special(chart2, table2):
    seen_special = seen_other = 0
    for t in table2.trees:
        for c, s in table2.rows[t.code]:
            d = Dendrex(t, c)
            a = spawn_analysis(d, chart2)
            if a.classification != "mixed" or d.is_degenerate():
                continue
            lhs = m_reduce(r_special(d, chart2))
            rhs = r_special(m_reduce(d), chart2)
            assert lhs.canonical() == rhs.canonical()
            assert (r_special(d, chart2) == d) == a.is_special
            seen_special += a.is_special
            seen_other += not a.is_special
    assert seen_special and seen_other


def test_lambda_descriptions_agree(chart2):
    table = SpawnTable(chart2, 4)
    reps = [f for alpha in spawn_times_upto(SpawnTime(2, 2), 4)[1:] for f in table.special_representatives(alpha)]
    assert reps
    for f in reps[:6]:
        a = lambda_less(f, chart2)
        b = lambda_less_by_spawn(f, chart2)
        assert a == b
        assert not a.closure_failures()
        assert anodyne_hypothesis(f.tree, a.generators)


def collapse_instance(chart2, extra_stump):
    co = {u: chart2.index[S2.open(u)] for u in STAR2}
    verts = {0: (1, 2), 1: (3,), 3: (), 2: (4,)}
    if extra_stump:
        verts[4] = ()
    t = Tree(0, verts)
    col = {0: co["C(2)"], 1: co["C(1)"], 3: co["r0(0,1) + r1(0,1)"], 2: co["r0(1,2) + r1(1,2)"],
           4: co["r0(1,2)"]}
    d = Dendrex(t, tuple(col[e] for e in t.edges))
    assert d.is_valid(PosetOperad(chart2))
    return d, spawn_analysis(d, chart2), spawn_analysis(d.restrict(t.contract(1)), chart2)


@pytest.mark.parametrize("stump,before,after", [(False, (2, 2), (1, 3)), (True, (2, 3), (1, 4))])
def test_collapse_transition(chart2, stump, before, after):
    d, a, b = collapse_instance(chart2, stump)
    assert a.is_special and a.shape == before and a.time == SpawnTime(*before)
    assert b.time == SpawnTime(*after) and b.time < a.time


def test_attaching_pushout_small(chart2):
    table = SpawnTable(chart2, 4)
    for alpha in spawn_times_upto(SpawnTime(2, 2), 4):
        assert verify_attaching_pushout(chart2, alpha, 4, table).ok


def test_attaching_pushout_fails_with_all_inner_faces(chart2, monkeypatch):
    """Keeping the forest-root inner faces in lambda< breaks the pushout."""
    table = SpawnTable(chart2, 4)
    monkeypatch.setattr(dd, "spawndary_faces", lambda f, chart: f.tree.faces())
    results = [verify_attaching_pushout(chart2, a, 4, table).ok for a in spawn_times_upto(SpawnTime(2, 2), 4)[1:]]
    assert not all(results)


def test_union_gluing_two_cover():
    un = grid_sieve([0, 1, 2, 3])
    assert verify_union_gluing(un, [R.open("(0,2)"), R.open("(1,3)")], 4).ok
    with pytest.raises(BadConfiguration):
        verify_union_gluing(un, [R.empty()], 3)
