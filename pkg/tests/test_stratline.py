from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from factalg.errors import BadConfiguration, EmptyCover, OverlapError
from factalg.stratline import (CIRCLE, LINE, STAR, Square, Universe, basis_predicate, classify_multidisk,
                               close_universe, disk_type, format_open, is_iso_inclusion, is_weiss_cover,
                               line_open, parse_open)

R = LINE()
R0 = LINE(0)

ends = st.fractions(min_value=-4, max_value=4, max_denominator=4)


@st.composite
def line_opens(draw, space=R):
    k = draw(st.integers(0, 3))
    pts = sorted(set(draw(st.lists(ends, min_size=2 * k, max_size=2 * k))))
    ivs = [(a, b) for a, b in zip(pts[::2], pts[1::2]) if a < b]
    return line_open(space, ivs, strict=False)


def test_parse_and_format_round_trip():
    for text in ["(0,1)", "(-inf,0)+(0,inf)", "(1/2,3)+(4,5)", "empty"]:
        u = parse_open(R, text)
        assert parse_open(R, format_open(u)) == u
    with pytest.raises(OverlapError):
        parse_open(R, "(0,2)+(1,3)")


def test_star_literals():
    s = STAR(2)
    u = s.open("C(1)")
    assert u.contains_vertex() and u.is_connected()
    v = s.open("r0(0,1) + r1(0,1)")
    assert not v.contains_vertex() and len(v.components()) == 2
    assert v.issubset(u) and not u.issubset(v)
    assert u.minus_closure(s.open("C(1/2)")) == s.open("r0(1/2,1) + r1(1/2,1)")


def test_one_mark_line_is_star2():
    assert R0 == STAR(2) or disk_type(R0.open("(-1,1)")).k == 2


def test_classification():
    assert str(disk_type(R0.open("(-1,1)"))) == "Cone(2)"
    assert str(disk_type(R0.open("(1,2)"))) == "R"
    cl = classify_multidisk(LINE(0, 1).open("(-1,2)"))
    assert not cl.is_multidisk
    assert classify_multidisk(R0.open("(-1,1)+(2,3)")).multiset() == ("Cone(2)", "R")
    assert not classify_multidisk(CIRCLE(1).whole()).is_multidisk


def test_iso_inclusion():
    assert is_iso_inclusion(R0.open("(-1,1)"), R0.open("(-2,2)"))
    assert not is_iso_inclusion(R0.open("(1,2)"), R0.open("(-2,2)"))
    assert not is_iso_inclusion(R.open("(0,1)+(2,3)"), R.open("(0,3)"))


@given(line_opens(), line_opens())
def test_lattice_laws(u, v):
    assert (u & v).issubset(u) and u.issubset(u | v)
    assert (u & v) == (v & u) and (u | v) == (v | u)
    assert u.minus_closure(v).disjoint(v)
    assert u.minus_closure(v).issubset(u)


@given(line_opens())
def test_components_union_back(u):
    comps = u.components()
    acc = R.empty()
    for c in comps:
        assert c.is_connected()
        acc = acc | c
    assert acc == u


def test_circle_arcs():
    c = CIRCLE(2)
    a = c.open("(3/2,5/2)")
    assert a.is_connected()
    assert a.contains_point((0, Fraction(0))) and a.contains_point((0, Fraction(7, 4)))
    assert not a.contains_point((0, Fraction(1)))


def test_close_under_disjoint_unions():
    un = Universe.parse(R, ["(0,1)", "(2,3)", "(4,5)"])
    closed = close_universe(un, "disjoint_unions")
    assert len(closed) == 8 and closed.has_empty()
    inter = close_universe(Universe.parse(R, ["(0,2)", "(1,3)"]), "intersections")
    assert R.open("(1,2)") in inter


def test_weiss_covers():
    u = R.open("(0,3)")
    assert not is_weiss_cover([R.open("(0,2)"), R.open("(1,3)")], u, grid=2).ok
    assert is_weiss_cover([u], u).ok
    with pytest.raises(EmptyCover):
        is_weiss_cover([], u)
    with pytest.raises(BadConfiguration):
        is_weiss_cover([R.open("(0,4)")], u)


def test_basis_modes():
    small = close_universe(Universe.parse(R, ["(0,1)", "(1/2,3/2)", "(1,2)", "(0,1/2)", "(1/2,1)", "(1,3/2)",
                                              "(3/2,2)"]), "disjoint_unions").without_empty()
    amb = Universe.parse(R, ["(0,2)"])
    assert basis_predicate(small, amb, "factorizing").ok
    only = Universe.parse(R, ["(0,1)"])
    assert not basis_predicate(only, amb, "multiplicative").ok
    assert not basis_predicate(Universe.parse(R, ["(0,1)+(2,3)"]), amb, "decomposable").ok
    with pytest.raises(BadConfiguration):
        basis_predicate(only, amb, "strange")


def test_square_preimages():
    sq = Square(marked=False)
    assert sq.preimage(R.open("(1,4)")) == R.open("(-2,-1)+(1,2)")
    assert sq.preimage(R.open("(-1,1)")) == R.open("(-1,1)")
