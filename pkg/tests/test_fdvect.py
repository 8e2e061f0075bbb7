import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import gen
import oracles
from factalg.errors import IncoherentDiagram, ShapeMismatch
from factalg.fdvect import (LinMap, VectObj, block_map, cokernel, coequalizer, direct_sum_obj, image, inclusion,
                            induced_map, kernel, permute_factors, poset_colimit, projection,
                            reflexive_coequalizer, solve, tensor)
from factalg.finposet import FinPoset, is_final_inclusion

small = st.integers(-3, 3)


@st.composite
def maps(draw, rows=None, cols=None):
    r = draw(st.integers(0, 3)) if rows is None else rows
    c = draw(st.integers(0, 3)) if cols is None else cols
    entries = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return LinMap.from_rows(VectObj(c), VectObj(r), entries)


def test_exact_arithmetic():
    f = LinMap.from_rows(VectObj(2), VectObj(2), [[1, "1/3"], [0, 3]])
    assert f.inverse().rows() == [[1, Fraction(-1, 9)], [0, Fraction(1, 3)]]
    assert (f @ f.inverse()) == LinMap.identity(VectObj(2))


def test_shape_errors():
    a = LinMap.zero(VectObj(2), VectObj(3))
    with pytest.raises(ShapeMismatch):
        a @ a
    with pytest.raises(ShapeMismatch):
        a + LinMap.zero(VectObj(3), VectObj(2))
    with pytest.raises(ShapeMismatch):
        LinMap.from_rows(VectObj(2), VectObj(1), [[1]])
    with pytest.raises(ShapeMismatch):
        reflexive_coequalizer(a, LinMap.zero(VectObj(2), VectObj(2)))


@given(maps())
def test_rank_nullity(f):
    assert kernel(f).src.dim == f.src.dim - f.rank()
    assert f @ kernel(f) == LinMap.zero(kernel(f).src, f.dst)
    q = cokernel(f)
    assert q.obj.dim == f.dst.dim - f.rank()
    assert (q.proj @ f).is_zero()
    assert q.proj @ q.section == LinMap.identity(q.obj)
    assert image(f).src.dim == f.rank()


@given(maps())
def test_rank_matches_sympy(f):
    assert f.rank() == oracles._rank(f.rows(), f.src.dim)


@given(maps(), st.data())
def test_solve(f, data):
    x = data.draw(maps(rows=f.src.dim))
    g = f @ x
    y = solve(f, g)
    assert y is not None and f @ y == g


@given(maps(), maps(), maps())
def test_tensor_functorial(f, g, h):
    # (f (x) g) (x) h has the same matrix as f (x) (g (x) h)
    assert tensor(tensor(f, g), h).mat == tensor(f, tensor(g, h)).mat
    assert tensor(f, g).rank() == f.rank() * g.rank()


@given(maps(rows=2, cols=2), maps(rows=2, cols=2))
def test_tensor_interchange(f, g):
    assert tensor(f, g) @ tensor(g, f) == tensor(f @ g, g @ f)


def test_permute_factors_swaps():
    a, b = VectObj(2), VectObj(3)
    sw = permute_factors([a, b], [1, 0])
    f = LinMap.from_rows(a, a, [[1, 2], [3, 4]])
    g = LinMap.from_rows(b, b, [[1, 0, 1], [0, 2, 0], [5, 0, 1]])
    assert sw @ tensor(f, g) == tensor(g, f) @ sw
    assert permute_factors([b, a], [1, 0]) @ sw == LinMap.identity(VectObj(6))


def test_direct_sums():
    spaces = [VectObj(1), VectObj(2)]
    s, _ = direct_sum_obj(spaces)
    assert s.dim == 3
    assert projection(spaces, 1) @ inclusion(spaces, 1) == LinMap.identity(VectObj(2))
    assert (projection(spaces, 0) @ inclusion(spaces, 1)).is_zero()
    m = block_map(spaces, spaces, {(0, 0): LinMap.identity(VectObj(1)), (1, 1): LinMap.identity(VectObj(2))})
    assert m == LinMap.identity(s)


@given(maps(rows=2, cols=3), maps(rows=2, cols=3))
def test_reflexive_coequalizer(d0, d1):
    q = reflexive_coequalizer(d0, d1)
    assert q.proj @ d0 == q.proj @ d1
    assert q.obj.dim == 2 - (d0 - d1).rank()
    assert coequalizer(d0, d1).obj == q.obj


def test_pushout_dimension():
    base = FinPoset("rab", [("r", "a"), ("r", "b")])
    v = {"r": VectObj(1), "a": VectObj(2), "b": VectObj(2)}
    m = {("r", "a"): LinMap.from_rows(v["r"], v["a"], [[1], [0]]),
         ("r", "b"): LinMap.from_rows(v["r"], v["b"], [[0], [1]])}
    col = poset_colimit(base, v, m)
    assert col.obj.dim == 3
    assert col.cocone["a"] @ m[("r", "a")] == col.cocone["b"] @ m[("r", "b")]


def test_incoherent_vect_diagram():
    base = FinPoset("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    one = VectObj(1)
    i, z = LinMap.identity(one), LinMap.zero(one, one)
    with pytest.raises(IncoherentDiagram):
        poset_colimit(base, dict.fromkeys("abcd", one),
                      {("a", "b"): i, ("a", "c"): i, ("b", "d"): i, ("c", "d"): z})


def test_induced_map_rejects_incompatible_cocone():
    base = FinPoset("ab", [("a", "b")])
    one = VectObj(1)
    col = poset_colimit(base, {"a": one, "b": one}, {("a", "b"): LinMap.identity(one)})
    with pytest.raises(IncoherentDiagram):
        induced_map(col, {"a": LinMap.identity(one), "b": LinMap.zero(one, one)}, one)


@given(st.integers(0, 10 ** 6))
def test_colimit_oracle_property(seed):
    rng = random.Random(seed)
    p, v, m = gen.random_diagram(rng)
    col = poset_colimit(p, v, m)
    assert col.obj.dim == oracles.colimit_dim(p.elements, p.leq, {e: v[e].dim for e in p},
                                              gen.all_composites(p, v, m))
    for a, b in p.covers():
        assert col.cocone[b] @ m[(a, b)] == col.cocone[a]
    # the cocone jointly surjects
    assert sum((col.cocone[e].rank() for e in p), 0) >= col.obj.dim


@given(st.integers(0, 10 ** 6))
def test_final_subposet_property(seed):
    rng = random.Random(seed)
    p, v, m = gen.random_diagram(rng)
    s = [x for x in p if rng.random() < 0.6] + list(p.maximal())
    if is_final_inclusion(s, p):
        assert gen.final_comparison(p, v, m, set(s)).is_iso()
