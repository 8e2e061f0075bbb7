import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import gen
import oracles
from factalg.errors import (AxiomFailure, MarkedOpenInUniverse, ModuleAxiomFailure, NoDecompositionListed,
                            NotContained, OverlapMismatch)
from factalg.fdvect import LinMap, VectObj
from factalg.prefact import (add_empty, assemble, bar_relative_tensor, check_constructible,
                             check_decomposition_independence, check_multiplicativity, check_weiss_descent_chain,
                             check_weiss_descent_finite, circle_sections, coherence_sweep, commutator_quotient,
                             cone_transform, cone_universe, decompose, disjoint_sum, evaluate_on_precover,
                             extend_disjoint_completion, extend_from_basis, from_bimodule, from_interval_algebra,
                             from_structure_constants, glue_from_cover, ground_field, matrix_algebra,
                             random_cone_data, random_left_module, random_right_module, regular_bimodule,
                             regular_left, regular_right, restrict, same_algebra, strip_empty, tensor_product,
                             transport, truncated_poly, upper_triangular, zoo)
from factalg.stratline import LINE, STAR, Universe, close_universe

R = LINE()
R0 = LINE(0)


def grid_universe(space, pts, drop_marked_crossing=None):
    lits = [f"({a},{b})" for i, a in enumerate(pts) for b in pts[i + 1:]]
    return close_universe(Universe.parse(space, lits), "disjoint_unions")


@pytest.mark.parametrize("alg", zoo(4), ids=lambda a: a.name)
def test_zoo_algebras_are_associative_and_unital(alg):
    alg.check()
    assert alg.multiply(alg.one, alg.one) == alg.one
    assert alg.opposite().opposite() == alg


def test_structure_constants_rejects_nonassociative():
    # e0 e0 = e1, e1 * anything = 0, unit e0 fails unitality
    table = [[[0, 1], [0, 0]], [[0, 0], [0, 0]]]
    with pytest.raises(AxiomFailure):
        from_structure_constants(2, table, [1, 0])


def test_dimensions_of_standard_algebras():
    assert matrix_algebra(2).dim == 4 and truncated_poly(3).dim == 3 and upper_triangular(2).dim == 3
    assert not matrix_algebra(2).is_commutative() and truncated_poly(2).is_commutative()


@pytest.mark.parametrize("alg", zoo(4), ids=lambda a: a.name)
def test_circle_sections_and_commutator_quotient(alg):
    assert circle_sections(alg).obj.dim == oracles.circle_sections_dim(alg)
    assert commutator_quotient(alg).obj.dim == oracles.commutator_quotient_dim(alg)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15)
def test_relative_tensor_against_span_oracle(seed):
    rng = random.Random(seed)
    a = rng.choice(zoo(3))
    m1, m2 = random_right_module(a, rng, 3), random_left_module(a, rng, 3)
    m1.check()
    m2.check()
    assert bar_relative_tensor(m1, a, m2).obj.dim == oracles.relative_tensor_dim(m1, a, m2)


def test_bad_module_rejected():
    from factalg.prefact.algebra import LeftModule
    a = truncated_poly(2)
    with pytest.raises(ModuleAxiomFailure):
        LeftModule(a, 1, LinMap.from_rows(VectObj(2), VectObj(1), [[1, 1]]))


def test_interval_algebra_is_multiplicative_constructible():
    un = grid_universe(R, [0, 1, 2, 3])
    f = from_interval_algebra(upper_triangular(2), un)
    assert check_multiplicativity(f).ok
    assert check_constructible(f).ok
    assert coherence_sweep(f, 2).ok


def test_interval_algebra_multiplies_in_order():
    a = matrix_algebra(2)
    un = grid_universe(R, [0, 1, 2])
    f = from_interval_algebra(a, un)
    x = [1, 2, 0, 0]
    y = [0, 0, 1, 0]
    left, right, whole = R.open("(0,1)"), R.open("(1,2)"), R.open("(0,2)")
    flat = [p * q for p in x for q in y]
    assert f.op((left, right), whole).apply(flat) == a.multiply(x, y)
    assert f.op((right, left), whole).apply([q * p for q in y for p in x]) == a.multiply(x, y)


def test_interval_algebra_refuses_marked_opens():
    with pytest.raises(MarkedOpenInUniverse):
        from_interval_algebra(ground_field(), Universe.parse(R0, ["(-1,1)"]))


def test_bimodule_algebra_axioms():
    bm = regular_bimodule(upper_triangular(2), [1, 0, 0])
    un = grid_universe(R0, [-2, -1, 0, 1, 2]).restrict(lambda u: True)
    f = from_bimodule(bm, un)
    assert check_multiplicativity(f).ok
    assert check_constructible(f).ok
    assert coherence_sweep(f, 2).ok
    assert f.value(R0.open("(-1,1)")).dim == 3


def test_weiss_chain_stabilizes():
    chain = [R.open(f"({Fraction(1, i + 1)},{i + 1})") for i in range(1, 8)]
    un = Universe(R, chain + [R.open("(0,inf)")])
    f = from_interval_algebra(matrix_algebra(2), un)
    rep = check_weiss_descent_chain(f, chain, R.open("(0,inf)"))
    assert rep.ok and rep.details["stable_from"] == 0 and rep.details["stable_dim"] == 4


def test_weiss_finite_two_piece_cover():
    un = Universe.parse(R, ["(0,2)", "(1,3)", "(1,2)", "(0,3)"])
    f = from_interval_algebra(truncated_poly(2), un)
    rep = check_weiss_descent_finite(f, [R.open("(0,2)"), R.open("(1,3)")], R.open("(0,3)"))
    assert rep.details["colimit_dim"] == 2
    with pytest.raises(NotContained):
        evaluate_on_precover(f, [R.open("(0,2)")], R.open("(0,4)"))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=8)
def test_extend_from_basis_random(seed):
    rng = random.Random(seed)
    f, amb, pre = gen.random_basis_instance(rng)
    ext = extend_from_basis(f, amb, constructible=True)
    plain = extend_from_basis(f, amb, constructible=False)
    for u in amb:
        assert ext.value(u).dim == plain.value(u).dim
    for u, cover in pre:
        assert evaluate_on_precover(ext, cover, u).comparison.is_iso()


def test_disjoint_completion():
    un = Universe.parse(R, ["(0,1)", "(2,3)", "(4,5)", "(0,1)+(2,3)", "(0,1)+(4,5)", "(2,3)+(4,5)",
                            "(0,1)+(2,3)+(4,5)", "(0,3)", "(0,3)+(4,5)"])
    f = from_interval_algebra(truncated_poly(2), un)
    g = extend_disjoint_completion(f)
    assert g.value(R.open("(0,1)+(2,3)+(4,5)")).dim == 8
    assert g.value(R.open("(0,3)+(4,5)")).dim == 4
    assert check_decomposition_independence(g, g.universe, R.open("(0,1)+(2,3)+(4,5)")) == 10
    assert check_multiplicativity(g).ok
    assert same_algebra(add_empty(strip_empty(g)), g, max_arity=2) is None


def test_disjoint_completion_needs_decomposable_family():
    un = Universe.parse(R, ["(0,1)+(2,3)"])
    with pytest.raises(NoDecompositionListed):
        extend_disjoint_completion(from_interval_algebra(ground_field(), un))


def test_glue_rejects_mismatch():
    u1 = Universe.parse(R, ["(0,1)", "(1,2)"])
    u2 = Universe.parse(R, ["(1,2)", "(2,3)"])
    f1 = from_interval_algebra(truncated_poly(2), u1)
    f2 = from_interval_algebra(ground_field(), u2)
    with pytest.raises(OverlapMismatch):
        glue_from_cover([(R.open("(0,2)"), f1), (R.open("(1,3)"), f2)])
    g = glue_from_cover([(R.open("(0,2)"), f1),
                         (R.open("(1,3)"), from_interval_algebra(truncated_poly(2), u2))])
    assert same_algebra(restrict(g, u1), f1) is None


@pytest.mark.parametrize("k", [1, 2, 3])
def test_cone_round_trip_small(k):
    rng = random.Random(k)
    for _ in range(2):
        data = random_cone_data(k, rng, 2)
        f = cone_transform(data, "assemble")
        assert cone_transform(f, "decompose") == data
        assert check_multiplicativity(f).ok


def test_cone_k2_matches_bimodule_line():
    bm = regular_bimodule(truncated_poly(2))
    from factalg.prefact import from_bimodule_data
    un = cone_universe(2, space=R0)
    assert same_algebra(assemble(from_bimodule_data(bm), un), from_bimodule(bm, un), 2) is None


def test_restriction_transport_and_tensors():
    un = grid_universe(R, [0, 1, 2])
    f = from_interval_algebra(truncated_poly(2), un)
    r = transport(f, "restrict", R.open("(0,1)"))
    assert len(r.universe) == 2            # (0,1) and the empty open
    t = tensor_product(f, from_interval_algebra(matrix_algebra(2), un))
    assert t.value(R.open("(0,2)")).dim == 8
    with pytest.raises(ValueError):
        transport(f, "sideways", None)


def test_regular_modules_tensor_to_algebra():
    a = upper_triangular(2)
    assert bar_relative_tensor(regular_right(a), a, regular_left(a)).obj.dim == a.dim
