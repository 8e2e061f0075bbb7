"""Finite-dimensional associative algebras and their modules.

Elements are coordinate vectors.  Multiplication is a linear map
``A (x) A -> A`` and the unit a map ``Q -> A``.  Modules carry their action
as a single linear map, with the algebra factors in the order they act:
``A (x) M -> M`` on the left, ``M (x) A -> M`` on the right and
``A (x) M (x) B -> M`` for bimodules.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from ..errors import AxiomFailure, ModuleAxiomFailure
from ..fdvect import (UNIT, LinMap, Quotient, VectObj, cokernel, kernel, permute_factors,
                      tensor, to_fraction)


class Algebra:
    def __init__(self, dim: int, mult: LinMap, unit: LinMap, name: str = "", check: bool = True):
        self.carrier = VectObj(dim, name)
        self.dim = dim
        self.mult = mult
        self.unit = unit
        self.name = name or f"A{dim}"
        assert mult.src.dim == dim * dim and mult.dst.dim == dim
        assert unit.src.dim == 1 and unit.dst.dim == dim
        if check:
            self.check()

    def __repr__(self):
        return f"Algebra({self.name}, dim={self.dim})"

    def __eq__(self, other):
        return isinstance(other, Algebra) and self.mult == other.mult and self.unit == other.unit

    def __hash__(self):
        return hash((self.dim, self.mult))

    @property
    def one(self) -> list:
        return [self.unit.entry(i, 0) for i in range(self.dim)]

    def id(self) -> LinMap:
        return LinMap.identity(self.carrier)

    def check(self):
        a = self.id()
        if self.mult @ tensor(self.mult, a) != self.mult @ tensor(a, self.mult):
            raise AxiomFailure(f"{self.name} is not associative")
        left = self.mult @ tensor(self.unit, a)
        right = self.mult @ tensor(a, self.unit)
        if left != a or right != a:
            raise AxiomFailure(f"{self.name} is not unital")

    def multiply(self, x: Sequence, y: Sequence) -> list:
        xy = [to_fraction(p) * to_fraction(q) for p in x for q in y]
        return self.mult.apply(xy)

    def power_mult(self, n: int) -> LinMap:
        """The iterated product ``A^(x)n -> A``; the unit for ``n = 0``."""
        if n == 0:
            return self.unit
        out = self.id()
        for k in range(2, n + 1):
            out = self.mult @ tensor(out, self.id())
        return out

    def left_mult(self, x: Sequence) -> LinMap:
        """Matrix of ``y -> x y``."""
        return LinMap.from_columns(self.carrier, self.carrier,
                                   [self.multiply(x, _e(self.dim, j)) for j in range(self.dim)])

    def right_mult(self, x: Sequence) -> LinMap:
        return LinMap.from_columns(self.carrier, self.carrier,
                                   [self.multiply(_e(self.dim, j), x) for j in range(self.dim)])

    def opposite(self) -> "Algebra":
        swap = permute_factors([self.carrier, self.carrier], [1, 0])
        return Algebra(self.dim, self.mult @ swap, self.unit, self.name + "^op", check=False)

    def tensor(self, other: "Algebra") -> "Algebra":
        a, b = self.carrier, other.carrier
        mid = permute_factors([a, b, a, b], [0, 2, 1, 3])
        mult = tensor(self.mult, other.mult) @ mid
        return Algebra(self.dim * other.dim, mult, tensor(self.unit, other.unit),
                       f"{self.name}(x){other.name}", check=False)

    def is_commutative(self) -> bool:
        return self.mult == self.opposite().mult


def _e(n, j):
    return [1 if i == j else 0 for i in range(n)]


def tensor_algebras(algs: Sequence[Algebra]) -> Algebra:
    if not algs:
        return ground_field()
    out = algs[0]
    for a in algs[1:]:
        out = out.tensor(a)
    return out


def from_structure_constants(dim: int, table, unit: Sequence, name: str = "") -> Algebra:
    """``table[i][j]`` is the coordinate vector of ``e_i e_j``."""
    cols = [table[i][j] for i in range(dim) for j in range(dim)]
    mult = LinMap.from_columns(VectObj(dim * dim), VectObj(dim), cols)
    return Algebra(dim, mult, LinMap.from_columns(UNIT, VectObj(dim), [list(unit)]), name)


# a small zoo ---------------------------------------------------------------------

def ground_field() -> Algebra:
    return from_structure_constants(1, [[[1]]], [1], "Q")


def matrix_algebra(n: int) -> Algebra:
    """``M_n(Q)`` with basis ``E_ij`` at index ``i*n + j``."""
    d = n * n
    table = [[[0] * d for _ in range(d)] for _ in range(d)]
    for i, j, k, l in itertools.product(range(n), repeat=4):
        if j == k:
            table[i * n + j][k * n + l][i * n + l] = 1
    unit = [1 if i // n == i % n else 0 for i in range(d)]
    return from_structure_constants(d, table, unit, f"M{n}")


def truncated_poly(k: int) -> Algebra:
    """``Q[x]/(x^k)`` with basis ``1, x, ..., x^(k-1)``."""
    table = [[[1 if c == a + b else 0 for c in range(k)] for b in range(k)] for a in range(k)]
    return from_structure_constants(k, table, _e(k, 0), f"Q[x]/x^{k}")


def upper_triangular(n: int) -> Algebra:
    """Upper triangular ``n x n`` matrices, basis ``E_ij`` with ``i <= j`` in lexicographic order."""
    idx = [(i, j) for i in range(n) for j in range(n) if i <= j]
    pos = {p: k for k, p in enumerate(idx)}
    d = len(idx)
    table = [[[0] * d for _ in range(d)] for _ in range(d)]
    for (i, j), (k, l) in itertools.product(idx, repeat=2):
        if j == k:
            table[pos[(i, j)]][pos[(k, l)]][pos[(i, l)]] = 1
    unit = [1 if i == j else 0 for i, j in idx]
    return from_structure_constants(d, table, unit, f"T{n}")


def diagonal(n: int) -> Algebra:
    """``Q^n`` with componentwise product."""
    table = [[[1 if (a == b == c) else 0 for c in range(n)] for b in range(n)] for a in range(n)]
    return from_structure_constants(n, table, [1] * n, f"Q^{n}")


def zoo(max_dim: int = 4) -> list:
    algs = [ground_field(), truncated_poly(2), diagonal(2), truncated_poly(3), diagonal(3),
            upper_triangular(2), matrix_algebra(2)]
    return [a for a in algs if a.dim <= max_dim]


# modules --------------------------------------------------------------------------

class LeftModule:
    def __init__(self, alg: Algebra, dim: int, act: LinMap, check: bool = True):
        self.alg, self.dim, self.act = alg, dim, act
        self.carrier = VectObj(dim)
        if check:
            self.check()

    def check(self):
        a, m = self.alg, LinMap.identity(self.carrier)
        if self.act @ tensor(a.mult, m) != self.act @ tensor(a.id(), self.act):
            raise ModuleAxiomFailure("left action is not associative")
        if self.act @ tensor(a.unit, m) != m:
            raise ModuleAxiomFailure("unit does not act trivially")

    def matrix(self, x: Sequence) -> LinMap:
        """Action of ``x`` as an endomorphism."""
        xs = LinMap.from_columns(UNIT, self.alg.carrier, [list(x)])
        return self.act @ tensor(xs, LinMap.identity(self.carrier))


class RightModule:
    def __init__(self, alg: Algebra, dim: int, act: LinMap, check: bool = True):
        self.alg, self.dim, self.act = alg, dim, act
        self.carrier = VectObj(dim)
        if check:
            self.check()

    def check(self):
        a, m = self.alg, LinMap.identity(self.carrier)
        if self.act @ tensor(m, a.mult) != self.act @ tensor(self.act, a.id()):
            raise ModuleAxiomFailure("right action is not associative")
        if self.act @ tensor(m, a.unit) != m:
            raise ModuleAxiomFailure("unit does not act trivially")

    def matrix(self, x: Sequence) -> LinMap:
        xs = LinMap.from_columns(UNIT, self.alg.carrier, [list(x)])
        return self.act @ tensor(LinMap.identity(self.carrier), xs)


class Bimodule:
    """``left (x) M (x) right -> M``, optionally pointed by ``point: Q -> M``."""

    def __init__(self, left: Algebra, dim: int, right: Algebra, act: LinMap, point: Sequence | None = None,
                 check: bool = True):
        self.left, self.right, self.dim, self.act = left, right, dim, act
        self.carrier = VectObj(dim)
        self.point = None if point is None else LinMap.from_columns(UNIT, self.carrier, [list(point)])
        if check:
            self.check()

    def check(self):
        a, b, m = self.left, self.right, LinMap.identity(self.carrier)
        # sources ordered a, a', m, b', b on both sides
        if self.act @ tensor(a.mult, m, b.mult) != self.act @ tensor(a.id(), self.act, b.id()):
            raise ModuleAxiomFailure("bimodule action is not associative")
        if self.act @ tensor(a.unit, m, b.unit) != m:
            raise ModuleAxiomFailure("units do not act trivially")

    def left_module(self) -> LeftModule:
        b = self.right
        return LeftModule(self.left, self.dim, self.act @ tensor(self.left.id(), LinMap.identity(self.carrier), b.unit),
                          check=False)

    def right_module(self) -> RightModule:
        a = self.left
        return RightModule(self.right, self.dim, self.act @ tensor(a.unit, LinMap.identity(self.carrier), self.right.id()),
                           check=False)


def regular_bimodule(a: Algebra, point: Sequence | None = None) -> Bimodule:
    """``A`` acting on itself on both sides."""
    act = a.mult @ tensor(a.mult, a.id())
    return Bimodule(a, a.dim, a, act, a.one if point is None else point)


def regular_left(a: Algebra) -> LeftModule:
    return LeftModule(a, a.dim, a.mult)


def regular_right(a: Algebra) -> RightModule:
    return RightModule(a, a.dim, a.mult)


def tensor_bimodule(l: LeftModule, r: RightModule, point: Sequence | None = None) -> Bimodule:
    """``L (x) R`` with the left algebra acting on ``L`` and the right one on ``R``."""
    A, B, L, R = l.alg.carrier, r.alg.carrier, l.carrier, r.carrier
    act = tensor(l.act, r.act) @ permute_factors([A, L, R, B], [0, 1, 2, 3])
    return Bimodule(l.alg, l.dim * r.dim, r.alg, act, point)


# quotients and random modules -----------------------------------------------------

def _span_closure_left(a: Algebra, vecs: list) -> LinMap:
    """Columns spanning the left ideal generated by ``vecs``."""
    cols = [a.multiply(_e(a.dim, i), v) for v in vecs for i in range(a.dim)]
    if not cols:
        return LinMap(VectObj(0), a.carrier)
    return LinMap.from_columns(VectObj(len(cols)), a.carrier, cols)


def _quotient_action(q: Quotient, act: LinMap, left: bool, alg: Algebra) -> LinMap:
    if left:
        return q.proj @ act @ tensor(alg.id(), q.section)
    return q.proj @ act @ tensor(q.section, alg.id())


def cyclic_left_module(a: Algebra, gens: list) -> LeftModule:
    """``A / (A g_1 + ... + A g_r)``."""
    q = cokernel(_span_closure_left(a, gens))
    return LeftModule(a, q.obj.dim, _quotient_action(q, a.mult, True, a))


def cyclic_right_module(a: Algebra, gens: list) -> RightModule:
    """``A / (g_1 A + ... + g_r A)``."""
    cols = [a.multiply(v, _e(a.dim, i)) for v in gens for i in range(a.dim)]
    sub = LinMap.from_columns(VectObj(len(cols)), a.carrier, cols) if cols else LinMap(VectObj(0), a.carrier)
    q = cokernel(sub)
    return RightModule(a, q.obj.dim, _quotient_action(q, a.mult, False, a))


def random_invertible(n: int, rng: random.Random) -> LinMap:
    v = VectObj(n)
    while True:
        m = LinMap.from_rows(v, v, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)])
        if m.is_iso():
            return m


def conjugate_left(m: LeftModule, p: LinMap) -> LeftModule:
    return LeftModule(m.alg, m.dim, p @ m.act @ tensor(m.alg.id(), p.inverse()), check=False)


def conjugate_right(m: RightModule, p: LinMap) -> RightModule:
    return RightModule(m.alg, m.dim, p @ m.act @ tensor(p.inverse(), m.alg.id()), check=False)


def direct_sum_left(ms: Sequence[LeftModule]) -> LeftModule:
    from ..fdvect import block_map
    a = ms[0].alg
    total = sum(m.dim for m in ms)
    mats = []
    for s in range(a.dim):
        blocks = {(i, i): m.matrix(_e(a.dim, s)) for i, m in enumerate(ms)}
        mats.append(block_map([m.carrier for m in ms], [m.carrier for m in ms], blocks))
    # source index of e_s (x) m is s * total + m_index
    act = LinMap.from_function(VectObj(a.dim * total), VectObj(total),
                               lambda j: {i: mats[j // total].entry(i, j % total) for i in range(total)})
    return LeftModule(a, total, act, check=False)


def direct_sum_right(ms: Sequence[RightModule]) -> RightModule:
    from ..fdvect import block_map
    a = ms[0].alg
    total = sum(m.dim for m in ms)
    mats = []
    for s in range(a.dim):
        blocks = {(i, i): m.matrix(_e(a.dim, s)) for i, m in enumerate(ms)}
        mats.append(block_map([m.carrier for m in ms], [m.carrier for m in ms], blocks))
    # source index of m (x) e_s is m_index * a.dim + s
    act = LinMap.from_function(VectObj(total * a.dim), VectObj(total),
                               lambda j: {i: mats[j % a.dim].entry(i, j // a.dim) for i in range(total)})
    return RightModule(a, total, act, check=False)


def _rand_vec(n, rng):
    """Sparse small-integer vector, so quotients by it are often proper."""
    return [rng.randint(-2, 2) if rng.random() < 0.6 else 0 for _ in range(n)]


def _random_pieces(a: Algebra, rng: random.Random, max_dim: int, cyclic) -> list:
    parts, total = [], 0
    for _ in range(60):
        if total >= max_dim or (parts and rng.random() < 0.4):
            break
        gens = [_rand_vec(a.dim, rng) for _ in range(rng.randint(0, 2))]
        m = cyclic(a, gens)
        if 0 < m.dim <= max_dim - total:
            parts.append(m)
            total += m.dim
    return parts


def random_left_module(a: Algebra, rng: random.Random, max_dim: int = 4) -> LeftModule:
    """A direct sum of cyclic quotients of ``A``, in a random basis.

    May be zero-dimensional when no proper quotient fits in ``max_dim``.
    """
    parts = _random_pieces(a, rng, max_dim, cyclic_left_module)
    if not parts:
        return cyclic_left_module(a, [a.one])
    m = parts[0] if len(parts) == 1 else direct_sum_left(parts)
    out = conjugate_left(m, random_invertible(m.dim, rng))
    out.check()
    return out


def random_right_module(a: Algebra, rng: random.Random, max_dim: int = 4) -> RightModule:
    parts = _random_pieces(a, rng, max_dim, cyclic_right_module)
    if not parts:
        return cyclic_right_module(a, [a.one])
    m = parts[0] if len(parts) == 1 else direct_sum_right(parts)
    out = conjugate_right(m, random_invertible(m.dim, rng))
    out.check()
    return out


# relative tensor products -------------------------------------------------------------

def bar_relative_tensor(m1: RightModule, a: Algebra, m2: LeftModule) -> Quotient:
    """``M1 (x)_A M2`` as the coequaliser of the two actions on ``M1 (x) A (x) M2``."""
    assert m1.alg.dim == a.dim and m2.alg.dim == a.dim
    i1, i2 = LinMap.identity(m1.carrier), LinMap.identity(m2.carrier)
    d0 = tensor(m1.act, i2)
    d1 = tensor(i1, m2.act)
    return cokernel(d0 - d1)


def enveloping(a: Algebra) -> Algebra:
    """``A (x) A^op``."""
    return a.tensor(a.opposite())


def circle_sections(a: Algebra) -> Quotient:
    """Global sections over the circle: ``A (x)_{A (x) A^op} A``.

    The right action on the first copy is ``x.(p (x) q) = q x p`` and the left
    action on the second is ``(p (x) q).y = p y q``.
    """
    e = enveloping(a)
    A = a.carrier
    # right: x (x) p (x) q -> q x p, realised as mult(mult(q, x), p)
    right_act = a.mult @ tensor(a.mult, a.id()) @ permute_factors([A, A, A], [2, 0, 1])
    # left: p (x) q (x) y -> p y q
    left_act = a.mult @ tensor(a.mult, a.id()) @ permute_factors([A, A, A], [0, 2, 1])
    r = RightModule(e, a.dim, right_act)
    l = LeftModule(e, a.dim, left_act)
    return bar_relative_tensor(r, e, l)


def commutator_quotient(a: Algebra) -> Quotient:
    """``A / [A, A]`` computed from the commutators of basis vectors."""
    A = a.carrier
    comm = a.mult - a.mult @ permute_factors([A, A], [1, 0])
    return cokernel(comm)
