"""Prefactorization algebras built from algebraic data on lines and circles."""
from __future__ import annotations

from fractions import Fraction

from ..errors import BadConfiguration, MarkedOpenInUniverse, MissingPoint
from ..fdvect import LinMap, permute_factors, tensor
from ..stratline import INF, Circle, Line, OpenSet, Star, Universe, classify_multidisk
from .algebra import Algebra, Bimodule
from .core import ComponentwiseAlg


def locate(c: OpenSet) -> tuple:
    """Where a connected open sits: ``(ci, kind, data)``.

    ``kind`` is ``line`` (data = line-coordinate interval), ``circle`` (arc or
    ``None`` for the full circle), ``vertex`` or ``ray`` (data = ``(r, (a, b))``).
    """
    for ci, (comp, p) in enumerate(zip(c.space.components, c.pieces)):
        if isinstance(comp, Line):
            if p:
                return ci, "line", p[0]
        elif isinstance(comp, Circle):
            if p.full:
                return ci, "circle", None
            if p.arcs:
                return ci, "circle", p.arcs[0]
        else:
            if not (p.vertex or any(p.rays)):
                continue
            if comp.rays == 2:
                return ci, "line", c.line_coords(ci)[0]
            if p.vertex:
                return ci, "vertex", None
            for r, ivs in enumerate(p.rays):
                if ivs:
                    return ci, "ray", (r, ivs[0])
    raise BadConfiguration("empty open has no location")


def position(c: OpenSet, d: OpenSet):
    """Sort key of a connected ``c`` inside a connected ``d`` along the orientation."""
    _, kind, data = locate(c)
    if kind == "line":
        return data[0]
    if kind == "ray":
        return data[1][0]
    if kind == "vertex":
        return -INF
    _, _, outer = locate(d)
    L = c.space.components[locate(c)[0]].length
    s = data[0]
    if outer is not None and s < outer[0]:
        s += L
    return s


def sort_by_position(parts: tuple, d: OpenSet) -> list:
    return sorted(range(len(parts)), key=lambda i: position(parts[i], d))


def _ordered(vals, parts, d, f):
    """``f(order)`` precomposed with the permutation into position order."""
    order = sort_by_position(parts, d)
    m = f([parts[i] for i in order])
    return m @ permute_factors(vals, order)


class IntervalAlgebra(ComponentwiseAlg):
    """Every unmarked interval carries ``A``; inclusions multiply in order."""

    def __init__(self, alg: Algebra, universe: Universe, name: str = ""):
        super().__init__(universe, name or f"Int({alg.name})")
        self.alg = alg
        for u in universe:
            cl = classify_multidisk(u)
            if not cl.is_multidisk or any(t.kind != "R" for t in cl.types):
                raise MarkedOpenInUniverse(f"{u} is not an unmarked multidisk", witness=u)

    def comp_value(self, c):
        return self.alg.carrier

    def connected_op(self, parts, d):
        vals = [self.alg.carrier] * len(parts)
        return _ordered(vals, parts, d, lambda ps: self.alg.power_mult(len(ps)))


def from_interval_algebra(alg: Algebra, universe: Universe) -> IntervalAlgebra:
    return IntervalAlgebra(alg, universe)


class BimoduleAlgebra(ComponentwiseAlg):
    """Left algebra left of the mark, module across it, right algebra right of it."""

    def __init__(self, bm: Bimodule, universe: Universe, mark=None, name: str = ""):
        super().__init__(universe, name or "Bimod")
        if bm.point is None:
            raise MissingPoint("the bimodule needs a point")
        self.bm = bm
        space = universe.space
        if len(space.components) != 1 or not space.is_line_like(0):
            raise BadConfiguration("a bimodule algebra lives on a marked line")
        marks = space.line_marks(0)
        if mark is None:
            if len(marks) != 1:
                raise BadConfiguration("name the mark when the line has several")
            mark = marks[0]
        mark = Fraction(mark)
        if mark not in marks:
            raise BadConfiguration(f"{mark} is not a mark of {space}")
        self.mark = mark
        self.others = [m for m in marks if m != mark]
        for u in universe:
            for a, b in u.line_coords(0):
                if any(a < m < b for m in self.others):
                    raise MarkedOpenInUniverse(f"{u} meets another mark", witness=u)

    def _side(self, c) -> str:
        (a, b), = c.line_coords(0)
        if a < self.mark < b:
            return "mid"
        return "left" if b <= self.mark else "right"

    def comp_value(self, c):
        side = self._side(c)
        bm = self.bm
        return bm.carrier if side == "mid" else (bm.left.carrier if side == "left" else bm.right.carrier)

    def connected_op(self, parts, d):
        vals = [self.comp_value(p) for p in parts]
        side = self._side(d)
        bm = self.bm
        if side != "mid":
            alg = bm.left if side == "left" else bm.right
            return _ordered(vals, parts, d, lambda ps: alg.power_mult(len(ps)))

        def build(ps):
            sides = [self._side(p) for p in ps]
            nl = sides.count("left")
            nr = sides.count("right")
            mid = LinMap.identity(bm.carrier) if "mid" in sides else bm.point
            return bm.act @ tensor(bm.left.power_mult(nl), mid, bm.right.power_mult(nr))
        return _ordered(vals, parts, d, build)


def from_bimodule(bm: Bimodule, universe: Universe, mark=None) -> BimoduleAlgebra:
    return BimoduleAlgebra(bm, universe, mark)
