"""Global sections computed from glued and pushed-forward algebras.

``glued_interval_sections`` glues a (Q, A)-bimodule algebra on ``(0,3)``
with an (A, Q)-bimodule algebra on ``(2,5)`` of the line marked at 1 and 4,
completes it under disjoint unions and takes the colimit over the opens that
remove one or both of two points of the overlap.  The result is compared with
the relative tensor product ``M1 (x)_A M2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..fdvect import LinMap, Quotient, VectColimit, VectObj, induced_map, tensor
from ..stratline import (CIRCLE, LINE, CircleVProj, Universe, close_universe, line_open)
from .algebra import Algebra, Bimodule, LeftModule, RightModule, bar_relative_tensor, ground_field
from .checks import evaluate_on_family
from .constructors import from_bimodule, from_interval_algebra
from .extend import extend_disjoint_completion, glue_from_cover
from .transport import pushforward


def right_module_bimodule(m: RightModule, point) -> Bimodule:
    """A right ``A``-module as a ``(Q, A)``-bimodule."""
    q = ground_field()
    act = LinMap(VectObj(m.dim * m.alg.dim), m.carrier, m.act.mat)
    return Bimodule(q, m.dim, m.alg, act, point)


def left_module_bimodule(m: LeftModule, point) -> Bimodule:
    q = ground_field()
    act = LinMap(VectObj(m.dim * m.alg.dim), m.carrier, m.act.mat)
    return Bimodule(m.alg, m.dim, q, act, point)


def _intervals(space, grid, avoid):
    out = []
    for i, a in enumerate(grid):
        for b in grid[i + 1:]:
            if not (a < avoid < b):
                out.append(line_open(space, [(a, b)]))
    return out


@dataclass
class GluedSetup:
    space: object
    pieces: list            # [(U_i, algebra)]
    glued: object
    completion: object
    family: list            # [X - p0, X - p1, X - {p0, p1}]


def glue_setup(m1: RightModule, m2: LeftModule, point1=None, point2=None) -> GluedSetup:
    X = LINE(1, 4)
    p1 = point1 if point1 is not None else [1] + [0] * (m1.dim - 1)
    p2 = point2 if point2 is not None else [0] * (m2.dim - 1) + [1]
    g1 = [Fraction(x) for x in ("0", "1/2", "2", "5/2", "3")]
    g2 = [Fraction(x) for x in ("2", "5/2", "3", "9/2", "5")]
    u1 = close_universe(Universe(X, _intervals(X, g1, 4)), "disjoint_unions")
    u2 = close_universe(Universe(X, _intervals(X, g2, 1)), "disjoint_unions")
    f1 = from_bimodule(right_module_bimodule(m1, p1), u1, mark=1)
    f2 = from_bimodule(left_module_bimodule(m2, p2), u2, mark=4)
    pieces = [(X.open("(0,3)"), f1), (X.open("(2,5)"), f2)]
    glued = glue_from_cover(pieces, max_arity=2)
    family = [X.open("(0,5/2) + (5/2,5)"), X.open("(0,2) + (2,5)"), X.open("(0,2) + (2,5/2) + (5/2,5)")]
    target = Universe(X, list(glued.universe) + family)
    completion = extend_disjoint_completion(glued, target, check=False)
    return GluedSetup(X, pieces, glued, completion, family)


@dataclass
class GluedSections:
    colimit: VectColimit
    relative: Quotient
    comparison: LinMap        # colimit -> relative tensor product

    @property
    def is_iso(self) -> bool:
        return self.comparison.is_iso()


def glued_interval_sections(m1: RightModule, a: Algebra, m2: LeftModule, setup: GluedSetup | None = None
                            ) -> GluedSections:
    assert m1.alg == a and m2.alg == a
    setup = setup or glue_setup(m1, m2)
    d = setup.completion
    colim, _ = evaluate_on_family(d, setup.family)
    rel = bar_relative_tensor(m1, a, m2)
    one, two, three = setup.family
    # removing both points leaves M1 (x) A (x) M2; the action on M1 merges (2,5/2) leftwards
    merge = tensor(m1.act, LinMap.identity(m2.carrier))
    cocone = {one: rel.proj, two: rel.proj, three: rel.proj @ merge}
    comp = induced_map(colim, cocone, rel.obj)
    return GluedSections(colim, rel, comp)


def circle_sections_via_pushforward(a: Algebra) -> tuple:
    """Collapse the circle of circumference 2 onto ``[0, 1]`` and glue the
    neighbourhoods of the two poles along their overlap.

    Returns the colimit object of ``A <- A (x) A -> A``.
    """
    C = CIRCLE(2)
    arcs = ["(1/3,2/3)", "(4/3,5/3)", "(1/3,2/3) + (4/3,5/3)", "(4/3,8/3)", "(1/3,5/3)"]
    circle = from_interval_algebra(a, Universe.parse(C, arcs))
    proj = CircleVProj(1, 0)
    L = proj.target
    target = Universe.parse(L, ["(-1,2/3)", "(1/3,2)", "(1/3,2/3)"])
    push = pushforward(circle, proj, target)
    colim, _ = evaluate_on_family(push, list(target))
    return colim, push
