"""Finite cubes of sets and of dendroidal sets: restriction and back faces,
latching maps, very cofibrant cubes and the latching pushout.

A ``beta``-cube assigns a level to every subset ``I`` of ``{0..beta-1}``
together with maps ``F(J) -> F(I)`` for ``I <= J``.  A level is a dict from
keys to tuples of items: a single key ``"*"`` for a plain set, one key per
tree (its canonical code) for a dendroidal set.  Transports are stored for
covering pairs ``J = I + {j}`` and composed along chains.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .dendroidal import (Report, PosetOperad, Tree, tree_sort_key, enumerate_trees, fixed_automorphism,
                         intersection_of, nerve_colorings, restricted_sieve)
from .errors import BadConfiguration, IncoherentDiagram
from .finposet import FinPoset, SetDiagram, UnionFind, set_colimit
from .openoperad import Chart
from .stratline import Universe

PLAIN = "*"


def subsets_of(xs) -> list:
    xs = sorted(xs)
    return [frozenset(c) for r in range(len(xs) + 1) for c in itertools.combinations(xs, r)]


class FinCube:
    def __init__(self, beta: int, levels: dict, transports: dict, trees: dict | None = None, check: bool = True):
        self.beta = beta
        self.trees = trees                     # key -> Tree for dendroidal levels
        self.levels = {}
        for I in subsets_of(range(beta)):
            lv = levels.get(I, {})
            self.levels[I] = {k: tuple(v) for k, v in lv.items()}
        keys = {k for lv in self.levels.values() for k in lv}
        if trees is not None:
            keys |= set(trees)
            self.keys = sorted(keys, key=lambda k: tree_sort_key(trees[k]))
        else:
            self.keys = sorted(keys, key=str)
        self.transports = {}
        for J in self.levels:
            for j in J:
                I = J - {j}
                t = transports.get((J, I), {})
                for k in self.keys:
                    src = self.levels[J].get(k, ())
                    m = dict(t.get(k, {}))
                    tgt = set(self.levels[I].get(k, ()))
                    for x in src:
                        if x not in m or m[x] not in tgt:
                            raise IncoherentDiagram(f"transport {sorted(J)} -> {sorted(I)} undefined at {x!r}")
                    self.transports[(J, I, k)] = m
        if check:
            self.check_coherent()

    @property
    def is_dendroidal(self) -> bool:
        return self.trees is not None

    def level(self, I, key=PLAIN) -> tuple:
        return self.levels[frozenset(I)].get(key, ())

    def transport(self, J, I, key=PLAIN) -> dict:
        """Composite ``F(J) -> F(I)`` along removing the elements of ``J - I`` in order."""
        J, I = frozenset(J), frozenset(I)
        assert I <= J
        m = {x: x for x in self.level(J, key)}
        cur = J
        for j in sorted(J - I):
            step = self.transports[(cur, cur - {j}, key)]
            m = {x: step[y] for x, y in m.items()}
            cur = cur - {j}
        return m

    def check_coherent(self):
        for J in self.levels:
            for a, b in itertools.combinations(sorted(J), 2):
                for k in self.keys:
                    one = self.transports[(J, J - {a}, k)]
                    one = {x: self.transports[(J - {a}, J - {a, b}, k)][y] for x, y in one.items()}
                    two = self.transports[(J, J - {b}, k)]
                    two = {x: self.transports[(J - {b}, J - {a, b}, k)][y] for x, y in two.items()}
                    if one != two:
                        raise IncoherentDiagram(f"square at {sorted(J)} over {a},{b} does not commute",
                                                witness=(J, a, b, k))

    def sizes(self) -> dict:
        return {tuple(sorted(I)): sum(len(v) for v in lv.values()) for I, lv in self.levels.items()}


# operators ------------------------------------------------------------------------------

def _reindex(c: FinCube, beta: int, where) -> FinCube:
    """The cube ``I -> F(where(I))`` for an injective, union-preserving ``where``."""
    levels, transports = {}, {}
    for I in subsets_of(range(beta)):
        levels[I] = c.levels[where(I)]
        for j in I:
            transports[(I, I - {j})] = {k: c.transport(where(I), where(I - {j}), k) for k in c.keys}
    return FinCube(beta, levels, transports, c.trees, check=False)


def restrict(c: FinCube, S, reembed: bool = False) -> FinCube:
    """Precompose with ``P(|S|) = P(S) -> P(beta)``.

    With ``reembed`` the result is a ``beta``-cube again, empty away from ``S``.
    """
    S = sorted(S)
    if any(s not in range(c.beta) for s in S):
        raise BadConfiguration(f"{S} is not a subset of {c.beta}")
    if not reembed:
        return _reindex(c, len(S), lambda I: frozenset(S[i] for i in I))
    levels, transports = {}, {}
    for I in subsets_of(range(c.beta)):
        inside = I <= set(S)
        levels[I] = c.levels[I] if inside else {}
        for j in I:
            if inside:
                transports[(I, I - {j})] = {k: c.transport(I, I - {j}, k) for k in c.keys}
    return FinCube(c.beta, levels, transports, c.trees, check=False)


def back_face(c: FinCube, alpha: int) -> FinCube:
    """The ``alpha``-cube ``I -> F(I + {alpha})``."""
    if not 0 <= alpha < c.beta:
        raise BadConfiguration(f"alpha={alpha} outside the cube")
    return _reindex(c, alpha, lambda I: I | {alpha})


def front_face(c: FinCube, alpha: int) -> FinCube:
    return restrict(c, range(alpha))


def cube_operator(c: FinCube, mode: str, arg, reembed: bool = False) -> FinCube:
    if mode == "restrict":
        return restrict(c, arg, reembed)
    if mode == "back_face":
        return back_face(c, arg)
    raise BadConfiguration(f"unknown cube operator {mode!r}")


# latching -------------------------------------------------------------------------------

@dataclass
class Latching:
    S: frozenset
    I: frozenset
    index: list                 # the subsets J with S >= J > I
    classes: dict               # key -> list of classes, each a frozenset of (J, x)
    where: dict                 # key -> {(J, x): class index}
    maps: dict                  # key -> {class index: item of F(I)}, None if ill-defined

    def size(self, key=PLAIN) -> int:
        return len(self.classes.get(key, ()))

    def total(self) -> int:
        return sum(len(v) for v in self.classes.values())

    def is_injective(self, key=PLAIN) -> bool:
        m = self.maps[key]
        return m is not None and len(set(m.values())) == len(m)


def _colimit(c: FinCube, index: list, key) -> tuple:
    """Set colimit of ``F`` over ``index`` (ordered by reverse inclusion)."""
    uf = UnionFind((J, x) for J in index for x in c.level(J, key))
    have = set(index)
    for J in index:
        for j in J:
            I = J - {j}
            if I in have:
                for x, y in c.transports[(J, I, key)].items():
                    uf.union((J, x), (I, y))
    classes = [frozenset(cl) for cl in uf.classes()]
    classes.sort(key=lambda cl: sorted((sorted(J), repr(x)) for J, x in cl))
    where = {p: n for n, cl in enumerate(classes) for p in cl}
    return classes, where


def latching(c: FinCube, S, I) -> Latching:
    """Colimit of ``F(J)`` over ``S >= J > I`` with its map to ``F(I)``."""
    S, I = frozenset(S), frozenset(I)
    if not I <= S:
        raise BadConfiguration(f"{sorted(I)} is not inside {sorted(S)}")
    index = [J for J in subsets_of(S) if I < J]
    classes, where, maps = {}, {}, {}
    for k in c.keys:
        cl, wh = _colimit(c, index, k)
        classes[k], where[k] = cl, wh
        m = {}
        for n, members in enumerate(cl):
            images = {c.transport(J, I, k)[x] for J, x in members}
            if len(images) != 1:
                m = None
                break
            m[n] = images.pop()
        maps[k] = m
    return Latching(S, I, index, classes, where, maps)


def is_normal_level(c: FinCube, I):
    """First ``(key, item, automorphism)`` fixed by a tree automorphism, or None."""
    if not c.is_dendroidal:
        return None
    for k in c.keys:
        t = c.trees[k]
        for x in c.level(I, k):
            a = fixed_automorphism(t, x)
            if a is not None:
                return (k, x, a)
    return None


def is_very_cofibrant(c: FinCube) -> Report:
    """Every restricted latching map is levelwise injective, and for
    dendroidal cubes every level is normal."""
    fails, checked = [], 0
    for I in subsets_of(range(c.beta)):
        w = is_normal_level(c, I)
        if w is not None:
            fails.append(("not normal", tuple(sorted(I)), w[0], w[1]))
    for S in subsets_of(range(c.beta)):
        for I in subsets_of(S):
            lt = latching(c, S, I)
            for k in c.keys:
                checked += 1
                if not lt.is_injective(k):
                    fails.append(("latching not injective", tuple(sorted(S)), tuple(sorted(I)), k))
    return Report("very-cofibrant", not fails, checked, fails, {"beta": c.beta})


# the latching pushout -----------------------------------------------------------------------

def verify_pushout_clatch(c: FinCube, alpha: int) -> Report:
    """Check the natural square

        colim_{alpha >= K > I} F(K + a)  ->  colim_{alpha >= J > I} F(J)
                     |                                   |
              F(I + a)           ->          colim_{alpha+1 >= J > I} F(J)

    is a pushout of sets at every ``I <= alpha`` and key, where ``a`` is the
    element ``alpha``.  When ``c`` is very cofibrant the vertical maps must
    also be injective.
    """
    if not 0 <= alpha < c.beta:
        raise BadConfiguration(f"alpha={alpha} outside the cube")
    a = frozenset([alpha])
    low = frozenset(range(alpha))
    high = low | a
    vc = is_very_cofibrant(c).ok
    fails, checked = [], 0
    for I in subsets_of(low):
        tl_index = [K | a for K in subsets_of(low) if I < K]
        tr_index = [J for J in subsets_of(low) if I < J]
        br_index = [J for J in subsets_of(high) if I < J]
        for k in c.keys:
            checked += 1
            tl_cl, tl_w = _colimit(c, tl_index, k)
            tr_cl, tr_w = _colimit(c, tr_index, k)
            br_cl, br_w = _colimit(c, br_index, k)
            bl = c.level(I | a, k)
            # the two maps out of the top left corner, computed on representatives
            to_tr, to_bl = {}, {}
            ok = True
            for n, members in enumerate(tl_cl):
                r = {tr_w[(J - a, c.transports[(J, J - a, k)][x])] for J, x in members}
                s = {c.transport(J, I | a, k)[x] for J, x in members}
                if len(r) != 1 or len(s) != 1:
                    ok = False
                    break
                to_tr[n], to_bl[n] = r.pop(), s.pop()
            if not ok:
                fails.append(("top-left maps ill-defined", tuple(sorted(I)), k))
                continue
            span = FinPoset(["TL", "TR", "BL"], [("TL", "TR"), ("TL", "BL")])
            d = SetDiagram(span, {"TL": range(len(tl_cl)), "TR": range(len(tr_cl)), "BL": bl},
                           {("TL", "TR"): to_tr, ("TL", "BL"): to_bl}, check=False)
            po = set_colimit(d)
            gap = {}
            for n in range(len(tr_cl)):
                J, x = next(iter(tr_cl[n]))
                gap.setdefault(po.class_of("TR", n), set()).add(br_w[(J, x)])
            for x in bl:
                gap.setdefault(po.class_of("BL", x), set()).add(br_w[(I | a, x)])
            images = [next(iter(v)) for v in gap.values() if len(v) == 1]
            if any(len(v) != 1 for v in gap.values()) or len(gap) != len(po) \
                    or sorted(images) != list(range(len(br_cl))):
                fails.append(("not a pushout", tuple(sorted(I)), k, len(po), len(br_cl)))
            if vc:
                left_inj = len(set(to_bl.values())) == len(to_bl)
                right = [br_w[next(iter(tr_cl[n]))] for n in range(len(tr_cl))]
                if not left_inj or len(set(right)) != len(right):
                    fails.append(("vertical map not injective", tuple(sorted(I)), k))
    return Report("pushout-clatch", not fails, checked, fails, {"alpha": alpha, "very_cofibrant": vc})


def verify_shift_identity(c: FinCube, alpha: int) -> Report:
    """Back face of the ``(alpha+1)``-latching cube against the
    ``alpha``-latching cube of the back face, matched by ``K -> K + {alpha}``."""
    face = back_face(c, alpha)
    a = frozenset([alpha])
    fails, checked = [], 0
    for I in subsets_of(range(alpha)):
        one = latching(c, range(alpha + 1), I | a)
        two = latching(face, range(alpha), I)
        for k in c.keys:
            checked += 1
            image = {n: frozenset((K | a, x) for K, x in cl) for n, cl in enumerate(two.classes[k])}
            if set(image.values()) != set(one.classes[k]):
                fails.append(("classes differ", tuple(sorted(I)), k))
    return Report("shift-identity", not fails, checked, fails, {"alpha": alpha})


# constructions ------------------------------------------------------------------------------

def plain_cube(beta: int, sets: dict, maps: dict) -> FinCube:
    """From ``sets[I]`` (iterables) and ``maps[(J, I)]`` on covering pairs (dicts)."""
    levels = {frozenset(I): {PLAIN: tuple(v)} for I, v in sets.items()}
    tr = {(frozenset(J), frozenset(I)): {PLAIN: m} for (J, I), m in maps.items()}
    return FinCube(beta, levels, tr)


def random_cube(beta: int, rng: random.Random, n_points: int = 6, n_pairs: int = 3) -> FinCube:
    """A random coherent cube of finite sets.

    Points ``x`` live over the subsets of a random ``A_x``; a random family of
    pairs gets identified over subsets of their own random ``B_p``.  So ``F(I)``
    is a quotient of ``{x : I <= A_x}`` and all squares commute.
    """
    full = list(range(beta))
    A = [frozenset(i for i in full if rng.random() < 0.7) for _ in range(n_points)]
    pairs = [(rng.randrange(n_points), rng.randrange(n_points), frozenset(i for i in full if rng.random() < 0.5))
             for _ in range(n_pairs)]
    cls = {}
    for I in subsets_of(full):
        pts = [x for x in range(n_points) if I <= A[x]]
        uf = UnionFind(pts)
        for x, y, B in pairs:
            if I <= B and x in uf.parent and y in uf.parent:
                uf.union(x, y)
        cls[I] = {x: min(cl) for cl in uf.classes() for x in cl}
    levels = {I: {PLAIN: sorted(set(m.values()))} for I, m in cls.items()}
    tr = {}
    for J in cls:
        for j in J:
            I = J - {j}
            tr[(J, I)] = {PLAIN: {r: cls[I][r] for r in levels[J][PLAIN]}}
    return FinCube(beta, levels, tr)


def intersection_cube(beta: int, rng: random.Random, n_points: int = 8) -> FinCube:
    """Subsets of a common set with ``F(I + J) = F(I) & F(J)`` and inclusions as transports."""
    full = list(range(beta))
    A = [frozenset(i for i in full if rng.random() < 0.6) for _ in range(n_points)]
    levels = {I: {PLAIN: [x for x in range(n_points) if I <= A[x]]} for I in subsets_of(full)}
    tr = {(J, J - {j}): {PLAIN: {x: x for x in levels[J][PLAIN]}} for J in levels for j in J}
    return FinCube(beta, levels, tr)


def sieve_nerve_cube(universe: Universe, cover, max_vertices: int = 5, max_arity: int | None = None,
                     with_empty: bool = False, trees=None) -> FinCube:
    """Nerves of the restricted sieves of the intersections of a cover.

    ``F(I)`` for nonempty ``I`` is the nerve of the listed nonempty opens
    inside the intersection of the ``U_i``, ``F(empty)`` the nerve of those
    inside some ``U_i``.  With ``with_empty`` the empty open is a colour of
    every level.
    """
    cover = list(cover)
    beta = len(cover)
    members = sorted({u for w in cover for u in restricted_sieve(universe, w)}, key=lambda u: u.sort_key())
    if with_empty:
        members = [universe.space.empty()] + members
    chart = Chart(members, None)
    empty = [chart.index[universe.space.empty()]] if with_empty else []

    def allowed(I):
        if not I:
            return list(range(len(chart)))
        w = intersection_of(cover, I)
        return empty + [chart.index[u] for u in restricted_sieve(universe, w) if u in chart.index]

    ops = {I: PosetOperad(chart, allowed(I)) for I in subsets_of(range(beta))}
    if max_arity is None:
        if with_empty:
            raise BadConfiguration("an arity bound is needed when the empty open is a colour")
        max_arity = ops[frozenset()].max_arity()
    trees = trees if trees is not None else enumerate_trees(max_vertices, max_arity)
    tmap = {t.code: t for t in trees}
    levels = {I: {t.code: nerve_colorings(op, t) for t in trees} for I, op in ops.items()}
    tr = {(J, J - {j}): {k: {x: x for x in levels[J][k]} for k in tmap} for J in levels for j in J}
    cube = FinCube(beta, levels, tr, trees=tmap, check=False)
    cube.chart = chart
    return cube
