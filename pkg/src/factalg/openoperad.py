"""Tuples of opens and the morphisms between them.

A morphism ``f: (r_1..r_m) -> (b_1..b_n)`` is a pointed map of index sets
(``None`` is the base point) such that the opens sent to each ``b_j`` are
pairwise disjoint and contained in ``b_j``.  Active morphisms send nothing to
the base point; inert ones are bijective onto the targets on the nose.

Cocartesian morphisms into a single open ``b`` correspond to partitions of
the components of ``b``; ``encode_cocart`` and ``decode`` make that explicit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BlockNotInUniverse, ComplementNotInUniverse, InvalidComposite, NotAMorphism
from .finposet import UnionFind
from .stratline import OpenSet, StarPiece, Universe, union_of


class OTuple:
    """An ordered tuple of opens of one space."""

    __slots__ = ("opens",)

    def __init__(self, opens: Iterable[OpenSet]):
        self.opens = tuple(opens)

    def __len__(self):
        return len(self.opens)

    def __getitem__(self, i):
        return self.opens[i]

    def __iter__(self):
        return iter(self.opens)

    def __eq__(self, other):
        return isinstance(other, OTuple) and self.opens == other.opens

    def __hash__(self):
        return hash(self.opens)

    def __repr__(self):
        return "(" + ", ".join(str(u) for u in self.opens) + ")"


class OMorphism:
    def __init__(self, src: OTuple | Sequence, dst: OTuple | Sequence, f: Sequence):
        self.src = src if isinstance(src, OTuple) else OTuple(src)
        self.dst = dst if isinstance(dst, OTuple) else OTuple(dst)
        self.f = tuple(f)
        if len(self.f) != len(self.src):
            raise NotAMorphism("the index map must be defined on every source index")
        for i, j in enumerate(self.f):
            if j is not None and not (0 <= j < len(self.dst)):
                raise NotAMorphism(f"index {i} maps outside the target")
        for j, b in enumerate(self.dst):
            fib = self.fiber(j)
            for i in fib:
                if not self.src[i].issubset(b):
                    raise NotAMorphism(f"{self.src[i]} is not inside {b}")
            for i, k in itertools.combinations(fib, 2):
                if not self.src[i].disjoint(self.src[k]):
                    raise NotAMorphism(f"{self.src[i]} and {self.src[k]} overlap over {b}")

    def fiber(self, j) -> tuple:
        return tuple(i for i, t in enumerate(self.f) if t == j)

    def __eq__(self, other):
        return isinstance(other, OMorphism) and (self.src, self.dst, self.f) == (other.src, other.dst, other.f)

    def __hash__(self):
        return hash((self.src, self.dst, self.f))

    def __repr__(self):
        return f"OMorphism({self.src} -> {self.dst} via {self.f})"

    def is_active(self) -> bool:
        return all(j is not None for j in self.f)

    def is_inert(self) -> bool:
        hit = [j for j in self.f if j is not None]
        if sorted(hit) != list(range(len(self.dst))):
            return False
        return all(j is None or self.src[i] == self.dst[j] for i, j in enumerate(self.f))

    def factor(self) -> tuple:
        """``(inert, active)`` with ``self == compose(active, inert)``."""
        keep = [i for i, j in enumerate(self.f) if j is not None]
        mid = OTuple(self.src[i] for i in keep)
        inert = OMorphism(self.src, mid, [keep.index(i) if i in keep else None for i in range(len(self.src))])
        active = OMorphism(mid, self.dst, [self.f[i] for i in keep])
        return inert, active


def identity(t: OTuple) -> OMorphism:
    return OMorphism(t, t, range(len(t)))


def compose(g: OMorphism, f: OMorphism) -> OMorphism:
    """``g`` after ``f``."""
    if f.dst != g.src:
        raise InvalidComposite(f"target {f.dst} of the first map is not the source {g.src} of the second")
    return OMorphism(f.src, g.dst, [None if j is None else g.f[j] for j in f.f])


def operation(sources: Sequence[OpenSet], target: OpenSet) -> OMorphism:
    """The active morphism ``(sources) -> (target,)``."""
    return OMorphism(OTuple(sources), OTuple([target]), [0] * len(sources))


def is_cocartesian(f: OMorphism, un: Universe | None = None) -> bool:
    """Fibres exactly tile their targets (and, with ``un``, the tiles are listed)."""
    for j, b in enumerate(f.dst):
        fib = [f.src[i] for i in f.fiber(j)]
        if union_of(b.space, fib) != b:
            return False
        if un is not None and b not in un:
            return False
    if un is not None:
        if any(u not in un for u in f.src):
            return False
    return True


# partitions of components ---------------------------------------------------------

@dataclass(frozen=True)
class EqRel:
    """An equivalence relation on ``range(n)`` stored as sorted blocks."""

    n: int
    blocks: tuple

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "EqRel":
        bl = tuple(sorted(tuple(sorted(b)) for b in blocks if b))
        if sorted(x for b in bl for x in b) != list(range(n)):
            raise ValueError("blocks must partition the index set")
        return cls(n, bl)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple]) -> "EqRel":
        uf = UnionFind(range(n))
        for a, b in pairs:
            uf.union(a, b)
        return cls.from_blocks(n, uf.classes())

    def block_of(self, i) -> int:
        for k, b in enumerate(self.blocks):
            if i in b:
                return k
        raise KeyError(i)

    def refines(self, other: "EqRel") -> bool:
        """``self`` is finer: each block lies inside a block of ``other``."""
        return all(len({other.block_of(i) for i in b}) == 1 for b in self.blocks)

    def meet(self, other: "EqRel") -> "EqRel":
        out = []
        for b in self.blocks:
            for c in other.blocks:
                x = set(b) & set(c)
                if x:
                    out.append(x)
        return EqRel.from_blocks(self.n, out)

    def join(self, other: "EqRel") -> "EqRel":
        pairs = [(b[0], x) for b in self.blocks + other.blocks for x in b]
        return EqRel.from_pairs(self.n, pairs)

    def __len__(self):
        return len(self.blocks)


def _component_index(b: OpenSet, u: OpenSet) -> list:
    comps = b.components()
    return [k for k, c in enumerate(comps) if not (c & u).is_empty()]


def encode_active(alpha: OMorphism) -> EqRel:
    """The relation on components of the target generated by 'meets a common source'."""
    if len(alpha.dst) != 1 or not alpha.is_active():
        raise NotAMorphism("expected an active morphism into a single open")
    b = alpha.dst[0]
    n = len(b.components())
    pairs = []
    for r in alpha.src:
        hit = _component_index(b, r)
        pairs += [(hit[0], x) for x in hit[1:]] if hit else []
    return EqRel.from_pairs(n, pairs)


def encode_cocart(f: OMorphism) -> EqRel:
    """Partition of the target's components by which source covers them."""
    if not is_cocartesian(f) or len(f.dst) != 1:
        raise NotAMorphism("expected a cocartesian morphism into a single open")
    return encode_active(f)


def decode(rel: EqRel, b: OpenSet) -> OMorphism:
    """The cocartesian morphism whose sources are the unions of the blocks."""
    comps = b.components()
    if rel.n != len(comps):
        raise ValueError("relation size does not match the number of components")
    srcs = [union_of(b.space, [comps[i] for i in blk]) for blk in rel.blocks]
    return operation(srcs, b)


def all_partitions(n: int):
    """Set partitions of ``range(n)`` (restricted growth strings)."""
    def rec(i, blocks):
        if i == n:
            yield EqRel.from_blocks(n, blocks)
            return
        for k in range(len(blocks)):
            blocks[k].append(i)
            yield from rec(i + 1, blocks)
            blocks[k].pop()
        blocks.append([i])
        yield from rec(i + 1, blocks)
        blocks.pop()

    if n == 0:
        yield EqRel(0, ())
        return
    yield from rec(0, [])


def enumerate_cocart_into(b: OpenSet, un: Universe | None = None) -> list:
    """Cocartesian morphisms into ``b`` whose block unions are listed in ``un``."""
    comps = b.components()
    out = []
    for rel in all_partitions(len(comps)):
        m = decode(rel, b)
        if un is None or all(s in un for s in m.src):
            out.append(m)
    return out


@dataclass
class FactorizationReport:
    kind: str            # "empty", "codirected" or "not codirected"
    relations: list
    witness: tuple | None = None


def factorization_poset(alpha: OMorphism, small: Universe, big: Universe | None = None) -> FactorizationReport:
    """Relations ``~`` on the target's components coarser than ``alpha``'s
    relation with every block union in ``small``."""
    if big is not None and alpha.dst[0] not in big:
        raise BlockNotInUniverse(f"{alpha.dst[0]} is not in the big universe")
    b = alpha.dst[0]
    base = encode_active(alpha)
    comps = b.components()
    rels = []
    for rel in all_partitions(len(comps)):
        if not base.refines(rel):
            continue
        if all(union_of(b.space, [comps[i] for i in blk]) in small for blk in rel.blocks):
            rels.append(rel)
    if not rels:
        return FactorizationReport("empty", rels)
    have = set(rels)
    for r, s in itertools.combinations(rels, 2):
        m = r.meet(s)
        if m not in have:
            return FactorizationReport("not codirected", rels, (r, s))
    return FactorizationReport("codirected", rels)


# cone complements -------------------------------------------------------------------

def remove_vertex(u: OpenSet, ci: int = 0) -> OpenSet:
    pieces = list(u.pieces)
    p = pieces[ci]
    pieces[ci] = StarPiece(False, p.rays)
    return OpenSet(u.space, tuple(pieces))


def complement_open(inner: OpenSet | None, outer: OpenSet, ci: int = 0) -> OpenSet:
    """Interior of ``outer`` minus the vertex and minus ``inner``."""
    punctured = remove_vertex(outer, ci)
    return punctured if inner is None else punctured.minus_closure(inner)


def complement_op(iota: OMorphism, un: Universe | None = None, ci: int = 0) -> tuple:
    """For ``iota: (o) -> (o')`` or ``() -> (o')`` with ``o'`` around the vertex,
    return ``(a, o'')`` where ``a: (o, o'') -> (o')`` (or ``(o'') -> (o')``)."""
    if len(iota.dst) != 1 or len(iota.src) > 1:
        raise NotAMorphism("complement needs a unary or nullary operation")
    outer = iota.dst[0]
    if not outer.contains_vertex(ci):
        raise NotAMorphism(f"{outer} does not contain the cone point")
    inner = iota.src[0] if len(iota.src) else None
    o2 = complement_open(inner, outer, ci)
    if un is not None and o2 not in un:
        raise ComplementNotInUniverse(f"complement {o2} of {inner} in {outer} is not listed", witness=o2)
    srcs = ([inner] if inner is not None else []) + [o2]
    return operation(srcs, outer), o2


# charts: finite full suboperads on a star ------------------------------------------

def is_horizontal(u: OpenSet, ci: int = 0) -> bool:
    """Radially symmetric on a star: every ray carries the same intervals."""
    p = u.pieces[ci]
    if not isinstance(p, StarPiece):
        return False
    if any(q for k, q in enumerate(u.pieces) if k != ci and q):
        return False
    return all(r == p.rays[0] for r in p.rays)


class Chart:
    """A finite set of opens viewed as the colours of a poset operad.

    For cone charts the colours split into ``N`` (avoiding the vertex),
    ``H`` (horizontal) and ``O`` (horizontal and containing the vertex).
    """

    def __init__(self, colors: Iterable[OpenSet], cone_component: int | None = 0):
        self.colors = tuple(Universe(next(iter(colors)).space, colors).opens) if colors else ()
        self.ci = cone_component
        self.index = {c: i for i, c in enumerate(self.colors)}
        n = len(self.colors)
        self.sub = [[j for j in range(n) if self.colors[j].issubset(self.colors[i])] for i in range(n)]
        self.disjoint = [[self.colors[i].disjoint(self.colors[j]) for j in range(n)] for i in range(n)]
        star = cone_component is not None and isinstance(self.colors[0].pieces[cone_component], StarPiece) if n else False
        self.is_cone = bool(star)
        if self.is_cone:
            self.N = [not c.contains_vertex(cone_component) for c in self.colors]
            self.H = [is_horizontal(c, cone_component) for c in self.colors]
            self.O = [h and not m for h, m in zip(self.H, self.N)]
        else:
            self.N = [True] * n
            self.H = [False] * n
            self.O = [False] * n

    @classmethod
    def from_universe(cls, un: Universe, cone_component: int | None = 0) -> "Chart":
        return cls(un.opens, cone_component)

    def __len__(self):
        return len(self.colors)

    def has_empty(self) -> bool:
        return any(c.is_empty() for c in self.colors)

    def input_families(self, t: int, arity: int) -> list:
        """Sorted tuples of pairwise disjoint colours inside colour ``t``.

        Repeats are only possible for the empty open.
        """
        subs = self.sub[t]
        out = []

        def rec(start, chosen):
            if len(chosen) == arity:
                out.append(tuple(chosen))
                return
            for k in range(start, len(subs)):
                j = subs[k]
                if all(self.disjoint[j][i] for i in chosen):
                    rec(k if self.colors[j].is_empty() else k + 1, chosen + [j])

        rec(0, [])
        return out

    def max_arity(self, cap: int = 8) -> int:
        best = 0
        for t in range(len(self.colors)):
            for a in range(best + 1, cap + 1):
                if self.input_families(t, a):
                    best = a
                else:
                    break
        return best

    def complement(self, inner: int | None, outer: int) -> int | None:
        o2 = complement_open(None if inner is None else self.colors[inner], self.colors[outer], self.ci)
        return self.index.get(o2)


@dataclass
class AssumptionReport:
    results: dict = field(default_factory=dict)   # "A1".."A6" -> (bool, witness)

    @property
    def ok(self) -> bool:
        return all(v[0] for v in self.results.values())

    def __bool__(self):
        return self.ok


def check_pushout_assumptions(chart: Chart, max_arity: int = 2, universe: Iterable[OpenSet] | None = None
                              ) -> AssumptionReport:
    """Check the six hypotheses of the operad pushout on a cone chart.

    ``universe`` optionally lists extra opens; A1 then asks that each of them
    that is a colour candidate is either horizontal or avoids the vertex.
    """
    rep = AssumptionReport()
    cs = chart.colors
    n = len(cs)

    def res(key, bad):
        rep.results[key] = (bad is None, bad)

    # A1: every colour lies in N or H
    bad = None
    for i in range(n):
        if not (chart.N[i] or chart.H[i]):
            bad = str(cs[i])
            break
    if universe is not None and bad is None:
        for u in universe:
            if u.contains_vertex(chart.ci) and not is_horizontal(u, chart.ci):
                bad = str(u)
                break
    res("A1", bad)

    # A2: unary endomorphisms of O colours are identities, and composites of
    # strict unary inclusions stay strict; both hold in any poset operad, but
    # we still check that no two distinct colours are mutually contained
    bad = None
    for i in range(n):
        if chart.O[i]:
            for j in chart.sub[i]:
                if j != i and i in chart.sub[j]:
                    bad = (str(cs[i]), str(cs[j]))
    res("A2", bad)

    # A3: identities exist, i.e. every colour contains itself
    bad = next((str(cs[i]) for i in range(n) if i not in chart.sub[i]), None)
    res("A3", bad)

    # A4 and A5 on operations up to max_arity
    bad4 = bad5 = None
    for t in range(n):
        for a in range(1, max_arity + 1):
            for fam in chart.input_families(t, a):
                if a == 1 and fam[0] == t:
                    continue
                no = [j for j in fam if chart.O[j]]
                if bad4 is None and (len(no) > 1 or (no and not chart.O[t])):
                    bad4 = (tuple(str(cs[j]) for j in fam), str(cs[t]))
                if bad5 is None and len(set(fam)) < len(fam):
                    bad5 = (tuple(str(cs[j]) for j in fam), str(cs[t]))
    res("A4", bad4)
    res("A5", bad5)

    # A6: complements exist and lie in N, and every f factors uniquely through them
    bad = None
    for t in range(n):
        if not chart.O[t] or bad is not None:
            continue
        inners = [None] + [j for j in chart.sub[t] if chart.O[j] and j != t]
        for inner in inners:
            o2 = chart.complement(inner, t)
            if o2 is None or not chart.N[o2]:
                bad = ("complement missing", None if inner is None else str(cs[inner]), str(cs[t]))
                break
            for a in range(0, max_arity + 1):
                for fam in chart.input_families(t, a):
                    rest = [j for j in fam if j != inner] if inner is not None else list(fam)
                    if inner is not None and inner not in fam:
                        continue
                    if inner is None and any(chart.O[j] for j in fam):
                        continue
                    if not all(chart.N[j] for j in rest):
                        continue
                    if not all(j in chart.sub[o2] for j in rest):
                        bad = ("no factorisation", tuple(str(cs[j]) for j in fam), str(cs[t]))
                        break
                if bad:
                    break
            if bad:
                break
    res("A6", bad)
    return rep
