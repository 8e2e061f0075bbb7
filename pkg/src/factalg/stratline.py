"""One-dimensional stratified spaces and their open subsets.

A space is a finite disjoint union of components:

* ``Line(marks)`` -- the real line with finitely many marked points.  A line
  with exactly one mark is stored as a two-ray star centred at the mark.
* ``Circle(length, marks)`` -- a circle of the given circumference.
* ``Star(k)`` -- the open cone on ``k`` points: a vertex and ``k`` rays
  ``(0, inf)``.

Opens are stored exactly: lines as sorted open intervals, circles as arcs
``(s, e)`` with ``0 <= s < length`` and ``s < e <= s + length``, stars as a
vertex flag plus intervals on every ray.  When the vertex is present every
ray carries a germ ``(0, t)``.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (EmptyCover, NotDisks, OverlapError, PreimageUnlisted, RationalParseError,
                     UnsupportedMap, BadConfiguration)
from .finposet import FinPoset

INF = math.inf


def endpoint(x):
    """Normalise an endpoint: finite values become Fractions, infinities stay floats."""
    if isinstance(x, float) and math.isinf(x):
        return x
    if isinstance(x, str):
        t = x.strip().lower()
        if t in ("inf", "+inf", "oo", "infinity"):
            return INF
        if t in ("-inf", "-oo", "-infinity"):
            return -INF
        try:
            return Fraction(t)
        except (ValueError, ZeroDivisionError) as exc:
            raise RationalParseError(f"cannot parse endpoint {x!r}") from exc
    if isinstance(x, float):
        raise RationalParseError(f"float endpoint {x!r} is not exact; pass a Fraction or string")
    return Fraction(x)


def fmt_end(x) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return str(x)


# interval arithmetic on finite unions of open intervals ----------------------

def norm_intervals(ivs: Iterable[Sequence], strict: bool = False) -> tuple:
    """Sort, drop empties, and merge overlapping open intervals.

    With ``strict`` overlapping input raises ``OverlapError`` instead.
    Touching intervals such as ``(0,1)`` and ``(1,2)`` stay separate.
    """
    ivs = sorted((endpoint(a), endpoint(b)) for a, b in ivs)
    ivs = [(a, b) for a, b in ivs if a < b]
    out = []
    for a, b in ivs:
        if out and a < out[-1][1]:
            if strict:
                raise OverlapError(f"intervals ({fmt_end(out[-1][0])},{fmt_end(out[-1][1])}) and "
                                   f"({fmt_end(a)},{fmt_end(b)}) overlap")
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return tuple(out)


def iv_intersect(xs: tuple, ys: tuple) -> tuple:
    out = []
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if lo < hi:
                out.append((lo, hi))
    return norm_intervals(out)


def iv_minus_closure(xs: tuple, ys: tuple) -> tuple:
    """``xs`` minus the closure of ``ys``, which is open again."""
    out = list(xs)
    for c, d in ys:
        nxt = []
        for a, b in out:
            if d <= a or b <= c:
                nxt.append((a, b))
                continue
            if a < c:
                nxt.append((a, c))
            if d < b:
                nxt.append((d, b))
        out = nxt
    return norm_intervals(out)


def iv_subset(xs: tuple, ys: tuple) -> bool:
    return all(any(c <= a and b <= d for c, d in ys) for a, b in xs)


def iv_contains(xs: tuple, x) -> bool:
    return any(a < x < b for a, b in xs)


# components -----------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    marks: tuple = ()

    kind = "line"


@dataclass(frozen=True)
class Circle:
    length: Fraction = Fraction(1)
    marks: tuple = ()

    kind = "circle"


@dataclass(frozen=True)
class Star:
    rays: int
    center: Fraction | None = None  # set when the star came from a one-mark line

    kind = "star"


def LINE(*marks) -> "StratSpace":
    return StratSpace([Line(tuple(marks))])


def CIRCLE(length=1, marks=()) -> "StratSpace":
    return StratSpace([Circle(Fraction(length), tuple(marks))])


def STAR(k: int) -> "StratSpace":
    return StratSpace([Star(k)])


def _canonical_component(c):
    if isinstance(c, Line):
        marks = tuple(sorted(Fraction(m) for m in c.marks))
        if len(set(marks)) != len(marks):
            raise BadConfiguration("repeated mark")
        if len(marks) == 1:
            return Star(2, marks[0])
        return Line(marks)
    if isinstance(c, Circle):
        L = Fraction(c.length)
        if L <= 0:
            raise BadConfiguration("circle length must be positive")
        marks = tuple(sorted(Fraction(m) % L for m in c.marks))
        return Circle(L, marks)
    if isinstance(c, Star):
        if c.rays < 1:
            raise BadConfiguration("a star needs at least one ray")
        return Star(c.rays, None if c.center is None else Fraction(c.center))
    raise BadConfiguration(f"unknown component {c!r}")


class StratSpace:
    """A finite disjoint union of lines, circles and stars."""

    def __init__(self, components: Iterable):
        self.components = tuple(_canonical_component(c) for c in components)
        if not self.components:
            raise BadConfiguration("a space needs at least one component")

    def __eq__(self, other):
        return isinstance(other, StratSpace) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        parts = []
        for c in self.components:
            if isinstance(c, Line):
                parts.append(f"LINE({', '.join(map(str, c.marks))})")
            elif isinstance(c, Circle):
                parts.append(f"CIRCLE({c.length}{', marks=' + str(list(map(str, c.marks))) if c.marks else ''})")
            else:
                parts.append(f"STAR({c.rays})" + (f"@{c.center}" if c.center is not None else ""))
        return " + ".join(parts)

    # opens
    def empty(self) -> "OpenSet":
        return OpenSet(self, tuple(_empty_piece(c) for c in self.components))

    def whole(self) -> "OpenSet":
        pieces = []
        for c in self.components:
            if isinstance(c, Line):
                pieces.append(((-INF, INF),))
            elif isinstance(c, Circle):
                pieces.append(CirclePiece(True, ()))
            else:
                pieces.append(StarPiece(True, tuple(((Fraction(0), INF),) for _ in range(c.rays))))
        return OpenSet(self, tuple(pieces))

    def open(self, text: str) -> "OpenSet":
        """Parse an open literal; see ``parse_open`` for the syntax."""
        return parse_open(self, text)

    def is_line_like(self, ci: int = 0) -> bool:
        c = self.components[ci]
        return isinstance(c, Line) or (isinstance(c, Star) and c.rays == 2)

    def line_marks(self, ci: int = 0) -> tuple:
        c = self.components[ci]
        if isinstance(c, Line):
            return c.marks
        if isinstance(c, Star) and c.rays == 2:
            return (c.center if c.center is not None else Fraction(0),)
        raise BadConfiguration(f"component {ci} has no line coordinates")

    def marks(self, ci: int) -> tuple:
        c = self.components[ci]
        return c.marks if isinstance(c, (Line, Circle)) else ()


@dataclass(frozen=True)
class CirclePiece:
    full: bool
    arcs: tuple  # ((s, e), ...) sorted by s


@dataclass(frozen=True)
class StarPiece:
    vertex: bool
    rays: tuple  # per ray, a tuple of (a, b) with 0 <= a < b <= inf


def _empty_piece(c):
    if isinstance(c, Line):
        return ()
    if isinstance(c, Circle):
        return CirclePiece(False, ())
    return StarPiece(False, tuple(() for _ in range(c.rays)))


# circle helpers ----------------------------------------------------------------

def _circle_norm(L: Fraction, arcs: Iterable[Sequence], strict: bool = False) -> CirclePiece:
    """Normalise arcs ``(a, b)`` (any real ``a < b``) on a circle of circumference ``L``.

    An arc of length exactly ``L`` is the circle minus one point; longer arcs
    cover everything.
    """
    lifted = []
    for a, b in arcs:
        a, b = Fraction(a), Fraction(b)
        if b <= a:
            continue
        if b - a > L:
            if strict:
                raise OverlapError(f"arc ({a},{b}) wraps onto itself")
            return CirclePiece(True, ())
        s0 = a % L
        lifted.append((s0, s0 + (b - a)))
    if strict:
        for (a, b), (c, d) in itertools.combinations(lifted, 2):
            if any(max(a, c + k * L) < min(b, d + k * L) for k in (-1, 0, 1)):
                raise OverlapError(f"arcs ({a},{b}) and ({c},{d}) overlap")
    return _circle_norm_lifted(L, lifted)


def _circle_norm_lifted(L, lifted) -> CirclePiece:
    if not lifted:
        return CirclePiece(False, ())
    pts = sorted((s0 + k * L, e + k * L) for s0, e in lifted for k in (-1, 0, 1))
    merged = []
    for a, b in pts:
        if merged and a < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    if any(b - a > L for a, b in merged):
        return CirclePiece(True, ())
    return CirclePiece(False, tuple(sorted((a, b) for a, b in merged if 0 <= a < L)))


def _arc_lifts(L, piece: CirclePiece):
    for s, e in piece.arcs:
        for k in (-1, 0, 1):
            yield (s + k * L, e + k * L)


def _circle_intersect(L, p: CirclePiece, q: CirclePiece) -> CirclePiece:
    if p.full:
        return q
    if q.full:
        return p
    out = []
    for a, b in p.arcs:
        for c, d in _arc_lifts(L, q):
            lo, hi = max(a, c), min(b, d)
            if lo < hi:
                out.append((lo, hi))
    return _circle_norm_lifted(L, [(a % L, a % L + (b - a)) for a, b in out])


def _circle_union(L, p: CirclePiece, q: CirclePiece) -> CirclePiece:
    if p.full or q.full:
        return CirclePiece(True, ())
    return _circle_norm_lifted(L, list(p.arcs) + list(q.arcs))


def _circle_subset(L, p: CirclePiece, q: CirclePiece) -> bool:
    if q.full:
        return True
    if p.full:
        return False
    return all(any(c <= a and b <= d for c, d in _arc_lifts(L, q)) for a, b in p.arcs)


def _circle_contains(L, p: CirclePiece, x) -> bool:
    if p.full:
        return True
    x = Fraction(x) % L
    return any(a < x + k * L < b for a, b in p.arcs for k in (0, 1))


def _circle_minus_closure(L, p: CirclePiece, q: CirclePiece) -> CirclePiece:
    if q.full:
        return CirclePiece(False, ())
    if not q.arcs:
        return p
    if p.full:
        arcs = sorted(q.arcs)
        gaps = [(e, s2) for (_, e), (s2, _) in zip(arcs, arcs[1:])] + [(arcs[-1][1], arcs[0][0] + L)]
        return _circle_norm(L, [(a, b) for a, b in gaps if a < b])
    closed = [(c + k * L, d + k * L) for c, d in q.arcs for k in (-1, 0, 1)]
    out = list(p.arcs)
    for c, d in closed:
        nxt = []
        for a, b in out:
            if d <= a or b <= c:
                nxt.append((a, b))
                continue
            if a < c:
                nxt.append((a, c))
            if d < b:
                nxt.append((d, b))
        out = nxt
    return _circle_norm(L, out)


# star helpers ------------------------------------------------------------------

def _star_piece(k: int, vertex: bool, rays: Sequence, strict=False) -> StarPiece:
    rays = [norm_intervals(r, strict=strict) for r in rays]
    for r in rays:
        for a, b in r:
            if a < 0:
                raise BadConfiguration("ray intervals live in (0, inf)")
    if len(rays) != k:
        raise BadConfiguration(f"expected {k} rays, got {len(rays)}")
    if vertex and not all(r and r[0][0] == 0 for r in rays):
        raise BadConfiguration("an open containing the vertex needs a germ (0, t) on every ray")
    return StarPiece(vertex, tuple(rays))


class OpenSet:
    """An open subset of a ``StratSpace`` in canonical form.  Hashable."""

    __slots__ = ("space", "pieces", "_hash", "_comps")

    def __init__(self, space: StratSpace, pieces: tuple):
        self.space = space
        self.pieces = tuple(pieces)
        self._hash = hash((space, self.pieces))
        self._comps = None

    def __eq__(self, other):
        return isinstance(other, OpenSet) and self.pieces == other.pieces and self.space == other.space

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Open({format_open(self)})"

    def __str__(self):
        return format_open(self)

    def sort_key(self):
        return _sort_key(self)

    # set operations
    def _combine(self, other, line_op, circle_op, star_op):
        if other.space != self.space:
            raise BadConfiguration("opens live in different spaces")
        out = []
        for c, p, q in zip(self.space.components, self.pieces, other.pieces):
            if isinstance(c, Line):
                out.append(line_op(p, q))
            elif isinstance(c, Circle):
                out.append(circle_op(c.length, p, q))
            else:
                out.append(star_op(c, p, q))
        return OpenSet(self.space, tuple(out))

    def __and__(self, other: "OpenSet") -> "OpenSet":
        def star(c, p, q):
            return StarPiece(p.vertex and q.vertex, tuple(iv_intersect(x, y) for x, y in zip(p.rays, q.rays)))
        return self._combine(other, iv_intersect, _circle_intersect, star)

    def __or__(self, other: "OpenSet") -> "OpenSet":
        def star(c, p, q):
            return StarPiece(p.vertex or q.vertex, tuple(norm_intervals(x + y) for x, y in zip(p.rays, q.rays)))
        return self._combine(other, lambda x, y: norm_intervals(x + y), _circle_union, star)

    def minus_closure(self, other: "OpenSet") -> "OpenSet":
        """``self`` minus the closure of ``other``."""
        def star(c, p, q):
            rays = tuple(iv_minus_closure(x, y) for x, y in zip(p.rays, q.rays))
            touches = q.vertex or any(y and y[0][0] == 0 for y in q.rays)
            return StarPiece(p.vertex and not touches, rays)
        return self._combine(other, iv_minus_closure, _circle_minus_closure, star)

    def is_empty(self) -> bool:
        for c, p in zip(self.space.components, self.pieces):
            if isinstance(c, Line) and p:
                return False
            if isinstance(c, Circle) and (p.full or p.arcs):
                return False
            if isinstance(c, Star) and (p.vertex or any(p.rays)):
                return False
        return True

    def __bool__(self):
        return not self.is_empty()

    def issubset(self, other: "OpenSet") -> bool:
        if other.space != self.space:
            return False
        for c, p, q in zip(self.space.components, self.pieces, other.pieces):
            if isinstance(c, Line):
                if not iv_subset(p, q):
                    return False
            elif isinstance(c, Circle):
                if not _circle_subset(c.length, p, q):
                    return False
            else:
                if p.vertex and not q.vertex:
                    return False
                if not all(iv_subset(x, y) for x, y in zip(p.rays, q.rays)):
                    return False
        return True

    def __le__(self, other):
        return self.issubset(other)

    def __lt__(self, other):
        return self != other and self.issubset(other)

    def disjoint(self, other: "OpenSet") -> bool:
        return (self & other).is_empty()

    def contains_point(self, pt) -> bool:
        ci, x = pt
        c, p = self.space.components[ci], self.pieces[ci]
        if isinstance(c, Line):
            return iv_contains(p, x)
        if isinstance(c, Circle):
            return _circle_contains(c.length, p, x)
        if x == "v":
            return p.vertex
        r, t = x
        return iv_contains(p.rays[r], t)

    # connected components
    def components(self) -> tuple:
        """Connected components as opens, in canonical order."""
        if self._comps is not None:
            return self._comps
        out = []
        empty = [_empty_piece(c) for c in self.space.components]
        for ci, (c, p) in enumerate(zip(self.space.components, self.pieces)):
            def mk(piece):
                ps = list(empty)
                ps[ci] = piece
                return OpenSet(self.space, tuple(ps))
            if isinstance(c, Line):
                out.extend(mk((iv,)) for iv in p)
            elif isinstance(c, Circle):
                if p.full:
                    out.append(mk(p))
                else:
                    out.extend(mk(CirclePiece(False, (arc,))) for arc in p.arcs)
            else:
                if p.vertex:
                    out.append(mk(StarPiece(True, tuple((r[0],) for r in p.rays))))
                for ri, r in enumerate(p.rays):
                    for iv in r:
                        if p.vertex and iv[0] == 0:
                            continue
                        rays = [()] * c.rays
                        rays[ri] = (iv,)
                        out.append(mk(StarPiece(False, tuple(rays))))
        self._comps = tuple(out)
        return self._comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def contains_vertex(self, ci: int = 0) -> bool:
        p = self.pieces[ci]
        return isinstance(p, StarPiece) and p.vertex

    def line_coords(self, ci: int = 0) -> tuple:
        """Components of a line-like piece as real intervals, sorted."""
        c, p = self.space.components[ci], self.pieces[ci]
        if isinstance(c, Line):
            return p
        if isinstance(c, Star) and c.rays == 2:
            m = c.center if c.center is not None else Fraction(0)
            out = []
            left = list(p.rays[0])
            right = list(p.rays[1])
            if p.vertex:
                a = left.pop(0)
                b = right.pop(0)
                out.append((m - a[1], m + b[1]))
            out += [(m - b, m - a) for a, b in left]
            out += [(m + a, m + b) for a, b in right]
            return tuple(sorted(out))
        raise BadConfiguration("line coordinates need a line or a two-ray star")

    def union_all(self, others: Iterable["OpenSet"]) -> "OpenSet":
        out = self
        for o in others:
            out = out | o
        return out


def union_of(space: StratSpace, opens: Iterable[OpenSet]) -> OpenSet:
    return space.empty().union_all(opens)


def _sort_key(u: OpenSet):
    key = []
    for c, p in zip(u.space.components, u.pieces):
        if isinstance(c, Line):
            key.append((0, tuple((float(a), float(b)) for a, b in p), p))
        elif isinstance(c, Circle):
            key.append((1, (p.full,), p.arcs))
        else:
            key.append((2, (not p.vertex,), p.rays))
    return tuple((k[0], k[1], tuple(map(str, _flatten(k[2])))) for k in key)


def _flatten(x):
    if isinstance(x, tuple):
        for y in x:
            yield from _flatten(y)
    else:
        yield x


def line_open(space: StratSpace, intervals: Iterable[Sequence], ci: int = 0, strict: bool = True) -> OpenSet:
    """Build an open of a line-like component from real intervals."""
    ivs = norm_intervals(intervals, strict=strict)
    c = space.components[ci]
    pieces = [_empty_piece(x) for x in space.components]
    if isinstance(c, Line):
        pieces[ci] = ivs
    elif isinstance(c, Star) and c.rays == 2:
        m = c.center if c.center is not None else Fraction(0)
        left, right, vertex = [], [], False
        for a, b in ivs:
            if a < m < b:
                vertex = True
                left.append((Fraction(0), m - a))
                right.append((Fraction(0), b - m))
            elif b <= m:
                left.append((m - b, m - a))
            else:
                right.append((a - m, b - m))
        pieces[ci] = _star_piece(2, vertex, [left, right])
    else:
        raise BadConfiguration("line intervals need a line or a two-ray star")
    return OpenSet(space, tuple(pieces))


# parsing and printing ---------------------------------------------------------------

_NUM = r"[-+]?(?:inf|oo|\d+(?:/\d+)?)"
_IV = re.compile(r"^\(\s*(" + _NUM + r")\s*,\s*(" + _NUM + r")\s*\)$")


def parse_open(space: StratSpace, text: str) -> OpenSet:
    """Parse an open literal.

    Pieces are joined with ``+``; each may carry a component prefix ``c1:``.
    Line and circle pieces are intervals ``(a,b)``; ``full`` is a whole circle.
    Star pieces are ``r0(a,b)`` for ray intervals, ``C(t)`` for the vertex with
    germs of radius ``t`` on every ray, and ``V(t0,...,tk)`` for per-ray germs.
    On a two-ray star a plain ``(a,b)`` is read in line coordinates.
    ``empty`` is the empty set.
    """
    text = text.strip()
    if text in ("empty", "{}", "∅", ""):
        return space.empty()
    per = {}
    for raw in text.split("+"):
        tok = raw.strip().replace(" ", "")
        if not tok:
            continue
        ci = 0
        m = re.match(r"^c(\d+):(.*)$", tok)
        if m:
            ci, tok = int(m.group(1)), m.group(2)
        if ci >= len(space.components):
            raise BadConfiguration(f"component {ci} out of range in {text!r}")
        per.setdefault(ci, []).append(tok)
    pieces = [_empty_piece(c) for c in space.components]
    for ci, toks in per.items():
        c = space.components[ci]
        if isinstance(c, Line):
            pieces[ci] = norm_intervals([_parse_iv(t) for t in toks], strict=True)
        elif isinstance(c, Circle):
            if "full" in toks:
                pieces[ci] = CirclePiece(True, ())
            else:
                pieces[ci] = _circle_norm(c.length, [_parse_iv(t) for t in toks], strict=True)
        else:
            vertex, rays, line_ivs = False, [[] for _ in range(c.rays)], []
            for t in toks:
                mm = re.match(r"^r(\d+)(\(.*\))$", t)
                if mm:
                    r = int(mm.group(1))
                    if r >= c.rays:
                        raise BadConfiguration(f"ray {r} out of range")
                    rays[r].append(_parse_iv(mm.group(2)))
                    continue
                mm = re.match(r"^C\((" + _NUM + r")\)$", t)
                if mm:
                    vertex = True
                    t0 = endpoint(mm.group(1))
                    for r in rays:
                        r.append((Fraction(0), t0))
                    continue
                mm = re.match(r"^V\((.*)\)$", t)
                if mm:
                    vertex = True
                    ts = [endpoint(x) for x in mm.group(1).split(",")]
                    if len(ts) != c.rays:
                        raise BadConfiguration(f"V(...) needs {c.rays} radii")
                    for r, t0 in zip(rays, ts):
                        r.append((Fraction(0), t0))
                    continue
                if c.rays == 2 and _IV.match(t):
                    line_ivs.append(_parse_iv(t))
                    continue
                raise RationalParseError(f"cannot parse star piece {t!r}")
            piece = _star_piece(c.rays, vertex, rays, strict=True)
            if line_ivs:
                lo = line_open(space, line_ivs, ci).pieces[ci]
                merged = OpenSet(space, tuple(pieces[:ci] + [piece] + pieces[ci + 1:])) | \
                    OpenSet(space, tuple(pieces[:ci] + [lo] + pieces[ci + 1:]))
                piece = merged.pieces[ci]
            pieces[ci] = piece
    return OpenSet(space, tuple(pieces))


def _parse_iv(tok: str):
    m = _IV.match(tok)
    if not m:
        raise RationalParseError(f"cannot parse interval {tok!r}")
    a, b = endpoint(m.group(1)), endpoint(m.group(2))
    if not a < b:
        raise BadConfiguration(f"empty interval {tok!r}")
    return a, b


def format_open(u: OpenSet) -> str:
    parts = []
    multi = len(u.space.components) > 1
    for ci, (c, p) in enumerate(zip(u.space.components, u.pieces)):
        pre = f"c{ci}:" if multi else ""
        if isinstance(c, Line):
            parts += [f"{pre}({fmt_end(a)},{fmt_end(b)})" for a, b in p]
        elif isinstance(c, Circle):
            if p.full:
                parts.append(pre + "full")
            else:
                parts += [f"{pre}({fmt_end(a)},{fmt_end(b)})" for a, b in p.arcs]
        else:
            if c.rays == 2 and c.center is not None:
                parts += [f"{pre}({fmt_end(a)},{fmt_end(b)})" for a, b in u.line_coords(ci)]
                continue
            rays = [list(r) for r in p.rays]
            if p.vertex:
                ts = [r.pop(0)[1] for r in rays]
                if len(set(ts)) == 1:
                    parts.append(f"{pre}C({fmt_end(ts[0])})")
                else:
                    parts.append(f"{pre}V({','.join(map(fmt_end, ts))})")
            for ri, r in enumerate(rays):
                parts += [f"{pre}r{ri}({fmt_end(a)},{fmt_end(b)})" for a, b in r]
    return " + ".join(parts) if parts else "empty"


# disk types -----------------------------------------------------------------

@dataclass(frozen=True)
class DiskType:
    """``R`` for an unmarked interval, ``cone`` with ``k`` for a star neighbourhood."""

    kind: str
    k: int = 0

    def __str__(self):
        return "R" if self.kind == "R" else f"Cone({self.k})"


R_DISK = DiskType("R")


@dataclass
class Classification:
    types: tuple           # one entry per component; None for a non-disk component
    is_multidisk: bool

    def multiset(self) -> tuple:
        return tuple(sorted((str(t) for t in self.types)))


def component_type(u: OpenSet) -> DiskType | None:
    """Disk type of a connected open, or None if it is not a disk."""
    assert u.is_connected()
    for ci, (c, p) in enumerate(zip(u.space.components, u.pieces)):
        if isinstance(c, Line) and p:
            (a, b), = p
            n = sum(1 for m in c.marks if a < m < b)
            return R_DISK if n == 0 else (DiskType("cone", 2) if n == 1 else None)
        if isinstance(c, Circle) and (p.full or p.arcs):
            if p.full:
                return None
            (a, b), = p.arcs
            n = sum(1 for m in c.marks if a < m < b or a < m + c.length < b)
            return R_DISK if n == 0 else (DiskType("cone", 2) if n == 1 else None)
        if isinstance(c, Star) and (p.vertex or any(p.rays)):
            return DiskType("cone", c.rays) if p.vertex else R_DISK
    raise AssertionError("empty component")


def classify_multidisk(u: OpenSet) -> Classification:
    types = tuple(component_type(c) for c in u.components())
    return Classification(types, all(t is not None for t in types))


def disk_type(u: OpenSet) -> DiskType:
    """Type of a connected disk; raises ``NotDisks`` otherwise."""
    if not u.is_connected():
        raise NotDisks(f"{u} is not connected")
    t = component_type(u)
    if t is None:
        raise NotDisks(f"{u} is not a disk")
    return t


def pi0_map(u: OpenSet, v: OpenSet) -> tuple:
    """For ``u <= v``: index of the component of ``v`` containing each component of ``u``."""
    vc = v.components()
    out = []
    for c in u.components():
        for j, d in enumerate(vc):
            if c.issubset(d):
                out.append(j)
                break
        else:
            raise BadConfiguration(f"{u} is not contained in {v}")
    return tuple(out)


def is_iso_inclusion(u: OpenSet, v: OpenSet) -> bool:
    """True when ``u <= v`` are multidisks, the inclusion is bijective on
    components, and matched components have the same disk type."""
    if not u.issubset(v):
        return False
    cu, cv = classify_multidisk(u), classify_multidisk(v)
    if not (cu.is_multidisk and cv.is_multidisk):
        return False
    m = pi0_map(u, v)
    if sorted(m) != list(range(len(cv.types))):
        return False
    return all(cu.types[i] == cv.types[j] for i, j in enumerate(m))


# universes ----------------------------------------------------------------------

class Universe:
    """A finite, duplicate-free family of opens of one space, in canonical order."""

    def __init__(self, space: StratSpace, opens: Iterable[OpenSet]):
        self.space = space
        uniq = {}
        for u in opens:
            if u.space != space:
                raise BadConfiguration(f"{u} does not live in {space}")
            uniq[u] = None
        self.opens = tuple(sorted(uniq, key=_sort_key))
        self._set = frozenset(self.opens)
        self._poset = None

    @classmethod
    def parse(cls, space: StratSpace, literals: Iterable[str]) -> "Universe":
        return cls(space, [space.open(t) for t in literals])

    def __contains__(self, u):
        return u in self._set

    def __iter__(self):
        return iter(self.opens)

    def __len__(self):
        return len(self.opens)

    def __eq__(self, other):
        return isinstance(other, Universe) and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        return f"Universe({len(self.opens)} opens on {self.space})"

    def poset(self) -> FinPoset:
        if self._poset is None:
            self._poset = FinPoset.from_leq(self.opens, lambda a, b: a.issubset(b))
        return self._poset

    def below(self, u: OpenSet, strict: bool = False) -> tuple:
        return tuple(v for v in self.opens if v.issubset(u) and (not strict or v != u))

    def restrict(self, pred) -> "Universe":
        return Universe(self.space, [u for u in self.opens if pred(u)])

    def union(self, other: "Universe") -> "Universe":
        return Universe(self.space, self.opens + other.opens)

    def without_empty(self) -> "Universe":
        return self.restrict(lambda u: not u.is_empty())

    def has_empty(self) -> bool:
        return self.space.empty() in self._set


def close_universe(un: Universe, op: str, ambient: Universe | None = None, pred=None,
                   keep_empty: bool = False, max_size: int = 20000) -> Universe:
    """Close a universe under an operation.

    ``intersections`` adds pairwise intersections (empty ones only with
    ``keep_empty``).  ``disjoint_unions`` adds all unions of pairwise disjoint
    members, including the empty union.  ``subordinate_disjoint_unions`` adds
    only unions contained in some member of ``ambient``.  ``sieve_predicate``
    keeps the members satisfying ``pred``.
    """
    space = un.space
    if op == "sieve_predicate":
        return un.restrict(pred)
    if op == "intersections":
        cur = set(un.opens)
        frontier = list(cur)
        while frontier:
            new = []
            for a in frontier:
                for b in list(cur):
                    c = a & b
                    if c.is_empty() and not keep_empty:
                        continue
                    if c not in cur:
                        cur.add(c)
                        new.append(c)
            frontier = new
            if len(cur) > max_size:
                raise BadConfiguration("intersection closure exceeds the size cap")
        return Universe(space, cur)
    if op in ("disjoint_unions", "subordinate_disjoint_unions"):
        members = [u for u in un.opens if not u.is_empty()]
        limit = None
        if op == "subordinate_disjoint_unions":
            if ambient is None:
                raise BadConfiguration("subordinate closure needs an ambient universe")
            limit = [a for a in ambient.opens]
        out = set(un.opens)
        if op == "disjoint_unions":
            out.add(space.empty())
        # grow unions one member at a time; members are tried in a fixed order
        # so each family is produced once
        frontier = [(u, i) for i, u in enumerate(members)]
        while frontier:
            nxt = []
            for u, last in frontier:
                for j in range(last + 1, len(members)):
                    v = members[j]
                    if not u.disjoint(v):
                        continue
                    w = u | v
                    if limit is not None and not any(w.issubset(a) for a in limit):
                        continue
                    out.add(w)
                    nxt.append((w, j))
            frontier = nxt
            if len(out) > max_size:
                raise BadConfiguration("disjoint-union closure exceeds the size cap")
        return Universe(space, out)
    raise BadConfiguration(f"unknown closure {op!r}")


# grid points --------------------------------------------------------------------

def grid_values(lo, hi, grid: int) -> list:
    """Rationals with denominator at most ``grid`` in the open interval ``(lo, hi)``."""
    lo, hi = Fraction(lo), Fraction(hi)
    vals = set()
    for q in range(1, grid + 1):
        start = math.floor(lo * q) + 1
        stop = math.ceil(hi * q) - 1
        for p in range(start, stop + 1):
            vals.add(Fraction(p, q))
    return sorted(vals)


def _window(opens: Iterable[OpenSet]) -> tuple:
    ends = []
    for u in opens:
        for c, p in zip(u.space.components, u.pieces):
            if isinstance(c, Line):
                ends += [x for iv in p for x in iv if not isinstance(x, float)]
            elif isinstance(c, Circle):
                pass
            else:
                ends += [x for r in p.rays for iv in r for x in iv if not isinstance(x, float)]
        for ci in range(len(u.space.components)):
            ends += list(u.space.marks(ci))
    if not ends:
        return Fraction(-1), Fraction(1)
    return min(ends) - 1, max(ends) + 1


def grid_points(u: OpenSet, grid: int, window=None) -> list:
    """Points of ``u`` with rational coordinates of denominator <= grid.

    Infinite ends are cut off at ``window``; vertices are included.
    """
    lo, hi = window if window is not None else _window([u])
    pts = []
    for ci, (c, p) in enumerate(zip(u.space.components, u.pieces)):
        if isinstance(c, Line):
            for a, b in p:
                aa = lo if a == -INF else a
                bb = hi if b == INF else b
                pts += [(ci, x) for x in grid_values(aa, bb, grid) if a < x < b]
        elif isinstance(c, Circle):
            for x in [Fraction(0)] + grid_values(0, c.length, grid):
                if _circle_contains(c.length, p, x):
                    pts.append((ci, x))
        else:
            if p.vertex:
                pts.append((ci, "v"))
            for ri, r in enumerate(p.rays):
                for a, b in r:
                    bb = max(hi, a + 1) if b == INF else b
                    pts += [(ci, (ri, x)) for x in grid_values(a, bb, grid)]
    return pts


# basis and cover predicates --------------------------------------------------------

@dataclass
class BasisReport:
    ok: bool
    mode: str
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def basis_predicate(b: Universe, ambient: Universe, mode: str, grid: int = 4,
                    max_failures: int = 5) -> BasisReport:
    """Check that ``b`` is a multiplicative, factorizing or decomposable basis.

    * multiplicative: every grid point ``x`` of an ambient open ``V`` lies in
      some member ``B <= V``, and members whose disjoint union sits inside an
      ambient open have that union listed.
    * factorizing: multiplicative, and nonempty pairwise intersections listed.
    * decomposable: every union of a proper nonempty set of components of a
      listed open is listed.
    """
    fails = []
    members = [u for u in b.opens if not u.is_empty()]
    if mode in ("multiplicative", "factorizing"):
        win = _window(list(ambient.opens) + members)
        for v in ambient.opens:
            inside = [u for u in members if u.issubset(v)]
            for x in grid_points(v, grid, win):
                if not any(u.contains_point(x) for u in inside):
                    fails.append(("no basis neighbourhood", str(v), x))
                    if len(fails) >= max_failures:
                        return BasisReport(False, mode, fails)
        for u, w in itertools.combinations(members, 2):
            if u.disjoint(w):
                un = u | w
                if un not in b and any(un.issubset(a) for a in ambient.opens):
                    fails.append(("disjoint union missing", str(u), str(w)))
                    if len(fails) >= max_failures:
                        return BasisReport(False, mode, fails)
        if mode == "factorizing":
            for u, w in itertools.combinations(members, 2):
                c = u & w
                if not c.is_empty() and c not in b:
                    fails.append(("intersection missing", str(u), str(w)))
                    if len(fails) >= max_failures:
                        return BasisReport(False, mode, fails)
    elif mode == "decomposable":
        for u in members:
            comps = u.components()
            for r in range(1, len(comps)):
                for sub in itertools.combinations(comps, r):
                    part = union_of(b.space, sub)
                    if part not in b:
                        fails.append(("summand missing", str(u), str(part)))
                        if len(fails) >= max_failures:
                            return BasisReport(False, mode, fails)
    else:
        raise BadConfiguration(f"unknown basis mode {mode!r}")
    return BasisReport(not fails, mode, fails)


@dataclass
class CoverReport:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def is_weiss_cover(cover: Sequence[OpenSet], u: OpenSet, grid: int = 4, s_max: int = 2) -> CoverReport:
    """Every set of at most ``s_max`` grid points of ``u`` lies in one member."""
    cover = list(cover)
    if not cover:
        raise EmptyCover("a Weiss cover needs at least one member")
    for w in cover:
        if not w.issubset(u):
            raise BadConfiguration(f"cover member {w} is not inside {u}")
    pts = grid_points(u, grid, _window(cover + [u]))
    # points covered by each member, as index sets
    cov = [frozenset(i for i, x in enumerate(pts) if w.contains_point(x)) for w in cover]
    for size in range(1, s_max + 1):
        for combo in itertools.combinations(range(len(pts)), size):
            s = set(combo)
            if not any(s <= c for c in cov):
                return CoverReport(False, tuple(pts[i] for i in combo))
    return CoverReport(True)


def complement_compact_family(u: OpenSet, compacts: Sequence, ci: int = 0) -> list:
    """The opens ``u`` minus ``K`` for compacts ``K`` of a line-like component.

    Each compact is a list of closed intervals ``[a, b]`` (points allowed).
    Such families are Weiss by construction once the compacts are cofinal, so
    nothing is sampled.
    """
    out = []
    for k in compacts:
        ivs = list(u.line_coords(ci))
        for a, b in k:
            a, b = Fraction(a), Fraction(b)
            nxt = []
            for x, y in ivs:
                if b <= x or y <= a:
                    nxt.append((x, y))
                    continue
                if x < a:
                    nxt.append((x, min(a, y)))
                if b < y:
                    nxt.append((max(b, x), y))
            ivs = [(x, y) for x, y in nxt if x < y]
        pieces = list(u.pieces)
        pieces[ci] = line_open(u.space, ivs, ci, strict=False).pieces[ci]
        out.append(OpenSet(u.space, tuple(pieces)))
    return out


# maps and preimages ---------------------------------------------------------------

class MapDescriptor:
    source: StratSpace
    target: StratSpace

    def preimage(self, v: OpenSet) -> OpenSet:
        raise NotImplementedError


class ConeProj(MapDescriptor):
    """Radial projection ``STAR(k) -> STAR(1)``."""

    def __init__(self, k: int):
        self.k = k
        self.source = STAR(k)
        self.target = STAR(1)

    def preimage(self, v: OpenSet) -> OpenSet:
        _check_target(self, v)
        p = v.pieces[0]
        return OpenSet(self.source, (StarPiece(p.vertex, tuple(p.rays[0] for _ in range(self.k))),))

    def __repr__(self):
        return f"CONE_PROJ({self.k})"


class Fold(MapDescriptor):
    """The fold map from ``n`` disjoint copies of a space onto it."""

    def __init__(self, base: StratSpace, n: int):
        self.n = n
        self.target = base
        self.source = StratSpace(list(base.components) * n)

    def preimage(self, v: OpenSet) -> OpenSet:
        _check_target(self, v)
        return OpenSet(self.source, v.pieces * self.n)

    def copy(self, v: OpenSet, i: int) -> OpenSet:
        """The open ``v`` placed in the ``i``-th copy only."""
        m = len(self.target.components)
        pieces = [_empty_piece(c) for c in self.source.components]
        pieces[i * m:(i + 1) * m] = v.pieces
        return OpenSet(self.source, tuple(pieces))

    def __repr__(self):
        return f"FOLD({self.n})"


class CircleVProj(MapDescriptor):
    """Height function on a circle of circumference 2.

    Arc coordinate 0 maps to ``bottom``, 1 maps to ``top``; the map is linear
    on each half.  The target is the line with both values marked.
    """

    def __init__(self, top, bottom):
        top, bottom = Fraction(top), Fraction(bottom)
        if not bottom < top:
            raise BadConfiguration("need bottom < top")
        self.top, self.bottom = top, bottom
        self.source = CIRCLE(2)
        self.target = LINE(bottom, top)

    def _theta(self, y):
        """Arc coordinate in [0, 1] at height ``y`` (clamped)."""
        if y <= self.bottom:
            return Fraction(0)
        if y >= self.top:
            return Fraction(1)
        return (y - self.bottom) / (self.top - self.bottom)

    def preimage(self, v: OpenSet) -> OpenSet:
        _check_target(self, v)
        arcs = []
        full = False
        for a, b in v.pieces[0]:
            if a < self.bottom and b > self.top:
                full = True
                continue
            if b <= self.bottom or a >= self.top:
                continue
            ta, tb = self._theta(a), self._theta(b)
            if a < self.bottom:          # around the bottom point
                arcs.append((2 - tb, 2 + tb))
            elif b > self.top:           # around the top point
                arcs.append((ta, 2 - ta))
            else:
                arcs.append((ta, tb))
                arcs.append((2 - tb, 2 - ta))
        if full:
            return OpenSet(self.source, (CirclePiece(True, ()),))
        return OpenSet(self.source, (_circle_norm(Fraction(2), arcs, strict=False),))

    def __repr__(self):
        return f"CIRCLE_VPROJ({self.top}, {self.bottom})"


def _rational_sqrt(x):
    if x == INF:
        return INF
    x = Fraction(x)
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n != x.numerator or d * d != x.denominator:
        raise UnsupportedMap(f"endpoint {x} is not the square of a rational")
    return Fraction(n, d)


class Square(MapDescriptor):
    """``x -> x^2`` from the unmarked line to a line-like target.

    The target is either the unmarked line or the line marked at 0.  Open
    endpoints must be squares of rationals (or infinite) so preimages stay exact.
    """

    def __init__(self, marked: bool = False):
        self.source = LINE()
        self.target = LINE(0) if marked else LINE()

    def preimage(self, v: OpenSet) -> OpenSet:
        _check_target(self, v)
        out = []
        for a, b in v.line_coords(0):
            if b <= 0:
                continue
            rb = _rational_sqrt(b)
            if a < 0:
                out.append((-rb, rb))
            else:
                ra = _rational_sqrt(a)
                out += [(-rb, -ra), (ra, rb)]
        return line_open(self.source, out, strict=False)

    def __repr__(self):
        return "SQUARE"


def _check_target(m: MapDescriptor, v: OpenSet):
    if v.space != m.target:
        raise BadConfiguration(f"{v} is not an open of the target {m.target}")


def preimage(m: MapDescriptor, v: OpenSet) -> OpenSet:
    return m.preimage(v)


def preimage_universe(m: MapDescriptor, target_un: Universe, source_un: Universe | None = None) -> dict:
    """``{V: preimage of V}``; with ``source_un`` every preimage must be listed."""
    out = {}
    for v in target_un:
        p = m.preimage(v)
        if source_un is not None and p not in source_un:
            raise PreimageUnlisted(f"preimage {p} of {v} is not in the source universe", witness=v)
        out[v] = p
    return out
