"""Finite posets, set-valued diagrams over them, and compact subsets of the line.

A ``FinPoset`` stores its order relation explicitly.  Diagrams only record
transports along covering relations; composites are derived and checked for
path independence when the diagram is built.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from .errors import BadConfiguration, IncoherentDiagram, NotAPoset, NotContained


class FinPoset:
    """A finite partial order on hashable elements.

    ``relations`` lists pairs ``(a, b)`` with ``a <= b``; the reflexive and
    transitive closure is taken, and antisymmetry is checked.
    """

    def __init__(self, elements: Iterable[Hashable], relations: Iterable[tuple] = ()):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise NotAPoset("repeated element")
        self.index = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        up = [{i} for i in range(n)]
        for a, b in relations:
            if a not in self.index or b not in self.index:
                raise NotAPoset(f"relation {a!r} <= {b!r} mentions an unknown element")
            up[self.index[a]].add(self.index[b])
        # transitive closure; n is small, so a Warshall pass is fine
        for k in range(n):
            for i in range(n):
                if k in up[i]:
                    up[i] |= up[k]
        for i in range(n):
            for j in up[i]:
                if j != i and i in up[j]:
                    raise NotAPoset(
                        f"{self.elements[i]!r} and {self.elements[j]!r} are mutually below each other")
        self._up = [frozenset(s) for s in up]
        self._covers = None

    @classmethod
    def from_leq(cls, elements: Iterable[Hashable], leq: Callable[[object, object], bool]) -> "FinPoset":
        elements = tuple(elements)
        rel = [(a, b) for a in elements for b in elements if a != b and leq(a, b)]
        return cls(elements, rel)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def leq(self, a, b) -> bool:
        return self.index[b] in self._up[self.index[a]]

    def lt(self, a, b) -> bool:
        return a != b and self.leq(a, b)

    def up(self, a) -> tuple:
        return tuple(self.elements[j] for j in sorted(self._up[self.index[a]]))

    def down(self, a) -> tuple:
        i = self.index[a]
        return tuple(e for j, e in enumerate(self.elements) if i in self._up[j])

    def covers(self) -> tuple:
        """Covering pairs ``(a, b)``: ``a < b`` with nothing strictly between."""
        if self._covers is None:
            out = []
            for i, a in enumerate(self.elements):
                above = self._up[i] - {i}
                for j in sorted(above):
                    if not any(k != j and j in self._up[k] for k in above):
                        out.append((a, self.elements[j]))
            self._covers = tuple(out)
        return self._covers

    def relations(self) -> tuple:
        """All strict pairs ``(a, b)`` with ``a < b``."""
        return tuple((a, self.elements[j]) for i, a in enumerate(self.elements)
                     for j in sorted(self._up[i]) if j != i)

    def subposet(self, elems: Iterable[Hashable]) -> "FinPoset":
        elems = [e for e in self.elements if e in set(elems)]
        return FinPoset(elems, [(a, b) for a in elems for b in elems if a != b and self.leq(a, b)])

    def opposite(self) -> "FinPoset":
        return FinPoset(self.elements, [(b, a) for a, b in self.relations()])

    def is_connected(self) -> bool:
        if not self.elements:
            return False
        return len(_components(self.elements, self.relations())) == 1

    def maximal(self) -> tuple:
        return tuple(e for e in self.elements if len(self._up[self.index[e]]) == 1)

    def minimal(self) -> tuple:
        return tuple(e for e in self.elements if len(self.down(e)) == 1)

    def hasse_paths(self, a, b) -> list:
        """All maximal chains of covers from ``a`` to ``b`` (as element lists)."""
        succ = {}
        for x, y in self.covers():
            succ.setdefault(x, []).append(y)
        out = []

        def walk(x, path):
            if x == b:
                out.append(path)
                return
            for y in succ.get(x, ()):
                if self.leq(y, b):
                    walk(y, path + [y])

        if self.leq(a, b):
            walk(a, [a])
        return out

    def __repr__(self):
        return f"FinPoset({len(self.elements)} elements, {len(self.covers())} covers)"


def _components(elements, edges) -> list:
    parent = {e: e for e in elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for e in elements:
        groups.setdefault(find(e), []).append(e)
    return list(groups.values())


class UnionFind:
    """Union-find over hashable keys; the earliest-inserted key of a class is its root."""

    def __init__(self, keys: Iterable[Hashable] = ()):
        self.parent = {}
        self.pos = {}
        for k in keys:
            self.add(k)

    def add(self, k):
        if k not in self.parent:
            self.parent[k] = k
            self.pos[k] = len(self.pos)

    def find(self, k):
        root = k
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[k] != root:
            self.parent[k], k = root, self.parent[k]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.pos[ra] < self.pos[rb]:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb

    def classes(self) -> list:
        groups = {}
        for k in self.pos:
            groups.setdefault(self.find(k), []).append(k)
        return list(groups.values())


class SetDiagram:
    """A functor from a finite poset to finite sets.

    ``sets[p]`` is a sequence of hashable items and ``transports[(p, q)]`` a
    dict for every covering pair ``p < q``.  Composites along different cover
    paths must agree; that is checked on construction.
    """

    def __init__(self, base: FinPoset, sets: dict, transports: dict, check: bool = True):
        self.base = base
        self.sets = {p: tuple(sets[p]) for p in base.elements}
        self.transports = {}
        for a, b in base.covers():
            if (a, b) not in transports:
                raise IncoherentDiagram(f"missing transport along {a!r} < {b!r}")
            t = dict(transports[(a, b)])
            target = set(self.sets[b])
            for x in self.sets[a]:
                if x not in t or t[x] not in target:
                    raise IncoherentDiagram(f"transport {a!r} -> {b!r} undefined or leaves the target at {x!r}")
            self.transports[(a, b)] = t
        self._composite = {}
        if check:
            self.check_coherent()

    def transport(self, a, b) -> dict:
        """The derived map ``sets[a] -> sets[b]`` for ``a <= b``."""
        if not self._composite:
            self.check_coherent()
        if (a, b) not in self._composite:
            raise NotContained(f"{a!r} is not below {b!r}")
        return self._composite[(a, b)]

    def check_coherent(self):
        self._composite = derived_composites(
            self.base, self.transports,
            identity=lambda p: {x: x for x in self.sets[p]},
            compose=lambda g, f: {x: g[y] for x, y in f.items()},
        )


def derived_composites(base: FinPoset, cover_maps: dict, identity, compose, equal=None) -> dict:
    """Composites of cover maps for every pair ``a <= b``, checked for path independence.

    ``compose(g, f)`` means ``g`` after ``f``.  The check compares, for each
    ``a < b``, the composites through every cover ``a < c <= b``; by induction
    on the length of chains this is the same as comparing all paths.
    """
    equal = equal or (lambda x, y: x == y)
    comp = {}
    succ = {}
    for a, c in base.covers():
        succ.setdefault(a, []).append(c)
    # maximal elements first, so comp[(c, b)] exists when a is processed
    order = sorted(base.elements, key=lambda e: len(base.up(e)))
    for a in order:
        comp[(a, a)] = identity(a)
        for b in base.up(a):
            if b == a:
                continue
            first = None
            for c in succ.get(a, ()):
                if not base.leq(c, b):
                    continue
                m = compose(comp[(c, b)], cover_maps[(a, c)])
                if first is None:
                    first = m
                elif not equal(m, first):
                    raise IncoherentDiagram(f"transports {a!r} -> {b!r} depend on the path", witness=(a, b))
            comp[(a, b)] = first
    return comp


@dataclass
class SetColimit:
    """Colimit of a set diagram: equivalence classes of ``(p, x)`` pairs."""

    classes: list
    cocone: dict  # p -> {x: class index}

    def __len__(self):
        return len(self.classes)

    def class_of(self, p, x) -> int:
        return self.cocone[p][x]


def set_colimit(d: SetDiagram) -> SetColimit:
    """Quotient of the disjoint union by the Hasse-generated relation."""
    uf = UnionFind((p, x) for p in d.base.elements for x in d.sets[p])
    for (a, b), t in d.transports.items():
        for x, y in t.items():
            uf.union((a, x), (b, y))
    classes = uf.classes()
    where = {}
    for i, cl in enumerate(classes):
        for k in cl:
            where[k] = i
    cocone = {p: {x: where[(p, x)] for x in d.sets[p]} for p in d.base.elements}
    return SetColimit(classes, cocone)


def poset_predicate(p: FinPoset, kind: str) -> bool:
    """``kind`` is one of directed, codirected, connected, has_terminal
    (alias has_max) and has_initial (alias has_min)."""
    if kind == "connected":
        return p.is_connected()
    if kind in ("has_max", "has_terminal"):
        return any(all(p.leq(x, m) for x in p) for m in p)
    if kind in ("has_min", "has_initial"):
        return any(all(p.leq(m, x) for x in p) for m in p)
    if kind in ("directed", "codirected"):
        if not p.elements:
            return False
        for a, b in itertools.combinations_with_replacement(p.elements, 2):
            if kind == "directed":
                ok = any(p.leq(a, c) and p.leq(b, c) for c in p)
            else:
                ok = any(p.leq(c, a) and p.leq(c, b) for c in p)
            if not ok:
                return False
        return True
    raise ValueError(f"unknown poset predicate {kind!r}")


def is_final_inclusion(s: Iterable[Hashable], p: FinPoset) -> bool:
    """True when every under-slice ``{x in s : q <= x}`` is nonempty and connected."""
    s = [e for e in p.elements if e in set(s)]
    for q in p.elements:
        slice_ = [x for x in s if p.leq(q, x)]
        if not slice_:
            return False
        edges = [(a, b) for a in slice_ for b in slice_ if a != b and p.leq(a, b)]
        if len(_components(slice_, edges)) != 1:
            return False
    return True


class CompactSet:
    """Finite disjoint union of closed intervals ``[a, b]`` with rational ends."""

    def __init__(self, components: Iterable[Sequence]):
        comps = sorted((Fraction(a), Fraction(b)) for a, b in components)
        for a, b in comps:
            if a > b:
                raise BadConfiguration(f"empty interval [{a}, {b}]")
        for (a, b), (c, d) in zip(comps, comps[1:]):
            if c <= b:
                raise BadConfiguration(f"components [{a}, {b}] and [{c}, {d}] meet")
        self.components = tuple(comps)

    def __len__(self):
        return len(self.components)

    def __eq__(self, other):
        return isinstance(other, CompactSet) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return "CompactSet(" + ", ".join(f"[{a}, {b}]" for a, b in self.components) + ")"

    def contains_point(self, x) -> bool:
        return any(a <= x <= b for a, b in self.components)

    def component_containing(self, a, b):
        for i, (c, d) in enumerate(self.components):
            if c <= a and b <= d:
                return i
        return None

    def issubset(self, other: "CompactSet") -> bool:
        return all(other.component_containing(a, b) is not None for a, b in self.components)

    def gaps(self) -> list:
        """Open gaps of the complement, with ``None`` standing for an infinite end."""
        ends = [None] + [x for c in self.components for x in c] + [None]
        return [(ends[2 * i], ends[2 * i + 1]) for i in range(len(self.components) + 1)]


def pi0_delta(k: CompactSet, k2: CompactSet | None = None) -> tuple:
    """``(count, map, is_bijection)`` for the components of ``k``.

    Without ``k2`` the map and flag are ``None``.  With ``k2`` the map sends
    each component of ``k`` to the component of ``k2`` containing it.
    """
    if k2 is None:
        return len(k), None, None
    m = []
    for a, b in k.components:
        j = k2.component_containing(a, b)
        if j is None:
            raise NotContained(f"[{a}, {b}] is not inside {k2!r}")
        m.append(j)
    return len(k), tuple(m), sorted(m) == list(range(len(k2)))


@dataclass
class ProbeReport:
    directed: bool
    witnesses: dict  # (i, j) -> CompactSet upper bound


def _separates(k: CompactSet, s: Sequence) -> bool:
    pts = sorted(Fraction(x) for x in s)
    if len(pts) != len(k) + 1:
        return False
    for (lo, hi), x in zip(k.gaps(), pts):
        if (lo is not None and x <= lo) or (hi is not None and x >= hi):
            return False
    return True


def weiss_localization_probe(s: Sequence, samples: Sequence[CompactSet]) -> ProbeReport:
    """Check that compacts separating the points ``s`` have a common upper bound.

    Each sample must have one point of ``s`` in every gap.  For every pair the
    componentwise hull is built, checked to separate ``s`` again, and returned
    as the witness.
    """
    samples = list(samples)
    for k in samples:
        if not _separates(k, s):
            raise BadConfiguration(f"{k!r} does not put exactly one point of {list(s)} in each gap")
    witnesses = {}
    directed = True
    for i, j in itertools.combinations_with_replacement(range(len(samples)), 2):
        k, l = samples[i], samples[j]
        hull = CompactSet((min(a, c), max(b, d)) for (a, b), (c, d) in zip(k.components, l.components))
        ok = _separates(hull, s) and k.issubset(hull) and l.issubset(hull) \
            and pi0_delta(k, hull)[2] and pi0_delta(l, hull)[2]
        if ok:
            witnesses[(i, j)] = hull
        else:
            directed = False
    return ProbeReport(directed, witnesses)
