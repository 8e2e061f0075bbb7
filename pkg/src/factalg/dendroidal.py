"""Rooted non-planar trees, dendroidal nerves of poset operads and the
spawn-time filtration of a cone chart.

A dendrex of a poset operad is an edge colouring: the operation at each
vertex is unique when it exists, so only colours are stored.  Colourings
are tuples aligned with ``tree.edges``.

Everything tree-indexed is exhaustive up to a vertex bound (and, where
trees could otherwise be infinitely many, an arity bound); reports state
both bounds.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import total_ordering

from .errors import AssumptionsNotVerified, BadConfiguration
from .finposet import FinPoset, SetDiagram, set_colimit
from .openoperad import Chart
from .stratline import OpenSet, Universe

DEFAULT_TREE_BOUND = 6


# trees ----------------------------------------------------------------------------------

class Tree:
    """A rooted tree given by ``vertices: output edge -> input edges``.

    Edges are integers.  Leaves are edges that are no vertex's output; a
    vertex with no inputs is a stump.  Input order carries no meaning.
    """

    __slots__ = ("root", "vertices", "edges", "pos", "parent", "_code", "_auts", "_ops")

    def __init__(self, root: int, vertices: dict):
        self.root = root
        self.vertices = {e: tuple(sorted(ins)) for e, ins in vertices.items()}
        seen = [root]
        stack = [root]
        while stack:
            e = stack.pop()
            for x in self.vertices.get(e, ()):
                seen.append(x)
                stack.append(x)
        if len(seen) != len(set(seen)):
            raise BadConfiguration("edge used twice: not a tree")
        if any(e not in set(seen) for e in self.vertices):
            raise BadConfiguration("vertex not connected to the root")
        self.edges = tuple(sorted(seen))
        self.pos = {e: i for i, e in enumerate(self.edges)}
        self.parent = {x: e for e, ins in self.vertices.items() for x in ins}
        self._code = None
        self._auts = None
        self._ops = None

    # basic structure
    def __eq__(self, other):
        return isinstance(other, Tree) and self.root == other.root and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.root, frozenset(self.vertices.items())))

    def __repr__(self):
        return f"Tree({self.code})"

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def leaves(self) -> tuple:
        return tuple(e for e in self.edges if e not in self.vertices)

    def inner_edges(self) -> tuple:
        return tuple(e for e in self.edges if e != self.root and e in self.vertices)

    def is_eta(self) -> bool:
        return not self.vertices

    def is_corolla(self) -> bool:
        return len(self.vertices) == 1

    def arity(self) -> int:
        return max((len(ins) for ins in self.vertices.values()), default=0)

    def vertex_order(self) -> list:
        """Output edges of the vertices, root first, parents before children."""
        out, queue = [], [self.root]
        while queue:
            e = queue.pop(0)
            if e in self.vertices:
                out.append(e)
                queue.extend(self.vertices[e])
        return out

    def subtree_vertices(self, e) -> int:
        n, stack = 0, [e]
        while stack:
            x = stack.pop()
            if x in self.vertices:
                n += 1
                stack.extend(self.vertices[x])
        return n

    def fresh_edge(self) -> int:
        return max(self.edges) + 1

    # canonical forms
    def code_at(self, e) -> str:
        if e not in self.vertices:
            return "|"
        return "(" + "".join(sorted(self.code_at(x) for x in self.vertices[e])) + ")"

    @property
    def code(self) -> str:
        if self._code is None:
            self._code = self.code_at(self.root)
        return self._code

    def canonical(self) -> tuple:
        """``(tree with edges 0..E-1 in preorder, old edge -> new edge)``."""
        codes = {}

        def code(e):
            if e not in codes:
                codes[e] = "|" if e not in self.vertices else \
                    "(" + "".join(sorted(code(x) for x in self.vertices[e])) + ")"
            return codes[e]

        relabel = {}
        verts = {}

        def walk(e):
            relabel[e] = len(relabel)
            if e in self.vertices:
                kids = sorted(self.vertices[e], key=code)
                for x in kids:
                    walk(x)
                verts[relabel[e]] = [relabel[x] for x in kids]

        walk(self.root)
        return Tree(0, verts), relabel

    def isomorphisms(self, other: "Tree") -> list:
        """All edge bijections ``self -> other`` preserving the tree structure."""
        return _isos(self, self.root, other, other.root)

    def automorphisms(self) -> list:
        if self._auts is None:
            self._auts = self.isomorphisms(self)
        return self._auts

    # the representable operad Omega[T]
    def cuts(self) -> dict:
        """Edge ``e`` -> leaf sets of subtrees rooted at ``e`` (``{e}`` is the identity)."""
        memo = {}

        def rec(e):
            if e in memo:
                return memo[e]
            out = [frozenset([e])]
            if e in self.vertices:
                for combo in itertools.product(*[rec(x) for x in self.vertices[e]]):
                    out.append(frozenset().union(*combo))
            memo[e] = out
            return out

        for e in self.edges:
            rec(e)
        return memo

    def operations(self) -> frozenset:
        """``(root, leaf set)`` pairs of all subtrees, identities included."""
        if self._ops is None:
            self._ops = frozenset((e, c) for e, cs in self.cuts().items() for c in cs)
        return self._ops

    # faces and degeneracies
    def contract(self, e) -> "Tree":
        if e not in self.inner_edges():
            raise BadConfiguration(f"edge {e} is not inner")
        verts = dict(self.vertices)
        above = verts.pop(e)
        p = self.parent[e]
        verts[p] = tuple(x for x in verts[p] if x != e) + above
        return Tree(self.root, verts)

    def top_vertices(self) -> tuple:
        """Vertices whose inputs are all leaves, other than the root vertex."""
        return tuple(e for e in self.vertices
                     if e != self.root and all(x not in self.vertices for x in self.vertices[e]))

    def delete_top(self, v) -> "Tree":
        verts = dict(self.vertices)
        del verts[v]
        return Tree(self.root, verts)

    def root_deletable(self) -> bool:
        if len(self.vertices) < 2:
            return False
        inner = [x for x in self.vertices[self.root] if x in self.vertices]
        return len(inner) == 1

    def delete_root(self) -> "Tree":
        inner = [x for x in self.vertices[self.root] if x in self.vertices]
        assert len(inner) == 1
        verts = dict(self.vertices)
        del verts[self.root]
        return Tree(inner[0], verts)

    def faces(self) -> list:
        """Elementary faces as ``Face`` records.

        Inner faces contract an inner edge.  Outer faces delete a top vertex
        or a root vertex with exactly one inner input; the faces of a corolla
        are its edges.
        """
        out = [Face("inner", ("edge", e), self.contract(e)) for e in self.inner_edges()]
        if self.is_corolla():
            out += [Face("outer", ("eta", e), Tree(e, {})) for e in self.edges]
            return out
        out += [Face("outer", ("top", v), self.delete_top(v)) for v in self.top_vertices()]
        if self.root_deletable():
            out.append(Face("outer", ("root",), self.delete_root()))
        return out

    def outer_faces(self) -> list:
        return [f for f in self.faces() if f.kind == "outer"]

    def degeneracy(self, e) -> tuple:
        """Insert a unary vertex on ``e``; returns ``(tree, new edge)``.

        The new edge sits above the new vertex and both map to ``e``.
        """
        new = self.fresh_edge()
        verts = dict(self.vertices)
        if e in verts:
            verts[new] = verts.pop(e)
        verts[e] = (new,)
        return Tree(self.root, verts), new


def _isos(s: Tree, e, t: Tree, f) -> list:
    if s.code_at(e) != t.code_at(f):
        return []
    if e not in s.vertices:
        return [{e: f}]
    xs, ys = list(s.vertices[e]), list(t.vertices[f])
    cx = [s.code_at(x) for x in xs]
    cy = [t.code_at(y) for y in ys]
    out = []
    for perm in itertools.permutations(range(len(ys))):
        if any(cx[i] != cy[perm[i]] for i in range(len(xs))):
            continue
        kids = [_isos(s, xs[i], t, ys[perm[i]]) for i in range(len(xs))]
        for combo in itertools.product(*kids):
            m = {e: f}
            for part in combo:
                m.update(part)
            out.append(m)
    return out


@dataclass(frozen=True)
class Face:
    kind: str       # "inner" or "outer"
    tag: tuple
    tree: Tree


def eta() -> Tree:
    return Tree(0, {})


def corolla(k: int) -> Tree:
    return Tree(0, {0: tuple(range(1, k + 1))})


def tree_sort_key(t: Tree):
    return (t.n_vertices, len(t.edges), t.code)


def enumerate_trees(max_vertices: int = DEFAULT_TREE_BOUND, max_arity: int = 3) -> list:
    """Trees with at most ``max_vertices`` vertices and arities at most
    ``max_arity``, one canonical representative per isomorphism class.

    Sorted by vertex count, then edge count, then canonical code; the first
    entry is the edge tree.
    """
    level = {eta().code: eta()}
    found = dict(level)
    for _ in range(max_vertices):
        nxt = {}
        for t in level.values():
            for leaf in t.leaves():
                for k in range(max_arity + 1):
                    verts = dict(t.vertices)
                    base = t.fresh_edge()
                    verts[leaf] = tuple(range(base, base + k))
                    c, _ = Tree(t.root, verts).canonical()
                    nxt.setdefault(c.code, c)
        level = nxt
        found.update(nxt)
    return sorted(found.values(), key=tree_sort_key)


# operads with unique operations ---------------------------------------------------------

class PosetOperad:
    """The poset operad of a chart, optionally restricted to some colours.

    Colours are chart indices so that nerves of sub-operads are subsets of
    the nerve of the whole chart.
    """

    def __init__(self, chart: Chart, allowed=None):
        self.chart = chart
        self.allowed = frozenset(range(len(chart))) if allowed is None else frozenset(allowed)
        self._ops = {}

    @property
    def colors(self) -> list:
        return sorted(self.allowed)

    def ordered_ops(self, t: int, k: int) -> list:
        key = (t, k)
        if key not in self._ops:
            out = []
            if t in self.allowed:
                for fam in self.chart.input_families(t, k):
                    if all(j in self.allowed for j in fam):
                        out.extend(dict.fromkeys(itertools.permutations(fam)))
            self._ops[key] = out
        return self._ops[key]

    def max_arity(self, cap: int = 8) -> int:
        best = 0
        for t in self.allowed:
            for a in range(best + 1, cap + 1):
                if self.ordered_ops(t, a):
                    best = a
                else:
                    break
        return best

    def label(self, c) -> str:
        return str(self.chart.colors[c])


class Representable:
    """``Omega[T]``: colours are the edges of ``T``, operations its subtrees."""

    def __init__(self, tree: Tree):
        self.tree = tree
        self._cuts = tree.cuts()
        self._ops = {}

    @property
    def colors(self) -> list:
        return list(self.tree.edges)

    def ordered_ops(self, e, k: int) -> list:
        key = (e, k)
        if key not in self._ops:
            out = []
            for c in self._cuts.get(e, ()):
                if len(c) == k:
                    out.extend(itertools.permutations(sorted(c)))
            self._ops[key] = out
        return self._ops[key]

    def label(self, c) -> str:
        return str(c)


def nerve_colorings(operad, tree: Tree) -> list:
    """All colourings of ``tree`` by the operad, as tuples aligned with ``tree.edges``."""
    order = tree.vertex_order()
    pos = tree.pos
    n = len(tree.edges)
    out = []
    cols = [None] * n

    def rec(i):
        if i == len(order):
            out.append(tuple(cols))
            return
        e = order[i]
        ins = tree.vertices[e]
        for op in operad.ordered_ops(cols[pos[e]], len(ins)):
            for x, c in zip(ins, op):
                cols[pos[x]] = c
            rec(i + 1)

    for c in operad.colors:
        cols[pos[tree.root]] = c
        rec(0)
    return out


@dataclass(frozen=True)
class Dendrex:
    tree: Tree
    colors: tuple

    def color(self, e):
        return self.colors[self.tree.pos[e]]

    def restrict(self, sub: Tree) -> "Dendrex":
        return Dendrex(sub, tuple(self.color(e) for e in sub.edges))

    def faces(self) -> list:
        return [(f, self.restrict(f.tree)) for f in self.tree.faces()]

    def degeneracy(self, e) -> "Dendrex":
        t, new = self.tree.degeneracy(e)
        return Dendrex(t, tuple(self.color(e if x == new else x) for x in t.edges))

    def degeneracies(self) -> list:
        return [self.degeneracy(e) for e in self.tree.edges]

    def is_degenerate(self) -> bool:
        return any(len(ins) == 1 and self.color(ins[0]) == self.color(e)
                   for e, ins in self.tree.vertices.items())

    def compose(self, sigma: "Dendrex") -> "Dendrex":
        """``self o sigma`` for ``sigma`` a dendrex of ``Omega[self.tree]``."""
        return Dendrex(sigma.tree, tuple(self.color(x) for x in sigma.colors))

    def relabel(self, m: dict, tree: Tree) -> "Dendrex":
        """Transport along an isomorphism ``m: self.tree -> tree``."""
        cols = [None] * len(tree.edges)
        for e, f in m.items():
            cols[tree.pos[f]] = self.color(e)
        return Dendrex(tree, tuple(cols))

    def canonical(self) -> "Dendrex":
        """Representative of the isomorphism class: canonical tree, then the
        lexicographically least colouring over its automorphisms."""
        t, m = self.tree.canonical()
        d = self.relabel(m, t)
        best = min(tuple(d.colors[t.pos[a[e]]] for e in t.edges) for a in t.automorphisms())
        return Dendrex(t, best)

    def is_valid(self, operad) -> bool:
        for e, ins in self.tree.vertices.items():
            if tuple(self.color(x) for x in ins) not in set(operad.ordered_ops(self.color(e), len(ins))):
                return False
        return True

    def __repr__(self):
        return f"Dendrex({self.tree.code}, {self.colors})"


def nerve(operad, tree: Tree) -> list:
    return [Dendrex(tree, c) for c in nerve_colorings(operad, tree)]


def as_operad(x):
    if isinstance(x, (PosetOperad, Representable)):
        return x
    if isinstance(x, Chart):
        return PosetOperad(x)
    if isinstance(x, Universe):
        return PosetOperad(Chart.from_universe(x, None))
    raise BadConfiguration(f"cannot view {type(x).__name__} as an operad")


# reports --------------------------------------------------------------------------------

@dataclass
class Report:
    name: str
    ok: bool
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


# normality ------------------------------------------------------------------------------

def fixed_automorphism(tree: Tree, colors: tuple):
    """A non-identity automorphism fixing the colouring, or None."""
    for a in tree.automorphisms():
        if all(a[e] == e for e in tree.edges):
            continue
        if all(colors[tree.pos[a[e]]] == colors[tree.pos[e]] for e in tree.edges):
            return a
    return None


def is_normal(x, max_vertices: int = 5, max_arity: int | None = None) -> Report:
    """Tree automorphisms act freely on the nerve, for all trees within the bounds.

    The first fixed dendrex is reported as ``(tree code, colour labels, automorphism)``.
    """
    op = as_operad(x)
    if max_arity is None:
        max_arity = op.max_arity() if isinstance(op, PosetOperad) else 3
    n = 0
    for t in enumerate_trees(max_vertices, max_arity):
        if len(t.automorphisms()) == 1:
            n += 1
            continue
        for cols in nerve_colorings(op, t):
            n += 1
            a = fixed_automorphism(t, cols)
            if a is not None:
                witness = (t.code, tuple(op.label(c) for c in cols), a)
                return Report("normal", False, n, [witness],
                              {"max_vertices": max_vertices, "max_arity": max_arity, "tree": t,
                               "dendrex": Dendrex(t, cols)})
    return Report("normal", True, n, [], {"max_vertices": max_vertices, "max_arity": max_arity})


# spawn times ----------------------------------------------------------------------------

@total_ordering
@dataclass(frozen=True)
class SpawnTime:
    """``0`` or a pair ``(n, d)`` with ``n, d >= 1``, ordered lexicographically."""

    n: int = 0
    d: int = 0

    def __post_init__(self):
        if (self.n == 0) != (self.d == 0) or self.n < 0 or self.d < 0:
            raise BadConfiguration(f"invalid spawn time ({self.n}, {self.d})")

    @property
    def is_zero(self) -> bool:
        return self.n == 0

    def __lt__(self, other):
        return (self.n, self.d) < (other.n, other.d)

    def __str__(self):
        return "0" if self.is_zero else f"({self.n},{self.d})"


ZERO = SpawnTime()


def spawn_times_upto(alpha: SpawnTime, max_vertices: int) -> list:
    """Positive spawn times ``<= alpha`` realisable with trees of at most
    ``max_vertices`` vertices (shape ``(n, d)`` has ``n + d`` vertices)."""
    out = [ZERO]
    for n in range(1, alpha.n + 1):
        for d in range(1, max_vertices - n + 1):
            t = SpawnTime(n, d)
            if t <= alpha:
                out.append(t)
    return out


@dataclass
class Position:
    out: int                # edge o_i
    inner: int | None       # edge of o_{i-1}, None for the empty tuple
    ys: tuple               # the other inputs (roots of the forest F_i)
    forest_size: int
    identity: bool
    special: bool


@dataclass
class SpawnAnalysis:
    classification: str               # "N", "H" or "mixed"
    shape: tuple | None = None        # (n, d)
    positions: list = field(default_factory=list)
    m: Dendrex | None = None
    R: Dendrex | None = None
    time: SpawnTime = ZERO

    @property
    def special_flags(self) -> list:
        return [p.special for p in self.positions]

    @property
    def is_special(self) -> bool:
        return all(self.special_flags)


def classify(d: Dendrex, chart: Chart) -> str:
    if all(chart.N[c] for c in d.colors):
        return "N"
    if all(chart.H[c] for c in d.colors):
        return "H"
    return "mixed"


def spine_positions(d: Dendrex, chart: Chart) -> list:
    """Positions ``1..n`` of the O-coloured spine, top first."""
    t = d.tree
    if not chart.O[d.color(t.root)]:
        raise AssumptionsNotVerified(f"root colour {chart.colors[d.color(t.root)]} is not in O")
    spine = []
    e = t.root
    while e in t.vertices:
        ins = t.vertices[e]
        os = [x for x in ins if chart.O[d.color(x)]]
        if len(os) > 1:
            raise AssumptionsNotVerified("two O-coloured inputs at one vertex", witness=(d, e))
        inner = os[0] if os else None
        ys = tuple(x for x in ins if x != inner)
        if any(not chart.N[d.color(y)] for y in ys):
            raise AssumptionsNotVerified("a non-O input is not in N", witness=(d, e))
        spine.append((e, inner, ys))
        if inner is None:
            break
        e = inner
    out = []
    for e, inner, ys in reversed(spine):
        size = sum(t.subtree_vertices(y) for y in ys)
        ident = inner is not None and not ys and d.color(inner) == d.color(e)
        special = False
        if not ident:
            comp = chart.complement(None if inner is None else d.color(inner), d.color(e))
            if comp is None:
                raise AssumptionsNotVerified(
                    f"complement inside {chart.colors[d.color(e)]} is not a colour", witness=(d, e))
            special = len(ys) == 1 and d.color(ys[0]) == comp
        out.append(Position(e, inner, ys, size, ident, special))
    return out


def m_reduce(d: Dendrex) -> Dendrex:
    """Remove all unary vertices coloured by identities."""
    t = d.tree
    verts = dict(t.vertices)
    col = {e: d.color(e) for e in t.edges}
    changed = True
    while changed:
        changed = False
        for e, ins in list(verts.items()):
            if len(ins) == 1 and col[ins[0]] == col[e]:
                x = ins[0]
                if x in verts:
                    verts[e] = verts.pop(x)
                else:
                    del verts[e]
                del col[x]
                changed = True
                break
    nt = Tree(t.root, verts)
    return Dendrex(nt, tuple(col[e] for e in nt.edges))


def r_special(d: Dendrex, chart: Chart, positions: list | None = None) -> Dendrex:
    """Factor every non-special, non-identity spine corolla through its
    complement operation, inserting the vertex ``b_f``."""
    positions = positions if positions is not None else spine_positions(d, chart)
    t = d.tree
    verts = dict(t.vertices)
    col = {e: d.color(e) for e in t.edges}
    nxt = t.fresh_edge()
    for p in positions:
        if p.special or p.identity:
            continue
        comp = chart.complement(None if p.inner is None else col[p.inner], col[p.out])
        for y in p.ys:
            if not chart.N[col[y]] or col[y] not in chart.sub[comp]:
                raise AssumptionsNotVerified("no factorisation through the complement", witness=(d, p.out))
        z = nxt
        nxt += 1
        col[z] = comp
        verts[p.out] = ((p.inner,) if p.inner is not None else ()) + (z,)
        verts[z] = p.ys
    nt = Tree(t.root, verts)
    return Dendrex(nt, tuple(col[e] for e in nt.edges))


def spawn_analysis(d: Dendrex, chart: Chart) -> SpawnAnalysis:
    cls = classify(d, chart)
    if cls != "mixed":
        return SpawnAnalysis(cls)
    positions = spine_positions(d, chart)
    n = len(positions)
    shape = (n, sum(p.forest_size for p in positions))
    m = m_reduce(d)
    r = r_special(d, chart, positions)
    if not d.is_degenerate() and all(p.special for p in positions):
        time = SpawnTime(*shape)
    else:
        g = r_special(m, chart)
        gp = spine_positions(g, chart)
        time = SpawnTime(len(gp), sum(p.forest_size for p in gp))
    return SpawnAnalysis(cls, shape, positions, m, r, time)


def spawn_time(d: Dendrex, chart: Chart) -> SpawnTime:
    return spawn_analysis(d, chart).time


# lambda< -----------------------------------------------------------------------------

@dataclass
class DendSubset:
    """Per tree (canonical representatives up to a bound): a set of colourings."""

    trees: dict                      # code -> Tree
    members: dict                    # code -> set of colour tuples
    bound: int
    max_arity: int
    generators: list = field(default_factory=list)

    def __contains__(self, d: Dendrex):
        t, m = d.tree.canonical()
        if t.code not in self.members:
            return False
        return d.relabel(m, self.trees[t.code]).colors in self.members[t.code]

    def size(self) -> int:
        return sum(len(v) for v in self.members.values())

    def __eq__(self, other):
        return isinstance(other, DendSubset) and self.members == other.members

    def closure_failures(self, limit: int = 5) -> list:
        """Faces and degeneracies (within the bound) that leave the subset."""
        bad = []
        for code, cols in self.members.items():
            t = self.trees[code]
            for c in cols:
                d = Dendrex(t, c)
                images = [x for _, x in d.faces()]
                if t.n_vertices < self.bound:
                    images += d.degeneracies()
                for x in images:
                    if x.tree.arity() <= self.max_arity and x not in self:
                        bad.append((d, x))
                        if len(bad) >= limit:
                            return bad
        return bad


def forest_root_edges(f: Dendrex, chart: Chart) -> set:
    """Inner edges of ``f`` that are roots of one of the forests ``F_i``."""
    return {y for p in spine_positions(f, chart) for y in p.ys if y in f.tree.vertices}


def spawndary_faces(f: Dendrex, chart: Chart) -> list:
    """The faces spanning ``lambda<(f)``: all outer faces and the inner faces
    away from forest roots."""
    roots = forest_root_edges(f, chart)
    return [fc for fc in f.tree.faces() if fc.kind == "outer" or fc.tag[1] not in roots]


def _factors_through(sigma_tree: Tree, sigma_cols: tuple, face_tree: Tree) -> bool:
    edges = set(face_tree.edges)
    if any(c not in edges for c in sigma_cols):
        return False
    ops = face_tree.operations()
    pos = sigma_tree.pos
    for e, ins in sigma_tree.vertices.items():
        if (sigma_cols[pos[e]], frozenset(sigma_cols[pos[x]] for x in ins)) not in ops:
            return False
    return True


def _leaf_bound(t: Tree) -> int:
    """Largest arity of an operation of ``Omega[t]``."""
    return max(1, max(len(c) for cs in t.cuts().values() for c in cs))


def _check_special(f: Dendrex, chart: Chart) -> SpawnAnalysis:
    a = spawn_analysis(f, chart)
    if a.classification != "mixed" or f.is_degenerate() or not a.is_special:
        raise BadConfiguration("expected a non-degenerate special dendrex of positive spawn time")
    return a


def lambda_less(f: Dendrex, chart: Chart, max_vertices: int | None = None, trees=None) -> DendSubset:
    """``lambda<(f)`` as the dendroidal subset of ``Omega[T]`` spanned by the
    outer faces and the inner faces that are not forest roots."""
    _check_special(f, chart)
    bound = max_vertices if max_vertices is not None else f.tree.n_vertices
    faces = spawndary_faces(f, chart)
    rep = Representable(f.tree)
    arity = _leaf_bound(f.tree)
    trees = trees if trees is not None else enumerate_trees(bound, arity)
    members, tmap = {}, {}
    for s in trees:
        tmap[s.code] = s
        members[s.code] = {c for c in nerve_colorings(rep, s)
                           if any(_factors_through(s, c, fc.tree) for fc in faces)}
    return DendSubset(tmap, members, bound, arity, faces)


def lambda_less_by_spawn(f: Dendrex, chart: Chart, max_vertices: int | None = None, trees=None) -> DendSubset:
    """The pullback description: maps ``sigma`` with ``f sigma`` spawning before ``f``."""
    alpha = _check_special(f, chart).time
    bound = max_vertices if max_vertices is not None else f.tree.n_vertices
    rep = Representable(f.tree)
    arity = _leaf_bound(f.tree)
    trees = trees if trees is not None else enumerate_trees(bound, arity)
    members, tmap = {}, {}
    for s in trees:
        tmap[s.code] = s
        members[s.code] = {c for c in nerve_colorings(rep, s)
                           if spawn_time(f.compose(Dendrex(s, c)), chart) < alpha}
    return DendSubset(tmap, members, bound, arity)


def anodyne_hypothesis(tree: Tree, selection) -> bool:
    """True iff the selected faces contain every outer face and miss some inner face."""
    tags = {(fc.kind, fc.tag) if isinstance(fc, Face) else fc for fc in selection}
    faces = tree.faces()
    outer = all(("outer", fc.tag) in tags for fc in faces if fc.kind == "outer")
    inner = [("inner", fc.tag) for fc in faces if fc.kind == "inner"]
    return outer and not all(x in tags for x in inner)


# the attaching pushout ---------------------------------------------------------------------

class SpawnTable:
    """Nerve of a cone chart on all trees within the bounds, with spawn times."""

    def __init__(self, chart: Chart, max_vertices: int, max_arity: int | None = None):
        self.chart = chart
        self.operad = PosetOperad(chart)
        self.max_vertices = max_vertices
        self.max_arity = max_arity if max_arity is not None else self.operad.max_arity()
        self.trees = enumerate_trees(max_vertices, self.max_arity)
        self._homs = {}
        self.rows = {}
        for t in self.trees:
            self.rows[t.code] = [(c, spawn_time(Dendrex(t, c), chart)) for c in nerve_colorings(self.operad, t)]

    def homs(self, tree: Tree, s: Tree) -> list:
        """``Hom(S, T)`` as colourings of ``s`` by edges of ``tree``, cached by tree codes."""
        key = (tree.code, s.code)
        if key not in self._homs:
            self._homs[key] = nerve_colorings(Representable(tree), s)
        return self._homs[key]

    def at(self, alpha: SpawnTime) -> list:
        return [Dendrex(t, c) for t in self.trees for c, s in self.rows[t.code] if s == alpha]

    def times(self) -> set:
        return {s for rows in self.rows.values() for _, s in rows}

    def special_representatives(self, alpha: SpawnTime) -> list:
        """Non-degenerate special dendrices spawning at ``alpha``, one per
        isomorphism class."""
        out = {}
        for d in self.at(alpha):
            if d.is_degenerate():
                continue
            a = spawn_analysis(d, self.chart)
            if a.is_special:
                c = d.canonical()
                out.setdefault((c.tree.code, c.colors), c)
        return [out[k] for k in sorted(out)]


def verify_attaching_pushout(chart: Chart, alpha: SpawnTime, max_vertices: int = 5,
                             table: SpawnTable | None = None) -> Report:
    """Check that ``Q<alpha`` glued with the ``Omega[T_j]`` along the
    ``lambda<(F_j)`` is ``Q<=alpha``, tree by tree.

    ``alpha = 0`` checks the base pushout ``H + N`` over ``N & H``.  A
    positive ``alpha = (n, d)`` needs ``n + d <= max_vertices`` so that all
    the representatives fit in the bound.
    """
    table = table or SpawnTable(chart, max_vertices)
    details = {"alpha": str(alpha), "max_vertices": max_vertices, "max_arity": table.max_arity}
    fails, checked = [], 0
    if alpha.is_zero:
        for t in table.trees:
            rows = [c for c, s in table.rows[t.code] if s.is_zero]
            N = [c for c in rows if all(chart.N[x] for x in c)]
            H = [c for c in rows if all(chart.H[x] for x in c)]
            NH = [c for c in N if c in set(H)]
            base = FinPoset(["NH", "N", "H"], [("NH", "N"), ("NH", "H")])
            colim = set_colimit(SetDiagram(base, {"NH": NH, "N": N, "H": H},
                                           {("NH", "N"): {c: c for c in NH}, ("NH", "H"): {c: c for c in NH}}))
            image = {}
            for p in ("N", "H"):
                for c in (N if p == "N" else H):
                    image.setdefault(colim.class_of(p, c), set()).add(c)
            checked += len(rows)
            if any(len(v) != 1 for v in image.values()) or len(image) != len(set(rows)):
                fails.append(("base pushout", t.code))
        return Report("attaching-pushout", not fails, checked, fails, details)

    if alpha.n + alpha.d > max_vertices:
        raise BadConfiguration(f"spawn time {alpha} needs trees with {alpha.n + alpha.d} vertices")
    reps = table.special_representatives(alpha)
    details["representatives"] = len(reps)
    reps_by_tree = {}
    for j, f in enumerate(reps):
        reps_by_tree.setdefault(f.tree.code, []).append(j)
    faces = {j: spawndary_faces(f, chart) for j, f in enumerate(reps)}
    for s in table.trees:
        rows = table.rows[s.code]
        less = [c for c, t in rows if t < alpha]
        upto = {c for c, t in rows if t <= alpha}
        at = {c for c, t in rows if t == alpha}
        lam, omega = [], []
        for code, js in reps_by_tree.items():
            homs = table.homs(reps[js[0]].tree, s)
            for j in js:
                for h in homs:
                    omega.append((j, h))
                    if any(_factors_through(s, h, fc.tree) for fc in faces[j]):
                        lam.append((j, h))
        image = {(j, h): tuple(reps[j].color(x) for x in h) for j, h in omega}
        less_set = set(less)
        leaving = [key for key in lam if image[key] not in less_set]
        if leaving:
            fails += [("lambda< leaves Q<", s.code, key) for key in leaving[:3]]
            checked += len(upto)
            continue
        for key in omega:
            if image[key] not in upto:
                fails.append(("image beyond alpha", s.code, key))
        # factorisations of dendrices spawning at alpha
        hits = {}
        lam_set = set(lam)
        for key in omega:
            if key not in lam_set:
                hits.setdefault(image[key], []).append(key)
        for c in at:
            if len(hits.get(c, [])) != 1:
                fails.append(("factorisations", s.code, c, len(hits.get(c, []))))
        lam_items = [("L",) + k for k in lam]
        base = FinPoset(["L", "Q", "T"], [("L", "Q"), ("L", "T")])
        diag = SetDiagram(base, {"L": lam_items, "Q": less, "T": [("T",) + k for k in omega]},
                          {("L", "Q"): {x: image[x[1:]] for x in lam_items},
                           ("L", "T"): {x: ("T",) + x[1:] for x in lam_items}}, check=False)
        colim = set_colimit(diag)
        gap = {}
        for c in less:
            gap.setdefault(colim.class_of("Q", c), set()).add(c)
        for k in omega:
            gap.setdefault(colim.class_of("T", ("T",) + k), set()).add(image[k])
        values = [next(iter(v)) for v in gap.values() if len(v) == 1]
        if any(len(v) != 1 for v in gap.values()):
            fails.append(("gap map ill-defined", s.code))
        elif len(values) != len(set(values)) or set(values) != upto:
            fails.append(("gap map not bijective", s.code, len(values), len(upto)))
        checked += len(upto)
        if len(fails) > 20:
            break
    return Report("attaching-pushout", not fails, checked, fails, details)


# union gluing of restricted sieves ------------------------------------------------------------

def restricted_sieve(universe: Universe, w: OpenSet) -> list:
    """Nonempty listed opens inside ``w``."""
    return [u for u in universe if not u.is_empty() and u.issubset(w)]


def intersection_of(cover, idx) -> OpenSet:
    w = None
    for i in sorted(idx):
        w = cover[i] if w is None else (w & cover[i])
    return w


def verify_union_gluing(universe: Universe, cover, max_vertices: int = 5, max_arity: int | None = None) -> Report:
    """Nerve of the restricted sieve of a cover versus its pieces.

    Per tree: the nerve of the union is the union of the nerves of the
    restricted sieves of the finite intersections, and the punctured-cube
    colimit of those nerves maps bijectively onto it.  All transports are
    inclusions, so injectivity is part of the check.
    """
    cover = list(cover)
    if any(u.is_empty() for u in cover):
        raise BadConfiguration("cover members must be nonempty")
    members = sorted({u for w in cover for u in restricted_sieve(universe, w)}, key=lambda u: u.sort_key())
    if not members:
        raise BadConfiguration("the cover contains no listed open")
    chart = Chart(members, None)
    whole = PosetOperad(chart)
    n = len(cover)
    subsets = [frozenset(c) for r in range(1, n + 1) for c in itertools.combinations(range(n), r)]
    pieces = {s: PosetOperad(chart, [chart.index[u] for u in restricted_sieve(universe, intersection_of(cover, s))
                                     if u in chart.index]) for s in subsets}
    if max_arity is None:
        max_arity = whole.max_arity()
    poset = FinPoset.from_leq(subsets, lambda a, b: a >= b)
    fails, checked = [], 0
    for t in enumerate_trees(max_vertices, max_arity):
        full = set(nerve_colorings(whole, t))
        levels = {s: nerve_colorings(pieces[s], t) for s in subsets}
        union = set().union(*[set(v) for v in levels.values()])
        checked += len(full)
        if union != full:
            fails.append(("union", t.code, len(full), len(union)))
            continue
        diag = SetDiagram(poset, levels, {(a, b): {c: c for c in levels[a]} for a, b in poset.covers()},
                          check=False)
        colim = set_colimit(diag)
        reps = {}
        for s in subsets:
            for c in levels[s]:
                reps.setdefault(colim.class_of(s, c), set()).add(c)
        if any(len(v) != 1 for v in reps.values()) or len(reps) != len(full):
            fails.append(("colimit", t.code, len(reps), len(full)))
    return Report("union-gluing", not fails, checked, fails,
                  {"max_vertices": max_vertices, "max_arity": max_arity, "cover": [str(u) for u in cover]})
