"""Extension from a basis, disjoint-union completion and gluing along covers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..errors import (AxiomFailure, ChoiceDependent, NoDecompositionListed, NotFactorizing,
                      OverlapMismatch, ShortcutChoiceDependent, UndefinedOperation)
from ..fdvect import UNIT, LinMap, VectObj, permute_factors, poset_colimit, tensor, tensor_obj
from ..stratline import OpenSet, Universe, basis_predicate, close_universe, is_iso_inclusion, union_of
from ..openoperad import encode_cocart, enumerate_cocart_into
from .checks import check_constructible
from .core import PreFactAlg, componentwise_op, operations
from .transport import restrict


# extension from a basis ----------------------------------------------------------------

@dataclass
class _Extended:
    obj: VectObj
    cocone: dict          # basis open B <= u  ->  f(B) -> obj
    lift: dict            # basis open B -> obj -> f(B); sum of cocone @ lift is the identity
    shortcut: OpenSet | None = None


class BasisExtension(PreFactAlg):
    """Left Kan extension of an algebra on a factorizing basis.

    The value at an ambient open is the colimit of the basis values below it.
    When the open is a multidisk and the algebra is constructible, every
    listed abstractly isomorphic basis sub-multidisk must map isomorphically
    onto that colimit; the value is then re-based on the first such disk.
    """

    def __init__(self, f: PreFactAlg, ambient: Universe, constructible: bool, check_shortcuts: bool = True):
        super().__init__(ambient.union(f.universe), f"ext({f.name})")
        self.base = f
        self.basis = f.universe
        self.constructible = constructible
        self.check_shortcuts = check_shortcuts
        self._ext = {}

    def data(self, u: OpenSet) -> _Extended:
        d = self._ext.get(u)
        if d is not None:
            return d
        f = self.base
        if u in self.basis:
            below = [b for b in self.basis.below(u)]
            d = _Extended(f.value(u), {b: f.incl(b, u) for b in below}, {u: LinMap.identity(f.value(u))})
            self._ext[u] = d
            return d
        below = list(self.basis.below(u))
        poset = self.basis.poset().subposet(below)
        colim = poset_colimit(poset, {b: f.value(b) for b in below},
                              {(a, b): f.incl(a, b) for a, b in poset.covers()}, check=False)
        cocone, lift = dict(colim.cocone), colim.lift()
        lift = {b: m for b, m in lift.items() if not m.is_zero()}
        d = _Extended(colim.obj, cocone, lift)
        if self.constructible:
            cands = [b for b in below if is_iso_inclusion(b, u)]
            for b in cands:
                if not cocone[b].is_iso():
                    raise ShortcutChoiceDependent(
                        f"{b} is abstractly isomorphic to {u} but does not map isomorphically", witness=b)
                if not self.check_shortcuts:
                    break
            if cands:
                star = cands[0]
                phi = cocone[star]
                inv = phi.inverse()
                d = _Extended(f.value(star), {b: inv @ c for b, c in cocone.items()},
                              {b: m @ phi for b, m in lift.items()}, shortcut=star)
        self._ext[u] = d
        return d

    def _value(self, u):
        return self.data(u).obj

    def _op(self, sources, target):
        f = self.base
        if target in self.basis and all(s in self.basis for s in sources):
            return f.op(sources, target)
        tgt = self.data(target)
        src_val = tensor_obj(self.value(s) for s in sources)
        out = LinMap.zero(src_val, tgt.obj)
        if not sources:
            below = sorted(tgt.cocone, key=lambda b: b.sort_key())
            if not below:
                raise UndefinedOperation(f"no basis open inside {target}")
            b = below[0]
            return tgt.cocone[b] @ f.op((), b)
        lifts = [list(self.data(s).lift.items()) for s in sources]
        for combo in itertools.product(*lifts):
            bs = [b for b, _ in combo]
            whole = union_of(self.space, bs)
            if whole not in self.basis:
                raise NotFactorizing(f"disjoint union {whole} is not in the basis", witness=whole)
            m = tgt.cocone[whole] @ f.op(bs, whole) @ tensor(*[l for _, l in combo])
            out = out + m
        return out


def extend_from_basis(f: PreFactAlg, ambient: Universe, grid: int | None = None,
                      constructible: bool | None = None) -> BasisExtension:
    """Extend ``f`` from its universe, a factorizing basis, to ``ambient``.

    With ``grid`` the basis is sampled for the factorizing property first.
    ``constructible=None`` decides the shortcut from ``check_constructible``.
    """
    if grid is not None:
        rep = basis_predicate(f.universe, ambient, "factorizing", grid)
        if not rep.ok:
            raise NotFactorizing(f"basis is not factorizing: {rep.failures[0]}", witness=rep.failures)
    if constructible is None:
        constructible = check_constructible(f).ok
    return BasisExtension(f, ambient, constructible)


# disjoint completion ----------------------------------------------------------------------

class DisjointCompletion(PreFactAlg):
    """Extension of a multiplicative algebra on a decomposable family to all
    disjoint unions.  Unlisted opens get the tensor of their component values."""

    def __init__(self, f: PreFactAlg, universe: Universe):
        super().__init__(universe, f"disj({f.name})")
        self.base = f
        for u in universe:
            for c in u.components():
                if c not in f.universe:
                    raise NoDecompositionListed(f"component {c} of {u} is not listed", witness=u)
        self._phi = {}

    def phi(self, u: OpenSet) -> LinMap:
        """``(x)_components f(c) -> value(u)``: identity off the basis, a product on it."""
        m = self._phi.get(u)
        if m is None:
            f = self.base
            if u in f.universe:
                m = f.op(u.components(), u)
                if not m.is_iso():
                    raise AxiomFailure(f"{f.name} is not multiplicative at {u}", witness=u)
            else:
                m = LinMap.identity(self.value(u))
            self._phi[u] = m
        return m

    def _value(self, u):
        if u in self.base.universe:
            return self.base.value(u)
        return tensor_obj(self.base.value(c) for c in u.components())

    def _op(self, sources, target):
        f = self.base
        if target in f.universe and all(s in f.universe for s in sources):
            return f.op(sources, target)
        core = componentwise_op(sources, target, f.value, lambda parts, d: f.op(parts, d))
        inv = tensor(*[self.phi(s).inverse() for s in sources])
        return self.phi(target) @ core @ inv


def extend_disjoint_completion(f: PreFactAlg, universe: Universe | None = None,
                               check: bool = True) -> DisjointCompletion:
    """Complete to the closure under disjoint unions (``universe`` overrides it)."""
    if check:
        rep = basis_predicate(f.universe, f.universe, "decomposable")
        if not rep.ok:
            raise NoDecompositionListed(f"family is not decomposable: {rep.failures[0]}",
                                        witness=rep.failures)
    if universe is None:
        universe = close_universe(f.universe, "disjoint_unions")
    return DisjointCompletion(f, universe)


def check_decomposition_independence(g: PreFactAlg, basis: Universe, u: OpenSet) -> int:
    """Compare every pair of decompositions of ``u`` into ``basis`` members
    through their common refinement.

    Returns the number of pairs checked; raises ``ChoiceDependent`` on failure.
    """
    comps = u.components()
    decs = [encode_cocart(m) for m in enumerate_cocart_into(u, basis)]

    def through(rel, meet, blocks):
        parts = [union_of(u.space, [comps[i] for i in blk]) for blk in rel.blocks]
        order, inner = [], []
        for j, part in enumerate(parts):
            ks = [k for k, blk in enumerate(meet.blocks) if rel.block_of(blk[0]) == j]
            order += ks
            inner.append(g.op([blocks[k] for k in ks], part))
        perm = permute_factors([g.value(b) for b in blocks], order)
        return g.op(parts, u) @ tensor(*inner) @ perm

    n = 0
    for rp, rq in itertools.combinations(decs, 2):
        meet = rp.meet(rq)
        blocks = [union_of(u.space, [comps[i] for i in blk]) for blk in meet.blocks]
        n += 1
        if through(rp, meet, blocks) != through(rq, meet, blocks):
            raise ChoiceDependent(f"decompositions of {u} disagree", witness=(rp, rq))
    return n


def strip_empty(f: PreFactAlg) -> PreFactAlg:
    return restrict(f, f.universe.without_empty())


class WithEmpty(PreFactAlg):
    """Adjoin the empty open with value ``Q``; empty sources are dropped."""

    def __init__(self, f: PreFactAlg):
        super().__init__(f.universe.union(Universe(f.space, [f.space.empty()])), f"{f.name}+empty")
        self.base = f

    def _value(self, u):
        return UNIT if u.is_empty() else self.base.value(u)

    def _op(self, sources, target):
        if target.is_empty():
            return LinMap.identity(UNIT)
        return self.base.op([s for s in sources if not s.is_empty()], target)


def add_empty(f: PreFactAlg) -> PreFactAlg:
    return f if f.universe.has_empty() else WithEmpty(f)


# gluing ------------------------------------------------------------------------------------

class Glued(PreFactAlg):
    def __init__(self, pieces: list, universe: Universe):
        super().__init__(universe, "glued")
        self.pieces = pieces

    def _piece_for(self, opens):
        for w, f in self.pieces:
            if all(o in f.universe for o in opens):
                return f
        raise UndefinedOperation(f"no piece lists all of {list(map(str, opens))}")

    def _value(self, u):
        return self._piece_for([u]).value(u)

    def _op(self, sources, target):
        return self._piece_for(list(sources) + [target]).op(sources, target)


def glue_from_cover(pieces, max_arity: int = 3) -> Glued:
    """Glue algebras ``f_i`` on universes below opens ``U_i``.

    Pieces must agree exactly (values and operations up to ``max_arity``) on
    listed opens inside ``U_i & U_j``; the first disagreement raises
    ``OverlapMismatch``.  Operations not inside a single piece are undefined.
    """
    pieces = list(pieces)
    for w, f in pieces:
        for u in f.universe:
            if not u.issubset(w):
                raise OverlapMismatch(f"{u} is not inside its piece {w}", witness=u)
    for (w1, f1), (w2, f2) in itertools.combinations(pieces, 2):
        common = Universe(f1.space, [u for u in f1.universe if u in f2.universe and u.issubset(w1 & w2)])
        for u in common:
            if f1.value(u) != f2.value(u):
                raise OverlapMismatch(f"values differ at {u}", witness=u)
        for srcs, t in operations(common, max_arity):
            if f1.op(srcs, t) != f2.op(srcs, t):
                raise OverlapMismatch(f"operations into {t} differ", witness=(srcs, t))
    universe = pieces[0][1].universe
    for _, f in pieces[1:]:
        universe = universe.union(f.universe)
    return Glued(pieces, universe)
