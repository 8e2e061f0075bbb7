"""Restriction, pushforward and valuewise tensor products."""
from __future__ import annotations

import itertools

from ..errors import BadConfiguration, PreimageUnlisted, UniverseMismatch
from ..fdvect import LinMap, permute_factors, tensor, tensor_obj
from ..stratline import Fold, MapDescriptor, OpenSet, StratSpace, Universe
from .core import PreFactAlg


class Restricted(PreFactAlg):
    def __init__(self, f: PreFactAlg, universe: Universe):
        super().__init__(universe, f"{f.name}|")
        self.base = f

    def _value(self, u):
        return self.base.value(u)

    def _op(self, sources, target):
        return self.base.op(sources, target)


def restrict(f: PreFactAlg, where) -> Restricted:
    """Restrict to the listed opens inside an open, or to an explicit sub-universe."""
    if isinstance(where, OpenSet):
        un = f.universe.restrict(lambda u: u.issubset(where))
    elif isinstance(where, Universe):
        for u in where:
            if u not in f.universe:
                raise UniverseMismatch(f"{u} is not listed", witness=u)
        un = where
    else:
        un = f.universe.restrict(where)
    return Restricted(f, un)


class Pushforward(PreFactAlg):
    def __init__(self, f: PreFactAlg, m: MapDescriptor, universe: Universe):
        super().__init__(universe, f"push({f.name})")
        if universe.space != m.target:
            raise BadConfiguration("target universe lives in the wrong space")
        if f.space != m.source:
            raise BadConfiguration("algebra does not live on the map's source")
        self.base, self.map = f, m
        self.pre = {}
        for v in universe:
            p = m.preimage(v)
            if p not in f.universe:
                raise PreimageUnlisted(f"preimage {p} of {v} is not listed", witness=v)
            self.pre[v] = p

    def _value(self, v):
        return self.base.value(self.pre[v])

    def _op(self, sources, target):
        return self.base.op([self.pre[s] for s in sources], self.pre[target])


def pushforward(f: PreFactAlg, m: MapDescriptor, universe: Universe) -> Pushforward:
    """``V -> f(preimage of V)`` on the given target universe."""
    return Pushforward(f, m, universe)


def _interchange(spaces_f, spaces_g) -> LinMap:
    """``(x)_i (F_i (x) G_i)  ->  ((x)_i F_i) (x) ((x)_i G_i)``."""
    inter = [x for pair in zip(spaces_f, spaces_g) for x in pair]
    n = len(spaces_f)
    return permute_factors(inter, [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)])


class TensorProduct(PreFactAlg):
    def __init__(self, f: PreFactAlg, g: PreFactAlg):
        if f.universe != g.universe:
            raise UniverseMismatch("tensor products need a common universe")
        super().__init__(f.universe, f"{f.name}(x){g.name}")
        self.f, self.g = f, g

    def _value(self, u):
        return tensor_obj([self.f.value(u), self.g.value(u)])

    def _op(self, sources, target):
        m = tensor(self.f.op(sources, target), self.g.op(sources, target))
        return m @ _interchange([self.f.value(s) for s in sources], [self.g.value(s) for s in sources])


def tensor_product(f: PreFactAlg, g: PreFactAlg) -> TensorProduct:
    return TensorProduct(f, g)


class DisjointSum(PreFactAlg):
    """``f`` on the first copy and ``g`` on the second copy of a space.

    The universe consists of all ``a + b`` with ``a`` listed for ``f`` and
    ``b`` listed for ``g``; both universes must contain the empty open.
    """

    def __init__(self, f: PreFactAlg, g: PreFactAlg):
        if f.space != g.space:
            raise UniverseMismatch("both summands must live on the same space")
        if not (f.universe.has_empty() and g.universe.has_empty()):
            raise BadConfiguration("both universes need the empty open")
        self.fold = Fold(f.space, 2)
        opens = [self.glue(a, b) for a in f.universe for b in g.universe]
        super().__init__(Universe(self.fold.source, opens), f"{f.name}+{g.name}")
        self.f, self.g = f, g

    def glue(self, a: OpenSet, b: OpenSet) -> OpenSet:
        return self.fold.copy(a, 0) | self.fold.copy(b, 1)

    def split(self, u: OpenSet) -> tuple:
        m = len(self.fold.target.components)
        base = self.fold.target
        return OpenSet(base, u.pieces[:m]), OpenSet(base, u.pieces[m:])

    def _value(self, u):
        a, b = self.split(u)
        return tensor_obj([self.f.value(a), self.g.value(b)])

    def _op(self, sources, target):
        ta, tb = self.split(target)
        parts = [self.split(s) for s in sources]
        m = tensor(self.f.op([p[0] for p in parts], ta), self.g.op([p[1] for p in parts], tb))
        return m @ _interchange([self.f.value(p[0]) for p in parts], [self.g.value(p[1]) for p in parts])


def disjoint_sum(f: PreFactAlg, g: PreFactAlg) -> DisjointSum:
    return DisjointSum(f, g)
