"""Prefactorization algebras over a finite universe of opens.

A ``PreFactAlg`` assigns a vector space to every listed open and a linear map
``F(U_1) (x) ... (x) F(U_n) -> F(V)`` to every operation, i.e. every tuple of
pairwise disjoint listed opens inside a listed target.  Subclasses implement
``_value`` and ``_op`` for sources in canonical order; the base class sorts
arbitrary source tuples, permutes tensor factors and memoizes, so symmetry
under reordering holds by construction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..errors import (BadConfiguration, IncoherentDiagram, NotAMorphism, NotContained,
                      UndefinedOperation)
from ..fdvect import UNIT, LinMap, VectObj, permute_factors, tensor, tensor_obj
from ..stratline import OpenSet, Universe, _sort_key


def canonical_order(sources: Sequence[OpenSet]) -> list:
    """Indices that sort ``sources`` canonically (stable for repeats)."""
    return sorted(range(len(sources)), key=lambda i: (_sort_key(sources[i]), i))


class PreFactAlg:
    """Base class; see the module docstring."""

    def __init__(self, universe: Universe, name: str = ""):
        self.universe = universe
        self.space = universe.space
        self.name = name or type(self).__name__
        self._values = {}
        self._ops = {}

    def __repr__(self):
        return f"{self.name}[{len(self.universe)} opens]"

    # to be provided by subclasses
    def _value(self, u: OpenSet) -> VectObj:
        raise NotImplementedError

    def _op(self, sources: tuple, target: OpenSet) -> LinMap:
        raise NotImplementedError

    # public interface
    def value(self, u: OpenSet) -> VectObj:
        if u not in self.universe:
            raise NotContained(f"{u} is not in the universe of {self.name}", witness=u)
        v = self._values.get(u)
        if v is None:
            v = self._value(u)
            self._values[u] = v
        return v

    def op(self, sources: Sequence[OpenSet], target: OpenSet) -> LinMap:
        sources = tuple(sources)
        validate_operation(self.universe, sources, target)
        order = canonical_order(sources)
        key = (tuple(sources[i] for i in order), target)
        m = self._ops.get(key)
        if m is None:
            m = self._op(key[0], target)
            expect_src = tensor_obj(self.value(s) for s in key[0])
            if m.src != expect_src or m.dst != self.value(target):
                raise BadConfiguration(f"{self.name}: operation into {target} has the wrong shape")
            self._ops[key] = m
        if order == list(range(len(sources))):
            return m
        return m @ permute_factors([self.value(s) for s in sources], order)

    def incl(self, u: OpenSet, v: OpenSet) -> LinMap:
        return self.op((u,), v)

    def mu(self, u: OpenSet, v: OpenSet) -> LinMap:
        return self.op((u, v), u | v)

    def unit_empty(self) -> LinMap:
        e = self.space.empty()
        return self.op((), e)

    def apply(self, sources: Sequence[OpenSet], target: OpenSet, vectors: Sequence) -> list:
        """Evaluate an operation on a pure tensor of coordinate vectors."""
        flat = [1]
        for v in vectors:
            flat = [a * b for a in flat for b in v]
        return self.op(sources, target).apply(flat)


def validate_operation(un: Universe, sources: Sequence[OpenSet], target: OpenSet):
    if target not in un:
        raise NotContained(f"target {target} is not listed", witness=target)
    for s in sources:
        if s not in un:
            raise NotContained(f"source {s} is not listed", witness=s)
        if not s.issubset(target):
            raise NotAMorphism(f"{s} is not inside {target}", witness=(s, target))
    for a, b in itertools.combinations(sources, 2):
        if not a.disjoint(b):
            raise NotAMorphism(f"sources {a} and {b} overlap", witness=(a, b))


class FunctionalAlg(PreFactAlg):
    """A prefactorization algebra given by two callables."""

    def __init__(self, universe: Universe, value_fn: Callable, op_fn: Callable, name: str = ""):
        super().__init__(universe, name)
        self._value_fn, self._op_fn = value_fn, op_fn

    def _value(self, u):
        return self._value_fn(u)

    def _op(self, sources, target):
        return self._op_fn(sources, target)


# componentwise algebras ----------------------------------------------------------

class ComponentwiseAlg(PreFactAlg):
    """Value of an open is the tensor of its component values.

    Subclasses supply ``comp_value(c)`` for connected opens and
    ``connected_op(parts, c)`` for canonically ordered connected sources
    inside a connected target ``c``.  Values of the empty open are ``Q``.
    """

    def comp_value(self, c: OpenSet) -> VectObj:
        raise NotImplementedError

    def connected_op(self, parts: tuple, c: OpenSet) -> LinMap:
        raise NotImplementedError

    def _value(self, u):
        return tensor_obj(self.comp_value(c) for c in u.components())

    def _op(self, sources, target):
        return componentwise_op(sources, target, self.comp_value, self.connected_op)


def componentwise_op(sources, target, comp_value, connected_op) -> LinMap:
    """Group source components by target component and tensor the connected ops."""
    flat = [c for s in sources for c in s.components()]
    tcomps = target.components()
    groups = [[] for _ in tcomps]
    for i, c in enumerate(flat):
        for j, d in enumerate(tcomps):
            if c.issubset(d):
                groups[j].append(i)
                break
        else:
            raise NotAMorphism(f"component {c} is not inside {target}")
    perm = []
    maps = []
    for j, d in enumerate(tcomps):
        idx = sorted(groups[j], key=lambda i: _sort_key(flat[i]))
        perm += idx
        maps.append(connected_op(tuple(flat[i] for i in idx), d))
    spaces = [comp_value(c) for c in flat]
    return tensor(*maps) @ permute_factors(spaces, perm)


# comparison and tabulation ---------------------------------------------------------

def operations(un: Universe, max_arity: int = 3, target: OpenSet | None = None,
               allow_empty: bool = True) -> list:
    """All operations ``(sources, target)`` with canonically sorted sources.

    The empty open may appear several times when listed and ``allow_empty``.
    """
    e = un.space.empty()
    targets = [target] if target is not None else list(un.opens)
    out = []
    for t in targets:
        below = [u for u in un.opens if u.issubset(t) and not u.is_empty()]
        with_empty = allow_empty and e in un
        for n in range(0, max_arity + 1):
            for combo in itertools.combinations(below, n):
                if all(a.disjoint(b) for a, b in itertools.combinations(combo, 2)):
                    out.append((combo, t))
                    if with_empty:
                        for k in range(1, max_arity - n + 1):
                            srcs = tuple(sorted(combo + (e,) * k, key=_sort_key))
                            out.append((srcs, t))
    return out


def same_algebra(f: PreFactAlg, g: PreFactAlg, max_arity: int = 3, universe: Universe | None = None):
    """First difference between two algebras on a common universe, or None."""
    un = universe or f.universe
    for u in un:
        if f.value(u) != g.value(u):
            return ("value", u)
    for srcs, t in operations(un, max_arity):
        if f.op(srcs, t) != g.op(srcs, t):
            return ("op", srcs, t)
    return None


@dataclass
class CoherenceReport:
    ok: bool
    checked: int
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def coherence_sweep(f: PreFactAlg, max_arity: int = 3, max_failures: int = 5) -> CoherenceReport:
    """Identities, symmetry on repeated sources, and all partial compositions
    whose outer, inner and composite arities stay within ``max_arity``."""
    un = f.universe
    ops = operations(un, max_arity)
    by_target = {}
    for srcs, t in ops:
        by_target.setdefault(t, []).append(srcs)
    fails, n = [], 0

    def fail(item):
        fails.append(item)
        return len(fails) >= max_failures

    for u in un:
        n += 1
        if f.incl(u, u) != LinMap.identity(f.value(u)):
            if fail(("identity", u)):
                return CoherenceReport(False, n, fails)
    for srcs, t in ops:
        # repeated sources (only the empty open can repeat) must commute
        for i, j in itertools.combinations(range(len(srcs)), 2):
            if srcs[i] == srcs[j]:
                perm = list(range(len(srcs)))
                perm[i], perm[j] = j, i
                m = f.op(srcs, t)
                n += 1
                if m @ permute_factors([f.value(s) for s in srcs], perm) != m:
                    if fail(("symmetry", srcs, t)):
                        return CoherenceReport(False, n, fails)
        outer = f.op(srcs, t)
        for j, s in enumerate(srcs):
            for inner in by_target.get(s, []):
                total = len(srcs) - 1 + len(inner)
                if total > max_arity:
                    continue
                comp_srcs = srcs[:j] + inner + srcs[j + 1:]
                ids = [LinMap.identity(f.value(x)) for x in srcs]
                ids[j] = f.op(inner, s)
                n += 1
                if outer @ tensor(*ids) != f.op(comp_srcs, t):
                    if fail(("composition", srcs, t, j, inner)):
                        return CoherenceReport(False, n, fails)
    return CoherenceReport(not fails, n, fails)


class TableAlg(PreFactAlg):
    """Frozen values and operations, e.g. a materialized algebra."""

    def __init__(self, universe: Universe, values: dict, ops: dict, name: str = "table"):
        super().__init__(universe, name)
        self._table_values = dict(values)
        self._table_ops = dict(ops)

    def _value(self, u):
        return self._table_values[u]

    def _op(self, sources, target):
        key = (sources, target)
        if key not in self._table_ops:
            raise UndefinedOperation(f"no operation recorded for {key}")
        return self._table_ops[key]


def materialize(f: PreFactAlg, max_arity: int = 3) -> TableAlg:
    un = f.universe
    vals = {u: f.value(u) for u in un}
    ops = {(s, t): f.op(s, t) for s, t in operations(un, max_arity)}
    return TableAlg(un, vals, ops, name=f.name)
