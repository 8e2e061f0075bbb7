"""Multiplicativity, constructibility and descent checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import ChainNotCofinal, MissingIntersection, NotContained
from ..fdvect import LinMap, VectColimit, VectObj, induced_map, poset_colimit
from ..finposet import FinPoset
from ..stratline import OpenSet, Universe, is_iso_inclusion, is_weiss_cover
from .core import PreFactAlg


@dataclass
class CheckReport:
    name: str
    ok: bool
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_multiplicativity(f: PreFactAlg, max_failures: int = 10) -> CheckReport:
    """Binary products of disjoint nonempty listed opens with listed union are
    isomorphisms, and so is the unit when the empty open is listed."""
    fails, n = [], 0
    members = [u for u in f.universe if not u.is_empty()]
    for u, v in itertools.combinations(members, 2):
        if not u.disjoint(v) or (u | v) not in f.universe:
            continue
        n += 1
        if not f.mu(u, v).is_iso():
            fails.append(("product", str(u), str(v)))
            if len(fails) >= max_failures:
                break
    if f.universe.has_empty():
        n += 1
        if not f.unit_empty().is_iso():
            fails.append(("unit", "empty", f.value(f.space.empty()).dim))
    return CheckReport("multiplicativity", not fails, n, fails)


def check_constructible(f: PreFactAlg, scope: Sequence[OpenSet] | Universe | None = None,
                        max_failures: int = 10) -> CheckReport:
    """Every listed inclusion of abstractly isomorphic multidisks is sent to an iso.

    All comparable pairs in scope are tested, not only covering pairs.
    """
    opens = list(scope) if scope is not None else list(f.universe)
    fails, n = [], 0
    for u, v in itertools.permutations(opens, 2):
        if not u.issubset(v) or not is_iso_inclusion(u, v):
            continue
        n += 1
        if not f.incl(u, v).is_iso():
            fails.append(("inclusion", str(u), str(v)))
            if len(fails) >= max_failures:
                break
    return CheckReport("constructible", not fails, n, fails)


def check_locally_constructible(f: PreFactAlg, cover: Sequence[OpenSet]) -> CheckReport:
    """Constructibility on each ``down(U_i)`` against the global check.

    Passing locally on a cover whose down-sets exhaust the universe must
    agree with passing globally.
    """
    local = {}
    for w in cover:
        local[str(w)] = check_constructible(f, f.universe.below(w)).ok
    covered = all(any(u.issubset(w) for w in cover) for u in f.universe)
    glob = check_constructible(f)
    consistent = glob.ok == all(local.values()) if covered else True
    return CheckReport("locally-constructible", consistent and glob.ok, glob.checked, glob.failures,
                       {"local": local, "global": glob.ok, "covered": covered, "consistent": consistent})


# precover evaluation --------------------------------------------------------------

@dataclass
class PrecoverValue:
    colimit: VectColimit
    comparison: LinMap
    poset: FinPoset
    opens: dict                  # index set -> open

    @property
    def obj(self) -> VectObj:
        return self.colimit.obj


def precover_diagram(f: PreFactAlg, cover: Sequence[OpenSet]) -> tuple:
    """Punctured cube of finite intersections, ordered by reverse inclusion of index sets."""
    n = len(cover)
    subsets = [frozenset(c) for r in range(1, n + 1) for c in itertools.combinations(range(n), r)]
    opens = {}
    for s in subsets:
        w = None
        for i in sorted(s):
            w = cover[i] if w is None else (w & cover[i])
        if w not in f.universe:
            raise MissingIntersection(f"intersection {w} of {sorted(s)} is not listed", witness=sorted(s))
        opens[s] = w
    poset = FinPoset.from_leq(subsets, lambda a, b: a >= b)
    transports = {(a, b): f.incl(opens[a], opens[b]) for a, b in poset.covers()}
    values = {s: f.value(opens[s]) for s in subsets}
    return poset, values, transports, opens


def evaluate_on_precover(f: PreFactAlg, cover: Sequence[OpenSet], u: OpenSet) -> PrecoverValue:
    cover = list(cover)
    if u not in f.universe:
        raise NotContained(f"{u} is not listed", witness=u)
    for w in cover:
        if not w.issubset(u):
            raise NotContained(f"cover member {w} is not inside {u}", witness=w)
    poset, values, transports, opens = precover_diagram(f, cover)
    colim = poset_colimit(poset, values, transports)
    cocone = {s: f.incl(opens[s], u) for s in poset.elements}
    comp = induced_map(colim, cocone, f.value(u))
    return PrecoverValue(colim, comp, poset, opens)


def evaluate_on_family(f: PreFactAlg, family: Sequence[OpenSet], u: OpenSet | None = None) -> tuple:
    """Colimit of ``f`` over a listed family ordered by inclusion.

    Returns the colimit and, when ``u`` is given, the comparison map into ``f(u)``.
    """
    fam = list(dict.fromkeys(family))
    for w in fam:
        if w not in f.universe:
            raise NotContained(f"{w} is not listed", witness=w)
    poset = FinPoset.from_leq(fam, lambda a, b: a.issubset(b))
    colim = poset_colimit(poset, {w: f.value(w) for w in fam},
                          {(a, b): f.incl(a, b) for a, b in poset.covers()})
    if u is None:
        return colim, None
    comp = induced_map(colim, {w: f.incl(w, u) for w in fam}, f.value(u))
    return colim, comp


# Weiss descent ----------------------------------------------------------------------

def check_weiss_descent_finite(f: PreFactAlg, cover: Sequence[OpenSet], u: OpenSet,
                               grid: int | None = None) -> CheckReport:
    """The punctured-cube comparison is an isomorphism.

    With ``grid`` the cover is also sampled for the Weiss condition.
    """
    details = {}
    if grid is not None:
        rep = is_weiss_cover(cover, u, grid)
        details["weiss"] = rep.ok
        if not rep.ok:
            details["weiss_witness"] = rep.witness
    pv = evaluate_on_precover(f, cover, u)
    iso = pv.comparison.is_iso()
    details.update(colimit_dim=pv.obj.dim, value_dim=f.value(u).dim)
    ok = iso and details.get("weiss", True)
    return CheckReport("weiss-finite", ok, len(pv.poset.elements),
                       [] if ok else [("comparison not iso", str(u))], details)


def check_weiss_descent_chain(f: PreFactAlg, chain: Sequence[OpenSet], u: OpenSet) -> CheckReport:
    """An ascending chain exhausting ``u`` stabilizes onto ``f(u)``.

    Cofinality is certified by checking that every listed open strictly inside
    ``u`` lies in some chain member.  Status ``stabilized`` or ``not-stabilized``.
    """
    chain = list(chain)
    for w in chain + [u]:
        if w not in f.universe:
            raise NotContained(f"{w} is not listed", witness=w)
    for a, b in zip(chain, chain[1:]):
        if not a.issubset(b):
            raise ChainNotCofinal(f"chain is not ascending at {a} -> {b}", witness=(a, b))
    if not chain[-1].issubset(u):
        raise ChainNotCofinal("chain leaves the target", witness=chain[-1])
    for v in f.universe:
        if v != u and v.issubset(u) and not any(v.issubset(w) for w in chain):
            raise ChainNotCofinal(f"{v} lies in no chain member", witness=v)
    steps = [f.incl(a, b).is_iso() for a, b in zip(chain, chain[1:])]
    start = len(steps)
    while start > 0 and steps[start - 1]:
        start -= 1
    stabilized = start < len(steps) or len(chain) == 1
    into_u = f.incl(chain[-1], u).is_iso()
    status = "stabilized" if stabilized else "not-stabilized"
    ok = stabilized and into_u
    details = {"status": status, "stable_from": start if stabilized else None,
               "stable_dim": f.value(chain[-1]).dim, "value_dim": f.value(u).dim,
               "iso_into_target": into_u, "steps": steps}
    fails = [] if ok else [(status, str(u))]
    return CheckReport("weiss-chain", ok, len(chain), fails, details)
