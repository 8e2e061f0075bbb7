"""Task handlers dispatched from a config.

Each handler takes ``(cfg, params, overrides)`` and returns an ``Outcome``.
A ``FactAlgError`` raised by the mathematics is recorded as a failure with the
exception as witness; configuration problems propagate to the caller.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FactAlgError, RationalParseError, SchemaError
from .fdvect import LinMap, VectObj, poset_colimit
from .finposet import FinPoset
from .stratline import LINE, basis_predicate, classify_multidisk, is_weiss_cover


@dataclass
class Outcome:
    ok: bool
    values: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    certified: dict | None = None     # bounds the pass is certified up to

    @property
    def status(self) -> str:
        if not self.ok:
            return "fail"
        if self.certified:
            inner = ",".join(f"{k}={v}" for k, v in sorted(self.certified.items()))
            return f"certified-up-to({inner})"
        return "pass"


def jsonable(x):
    """Stable, JSON-friendly rendering of witnesses and values."""
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    return str(x)


def _space_of(cfg, params, key="space"):
    if key in params:
        return cfg.space(params[key])
    if "model" in params:
        return cfg.model(params["model"]).space
    raise SchemaError(f"task needs {key!r} or 'model'")


def _need(params, key):
    if key not in params:
        raise SchemaError(f"task parameter {key!r} is missing")
    return params[key]


def _bound(params, overrides, default=5):
    return overrides.get("tree_bound") or params.get("max_vertices", default)


def _grid(params, overrides, default=4):
    return overrides.get("grid") or params.get("grid", default)


# check-space ----------------------------------------------------------------------------

def task_classify(cfg, p, ov):
    X = _space_of(cfg, p)
    types = []
    ok = True
    for u in cfg.opens(X, _need(p, "opens"), "params.opens"):
        cl = classify_multidisk(u)
        ok &= cl.is_multidisk
        types.append([str(t) for t in cl.types] if cl.is_multidisk else None)
    return Outcome(ok, {"types": types})


def task_weiss_cover(cfg, p, ov):
    X = _space_of(cfg, p)
    grid, s_max = _grid(p, ov), p.get("s_max", 2)
    rep = is_weiss_cover(cfg.opens(X, _need(p, "cover"), "params.cover"), cfg.open(X, _need(p, "open")), grid, s_max)
    return Outcome(rep.ok, {}, [] if rep.ok else [list(rep.witness)], {"grid": grid, "s_max": s_max})


def task_basis(cfg, p, ov):
    mode = p.get("mode", "factorizing")
    grid = _grid(p, ov)
    rep = basis_predicate(cfg.universe(_need(p, "basis")), cfg.universe(_need(p, "ambient")), mode, grid)
    cert = {"grid": grid} if mode != "decomposable" else None
    return Outcome(rep.ok, {"mode": mode}, rep.failures, cert)


def task_pushout_assumptions(cfg, p, ov):
    from .openoperad import Chart, check_pushout_assumptions
    chart = Chart(cfg.universe(_need(p, "chart")).opens)
    rep = check_pushout_assumptions(chart, p.get("max_arity", 2))
    values = {k: v[0] for k, v in sorted(rep.results.items())}
    wits = [[k, v[1]] for k, v in sorted(rep.results.items()) if not v[0]]
    return Outcome(rep.ok, values, wits, {"max_arity": p.get("max_arity", 2)})


def task_cocart_codec(cfg, p, ov):
    from .openoperad import all_partitions, decode, encode_cocart, enumerate_cocart_into
    X = _space_of(cfg, p)
    un = cfg.universe(p["universe"]) if "universe" in p else None
    counts, ok, wits = [], True, []
    for b in cfg.opens(X, _need(p, "opens"), "params.opens"):
        ms = enumerate_cocart_into(b, un)
        counts.append(len(ms))
        for m in ms:
            if decode(encode_cocart(m), b) != m:
                ok = False
                wits.append(["decode(encode)", str(b)])
        if un is None:
            n = len(b.components())
            for rel in all_partitions(n):
                if encode_cocart(decode(rel, b)) != rel:
                    ok = False
                    wits.append(["encode(decode)", str(b), rel.blocks])
    return Outcome(ok, {"counts": counts}, wits)


# check-algebra ----------------------------------------------------------------------------

def task_multiplicativity(cfg, p, ov):
    from .prefact import check_multiplicativity
    rep = check_multiplicativity(cfg.model(_need(p, "model")))
    return Outcome(rep.ok, {"checked": rep.checked}, rep.failures)


def task_constructible(cfg, p, ov):
    from .prefact import check_constructible
    rep = check_constructible(cfg.model(_need(p, "model")))
    return Outcome(rep.ok, {"checked": rep.checked}, rep.failures)


def task_coherence(cfg, p, ov):
    from .prefact import coherence_sweep
    k = p.get("max_arity", 3)
    rep = coherence_sweep(cfg.model(_need(p, "model")), k)
    return Outcome(rep.ok, {"checked": rep.checked}, rep.failures, {"max_arity": k})


def task_inclusion_is_multiplication(cfg, p, ov):
    f = cfg.model(_need(p, "model"))
    a = cfg.algebra(_need(p, "algebra"))
    u, v = cfg.open(f.space, _need(p, "source")), cfg.open(f.space, _need(p, "target"))
    m = f.incl(u, v)
    ok = m.src == a.mult.src and m.dst == a.mult.dst and m == a.mult
    return Outcome(ok, {"source_dim": m.src.dim, "target_dim": m.dst.dim})


# evaluate ---------------------------------------------------------------------------------

def task_weiss_chain(cfg, p, ov):
    from .prefact import check_weiss_descent_chain
    f = cfg.model(_need(p, "model"))
    chain = cfg.opens(f.space, _need(p, "chain"), "params.chain")
    rep = check_weiss_descent_chain(f, chain, cfg.open(f.space, _need(p, "open")))
    d = rep.details
    return Outcome(rep.ok, {"status": d["status"], "stable_dim": d["stable_dim"], "value_dim": d["value_dim"],
                            "stable_from": d["stable_from"]}, rep.failures, {"chain_steps": len(chain)})


def task_weiss_finite(cfg, p, ov):
    from .prefact import check_weiss_descent_finite
    f = cfg.model(_need(p, "model"))
    grid = _grid(p, ov, None) if ("grid" in p or ov.get("grid")) else None
    rep = check_weiss_descent_finite(f, cfg.opens(f.space, _need(p, "cover"), "params.cover"),
                                     cfg.open(f.space, _need(p, "open")), grid)
    return Outcome(rep.ok, {"colimit_dim": rep.details["colimit_dim"], "value_dim": rep.details["value_dim"]},
                   rep.failures, {"grid": grid} if grid else None)


def task_colimit(cfg, p, ov):
    from .config import parse_rational
    elements = list(_need(p, "elements"))
    covers = [tuple(c) for c in p.get("covers", [])]
    base = FinPoset(elements, covers)
    dims = _need(p, "dims")
    values = {e: VectObj(dims[e]) for e in elements}
    maps = {}
    for a, b in covers:
        rows = p.get("maps", {}).get(f"{a}<{b}")
        if rows is None:
            raise SchemaError(f"params.maps: no matrix for {a}<{b}")
        maps[(a, b)] = LinMap.from_rows(values[a], values[b],
                                        [[parse_rational(x, f"params.maps.{a}<{b}") for x in r] for r in rows])
    colim = poset_colimit(base, values, maps)
    return Outcome(True, {"dim": colim.obj.dim})


def task_extend_basis(cfg, p, ov):
    from .prefact import extend_from_basis, evaluate_on_precover
    f = cfg.model(_need(p, "model"))
    amb = cfg.universe(_need(p, "ambient"))
    grid = p.get("grid")
    ext = extend_from_basis(f, amb, grid=grid, constructible=p.get("constructible"))
    X = f.space
    dims = [ext.value(u).dim for u in cfg.opens(X, p.get("opens", []), "params.opens")]
    for u in amb:
        ext.value(u)
    ok, wits = True, []
    for i, pc in enumerate(p.get("precovers", [])):
        u = cfg.open(X, pc["open"])
        pv = evaluate_on_precover(ext, cfg.opens(X, pc["cover"], f"params.precovers[{i}].cover"), u)
        if not pv.comparison.is_iso():
            ok = False
            wits.append(["precover comparison not iso", str(u)])
    return Outcome(ok, {"dims": dims}, wits, {"grid": grid} if grid else None)


def task_disjoint_completion(cfg, p, ov):
    from .prefact import (add_empty, check_decomposition_independence, extend_disjoint_completion,
                          same_algebra, strip_empty)
    f = cfg.model(_need(p, "model"))
    g = extend_disjoint_completion(f)
    X = f.space
    opens = cfg.opens(X, p.get("opens", []), "params.opens")
    dims = [g.value(u).dim for u in opens]
    pairs = sum(check_decomposition_independence(g, g.universe, u) for u in opens)
    ok, wits = True, []
    if g.universe.has_empty():
        diff = same_algebra(add_empty(strip_empty(g)), g, max_arity=p.get("max_arity", 2))
        if diff is not None:
            ok = False
            wits.append(["empty strip/add not identity", diff])
    return Outcome(ok, {"dims": dims, "pairs": pairs, "size": len(g.universe)}, wits)


# glue and sections ------------------------------------------------------------------------

def _free_modules(a, p):
    from .prefact.algebra import direct_sum_left, direct_sum_right, regular_left, regular_right
    r, l = p.get("right_copies", 1), p.get("left_copies", 1)
    m1 = regular_right(a) if r == 1 else direct_sum_right([regular_right(a)] * r)
    m2 = regular_left(a) if l == 1 else direct_sum_left([regular_left(a)] * l)
    return m1, m2


def task_interval_sections(cfg, p, ov):
    from .prefact import glued_interval_sections
    a = cfg.algebra(_need(p, "algebra"))
    m1, m2 = _free_modules(a, p)
    gs = glued_interval_sections(m1, a, m2)
    return Outcome(gs.is_iso, {"dim": gs.colimit.obj.dim, "relative_dim": gs.relative.obj.dim})


def task_glue_round_trip(cfg, p, ov):
    from .prefact import check_constructible, check_multiplicativity, glue_setup, restrict, same_algebra
    a = cfg.algebra(_need(p, "algebra"))
    m1, m2 = _free_modules(a, p)
    setup = glue_setup(m1, m2)
    ok, wits = True, []
    for w, piece in setup.pieces:
        diff = same_algebra(restrict(setup.glued, piece.universe), piece, max_arity=2)
        if diff is not None:
            ok = False
            wits.append(["restriction differs", str(w), diff])
    mult = check_multiplicativity(setup.glued)
    cons = check_constructible(setup.glued)
    ok = ok and mult.ok and cons.ok
    wits += mult.failures + cons.failures
    return Outcome(ok, {"multiplicative": mult.ok, "constructible": cons.ok, "size": len(setup.glued.universe)},
                   wits)


def task_circle_sections(cfg, p, ov):
    from .prefact import circle_sections, circle_sections_via_pushforward, commutator_quotient
    a = cfg.algebra(_need(p, "algebra"))
    d = circle_sections(a).obj.dim
    hh = commutator_quotient(a).obj.dim
    push = circle_sections_via_pushforward(a)[0].obj.dim
    return Outcome(d == hh == push, {"dim": d, "commutator_quotient_dim": hh, "pushforward_dim": push})


# cones -------------------------------------------------------------------------------------

def task_cone_round_trip(cfg, p, ov):
    from .prefact import assemble, decompose, random_cone_data, same_algebra
    rng = random.Random(p.get("seed", 0))
    trials, max_dim, arity = p.get("trials", 10), p.get("max_dim", 3), p.get("max_arity", 2)
    ok, wits, n = True, [], 0
    for k in p.get("ks", [1, 2, 3]):
        for i in range(trials):
            data = random_cone_data(k, rng, max_dim)
            f = assemble(data)
            back = decompose(f)
            n += 1
            if back != data or same_algebra(assemble(back), f, arity) is not None:
                ok = False
                wits.append(["round trip", k, i])
    return Outcome(ok, {"trials": n}, wits, {"max_arity": arity})


def task_cone_bimodule(cfg, p, ov):
    from .prefact import assemble, cone_universe, from_bimodule, from_bimodule_data, regular_bimodule, same_algebra
    a = cfg.algebra(_need(p, "algebra"))
    b = cfg.algebra(p.get("right", p["algebra"]))
    if a is b:
        bm = regular_bimodule(a)
    else:
        from .prefact import regular_left, regular_right, tensor_bimodule
        bm = tensor_bimodule(regular_left(a), regular_right(b), [1] + [0] * (a.dim * b.dim - 1))
    un = cone_universe(2, space=LINE(0))
    arity = p.get("max_arity", 3)
    diff = same_algebra(assemble(from_bimodule_data(bm), un), from_bimodule(bm, un), arity)
    return Outcome(diff is None, {"size": len(un)}, [] if diff is None else [diff], {"max_arity": arity})


# dendroidal ------------------------------------------------------------------------------

def _chart(cfg, name, cone=True):
    from .openoperad import Chart
    return Chart(cfg.universe(name).opens, 0 if cone else None)


def task_normality(cfg, p, ov):
    from .dendroidal import is_normal
    v = _bound(p, ov)
    rep = is_normal(_chart(cfg, _need(p, "universe"), cone=False), v, p.get("max_arity"))
    values = {"checked": rep.checked}
    wits = []
    if not rep.ok:
        code, labels, auto = rep.failures[0]
        values["witness_tree"] = code
        values["witness_colors"] = list(labels)
        wits.append([code, list(labels)])
    return Outcome(rep.ok, values, wits, {"max_vertices": v, "max_arity": rep.details["max_arity"]})


def task_union_gluing(cfg, p, ov):
    from .dendroidal import verify_union_gluing
    un = cfg.universe(_need(p, "universe"))
    v = _bound(p, ov)
    rep = verify_union_gluing(un, cfg.opens(un.space, _need(p, "cover"), "params.cover"), v, p.get("max_arity"))
    return Outcome(rep.ok, {"checked": rep.checked}, rep.failures,
                   {"max_vertices": v, "max_arity": rep.details["max_arity"]})


def _alphas(p, v):
    from .dendroidal import SpawnTime, spawn_times_upto
    n, d = p.get("alpha_max", [2, 2])
    return spawn_times_upto(SpawnTime(n, d), v)


def task_attaching_pushout(cfg, p, ov):
    from .dendroidal import SpawnTable, verify_attaching_pushout
    from .openoperad import check_pushout_assumptions
    chart = _chart(cfg, _need(p, "chart"))
    v = _bound(p, ov)
    assumptions = check_pushout_assumptions(chart, p.get("assumption_arity", 3))
    if not assumptions.ok:
        return Outcome(False, {"assumptions": False},
                       [[k, w[1]] for k, w in sorted(assumptions.results.items()) if not w[0]])
    table = SpawnTable(chart, v)
    ok, wits, per = True, [], {}
    for alpha in _alphas(p, v):
        rep = verify_attaching_pushout(chart, alpha, v, table)
        per[str(alpha)] = rep.ok
        if not rep.ok:
            ok = False
            wits.append([str(alpha), rep.failures[:3]])
    times = sorted(table.times())
    return Outcome(ok, {"alphas": per, "spawn_times": [str(t) for t in times]}, wits, {"max_vertices": v})


def task_spawn_monotonicity(cfg, p, ov):
    from .dendroidal import Dendrex, SpawnTable, spawn_time
    chart = _chart(cfg, _need(p, "chart"))
    v = _bound(p, ov)
    table = SpawnTable(chart, v)
    ok, wits, n = True, [], 0
    for t in table.trees:
        for cols, s in table.rows[t.code]:
            d = Dendrex(t, cols)
            for face, fd in d.faces():
                n += 1
                if spawn_time(fd, chart) > s:
                    ok = False
                    wits.append(["face raises spawn time", t.code, face.tag])
            if t.n_vertices < v:
                for dd in d.degeneracies():
                    n += 1
                    if spawn_time(dd, chart) != s:
                        ok = False
                        wits.append(["degeneracy changes spawn time", t.code])
    return Outcome(ok, {"checked": n}, wits[:5], {"max_vertices": v})


def task_collapse_transition(cfg, p, ov):
    from .dendroidal import Dendrex, PosetOperad, Tree, spawn_analysis
    chart = _chart(cfg, _need(p, "chart"))
    X = chart.colors[0].space
    tr = _need(p, "tree")
    verts = {int(k): tuple(v) for k, v in tr["vertices"].items()}
    t = Tree(int(tr["root"]), verts)
    cols = {int(k): chart.index.get(cfg.open(X, lit)) for k, lit in _need(p, "colors").items()}
    if any(c is None for c in cols.values()) or set(cols) != set(t.edges):
        raise SchemaError("params.colors must colour every edge by a chart member")
    d = Dendrex(t, tuple(cols[e] for e in t.edges))
    if not d.is_valid(PosetOperad(chart)):
        raise SchemaError("params.colors do not form a dendrex")
    before = spawn_analysis(d, chart)
    face = d.restrict(t.contract(int(_need(p, "contract"))))
    after = spawn_analysis(face, chart)
    values = {"before_shape": list(before.shape), "before_special": before.is_special,
              "before_time": str(before.time), "after_shape": list(after.shape), "after_time": str(after.time),
              "after_special": after.is_special}
    return Outcome(before.is_special and after.time < before.time, values)


# cubes ------------------------------------------------------------------------------------

def _sieve_cube(cfg, p, ov):
    from .cubes import sieve_nerve_cube
    un = cfg.universe(_need(p, "universe"))
    v = _bound(p, ov)
    cube = sieve_nerve_cube(un, cfg.opens(un.space, _need(p, "cover"), "params.cover"), v, p.get("max_arity"),
                            with_empty=p.get("with_empty", False))
    return cube, v


def task_very_cofibrant(cfg, p, ov):
    from .cubes import is_very_cofibrant
    cube, v = _sieve_cube(cfg, p, ov)
    rep = is_very_cofibrant(cube)
    return Outcome(rep.ok, {"checked": rep.checked}, rep.failures[:3], {"max_vertices": v})


def task_pushout_clatch(cfg, p, ov):
    from .cubes import verify_pushout_clatch
    cube, v = _sieve_cube(cfg, p, ov)
    alphas = p.get("alphas", list(range(cube.beta)))
    ok, wits, per = True, [], {}
    for a in alphas:
        rep = verify_pushout_clatch(cube, a)
        per[str(a)] = rep.ok
        if not rep.ok:
            ok = False
            wits.append([a, rep.failures[:3]])
    return Outcome(ok, {"alphas": per}, wits, {"max_vertices": v})


HANDLERS = {
    ("check-space", "classify"): task_classify,
    ("check-space", "weiss-cover"): task_weiss_cover,
    ("check-space", "basis"): task_basis,
    ("check-space", "pushout-assumptions"): task_pushout_assumptions,
    ("check-space", "cocart-codec"): task_cocart_codec,
    ("check-algebra", "multiplicativity"): task_multiplicativity,
    ("check-algebra", "constructible"): task_constructible,
    ("check-algebra", "coherence"): task_coherence,
    ("check-algebra", "inclusion-is-multiplication"): task_inclusion_is_multiplication,
    ("evaluate", "weiss-chain"): task_weiss_chain,
    ("evaluate", "weiss-finite"): task_weiss_finite,
    ("evaluate", "colimit"): task_colimit,
    ("evaluate", "extend-basis"): task_extend_basis,
    ("evaluate", "disjoint-completion"): task_disjoint_completion,
    ("glue", "interval-sections"): task_interval_sections,
    ("glue", "round-trip"): task_glue_round_trip,
    ("sections", "circle"): task_circle_sections,
    ("cone", "round-trip"): task_cone_round_trip,
    ("cone", "bimodule-line"): task_cone_bimodule,
    ("dendro-verify", "normality"): task_normality,
    ("dendro-verify", "union-gluing"): task_union_gluing,
    ("dendro-verify", "attaching-pushout"): task_attaching_pushout,
    ("dendro-verify", "spawn-monotonicity"): task_spawn_monotonicity,
    ("dendro-verify", "collapse-transition"): task_collapse_transition,
    ("cube-verify", "very-cofibrant"): task_very_cofibrant,
    ("cube-verify", "pushout-clatch"): task_pushout_clatch,
}


@dataclass
class TaskResult:
    id: str
    command: str
    check: str
    status: str
    expected: str
    met: bool
    values: dict
    witnesses: list
    mismatched: list


def run_task(cfg, task, overrides: dict | None = None) -> TaskResult:
    """Run one task.  Config errors (``SchemaError``, ``RationalParseError``) propagate."""
    overrides = overrides or {}
    handler = HANDLERS.get((task.command, task.check))
    if handler is None:
        raise SchemaError(f"task {task.id!r}: unknown check {task.command}/{task.check}")
    try:
        out = handler(cfg, task.params, overrides)
    except (SchemaError, RationalParseError):
        raise
    except FactAlgError as exc:
        out = Outcome(False, {"error": type(exc).__name__}, [str(exc)])
    values = jsonable(out.values)
    status = out.status
    passed = status != "fail"
    met = passed == (task.expect_status == "pass")
    mismatched = []
    for k, want in sorted(task.expect_values.items()):
        got = values.get(k)
        if jsonable(want) != got:
            mismatched.append([k, jsonable(want), got])
    met = met and not mismatched
    return TaskResult(task.id, task.command, task.check, status, task.expect_status, met, values,
                      jsonable(out.witnesses), mismatched)
