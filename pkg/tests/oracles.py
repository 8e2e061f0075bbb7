"""Brute-force oracles, independent of the package's linear algebra.

Everything here is computed with sympy matrices or plain Python sets, so a
bug in the flint-backed code cannot hide behind the same bug in the oracle.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import sympy


def _rank(rows, ncols) -> int:
    """Rank by sympy; used for the algebra oracles."""
    if not rows:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) if isinstance(x, Fraction) else x
                          for x in r] for r in rows]).rank()


def fraction_rank(rows) -> int:
    """Rank by plain Fraction elimination; fast enough for thousands of small diagrams."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / p[col]
                m[i] = [a - f * b for a, b in zip(m[i], p)]
        rank += 1
        col += 1
    return rank


def matrix_of(linmap) -> list:
    """Rows as Fractions (the only thing read from the package)."""
    return linmap.rows()


def colimit_dim(elements, leq, dims, maps) -> int:
    """Dimension of a poset colimit via ALL morphisms p <= q.

    ``maps[(p, q)]`` must be given for every comparable pair (p < q), already
    composed; relations ``iota_q F(p<=q) v - iota_p v`` span the kernel of
    the direct sum onto the colimit.
    """
    offset, total = {}, 0
    for e in elements:
        offset[e] = total
        total += dims[e]
    rels = []
    for p in elements:
        for q in elements:
            if p == q or not leq(p, q):
                continue
            m = maps[(p, q)]
            for j in range(dims[p]):
                row = [Fraction(0)] * total
                row[offset[p] + j] -= 1
                for i in range(dims[q]):
                    row[offset[q] + i] += m[i][j]
                rels.append(row)
    return total - fraction_rank(rels)


def compose_rows(b, a, m: int):
    """Matrix product of row lists ``b @ a``; ``m`` is the column count of ``a``."""
    n, k = len(b), len(a)
    return [[sum((b[i][t] * a[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def multiplication_table(alg) -> list:
    """``table[i][j]`` is the coordinate vector of ``e_i e_j``."""
    n = alg.dim
    basis = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    return [[alg.multiply(basis[i], basis[j]) for j in range(n)] for i in range(n)]


def commutator_quotient_dim(alg) -> int:
    n = alg.dim
    t = multiplication_table(alg)
    rels = [[t[i][j][k] - t[j][i][k] for k in range(n)] for i in range(n) for j in range(n)]
    return n - _rank(rels, n)


def relative_tensor_dim(m1, a, m2) -> int:
    """``dim M1 (x)_A M2`` from the span of ``m.a (x) n - m (x) a.n`` on basis vectors."""
    r1, r2 = matrix_of(m1.act), matrix_of(m2.act)
    d1, d2, da = m1.dim, m2.dim, a.dim
    rels = []
    for i, x, j in itertools.product(range(d1), range(da), range(d2)):
        row = [Fraction(0)] * (d1 * d2)
        for s in range(d1):          # (e_i . e_x) (x) e_j
            row[s * d2 + j] += r1[s][i * da + x]
        for s in range(d2):          # e_i (x) (e_x . e_j)
            row[i * d2 + s] -= r2[s][x * d2 + j]
        rels.append(row)
    return d1 * d2 - _rank(rels, d1 * d2)


def circle_sections_dim(alg) -> int:
    """``A (x)_{A (x) A^op} A`` as ``A (x) A`` modulo
    ``(q x p) (x) y - x (x) (p y q)`` over basis vectors."""
    n = alg.dim
    t = multiplication_table(alg)

    def mul3(a, b, c):
        ab = t[a][b]
        return [sum((ab[s] * t[s][c][k] for s in range(n)), Fraction(0)) for k in range(n)]

    rels = []
    for x, y, p, q in itertools.product(range(n), repeat=4):
        row = [Fraction(0)] * (n * n)
        for s, c in enumerate(mul3(q, x, p)):
            row[s * n + y] += c
        for s, c in enumerate(mul3(p, y, q)):
            row[x * n + s] -= c
        rels.append(row)
    return n * n - _rank(rels, n * n)


def bell(n: int) -> int:
    return int(sympy.bell(n))


def set_partitions(n: int):
    """All partitions of ``range(n)`` as frozensets of frozensets."""
    if n == 0:
        yield frozenset()
        return
    for p in set_partitions(n - 1):
        blocks = list(p)
        yield frozenset(blocks + [frozenset({n - 1})])
        for i, b in enumerate(blocks):
            yield frozenset(blocks[:i] + [b | {n - 1}] + blocks[i + 1:])


def nonplanar_trees(max_vertices: int, max_arity: int) -> list:
    """Rooted non-planar trees as nested sorted tuples; ``"|"`` is a bare edge.

    A vertex is a sorted tuple of its input subtrees (the empty tuple is a
    stump).  Returned as a set of canonical forms with at most
    ``max_vertices`` vertices.
    """
    def size(t):
        return 0 if t == "|" else 1 + sum(size(c) for c in t)

    by_size = {0: {"|"}}
    for v in range(1, max_vertices + 1):
        found = set()
        smaller = [t for s in range(v) for t in by_size[s]]
        for k in range(max_arity + 1):
            for kids in itertools.combinations_with_replacement(sorted(smaller, key=repr), k):
                if 1 + sum(size(c) for c in kids) == v:
                    found.add(tuple(sorted(kids, key=repr)))
        by_size[v] = found
    return [t for v in range(max_vertices + 1) for t in by_size[v]]


def set_colimit_classes(elements, leq, sets, maps) -> int:
    """Number of classes of the disjoint union modulo ``x ~ F(p<=q) x`` (BFS)."""
    nodes = [(p, x) for p in elements for x in sets[p]]
    adj = {n: set() for n in nodes}
    for (p, q), m in maps.items():
        for x, y in m.items():
            adj[(p, x)].add((q, y))
            adj[(q, y)].add((p, x))
    seen, count = set(), 0
    for n in nodes:
        if n in seen:
            continue
        count += 1
        stack = [n]
        seen.add(n)
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
    return count
