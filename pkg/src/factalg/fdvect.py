"""Finite-dimensional rational vector spaces and linear maps.

Matrices are ``flint.fmpq_mat`` objects of shape ``dst.dim x src.dim``, so
every computation is exact.  Tensor products use the Kronecker convention:
the basis of ``V (x) W`` is ordered lexicographically with the ``V`` index
varying slowest.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mat

from .errors import IncoherentDiagram, RationalParseError, ShapeMismatch
from .finposet import FinPoset, derived_composites


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions, fmpq values and strings like ``"3/4"`` exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise RationalParseError(f"boolean {x!r} is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise RationalParseError(f"cannot parse {x!r} as a rational") from exc
    raise RationalParseError(f"{x!r} of type {type(x).__name__} is not an exact rational")


def _q(x) -> fmpq:
    f = to_fraction(x)
    return fmpq(f.numerator, f.denominator)


class VectObj:
    """A space ``Q^dim``; ``label`` only affects printing."""

    __slots__ = ("dim", "label")

    def __init__(self, dim: int, label: str = ""):
        assert dim >= 0
        self.dim = dim
        self.label = label

    def __eq__(self, other):
        return isinstance(other, VectObj) and self.dim == other.dim

    def __hash__(self):
        return hash(self.dim)

    def __repr__(self):
        return f"VectObj({self.dim}{', ' + repr(self.label) if self.label else ''})"


UNIT = VectObj(1, "Q")


class LinMap:
    """A linear map ``src -> dst`` given by a ``dst.dim x src.dim`` matrix."""

    __slots__ = ("src", "dst", "mat")

    def __init__(self, src: VectObj, dst: VectObj, mat: fmpq_mat | None = None):
        if mat is None:
            mat = fmpq_mat(dst.dim, src.dim)
        if mat.nrows() != dst.dim or mat.ncols() != src.dim:
            raise ShapeMismatch(f"matrix {mat.nrows()}x{mat.ncols()} does not fit {src.dim} -> {dst.dim}")
        self.src, self.dst, self.mat = src, dst, mat

    # constructors
    @classmethod
    def from_rows(cls, src: VectObj, dst: VectObj, rows: Sequence[Sequence]) -> "LinMap":
        rows = [list(r) for r in rows]
        if len(rows) != dst.dim or any(len(r) != src.dim for r in rows):
            raise ShapeMismatch(f"rows do not form a {dst.dim}x{src.dim} matrix")
        return cls(src, dst, fmpq_mat(dst.dim, src.dim, [_q(x) for r in rows for x in r]))

    @classmethod
    def identity(cls, v: VectObj) -> "LinMap":
        m = fmpq_mat(v.dim, v.dim)
        for i in range(v.dim):
            m[i, i] = 1
        return cls(v, v, m)

    @classmethod
    def zero(cls, src: VectObj, dst: VectObj) -> "LinMap":
        return cls(src, dst)

    @classmethod
    def from_columns(cls, src: VectObj, dst: VectObj, cols: Sequence[Sequence]) -> "LinMap":
        return cls.from_rows(src, dst, [[c[i] for c in cols] for i in range(dst.dim)]) if dst.dim else cls(src, dst)

    @classmethod
    def from_function(cls, src: VectObj, dst: VectObj, f) -> "LinMap":
        """``f(j)`` returns ``{i: coeff}``, the image of basis vector ``j``."""
        m = fmpq_mat(dst.dim, src.dim)
        for j in range(src.dim):
            for i, c in f(j).items():
                m[i, j] += _q(c)
        return cls(src, dst, m)

    # structure
    def rows(self) -> list:
        return [[to_fraction(self.mat[i, j]) for j in range(self.src.dim)] for i in range(self.dst.dim)]

    def entry(self, i, j) -> Fraction:
        return to_fraction(self.mat[i, j])

    def __eq__(self, other):
        return (isinstance(other, LinMap) and self.src == other.src and self.dst == other.dst
                and self.mat == other.mat)

    def __hash__(self):
        return hash((self.src.dim, self.dst.dim, str(self.mat)))

    def __repr__(self):
        return f"LinMap({self.src.dim} -> {self.dst.dim})"

    def __matmul__(self, other: "LinMap") -> "LinMap":
        """``g @ f`` is ``g`` after ``f``."""
        if other.dst != self.src:
            raise ShapeMismatch(f"cannot compose {self!r} after {other!r}")
        return LinMap(other.src, self.dst, self.mat * other.mat)

    def __add__(self, other: "LinMap") -> "LinMap":
        self._same_shape(other)
        return LinMap(self.src, self.dst, self.mat + other.mat)

    def __sub__(self, other: "LinMap") -> "LinMap":
        self._same_shape(other)
        return LinMap(self.src, self.dst, self.mat - other.mat)

    def __neg__(self):
        return LinMap(self.src, self.dst, -self.mat)

    def scale(self, c) -> "LinMap":
        return LinMap(self.src, self.dst, self.mat * _q(c))

    def _same_shape(self, other):
        if self.src != other.src or self.dst != other.dst:
            raise ShapeMismatch(f"{self!r} and {other!r} have different shapes")

    def apply(self, vec: Sequence) -> list:
        v = fmpq_mat(self.src.dim, 1, [_q(x) for x in vec])
        out = self.mat * v
        return [to_fraction(out[i, 0]) for i in range(self.dst.dim)]

    def transpose(self) -> "LinMap":
        return LinMap(self.dst, self.src, self.mat.transpose())

    def rank(self) -> int:
        if self.src.dim == 0 or self.dst.dim == 0:
            return 0
        return self.mat.rank()

    def is_injective(self) -> bool:
        return self.rank() == self.src.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.dst.dim

    def is_iso(self) -> bool:
        return self.src.dim == self.dst.dim and self.rank() == self.src.dim

    def is_zero(self) -> bool:
        return self.rank() == 0

    def inverse(self) -> "LinMap":
        if not self.is_iso():
            raise ShapeMismatch(f"{self!r} is not invertible")
        if self.src.dim == 0:
            return LinMap(self.dst, self.src)
        return LinMap(self.dst, self.src, self.mat.inv())


def _rref(m: fmpq_mat):
    """Reduced row echelon form and pivot columns (works for empty shapes)."""
    if m.nrows() == 0 or m.ncols() == 0:
        return fmpq_mat(0, m.ncols()), []
    r, rank = m.rref()
    pivots = []
    for i in range(rank):
        for j in range(m.ncols()):
            if r[i, j] != 0:
                pivots.append(j)
                break
    return r, pivots


@dataclass
class Quotient:
    """A quotient ``dst / im f`` with projection and a chosen linear section."""

    obj: VectObj
    proj: LinMap     # ambient -> obj
    section: LinMap  # obj -> ambient, with proj @ section = id


def cokernel(f: LinMap) -> Quotient:
    """Cokernel of ``f`` with basis the images of non-pivot coordinate vectors."""
    m = f.dst.dim
    r, pivots = _rref(f.mat.transpose())
    free = [j for j in range(m) if j not in set(pivots)]
    q = VectObj(len(free))
    proj = fmpq_mat(len(free), m)
    sect = fmpq_mat(m, len(free))
    for jj, j in enumerate(free):
        proj[jj, j] = 1
        sect[j, jj] = 1
        for k, p in enumerate(pivots):
            proj[jj, p] = -r[k, j]
    return Quotient(q, LinMap(f.dst, q, proj), LinMap(q, f.dst, sect))


def kernel(f: LinMap) -> LinMap:
    """An injective map ``K -> src`` whose image is the kernel of ``f``."""
    n = f.src.dim
    r, pivots = _rref(f.mat)
    free = [j for j in range(n) if j not in set(pivots)]
    k = VectObj(len(free))
    out = fmpq_mat(n, len(free))
    for jj, j in enumerate(free):
        out[j, jj] = 1
        for row, p in enumerate(pivots):
            out[p, jj] = -r[row, j]
    return LinMap(k, f.src, out)


def image(f: LinMap) -> LinMap:
    """An injective map ``I -> dst`` onto the image of ``f``, in echelon form."""
    r, pivots = _rref(f.mat.transpose())
    i = VectObj(len(pivots))
    out = fmpq_mat(f.dst.dim, len(pivots))
    for k in range(len(pivots)):
        for j in range(f.dst.dim):
            out[j, k] = r[k, j]
    return LinMap(i, f.dst, out)


def solve(f: LinMap, g: LinMap) -> LinMap | None:
    """Some ``h`` with ``f @ h == g``, or ``None`` if none exists."""
    if f.dst != g.dst:
        raise ShapeMismatch("solve needs a common target")
    n = f.src.dim
    full, pivots = _rref(hstack(f.mat, g.mat))
    if any(p >= n for p in pivots):
        return None
    h = fmpq_mat(n, g.src.dim)
    for row, p in enumerate(pivots):
        for j in range(g.src.dim):
            h[p, j] = full[row, n + j]
    out = LinMap(g.src, f.src, h)
    assert f @ out == g
    return out


def hstack(a: fmpq_mat, b: fmpq_mat) -> fmpq_mat:
    assert a.nrows() == b.nrows()
    out = fmpq_mat(a.nrows(), a.ncols() + b.ncols())
    for i in range(a.nrows()):
        for j in range(a.ncols()):
            out[i, j] = a[i, j]
        for j in range(b.ncols()):
            out[i, a.ncols() + j] = b[i, j]
    return out


def vstack(a: fmpq_mat, b: fmpq_mat) -> fmpq_mat:
    return hstack(a.transpose(), b.transpose()).transpose()


# tensor products -----------------------------------------------------------

def tensor_obj(spaces: Iterable[VectObj]) -> VectObj:
    d = 1
    for v in spaces:
        d *= v.dim
    return VectObj(d)


def _kron(a: fmpq_mat, b: fmpq_mat) -> fmpq_mat:
    ra, ca, rb, cb = a.nrows(), a.ncols(), b.nrows(), b.ncols()
    R, C = ra * rb, ca * cb
    if R == 0 or C == 0:
        return fmpq_mat(R, C)
    if ra == ca == 1:
        return b * a[0, 0]
    if rb == cb == 1:
        return a * b[0, 0]
    ea = [(k // ca, k % ca, x) for k, x in enumerate(a.entries()) if x != 0]
    eb = [(k // cb, k % cb, y) for k, y in enumerate(b.entries()) if y != 0]
    out = [0] * (R * C)
    for i, j, x in ea:
        base_r, base_c = i * rb, j * cb
        for k, l, y in eb:
            out[(base_r + k) * C + base_c + l] = x * y
    return fmpq_mat(R, C, out)


def tensor(*maps: LinMap) -> LinMap:
    """Kronecker product of maps, in the given factor order."""
    mat = fmpq_mat(1, 1, [1])
    for f in maps:
        mat = _kron(mat, f.mat)
    return LinMap(tensor_obj(f.src for f in maps), tensor_obj(f.dst for f in maps), mat)


def tensor_unit() -> LinMap:
    return LinMap.identity(UNIT)


def permute_factors(spaces: Sequence[VectObj], perm: Sequence[int]) -> LinMap:
    """The map ``V_0 (x) ... (x) V_{n-1} -> V_perm[0] (x) ... (x) V_perm[n-1]``.

    The output's ``k``-th factor is the input's ``perm[k]``-th factor.
    """
    spaces = list(spaces)
    n = len(spaces)
    assert sorted(perm) == list(range(n))
    dims = [v.dim for v in spaces]
    out_dims = [dims[p] for p in perm]
    src, dst = tensor_obj(spaces), tensor_obj(spaces[p] for p in perm)
    m = fmpq_mat(dst.dim, src.dim)
    for idx in itertools.product(*[range(d) for d in dims]):
        j = _flat(idx, dims)
        i = _flat([idx[p] for p in perm], out_dims)
        m[i, j] = 1
    return LinMap(src, dst, m)


def _flat(idx, dims) -> int:
    k = 0
    for i, d in zip(idx, dims):
        k = k * d + i
    return k


def basis_tensor_index(idx: Sequence[int], dims: Sequence[int]) -> int:
    return _flat(idx, dims)


# direct sums ---------------------------------------------------------------

def direct_sum_obj(spaces: Sequence[VectObj]) -> tuple:
    """The sum and the offset of each summand."""
    offsets, total = [], 0
    for v in spaces:
        offsets.append(total)
        total += v.dim
    return VectObj(total), offsets


def inclusion(spaces: Sequence[VectObj], k: int) -> LinMap:
    s, offs = direct_sum_obj(spaces)
    m = fmpq_mat(s.dim, spaces[k].dim)
    for i in range(spaces[k].dim):
        m[offs[k] + i, i] = 1
    return LinMap(spaces[k], s, m)


def projection(spaces: Sequence[VectObj], k: int) -> LinMap:
    return inclusion(spaces, k).transpose()


def block_map(srcs: Sequence[VectObj], dsts: Sequence[VectObj], blocks: dict) -> LinMap:
    """Assemble ``(+) srcs -> (+) dsts`` from ``blocks[(i, j)]: srcs[j] -> dsts[i]``."""
    s, soff = direct_sum_obj(srcs)
    d, doff = direct_sum_obj(dsts)
    m = fmpq_mat(d.dim, s.dim)
    for (i, j), f in blocks.items():
        if f.src != srcs[j] or f.dst != dsts[i]:
            raise ShapeMismatch(f"block ({i}, {j}) has the wrong shape")
        for a in range(f.dst.dim):
            for b in range(f.src.dim):
                x = f.mat[a, b]
                if x != 0:
                    m[doff[i] + a, soff[j] + b] += x
    return LinMap(s, d, m)


def reflexive_coequalizer(d0: LinMap, d1: LinMap) -> Quotient:
    """Coequalizer of a parallel pair, the cokernel of ``d0 - d1``."""
    if d0.src != d1.src or d0.dst != d1.dst:
        raise ShapeMismatch(f"parallel pair has shapes {d0.src.dim}->{d0.dst.dim} and {d1.src.dim}->{d1.dst.dim}")
    return cokernel(d0 - d1)


coequalizer = reflexive_coequalizer


# colimits over posets ------------------------------------------------------

@dataclass
class VectColimit:
    obj: VectObj
    cocone: dict            # p -> LinMap values[p] -> obj
    quotient: Quotient      # presentation as a quotient of the direct sum
    order: tuple            # summand order of the direct sum

    def lift(self, p=None) -> dict:
        """Split the section into summands: ``{p: obj -> values[p]}``."""
        spaces = [c.src for c in (self.cocone[q] for q in self.order)]
        return {q: projection(spaces, k) @ self.quotient.section for k, q in enumerate(self.order)}


class VectDiagram:
    """A functor from a finite poset to ``FdVect`` given on covering pairs."""

    def __init__(self, base: FinPoset, values: dict, transports: dict, check: bool = True):
        self.base = base
        self.values = {p: values[p] for p in base.elements}
        self.transports = {}
        for a, b in base.covers():
            if (a, b) not in transports:
                raise IncoherentDiagram(f"missing transport along {a!r} < {b!r}")
            t = transports[(a, b)]
            if t.src != self.values[a] or t.dst != self.values[b]:
                raise ShapeMismatch(f"transport {a!r} -> {b!r} has the wrong shape")
            self.transports[(a, b)] = t
        self._comp = None
        if check:
            self.composites()

    def composites(self) -> dict:
        if self._comp is None:
            self._comp = derived_composites(
                self.base, self.transports,
                identity=lambda p: LinMap.identity(self.values[p]),
                compose=lambda g, f: g @ f,
            )
        return self._comp

    def transport(self, a, b) -> LinMap:
        return self.composites()[(a, b)]


def poset_colimit(base: FinPoset, values: dict, transports: dict, check: bool = True) -> VectColimit:
    """Colimit of a poset diagram.

    Every non-maximal element is first identified with its image along one
    chosen upper cover, so the quotient is taken of the sum over maximal
    elements only, by the remaining Hasse relations.
    """
    d = VectDiagram(base, values, transports, check=check)
    order = base.elements
    tops = list(base.maximal())
    top_spaces = [d.values[p] for p in tops]
    top_sum, _ = direct_sum_obj(top_spaces)
    covers = base.covers()
    upper = {}
    for a, b in covers:
        upper.setdefault(a, b)
    # push every element to the sum of the maximal values, top-down
    into = {p: inclusion(top_spaces, k) for k, p in enumerate(tops)}
    for p in sorted(order, key=lambda x: len(base.up(x))):
        if p not in into:
            q = upper[p]
            into[p] = into[q] @ d.transports[(p, q)]
    extra = [(a, b) for a, b in covers if upper[a] != b]
    if extra:
        rel = block_map([d.values[a] for a, _ in extra], [top_sum],
                        {(0, r): into[b] @ d.transports[(a, b)] - into[a] for r, (a, b) in enumerate(extra)})
        q = cokernel(rel)
    else:
        q = cokernel(LinMap(VectObj(0), top_sum))
    cocone = {p: q.proj @ into[p] for p in order}
    spaces = [d.values[p] for p in order]
    full, _ = direct_sum_obj(spaces)
    pos = {p: k for k, p in enumerate(order)}
    proj = block_map(spaces, [q.obj], {(0, k): cocone[p] for k, p in enumerate(order)})
    embed = block_map(top_spaces, spaces, {(pos[p], k): LinMap.identity(d.values[p]) for k, p in enumerate(tops)})
    section = embed @ q.section
    return VectColimit(q.obj, cocone, Quotient(q.obj, proj, section), tuple(order))


def induced_map(colim: VectColimit, cocone: dict, target: VectObj) -> LinMap:
    """The map out of a colimit determined by a compatible cocone ``{p: values[p] -> target}``."""
    spaces = [colim.cocone[p].src for p in colim.order]
    total = block_map(spaces, [target], {(0, k): cocone[p] for k, p in enumerate(colim.order)})
    out = total @ colim.quotient.section
    # compatibility: the map must kill the relations
    for p in colim.order:
        if out @ colim.cocone[p] != cocone[p]:
            raise IncoherentDiagram(f"cocone component at {p!r} is not compatible", witness=p)
    return out
