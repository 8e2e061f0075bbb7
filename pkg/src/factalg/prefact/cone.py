"""Algebras on the cone ``STAR(k)`` and their description by modules.

A cone datum is ``k`` ray algebras ``A_r``, a vector space ``M`` with a
point, and a right action ``M (x) (A_0 (x) ... (x) A_{k-1}) -> M``.  The
assembled algebra puts ``A_r`` on intervals of ray ``r`` and ``M`` on every
neighbourhood of the vertex.  Along a ray, factors nearer the vertex multiply
on the left.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..errors import BadConfiguration, MissingOpens, ModuleAxiomFailure
from ..fdvect import UNIT, LinMap, VectObj, permute_factors, tensor
from ..stratline import ConeProj, OpenSet, Star, StratSpace, Universe, STAR
from .algebra import Algebra, Bimodule, RightModule, random_right_module, tensor_algebras, zoo
from .core import ComponentwiseAlg, PreFactAlg
from .transport import pushforward


@dataclass
class ConeData:
    rays: list            # Algebra per ray
    dim: int
    act: LinMap           # M (x) A_0 (x) ... (x) A_{k-1} -> M
    point: list

    @property
    def k(self) -> int:
        return len(self.rays)

    @property
    def carrier(self) -> VectObj:
        return VectObj(self.dim)

    def ray_algebra(self) -> Algebra:
        return tensor_algebras(self.rays)

    def module(self) -> RightModule:
        return RightModule(self.ray_algebra(), self.dim, self.act)

    def point_map(self) -> LinMap:
        return LinMap.from_columns(UNIT, self.carrier, [list(self.point)])

    def check(self):
        self.module()

    def __eq__(self, other):
        return (isinstance(other, ConeData) and self.rays == other.rays and self.dim == other.dim
                and self.act == other.act and [Fraction(x) for x in self.point] == [Fraction(x) for x in other.point])


def _star_loc(c: OpenSet):
    """``('v',)`` for the vertex component, ``('ray', r, (a, b))`` otherwise."""
    p = c.pieces[0]
    if p.vertex:
        return ("v",)
    for r, ivs in enumerate(p.rays):
        if ivs:
            return ("ray", r, ivs[0])
    raise BadConfiguration("empty open")


class ConeAlgebra(ComponentwiseAlg):
    def __init__(self, data: ConeData, universe: Universe, check: bool = True):
        space = universe.space
        if len(space.components) != 1 or not isinstance(space.components[0], Star):
            raise BadConfiguration("cone algebras live on a single star")
        if space.components[0].rays != data.k:
            raise BadConfiguration(f"{data.k} ray algebras for a {space.components[0].rays}-ray star")
        super().__init__(universe, f"Cone{data.k}")
        if check:
            data.check()
        self.data = data

    def comp_value(self, c):
        loc = _star_loc(c)
        return self.data.carrier if loc[0] == "v" else self.data.rays[loc[1]].carrier

    def connected_op(self, parts, d):
        locs = [_star_loc(p) for p in parts]
        vals = [self.comp_value(p) for p in parts]
        dl = _star_loc(d)
        if dl[0] == "ray":
            order = sorted(range(len(parts)), key=lambda i: locs[i][2][0])
            return self.data.rays[dl[1]].power_mult(len(parts)) @ permute_factors(vals, order)
        order = [i for i, l in enumerate(locs) if l[0] == "v"]
        maps = [LinMap.identity(self.data.carrier) if order else self.data.point_map()]
        for r, alg in enumerate(self.data.rays):
            on_r = sorted((i for i, l in enumerate(locs) if l[0] == "ray" and l[1] == r),
                          key=lambda i: locs[i][2][0])
            order += on_r
            maps.append(alg.power_mult(len(on_r)))
        return self.data.act @ tensor(*maps) @ permute_factors(vals, order)


def cone_universe(k: int, radii=(1, 2, 3), space: StratSpace | None = None) -> Universe:
    """Vertex disks ``C(t)``, ray intervals, full rings and the empty open."""
    space = space or STAR(k)
    radii = [Fraction(t) for t in radii]
    lits = ["empty"] + [f"C({t})" for t in radii]
    for i, s in enumerate(radii):
        for t in radii[i + 1:]:
            lits += [f"r{r}({s},{t})" for r in range(k)]
            lits.append(" + ".join(f"r{r}({s},{t})" for r in range(k)))
            lits.append(f"C({s}) + " + " + ".join(f"r{r}({s},{t})" for r in range(k)))
    return Universe.parse(space, lits)


def assemble(data: ConeData, universe: Universe | None = None) -> ConeAlgebra:
    return ConeAlgebra(data, universe or cone_universe(data.k))


def decompose(f: PreFactAlg, radii=(1, 2, 3)) -> ConeData:
    """Read the cone datum off an algebra on a star.

    Ray algebras come from ``(s,t)`` split at the middle radius, the module
    from ``C(t)`` and the action from ``(C(s), ring(s,t)) -> C(t)``.
    """
    space = f.space
    k = space.components[0].rays
    s, m, t = [Fraction(x) for x in radii]

    def get(text):
        u = space.open(text)
        if u not in f.universe:
            raise MissingOpens(f"{text} is needed for the decomposition", witness=text)
        return u

    rays = []
    whole = []
    for r in range(k):
        J, J1, J2 = get(f"r{r}({s},{t})"), get(f"r{r}({s},{m})"), get(f"r{r}({m},{t})")
        whole.append(J)
        i1, i2 = f.incl(J1, J), f.incl(J2, J)
        mult = f.op((J1, J2), J) @ tensor(i1.inverse(), i2.inverse())
        rays.append(Algebra(f.value(J).dim, mult, f.op((), J), name=f"A{r}"))
    C_in, C_out = get(f"C({s})"), get(f"C({t})")
    ring = get(" + ".join(f"r{r}({s},{t})" for r in range(k)))
    ring_iso = f.op(whole, ring)
    act = f.op((C_in, ring), C_out) @ tensor(f.incl(C_in, C_out).inverse(), ring_iso)
    point = [x for x in f.op((), C_out).apply([1])]
    data = ConeData(rays, f.value(C_out).dim, act, point)
    data.check()
    return data


def cone_transform(x, mode: str, universe: Universe | None = None, radii=(1, 2, 3)):
    """``decompose`` an algebra or ``assemble`` a datum."""
    if mode == "decompose":
        return decompose(x, radii)
    if mode == "assemble":
        return assemble(x, universe)
    raise BadConfiguration(f"unknown cone mode {mode!r}")


def radial_pushforward(f: ConeAlgebra, universe: Universe) -> PreFactAlg:
    """Pushforward along the radial projection to ``STAR(1)``."""
    return pushforward(f, ConeProj(f.data.k), universe)


def collapse_data(data: ConeData) -> ConeData:
    """The one-ray datum with the tensor of the ray algebras."""
    return ConeData([data.ray_algebra()], data.dim, data.act, data.point)


def from_bimodule_data(bm: Bimodule) -> ConeData:
    """Two-ray datum of a pointed bimodule: ray 0 carries the opposite of the
    left algebra and ``x.(a (x) b) = a x b``."""
    A, M, B = bm.left.carrier, bm.carrier, bm.right.carrier
    act = bm.act @ permute_factors([M, A, B], [1, 0, 2])
    return ConeData([bm.left.opposite(), bm.right], bm.dim, act, bm.point.apply([1]))


def random_cone_data(k: int, rng: random.Random, max_dim: int = 3, max_ray_dim: int | None = None) -> ConeData:
    if max_ray_dim is None:
        max_ray_dim = 3 if k == 1 else 2
    algs = [a for a in zoo(max_ray_dim)]
    rays = [rng.choice(algs) for _ in range(k)]
    a = tensor_algebras(rays)
    for _ in range(50):
        m = random_right_module(a, rng, max_dim)
        if m.dim:
            break
    else:
        raise ModuleAxiomFailure("could not sample a nonzero module")
    point = [rng.randint(-2, 2) for _ in range(m.dim)]
    return ConeData(rays, m.dim, m.act, point)
