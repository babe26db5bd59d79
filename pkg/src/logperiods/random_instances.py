"""Random small complexes and admissible chains for the exact invariant checks.

Admissible 4-chains in (P^1)^2 are built as joins.  With alpha, beta in
{0, inf}:

* S1 * S2 * f: S1 a 1-cycle on vertices with z2 = beta, S2 a 1-cycle on
  vertices with z1 = alpha, f the vertex (alpha, beta);
* S * F: S a 1-cycle off every face, F a 2-chain inside z1 = alpha;
* plus arbitrary chains on vertices off every face.
"""

import itertools
from fractions import Fraction

import numpy

from .chain_core import INF, Chain, SimplicialComplex, Vertex, faces_of, orient


def _generic(rng):
    # positive imaginary part keeps averages away from 0 and 1
    return (Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))),
            Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 5))))


def join(a, b):
    """Join of two simplicial chains on disjoint vertex sets."""
    out = {}
    for s, c in a.terms.items():
        for t, d in b.terms.items():
            key, sign = orient(s + t)
            out[key] = out.get(key, 0) + sign * c * d
    return Chain(a.n, a.degree + b.degree + 1, out)


def random_cycle(vertices, n, rng, size=2):
    """Random 1-cycle: combination of triangle boundaries on the given vertices."""
    out = Chain.zero(n, 1)
    for tri in itertools.combinations(vertices, 3):
        c = int(rng.integers(-size, size + 1))
        if c:
            a, b, d = tri
            out = out + Chain.from_simplices(n, [((b, d), c), ((a, d), -c), ((a, b), c)])
    if not out:
        a, b, d = vertices[:3]
        out = Chain.from_simplices(n, [((b, d), 1), ((a, d), -1), ((a, b), 1)])
    return out


def random_chain(vertices, n, degree, rng, size=2, density=0.6):
    out = {}
    for s in itertools.combinations(sorted(vertices), degree + 1):
        if rng.random() < density:
            c = int(rng.integers(-size, size + 1))
            if c:
                out[s] = Fraction(c)
    if not out:
        s = tuple(sorted(vertices)[:degree + 1])
        out[s] = Fraction(1)
    return Chain(n, degree, out)


class Instance:
    def __init__(self, K, chain, pools):
        self.K = K
        self.chain = chain
        self.pools = pools


def admissible_instance(rng, pool=4):
    """A random complex in (P^1)^2 and an admissible 4-chain on it."""
    alpha = [0, INF][int(rng.integers(2))]
    beta = [0, INF][int(rng.integers(2))]
    a_slot = (0, 0) if alpha == 0 else INF
    b_slot = (0, 0) if beta == 0 else INF
    verts = []
    nid = itertools.count(int(rng.integers(0, 50)))

    def add(coords):
        v = Vertex(next(nid), coords)
        verts.append(v)
        return v.id

    p1 = [add((_generic(rng), b_slot)) for _ in range(pool)]     # on z2 = beta
    p2 = [add((a_slot, _generic(rng))) for _ in range(pool)]     # on z1 = alpha
    f = add((a_slot, b_slot))
    q = [add((_generic(rng), _generic(rng))) for _ in range(pool + 1)]
    n = 2
    gamma = Chain.zero(n, 4)
    kinds = rng.permutation(3)[:int(rng.integers(1, 4))]
    for kind in kinds:
        c = int(rng.integers(1, 3)) * (1 if rng.random() < 0.5 else -1)
        if kind == 0:
            s1 = random_cycle(p1, n, rng)
            s2 = random_cycle(p2, n, rng)
            piece = join(join(s1, s2), Chain.from_simplices(n, [((f,), 1)]))
        elif kind == 1:
            s = random_cycle(q[:3] if rng.random() < 0.5 else q, n, rng)
            used = {v for k in s.terms for v in k}
            piece = join(s, random_chain(p2, n, 2, rng))
        else:
            piece = random_chain(q, n, 4, rng)
        gamma = gamma + piece * c
    if not gamma:
        gamma = join(join(random_cycle(p1, n, rng), random_cycle(p2, n, rng)),
                     Chain.from_simplices(n, [((f,), 1)]))
    simps = set()
    for s in gamma.terms:
        simps.update(faces_of(s))
    # extra simplexes so cocycles have room to vary
    extra = random_chain(q, n, 2, rng, density=0.5)
    for s in extra.terms:
        simps.update(faces_of(s))
    used = {v for s in simps for v in s}
    K = SimplicialComplex([v for v in verts if v.id in used], simps, None, n)
    return Instance(K, gamma, {"p1": p1, "p2": p2, "f": f, "q": q,
                               "alpha": alpha, "beta": beta})


def random_complex(rng, n=2, nverts=7, top=3, density=0.5):
    """A random complex with vertices scattered over faces, D and generic points."""
    choices = []
    verts = []
    for j in range(nverts):
        coords = []
        for _ in range(n):
            r = rng.random()
            if r < 0.2:
                coords.append((0, 0))
            elif r < 0.3:
                coords.append(INF)
            elif r < 0.4:
                coords.append((1, 0))
            else:
                coords.append(_generic(rng))
        verts.append(Vertex(j, tuple(coords)))
    maximal = []
    for s in itertools.combinations(range(nverts), top + 1):
        if rng.random() < density:
            maximal.append(s)
    if not maximal:
        maximal.append(tuple(range(top + 1)))
    return SimplicialComplex.from_maximal(verts, maximal, None, n)


def random_chain_on(K, degree, rng, size=3, density=0.6):
    out = {}
    for s in K.by_dim(degree):
        if rng.random() < density:
            c = int(rng.integers(-size, size + 1))
            if c:
                out[s] = Fraction(c)
    return Chain(K.n, degree, out)


def random_total_order(K, rng):
    from .face_maps import GoodOrdering
    from .geometry import CubicalFace
    ids = list(K.vertices)
    perm = rng.permutation(len(ids))
    return GoodOrdering({ids[j]: int(perm[j]) for j in range(len(ids))},
                        CubicalFace.single(1, 0))


# ---------------------------------------------------------------------------
# a triangulated disk-box

PRISM_BASE = ((Fraction(0), Fraction(0)), (Fraction(2), Fraction(1, 3)),
              (Fraction(-1), Fraction(7, 4)), (Fraction(-3, 2), Fraction(-2)))


def _det3(rows):
    return (rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]))


def triangulated_disk_box(a, b):
    """A triangle around 0 in z1 times [a, b] in z2, as a simplicial 3-chain.

    The triangle is coned from 0 so z1 = 0 is a vertex (a good triangulation),
    and each prism is cut into three tetrahedra in a global vertex order.
    Vertices 0..3 sit at z2 = a, 4..7 at z2 = b.
    """
    a, b = Fraction(a), Fraction(b)
    verts = []
    for j, p in enumerate(PRISM_BASE):
        verts.append(Vertex(j, (p, (a, Fraction(0)))))
        verts.append(Vertex(j + 4, (p, (b, Fraction(0)))))
    tets = []
    for u, v, w in [(0, 1, 2), (0, 2, 3), (0, 1, 3)]:
        tets += [(u, v, w, w + 4), (u, v, v + 4, w + 4), (u, u + 4, v + 4, w + 4)]
    by_id = {v.id: v for v in verts}
    items = []
    for t in tets:
        pts = [[by_id[v].coords[0][0], by_id[v].coords[0][1], by_id[v].coords[1][0]] for v in t]
        rows = [[q - p for q, p in zip(x, pts[0])] for x in pts[1:]]
        items.append((t, 1 if _det3(rows) > 0 else -1))
    K = SimplicialComplex.from_maximal(verts, tets, None, 2)
    return K, Chain.from_simplices(2, items)
