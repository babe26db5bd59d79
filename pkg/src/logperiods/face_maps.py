"""Good orderings, Thom cocycles, cap and cup products, face maps and the
cubical differential.

Simplicial chains are face-mapped by capping with a Thom cocycle; the result
lives on the face complex with the face coordinate removed.  Parametrized
cells are face-mapped through their declared face data.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy

from .chain_core import (INF, ZERO, Chain, SimplicialComplex, StructuralError,
                         Vertex, boundary, faces_of, orient)
from .geometry import (CubicalFace, LinearCell, ParamCell, ValidationError,
                       cell_face_intersection, is_admissible)
from .rational_linalg import nullspace, to_fraction


class GenericityError(ValueError):
    pass


class ContractError(ValueError):
    pass


class AdmissibilityError(ValueError):
    def __init__(self, msg, report=None):
        ValueError.__init__(self, msg)
        self.report = report


# ---------------------------------------------------------------------------
# orderings

@dataclass(frozen=True)
class GoodOrdering:
    rank: dict            # vertex id -> position in the global order
    face: CubicalFace

    def order(self, simplex):
        """Vertices of a simplex in ordering order, and the sign relative to sorted ids."""
        vs = sorted(simplex, key=lambda v: self.rank[v])
        _, sign = orient(vs)
        return tuple(vs), sign

    def is_good(self, K):
        on = {v for v in K.vertices if K.on_face(v, self.face.constraints)}
        for s in K.simplexes:
            vs, _ = self.order(s)
            seen = False
            for v in vs:
                if v in on:
                    seen = True
                elif seen:
                    return False
        return True


def build_good_ordering(K, face, key=None):
    """Off-face vertices first, then face vertices; ascending id unless ``key`` given."""
    if isinstance(face, tuple):
        face = CubicalFace.single(*face)
    key = key or (lambda v: v)
    off = sorted((v for v in K.vertices if not K.on_face(v, face.constraints)), key=key)
    on = sorted((v for v in K.vertices if K.on_face(v, face.constraints)), key=key)
    return GoodOrdering({v: j for j, v in enumerate(off + on)}, face)


def random_good_ordering(K, face, rng):
    ids = list(K.vertices)
    perm = list(rng.permutation(len(ids)))
    pos = {ids[j]: perm[j] for j in range(len(ids))}
    return build_good_ordering(K, face, key=lambda v: pos[v])


# ---------------------------------------------------------------------------
# cochains

class Cochain:
    """Rational (or complex) valued p-cochain; values on sorted simplexes."""

    def __init__(self, degree, values):
        self.degree = degree
        self.values = {k: v for k, v in values.items() if v}

    def __call__(self, vertices):
        key, sign = orient(vertices)
        return sign * self.values.get(key, 0)

    def coboundary(self, K):
        out = {}
        for s in K.by_dim(self.degree + 1):
            val = 0
            for j in range(len(s)):
                f = s[:j] + s[j + 1:]
                v = self.values.get(f)
                if v:
                    val += (-1) ** j * v
            if val:
                out[s] = val
        return Cochain(self.degree + 1, out)

    def __add__(self, other):
        vals = dict(self.values)
        for k, v in other.values.items():
            vals[k] = vals.get(k, 0) + v
        return Cochain(self.degree, vals)

    def __eq__(self, other):
        return isinstance(other, Cochain) and self.degree == other.degree and \
            self.values == other.values

    def restrict(self, simplexes):
        return Cochain(self.degree, {k: v for k, v in self.values.items() if k in simplexes})


@dataclass
class ThomCocycle:
    face: CubicalFace
    cochain: Cochain
    W: frozenset                 # simplexes missing the face
    backend: str = "exact"
    epsilon: float = None

    def __call__(self, vertices):
        return self.cochain(vertices)

    @property
    def values(self):
        return self.cochain.values

    def vanishes_on_W(self):
        return all(k not in self.W for k in self.cochain.values)

    def is_cocycle(self, K):
        return not self.cochain.coboundary(K).values

    def table(self):
        return {k: str(v) for k, v in sorted(self.cochain.values.items())}


def missing_face(K, face):
    """W: simplexes of K with no vertex on the face."""
    return frozenset(s for s in K.simplexes
                     if not any(K.on_face(v, face.constraints) for v in s))


def random_thom_cocycle(K, face, rng, size=3):
    """A random cocycle in C^2(K, W): T = d c with c|W a cocycle of W."""
    if isinstance(face, tuple):
        face = CubicalFace.single(*face)
    W = missing_face(K, face)
    w_edges = sorted(s for s in W if len(s) == 2)
    w_tris = sorted(s for s in W if len(s) == 3)
    cols = []
    for e in w_edges:
        col = {}
        for t in w_tris:
            if set(e) <= set(t):
                j = [x for x in t if x not in e][0]
                col[t] = (-1) ** t.index(j)
        cols.append(col)
    basis = nullspace(cols, labels=w_edges)
    c = {}
    for b in basis:
        coef = Fraction(int(rng.integers(-size, size + 1)))
        for e, v in b.items():
            c[e] = c.get(e, 0) + coef * v
    for e in sorted(s for s in K.simplexes if len(s) == 2 and s not in W):
        c[e] = Fraction(int(rng.integers(-size, size + 1)))
    T = Cochain(1, c).coboundary(K)
    return ThomCocycle(face, T, W, "random")


def random_relative_cochain(K, W, degree, rng, size=3):
    """Random cochain vanishing on W."""
    vals = {}
    for s in K.by_dim(degree):
        if s not in W:
            vals[s] = Fraction(int(rng.integers(-size, size + 1)))
    return Cochain(degree, vals)


def shifted_thom_cocycle(T, K, rng, size=3):
    """Another Thom cocycle for the same face: T + d u with u vanishing on W."""
    u = random_relative_cochain(K, T.W, 1, rng, size)
    return ThomCocycle(T.face, T.cochain + u.coboundary(K), T.W, T.backend)


# ---------------------------------------------------------------------------
# the exact geometric Thom cocycle

def _ray_crossing(p, q, d):
    """Signed crossing of the segment p->q with the open ray {s d : s > 0}.

    Returns None when the crossing is at an endpoint (non-generic ray).
    """
    ex, ey = q[0] - p[0], q[1] - p[1]
    det = d[0] * ey - d[1] * ex
    if det == 0:
        # parallel: crossing only if collinear through the ray
        cr = p[0] * d[1] - p[1] * d[0]
        if cr == 0 and (p[0] * d[0] + p[1] * d[1] > 0 or q[0] * d[0] + q[1] * d[1] > 0):
            return None
        return 0
    # p + u e = s d
    u = (d[0] * (-p[1]) - d[1] * (-p[0])) / det
    s = (ex * (-p[1]) - ey * (-p[0])) / det
    if s <= 0 or u < 0 or u > 1:
        return 0
    if u == 0 or u == 1:
        return None
    return 1 if det > 0 else -1


_RAYS = [(Fraction(1), Fraction(0))] + [(Fraction(p), Fraction(q)) for p, q in
                                        [(7, 3), (-5, 11), (13, -2), (-3, -17), (19, 23),
                                         (-29, 31), (37, -41), (2, 43), (-47, 5)]]


def exact_thom_cocycle(K, face):
    """Integer Thom cocycle of {z_i = 0} on a finite-chart linear complex.

    c(e) counts signed crossings of the projected edge with a generic ray
    from 0 (edges missing the face), and T = d c.  On a transverse 2-simplex
    T is the winding number of its projected boundary, i.e. the intersection
    number with the face.
    """
    if isinstance(face, tuple):
        face = CubicalFace.single(*face)
    if face.codim != 1:
        raise ValueError("Thom cocycles are built for codimension-one faces")
    (i, alpha), = face.constraints
    if alpha == INF:
        # finite chart: the face at infinity is empty
        W = frozenset(K.simplexes)
        return ThomCocycle(face, Cochain(2, {}), W, "exact")
    meets = {}
    for s in K.simplexes:
        if len(s) > 3:
            continue
        cell = LinearCell([K.vertices[v].coords for v in s])
        inter = cell_face_intersection(cell, face)
        meets[s] = inter.dim >= 0
        if inter.dim < 0:
            continue
        on = {tuple(K.vertices[v].coords) for v in s if K.on_face(v, face.constraints)}
        if on:
            # good-triangulation case: the meet is the face spanned by on-face vertices
            if not set(inter.points) <= on:
                raise GenericityError("simplex %s meets %r away from its face vertices"
                                      % (s, face))
        elif len(s) < 3 or inter.dim > 0:
            raise GenericityError("simplex %s is not transverse to %r" % (s, face))
    W = frozenset(s for s in K.simplexes if len(s) <= 3 and not meets[s]) | \
        frozenset(s for s in K.simplexes if len(s) > 3 and
                  all(not meets[f] for f in itertools.combinations(s, 3)))
    edges = sorted(s for s in W if len(s) == 2)
    proj = {v: K.vertices[v].coords[i - 1] for v in K.vertices}
    for d in _RAYS:
        c = {}
        ok = True
        for a, b in edges:
            x = _ray_crossing(proj[a], proj[b], d)
            if x is None:
                ok = False
                break
            if x:
                c[(a, b)] = Fraction(x)
        # vertices on the ray make the count ambiguous for touching edges
        if ok and not any(_on_ray(proj[v], d) for e in edges for v in e):
            T = Cochain(1, c).coboundary(K)
            return ThomCocycle(face, T, W, "exact")
    raise GenericityError("no generic ray found for %r" % face)


def _on_ray(p, d):
    cr = p[0] * d[1] - p[1] * d[0]
    return cr == 0 and p[0] * d[0] + p[1] * d[1] > 0


# ---------------------------------------------------------------------------
# cap and cup products

def cap_product(T, O, gamma, check=True):
    """u ∩ [v0..vk] = u(v0..vp)[vp..vk] with vertices in the ordering O."""
    u = T.cochain if isinstance(T, ThomCocycle) else T
    if check and isinstance(T, ThomCocycle) and O.face != T.face:
        raise ContractError("ordering is good for %r, cocycle is for %r" % (O.face, T.face))
    p = u.degree
    out = {}
    for s, c in gamma.terms.items():
        if len(s) - 1 < p:
            continue
        vs, sign = O.order(s)
        val = u(vs[:p + 1])
        if not val:
            continue
        key, ksign = orient(vs[p:])
        out[key] = out.get(key, 0) + c * sign * ksign * val
    return Chain(gamma.n, gamma.degree - p, out)


def cup_product(T1, T2, O):
    """(T1 ∪ T2)(v0..v4) = T1(v0 v1 v2) T2(v2 v3 v4) in the ordering O, as a 4-cochain."""
    if any(i == j for i, _ in T1.face.constraints for j, _ in T2.face.constraints):
        raise ValueError("cup product needs faces with distinct coordinates")
    return _cup(T1.cochain, T2.cochain, O)


def _cup(u1, u2, O, simplexes=None):
    p, q = u1.degree, u2.degree
    vals = {}
    keys = set()
    for a in u1.values:
        keys.add(a)
    # candidate simplexes: unions of supports sharing one vertex
    cand = set()
    for a in u1.values:
        for b in u2.values:
            if len(set(a) & set(b)) == 1:
                s, _ = orient(set(a) | set(b))
                if len(s) == p + q + 1:
                    cand.add(s)
    if simplexes is not None:
        cand &= set(simplexes)
    for s in cand:
        vs, sign = O.order(s)
        v = u1(vs[:p + 1]) * u2(vs[p:])
        if v:
            vals[s] = sign * v
    return Cochain(p + q, vals)


def cup_cochain(T1, T2, O, K):
    """Cup product restricted to the simplexes of K."""
    return _cup(T1.cochain, T2.cochain, O, K.simplexes)


# ---------------------------------------------------------------------------
# face complexes and face maps

def face_complex(K, face):
    """The face subcomplex with the constrained coordinates removed."""
    if isinstance(face, tuple):
        face = CubicalFace.single(*face)
    drop = set(face.indices())
    sub = K.face_subcomplex(face.constraints)
    verts = []
    for v in sorted({x for s in sub for x in s}):
        coords = [c for j, c in enumerate(K.vertices[v].coords) if j + 1 not in drop]
        verts.append(Vertex(v, tuple(coords)))
    return SimplicialComplex(verts, sub, None, K.n - len(drop))


@dataclass
class FaceContext:
    """A complex with one Thom cocycle per codimension-one face.

    ``origin`` maps the current coordinate indices to the original ones and
    ``path`` records the original face constraints already imposed.
    """
    K: SimplicialComplex
    cocycles: dict
    origin: tuple = None
    path: frozenset = frozenset()
    orderings: dict = field(default_factory=dict)
    check_admissible: bool = True

    def __post_init__(self):
        if self.origin is None:
            self.origin = tuple(range(1, self.K.n + 1))

    def ordering(self, i, alpha):
        key = (i, alpha)
        if key not in self.orderings:
            self.orderings[key] = build_good_ordering(self.K, CubicalFace.single(i, alpha))
        return self.orderings[key]

    def restrict(self, i, alpha):
        face = CubicalFace.single(i, alpha)
        L = face_complex(self.K, face)
        cocycles = {}
        for (j, beta), T in self.cocycles.items():
            if j == i:
                continue
            jj = j - 1 if j > i else j
            cochain = T.cochain.restrict(L.simplexes)
            cocycles[(jj, beta)] = ThomCocycle(CubicalFace.single(jj, beta), cochain,
                                               frozenset(s for s in T.W if s in L.simplexes),
                                               T.backend)
        origin = tuple(o for k, o in enumerate(self.origin) if k + 1 != i)
        path = self.path | {(self.origin[i - 1], alpha)}
        return FaceContext(L, cocycles, origin, path, {}, self.check_admissible)

    def original_face(self, i, alpha):
        return CubicalFace(frozenset(self.path | {(self.origin[i - 1], alpha)}))


def _require_ac(gamma, K):
    r1 = is_admissible(gamma, K)
    if not r1.overall:
        raise AdmissibilityError("chain is not admissible: %s" % r1.failures()[:3], r1)
    bd = boundary(gamma, K, relative=True)
    r2 = is_admissible(bd, K)
    if not r2.overall:
        raise AdmissibilityError("boundary is not admissible: %s" % r2.failures()[:3], r2)


def face_map(gamma, i, alpha, ctx=None):
    """The face map ∂_{i,alpha}.

    Simplicial chains need a FaceContext and return a chain on the face
    complex (ctx.restrict(i, alpha).K).  ParamCell chains use declared faces.
    """
    if gamma.terms and not isinstance(next(iter(gamma.terms)), tuple):
        return _face_map_cells(gamma, i, alpha)
    if ctx is None:
        raise ContractError("simplicial face maps need a FaceContext")
    if gamma.degree < 2:
        return Chain.zero(gamma.n - 1, gamma.degree - 2)
    if ctx.check_admissible:
        _require_ac(gamma, ctx.K)
    T = ctx.cocycles[(i, alpha)]
    O = ctx.ordering(i, alpha)
    capped = cap_product(T, O, gamma)
    L = face_complex(ctx.K, CubicalFace.single(i, alpha))
    # relative to D: drop simplexes of the face lying in the divisor
    out = {k: v for k, v in capped.terms.items() if k in L.simplexes and not L.in_divisor(k)}
    stray = [k for k in capped.terms if k not in L.simplexes and not ctx.K.in_divisor(k)]
    if stray:
        raise ContractError("cap product left the face at %s" % (stray[:3],))
    return Chain(gamma.n - 1, gamma.degree - 2, out)


def _face_map_cells(gamma, i, alpha):
    out = []
    for cell, c in gamma.terms.items():
        if cell.in_divisor():
            continue
        if isinstance(cell, LinearCell):
            raise ContractError("triangulate linear cells into a complex before face maps")
        entries = cell.declared_faces.get((i, alpha))
        if entries is None:
            from .geometry import _sampled_hit
            if _sampled_hit(cell, i, alpha, 64):
                raise ValidationError("%r meets the face but declares nothing" % (cell,))
            continue
        for en in entries:
            if en.cell.in_divisor():
                continue
            out.append((en.cell, c * en.multiplicity))
    if not out:
        return Chain.zero(gamma.n - 1, gamma.degree - 2)
    return Chain.from_cells(gamma.n - 1, out)


def cubical_differential(gamma, ctx=None):
    """∂ = Σ_i (-1)^{i-1} (∂_{i,0} - ∂_{i,inf}).

    For ParamCell chains this is a Chain in ambient n-1.  For simplicial
    chains the pieces live on different face complexes, so the result is a
    dict {original face: Chain} with the signs already applied.
    """
    n = gamma.n
    if gamma.terms and not isinstance(next(iter(gamma.terms)), tuple):
        total = Chain.zero(n - 1, gamma.degree - 2)
        for i in range(1, n + 1):
            for alpha, s in ((0, 1), (INF, -1)):
                part = face_map(gamma, i, alpha)
                if part:
                    total = total + part * (s * (-1) ** (i - 1))
        return total
    out = {}
    for i in range(1, n + 1):
        for alpha, s in ((0, 1), (INF, -1)):
            part = face_map(gamma, i, alpha, ctx)
            if part:
                out[ctx.original_face(i, alpha)] = part * (s * (-1) ** (i - 1))
    return out


def cubical_differential_squared(gamma, ctx):
    """∂∂γ on a simplicial chain, collected per original codimension-two face."""
    total = {}
    for i in range(1, gamma.n + 1):
        for alpha, s in ((0, 1), (INF, -1)):
            part = face_map(gamma, i, alpha, ctx)
            if not part:
                continue
            part = part * (s * (-1) ** (i - 1))
            sub = ctx.restrict(i, alpha)
            for face, ch in cubical_differential(part, sub).items():
                if face in total:
                    total[face] = total[face] + ch
                else:
                    total[face] = ch
    return {f: c for f, c in total.items() if c}


def face_map_linear(gamma_cells, face, K):
    """Convenience: collapse a simplicial face-map result to LinearCells."""
    from .geometry import linear_chain
    return linear_chain(gamma_cells, K)


# ---------------------------------------------------------------------------
# comparing 1-dimensional linear chains

def refine_segments(chain):
    """Split every segment of a 1-dim LinearCell chain at vertices of the others."""
    pts = set()
    for cell in chain.terms:
        pts.update(cell.vertices)
    out = {}
    for cell, c in chain.terms.items():
        a, b = cell.vertices
        inner = []
        for p in pts:
            t = _segment_param(a, b, p)
            if t is not None and 0 < t < 1:
                inner.append((t, p))
        seq = [a] + [p for _, p in sorted(inner)] + [b]
        for x, y in zip(seq, seq[1:]):
            key, sign = LinearCell([x, y]).canonical()
            out[key] = out.get(key, 0) + sign * c
    return Chain(chain.n, 1, out)


def _segment_param(a, b, p):
    t = None
    for (ar, ai), (br, bi), (pr, pi) in zip(a, b, p):
        for x, y, z in ((ar, br, pr), (ai, bi, pi)):
            if x == y:
                if z != x:
                    return None
                continue
            s = (z - x) / (y - x)
            if t is None:
                t = s
            elif t != s:
                return None
    return t


def param_to_linear(cell):
    """A ParamCell whose map is affine on an interval or simplex domain, as a LinearCell."""
    import sympy
    from .geometry import Interval, StdSimplex
    if len(cell.blocks) != 1 or not isinstance(cell.blocks[0], (Interval, StdSimplex)):
        raise ValueError("not an affine simplex cell")
    b = cell.blocks[0]
    ps = list(b.params)
    for e in cell.exprs:
        for p in ps:
            if sympy.diff(e, p, 2) != 0 or any(sympy.diff(e, p, q) != 0 for q in ps if q != p):
                raise ValueError("map is not affine")

    def point(sub):
        out = []
        for e in cell.exprs:
            v = sympy.nsimplify(e.subs(sub))
            re, im = sympy.re(v), sympy.im(v)
            out.append((Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q))))
        return tuple(out)
    if isinstance(b, Interval):
        verts = [point({ps[0]: b.lo}), point({ps[0]: b.hi})]
    else:
        verts = [point({p: 0 for p in ps})]
        for p in ps:
            verts.append(point({q: (1 if q == p else 0) for q in ps}))
    return LinearCell(verts, cell.orientation)


def linear_to_param(cell):
    """A LinearCell as an affine ParamCell on the standard simplex (inverse of param_to_linear)."""
    import sympy
    from .geometry import ParamCell, StdSimplex
    ps = [sympy.Symbol("s%d" % j, real=True) for j in range(1, cell.dim + 1)]

    def cx(c):
        return sympy.Rational(c[0].numerator, c[0].denominator) + \
            sympy.I * sympy.Rational(c[1].numerator, c[1].denominator)
    V = [[cx(c) for c in v] for v in cell.vertices]
    exprs = [V[0][k] + sum((p * (V[j + 1][k] - V[0][k]) for j, p in enumerate(ps)),
                           sympy.Integer(0)) for k in range(len(V[0]))]
    return ParamCell([StdSimplex(ps)], exprs, cell.orientation, label="affine simplex")
