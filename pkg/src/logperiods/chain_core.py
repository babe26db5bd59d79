"""Finite simplicial complexes in (P^1)^n, rational chains and their boundary.

A simplex is stored as its sorted tuple of vertex ids; orientation lives in
the chain coefficient.  Chains may also hold parametrized cells (anything
exposing ``dim`` and ``boundary_terms()``), so the same Chain type serves the
combinatorial and the analytic layers.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .rational_linalg import Echelon, to_fraction


INF = "inf"


class StructuralError(ValueError):
    pass


class SolvabilityError(ValueError):
    pass


class ObstructionError(ValueError):
    def __init__(self, simplex, msg=""):
        self.simplex = simplex
        ValueError.__init__(self, "obstruction at simplex %s %s" % (simplex, msg))


# ---------------------------------------------------------------------------
# coordinates

def slot(value):
    """Normalize a coordinate slot: INF, or a pair of Fractions (re, im)."""
    if isinstance(value, str) and value.strip().lower() in ("inf", "oo", "infinity"):
        return INF
    if isinstance(value, tuple) and len(value) == 2:
        return (to_fraction(value[0]), to_fraction(value[1]))
    if isinstance(value, list) and len(value) == 2:
        return (to_fraction(value[0]), to_fraction(value[1]))
    if isinstance(value, complex):
        return (to_fraction(value.real), to_fraction(value.imag))
    return (to_fraction(value), Fraction(0))


ZERO = (Fraction(0), Fraction(0))
ONE = (Fraction(1), Fraction(0))


@dataclass(frozen=True)
class Vertex:
    id: int
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(slot(c) for c in self.coords))

    @property
    def n(self):
        return len(self.coords)

    def is_finite(self):
        return all(c != INF for c in self.coords)

    def real_point(self):
        """The point in R^{2n} as Fractions, chart (x_1, y_1, ..., x_n, y_n)."""
        out = []
        for c in self.coords:
            if c == INF:
                raise StructuralError("vertex %d has an infinite slot" % self.id)
            out.extend(c)
        return tuple(out)


def orient(vertices):
    """Sort a vertex sequence and return (sorted tuple, permutation sign)."""
    vs = tuple(vertices)
    key = tuple(sorted(vs))
    if len(set(key)) != len(key):
        raise StructuralError("repeated vertex in %s" % (vs,))
    if key == vs:
        return key, 1
    # parity from the cycle decomposition of the sorting permutation
    pos = {v: j for j, v in enumerate(key)}
    perm = [pos[v] for v in vs]
    seen = [False] * len(perm)
    sign = 1
    for j in range(len(perm)):
        if not seen[j]:
            k, length = j, 0
            while not seen[k]:
                seen[k] = True
                k = perm[k]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return key, sign


def faces_of(simplex):
    """All faces (including itself) of a sorted simplex tuple."""
    out = []
    for k in range(1, len(simplex) + 1):
        out.extend(combinations(simplex, k))
    return out


# ---------------------------------------------------------------------------
# complexes

class SimplicialComplex:
    """A finite simplicial complex with vertex positions in (P^1)^n.

    ``simplexes`` must be closed under faces; use ``from_maximal`` to build the
    closure.  ``marked`` holds named subcomplexes (each closed under faces).
    """

    def __init__(self, vertices, simplexes, marked=None, n=None):
        self.vertices = {}
        for v in vertices:
            if v.id in self.vertices:
                raise StructuralError("duplicate vertex id %d" % v.id)
            self.vertices[v.id] = v
        ns = {v.n for v in self.vertices.values()}
        if n is None:
            n = ns.pop() if ns else 0
        if any(m != n for m in ns):
            raise StructuralError("vertices have inconsistent ambient dimension")
        self.n = n
        simps = set()
        for s in simplexes:
            t, _ = orient(s)
            simps.add(t)
        for v in self.vertices:
            simps.add((v,))
        for s in simps:
            for u in s:
                if u not in self.vertices:
                    raise StructuralError("simplex %s uses unknown vertex %d" % (s, u))
            for f in faces_of(s):
                if f not in simps:
                    raise StructuralError("face %s of %s missing" % (f, s))
        self.simplexes = frozenset(simps)
        self.marked = {}
        for name, sub in (marked or {}).items():
            sub = frozenset(orient(s)[0] for s in sub)
            for s in sub:
                if s not in self.simplexes:
                    raise StructuralError("marked %s: %s not in complex" % (name, s))
                for f in faces_of(s):
                    if f not in sub:
                        raise StructuralError("marked %s not closed under faces" % name)
            self.marked[name] = sub
        self._by_dim = None
        self._vfaces = {}
        for v in self.vertices.values():
            fs = set()
            for i, c in enumerate(v.coords):
                if c == ZERO:
                    fs.add((i + 1, 0))
                elif c == INF:
                    fs.add((i + 1, INF))
            self._vfaces[v.id] = frozenset(fs)
        self._ones = {v.id: frozenset(i for i, c in enumerate(v.coords) if c == ONE)
                      for v in self.vertices.values()}

    def vertex_faces(self, vid):
        """The (i, alpha) constraints satisfied by a vertex."""
        return self._vfaces[vid]

    def common_faces(self, simplex):
        out = None
        for v in simplex:
            out = self._vfaces[v] if out is None else out & self._vfaces[v]
        return out or frozenset()

    @classmethod
    def from_maximal(cls, vertices, maximal, marked=None, n=None):
        simps = set()
        for s in maximal:
            t, _ = orient(s)
            simps.update(faces_of(t))
        return cls(vertices, simps, marked, n)

    def __contains__(self, simplex):
        return tuple(simplex) in self.simplexes

    def by_dim(self, k):
        if self._by_dim is None:
            d = {}
            for s in self.simplexes:
                d.setdefault(len(s) - 1, []).append(s)
            self._by_dim = {k: sorted(v) for k, v in d.items()}
        return self._by_dim.get(k, [])

    @property
    def dim(self):
        return max((len(s) - 1 for s in self.simplexes), default=-1)

    def in_divisor(self, simplex):
        """True when every vertex of the simplex has z_i = 1 for a common i."""
        out = None
        for v in simplex:
            out = self._ones[v] if out is None else out & self._ones[v]
            if not out:
                return False
        return bool(out)

    def divisor(self):
        return frozenset(s for s in self.simplexes if self.in_divisor(s))

    def on_face(self, vid, constraints):
        """Vertex lies on the cubical face given by (i, alpha) pairs, i 1-based."""
        fs = self._vfaces[vid]
        return all((i, INF if alpha == INF else 0) in fs for i, alpha in constraints)

    def face_subcomplex(self, constraints):
        """Induced subcomplex on the vertices lying on the face."""
        return frozenset(s for s in self.simplexes
                         if all(self.on_face(v, constraints) for v in s))

    def is_full(self, sub):
        verts = {s[0] for s in sub if len(s) == 1}
        return all(s in sub for s in self.simplexes if set(s) <= verts)

    def restrict(self, sub, marked=None):
        """Subcomplex spanned by the given closed set of simplexes."""
        vids = {v for s in sub for v in s}
        return SimplicialComplex([self.vertices[v] for v in vids], sub, marked, self.n)

    def full_simplex_on(self, vids):
        """Closure of the single simplex on vids (must be in the complex)."""
        t, _ = orient(vids)
        return frozenset(faces_of(t))


# ---------------------------------------------------------------------------
# chains

def _cell_dim(key):
    if isinstance(key, tuple):
        return len(key) - 1
    return key.dim


@dataclass(frozen=True)
class Chain:
    """Sparse rational combination of cells of a fixed degree in (P^1)^n."""
    n: int
    degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.terms.items():
            v = to_fraction(v)
            if v:
                if _cell_dim(k) != self.degree:
                    raise StructuralError("term %s has wrong degree" % (k,))
                clean[k] = v
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, n, degree):
        return cls(n, degree, {})

    @classmethod
    def from_simplices(cls, n, items):
        """items: iterable of (vertex sequence, coefficient)."""
        terms = {}
        degree = None
        for vs, c in items:
            key, sign = orient(vs)
            degree = len(key) - 1
            terms[key] = terms.get(key, 0) + sign * to_fraction(c)
        if degree is None:
            raise StructuralError("empty item list; use Chain.zero")
        return cls(n, degree, terms)

    @classmethod
    def from_cells(cls, n, items, degree=None):
        """items: iterable of (cell, coefficient); cells are normalized via canonical()."""
        terms = {}
        for cell, c in items:
            key, sign = cell.canonical() if hasattr(cell, "canonical") else (cell, 1)
            degree = _cell_dim(key)
            terms[key] = terms.get(key, 0) + sign * to_fraction(c)
        if degree is None:
            raise StructuralError("empty item list; use Chain.zero")
        return cls(n, degree, terms)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __getitem__(self, key):
        return self.terms.get(key, Fraction(0))

    def _check(self, other):
        if not isinstance(other, Chain):
            raise TypeError("expected a Chain")
        if (self.n, self.degree) != (other.n, other.degree) and self and other:
            raise StructuralError("chains of different type (n, degree)")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        base = self if self else other
        return Chain(base.n, base.degree, terms)

    def __neg__(self):
        return Chain(self.n, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        s = to_fraction(scalar)
        return Chain(self.n, self.degree, {k: s * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Chain):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return (self.n, self.degree, self.terms) == (other.n, other.degree, other.terms)

    def __hash__(self):
        return hash((self.n, self.degree, frozenset(self.terms.items())))

    def support(self):
        return set(self.terms)

    def restricted(self, keep):
        return Chain(self.n, self.degree, {k: v for k, v in self.terms.items() if keep(k)})

    def __repr__(self):
        if not self.terms:
            return "Chain(0; n=%d, p=%d)" % (self.n, self.degree)
        items = sorted(self.terms.items(), key=lambda kv: repr(kv[0]))
        body = " + ".join("%s*%s" % (v, k) for k, v in items)
        return "Chain(%s; n=%d, p=%d)" % (body, self.n, self.degree)


def boundary(chain, complex=None, relative=False):
    """Simplicial boundary; relative mode drops simplexes lying in D^n.

    Simplex terms need ``complex`` for membership and divisor tests; cell terms
    supply their own ``boundary_terms()`` and divisor test.
    """
    if chain.degree == 0:
        return Chain.zero(chain.n, -1)
    out = {}
    for key, c in chain.terms.items():
        if isinstance(key, tuple):
            if complex is not None and key not in complex.simplexes:
                raise StructuralError("simplex %s not in complex" % (key,))
            for j in range(len(key)):
                face = key[:j] + key[j + 1:]
                if relative:
                    if complex is None:
                        raise StructuralError("relative boundary needs a complex")
                    if complex.in_divisor(face):
                        continue
                sign = -c if j % 2 else c
                out[face] = out.get(face, 0) + sign
        else:
            for face, sign in key.boundary_terms():
                if relative and face.in_divisor():
                    continue
                out[face] = out.get(face, 0) + sign * c
    return Chain(chain.n, chain.degree - 1, out)


def incidence_index(sigma, nu):
    """Coefficient of the facet nu in the boundary of sigma (both oriented tuples)."""
    s_key, s_sign = orient(sigma)
    n_key, n_sign = orient(nu)
    if len(n_key) != len(s_key) - 1 or not set(n_key) <= set(s_key):
        raise ValueError("%s is not a facet of %s" % (nu, sigma))
    missing = (set(s_key) - set(n_key)).pop()
    j = s_key.index(missing)
    return (-1) ** j * s_sign * n_sign


# ---------------------------------------------------------------------------
# subdivision

@dataclass
class Refinement:
    """A subdivision K' of K together with the operator lambda on simplexes."""
    coarse: SimplicialComplex
    fine: SimplicialComplex
    image: dict   # sorted simplex of K -> Chain on K'


def barycentric_subdivision(K, start_id=None):
    """Barycentric subdivision sd K with the subdivision operator.

    The barycenter of a simplex keeps every coordinate slot on which all of
    its vertices agree; otherwise the slot is the average of the finite
    values, shifted off the real axis when needed so it never lands on 0, 1.
    """
    next_id = (max(K.vertices) + 1) if start_id is None else start_id
    bary = {}
    verts = []
    for s in sorted(K.simplexes, key=lambda s: (len(s), s)):
        if len(s) == 1:
            bary[s] = s[0]
            verts.append(K.vertices[s[0]])
            continue
        coords = []
        for i in range(K.n):
            vals = [K.vertices[v].coords[i] for v in s]
            if all(x == vals[0] for x in vals):
                coords.append(vals[0])
                continue
            finite = [x for x in vals if x != INF]
            re = sum((x[0] for x in finite), Fraction(0)) / max(len(finite), 1)
            im = sum((x[1] for x in finite), Fraction(0)) / max(len(finite), 1)
            if len(finite) < len(vals) or (re, im) in (ZERO, ONE):
                im += Fraction(1, 7) + abs(im)
            coords.append((re, im))
        bary[s] = next_id
        verts.append(Vertex(next_id, tuple(coords)))
        next_id += 1
    # fine simplexes are chains of faces s_0 < s_1 < ... ; operator via cones
    image = {}
    fine_simps = set()
    for s in sorted(K.simplexes, key=lambda s: (len(s), s)):
        if len(s) == 1:
            image[s] = Chain.from_simplices(K.n, [((s[0],), 1)])
            continue
        b = bary[s]
        bd = boundary(Chain(K.n, len(s) - 1, {s: 1}))
        terms = {}
        for face, c in bd.terms.items():
            for fs, fc in image[face].terms.items():
                key, sign = orient((b,) + fs)
                terms[key] = terms.get(key, 0) + sign * c * fc
        image[s] = Chain(K.n, len(s) - 1, terms)
    for ch in image.values():
        for key in ch.terms:
            fine_simps.update(faces_of(key))
    marked = {}
    for name, sub in K.marked.items():
        marked[name] = {f for s in sub for key in image[s].terms for f in faces_of(key)}
    fine = SimplicialComplex(verts, fine_simps, marked, K.n)
    return Refinement(K, fine, image)


def _affine_coords(points, target):
    """Barycentric coordinates of target w.r.t. affinely independent points."""
    ech = Echelon()
    for j, p in enumerate(points):
        col = {("x", k): to_fraction(x) for k, x in enumerate(p) if x}
        col["one"] = Fraction(1)
        ech.add(col, j)
    rhs = {("x", k): to_fraction(x) for k, x in enumerate(target) if x}
    rhs["one"] = Fraction(1)
    sol = ech.solve(rhs)
    if sol is None:
        return None
    return [sol.get(j, Fraction(0)) for j in range(len(points))]


def geometric_refinement(K, fine):
    """Subdivision operator for a linear subdivision of a finite-chart complex.

    lambda(sigma) is the sum of the top fine simplexes inside sigma, each with
    the sign of its orientation relative to sigma.
    """
    image = {}
    fine_by_dim = {}
    for s in fine.simplexes:
        fine_by_dim.setdefault(len(s) - 1, []).append(s)
    for s in K.simplexes:
        pts = [K.vertices[v].real_point() for v in s]
        if _rank_of(pts) != len(s):
            raise StructuralError("simplex %s is not affinely independent" % (s,))
        terms = {}
        covered = Fraction(0)
        for t in fine_by_dim.get(len(s) - 1, []):
            bcs = []
            ok = True
            for v in t:
                bc = _affine_coords(pts, fine.vertices[v].real_point())
                if bc is None or any(x < 0 for x in bc):
                    ok = False
                    break
                bcs.append(bc)
            if not ok:
                continue
            # rows of barycentric coordinates: det is the signed volume ratio
            det = _det(bcs)
            if det == 0:
                continue
            terms[t] = Fraction(1 if det > 0 else -1)
            covered += abs(det)
        if covered != 1:
            raise StructuralError("fine complex does not subdivide %s (volume %s)" % (s, covered))
        image[s] = Chain(K.n, len(s) - 1, terms)
    return Refinement(K, fine, image)


def _rank_of(points):
    ech = Echelon()
    for p in points:
        col = {k: to_fraction(x) for k, x in enumerate(p) if x}
        col["one"] = Fraction(1)
        ech.add(col)
    return ech.rank


def _det(rows):
    """Exact determinant of a square Fraction matrix."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def subdivision_operator(chain, refinement):
    """Apply lambda.  ``refinement`` is a Refinement or a finer linear complex."""
    if isinstance(refinement, SimplicialComplex):
        raise StructuralError("pass geometric_refinement(K, fine) to get the operator")
    out = {}
    for key, c in chain.terms.items():
        img = refinement.image.get(key)
        if img is None:
            raise StructuralError("simplex %s not in the coarse complex" % (key,))
        for k, v in img.terms.items():
            out[k] = out.get(k, 0) + c * v
    return Chain(chain.n, chain.degree, out)


# ---------------------------------------------------------------------------
# solving boundaries and acyclic carriers

def solve_boundary(target, carrier):
    """Find t in C(carrier) with boundary(t) = target, exactly.

    ``carrier`` is a SimplicialComplex or a closed set of sorted simplexes.
    """
    if not target:
        return Chain.zero(target.n, target.degree + 1)
    simps = carrier.simplexes if isinstance(carrier, SimplicialComplex) else carrier
    for k in target.terms:
        if k not in simps:
            raise SolvabilityError("target term %s outside the carrier" % (k,))
    p = target.degree
    ech = Echelon()
    for s in sorted(x for x in simps if len(x) == p + 2):
        col = boundary(Chain(target.n, p + 1, {s: 1})).terms
        ech.add(col, s)
    sol = ech.solve(target.terms)
    if sol is None:
        raise SolvabilityError("target is not a boundary in the carrier")
    return Chain(target.n, p + 1, sol)


def carrier_homotopy(phi_a, phi_b, source, carriers, shift=0):
    """Acyclic-carrier chain homotopy theta with d theta + theta d = phi_a - phi_b.

    phi_a, phi_b map a sorted simplex of ``source`` (degree k) to a Chain of
    degree k - shift.  carriers maps each simplex to a closed set of target
    simplexes; theta(sigma) is built inside carriers[sigma].
    """
    theta = {}
    for k in range(shift, source.dim + 1):
        for s in source.by_dim(k):
            rhs = phi_a(s) - phi_b(s)
            if k > shift:
                for f, c in boundary(Chain(source.n, k, {s: 1})).terms.items():
                    t = theta.get(f)
                    if t:
                        rhs = rhs - t * c
            try:
                theta[s] = solve_boundary(rhs, carriers[s])
            except SolvabilityError as e:
                raise ObstructionError(s, str(e))
    return theta


def check_homotopy(theta, phi_a, phi_b, source, shift=0):
    """Residual of d theta(s) + theta(d s) - (phi_a - phi_b)(s) over all s."""
    bad = {}
    for s in source.simplexes:
        k = len(s) - 1
        if k < shift:
            continue
        diff = phi_a(s) - phi_b(s)
        lhs = boundary(theta[s])
        if k > shift:
            for f, c in boundary(Chain(source.n, k, {s: 1})).terms.items():
                if theta[f]:
                    lhs = lhs + theta[f] * c
        res = lhs - diff
        if res:
            bad[s] = res
    return bad


# ---------------------------------------------------------------------------
# JSON

def _coeff_str(c):
    c = to_fraction(c)
    return "%d/%d" % (c.numerator, c.denominator)


def _slot_json(c):
    if c == INF:
        return INF
    return [_coeff_str(c[0]), _coeff_str(c[1])]


def dump_bundle(K, chains=None):
    doc = {
        "n": K.n,
        "vertices": [{"id": v.id, "coords": [_slot_json(c) for c in v.coords]}
                     for v in sorted(K.vertices.values(), key=lambda v: v.id)],
        "simplexes": sorted([list(s) for s in K.simplexes], key=lambda s: (len(s), s)),
        "marked": {k: sorted([list(s) for s in v], key=lambda s: (len(s), s))
                   for k, v in sorted(K.marked.items())},
        "chains": {},
    }
    for name, ch in (chains or {}).items():
        doc["chains"][name] = [{"simplex": list(k), "coeff": _coeff_str(v)}
                               for k, v in sorted(ch.terms.items())]
    return doc


class BundleParseError(ValueError):
    pass


def load_bundle(doc):
    """Parse a chain bundle (dict, JSON text or path) -> (complex, chains)."""
    if isinstance(doc, str):
        try:
            if doc.lstrip().startswith("{"):
                doc = json.loads(doc)
            else:
                with open(doc) as f:
                    doc = json.load(f)
        except json.JSONDecodeError as e:
            raise BundleParseError("not valid JSON: %s" % e)
    try:
        n = int(doc["n"])
        verts = []
        for j, v in enumerate(doc["vertices"]):
            coords = v["coords"]
            if len(coords) != n:
                raise BundleParseError("vertices[%d]: expected %d coords" % (j, n))
            verts.append(Vertex(int(v["id"]), tuple(
                INF if c == INF else (to_fraction(c[0]), to_fraction(c[1])) for c in coords)))
        simps = [tuple(s) for s in doc.get("simplexes", [])]
        marked = {k: [tuple(s) for s in v] for k, v in doc.get("marked", {}).items()}
        K = SimplicialComplex.from_maximal(verts, simps, None, n)
        K = SimplicialComplex(verts, K.simplexes,
                              {k: {f for s in v for f in faces_of(orient(s)[0])}
                               for k, v in marked.items()}, n)
        chains = {}
        for name, items in doc.get("chains", {}).items():
            if not items:
                continue
            try:
                chains[name] = Chain.from_simplices(
                    n, [(tuple(it["simplex"]), to_fraction(it["coeff"])) for it in items])
            except (KeyError, ValueError, ZeroDivisionError) as e:
                raise BundleParseError("chains[%r]: %s" % (name, e))
            for k in chains[name].terms:
                if k not in K.simplexes:
                    raise BundleParseError("chains[%r]: simplex %s not in complex" % (name, k))
    except BundleParseError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise BundleParseError("malformed bundle: %s" % e)
    return K, chains
