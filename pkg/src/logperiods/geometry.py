"""Geometric carriers of chains in (P^1)^n.

Two carriers share one interface (``dim``, ``canonical``, ``boundary_terms``,
``in_divisor``):

* LinearCell: an affine simplex in the finite chart, vertices in C^n.
* ParamCell: a product of standard domain blocks mapped into C^n by a
  rational expression per coordinate.

Cubical faces are sets of (i, alpha) with 1-based i and alpha in {0, INF}.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy
import sympy

from .chain_core import (INF, ONE, ZERO, Chain, SimplicialComplex,
                         StructuralError, _det, orient)
from .expressions import format_expr, parse_expr
from .rational_linalg import Echelon, to_fraction


class DomainError(ValueError):
    pass


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cubical faces

def _alpha(a):
    if a == INF or (isinstance(a, str) and a.lower() in ("inf", "oo", "infinity")):
        return INF
    if a == 0 or a == "0":
        return 0
    raise ValueError("face value must be 0 or inf, got %r" % (a,))


@dataclass(frozen=True)
class CubicalFace:
    constraints: frozenset

    def __post_init__(self):
        cons = frozenset((int(i), _alpha(a)) for i, a in self.constraints)
        idx = [i for i, _ in cons]
        if len(set(idx)) != len(idx):
            raise ValueError("at most one constraint per coordinate")
        if any(i < 1 for i in idx):
            raise ValueError("coordinate indices are 1-based")
        object.__setattr__(self, "constraints", cons)

    @classmethod
    def single(cls, i, alpha):
        return cls(frozenset([(i, alpha)]))

    @property
    def codim(self):
        return len(self.constraints)

    def indices(self):
        return sorted(i for i, _ in self.constraints)

    def __repr__(self):
        body = ",".join("z%d=%s" % (i, "inf" if a == INF else "0")
                        for i, a in sorted(self.constraints, key=lambda c: c[0]))
        return "H{%s}" % body


def all_faces(n, max_codim=None):
    """Every cubical face of (P^1)^n (nonempty constraint sets)."""
    out = []
    top = n if max_codim is None else min(n, max_codim)
    for k in range(1, top + 1):
        for idx in itertools.combinations(range(1, n + 1), k):
            for vals in itertools.product((0, INF), repeat=k):
                out.append(CubicalFace(frozenset(zip(idx, vals))))
    return out


# ---------------------------------------------------------------------------
# exact helpers

def _cq(value):
    """Rational complex (re, im) -> sympy number."""
    if value == INF:
        raise DomainError("infinite coordinate in a finite chart")
    re, im = value
    return sympy.Rational(re.numerator, re.denominator) + \
        sympy.I * sympy.Rational(im.numerator, im.denominator)


def canon(expr):
    """Canonical form of a rational expression (used for cell identity)."""
    expr = sympy.sympify(expr)
    if expr.free_symbols:
        return sympy.cancel(sympy.together(sympy.expand(expr)))
    return sympy.nsimplify(sympy.expand(expr)) if not expr.is_Rational else expr


def _is_const(expr, value):
    expr = canon(expr)
    return not expr.free_symbols and sympy.simplify(expr - value) == 0


def _sym_rational(x):
    x = to_fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


# ---------------------------------------------------------------------------
# domain blocks

_fresh = itertools.count()


def _fresh_name(prefix="s"):
    return "%s_%d" % (prefix, next(_fresh))


def _real(name):
    return sympy.Symbol(name, real=True)


def _signed_det(columns):
    """Sign of the determinant of Fraction column vectors."""
    d = _det([list(r) for r in zip(*columns)]) if columns else Fraction(1)
    return (d > 0) - (d < 0)


class Block:
    """A factor of a product domain.  ``params`` are sympy symbols."""
    kind = None
    complex_param = False

    @property
    def real_dim(self):
        return len(self.params) * (2 if self.complex_param else 1)

    def facets(self):
        """List of (sign, substitution dict, replacement blocks)."""
        raise NotImplementedError

    def rename(self, mapping):
        raise NotImplementedError

    def key(self):
        raise NotImplementedError

    def sample(self, rng):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class Interval(Block):
    kind = "interval"

    def __init__(self, param, lo, hi):
        self.params = (param if isinstance(param, sympy.Symbol) else _real(param),)
        self.lo, self.hi = _sym_rational(lo), _sym_rational(hi)
        if not self.lo < self.hi:
            raise DomainError("empty interval [%s, %s]" % (self.lo, self.hi))

    def facets(self):
        p = self.params[0]
        return [(1, {p: self.hi}, []), (-1, {p: self.lo}, [])]

    def rename(self, mapping):
        return Interval(mapping[self.params[0]], self.lo, self.hi)

    def key(self):
        return ("interval", self.lo, self.hi)

    def sample(self, rng):
        return {self.params[0]: float(self.lo) + rng.random() * float(self.hi - self.lo)}

    def to_json(self):
        return {"type": "interval", "param": self.params[0].name,
                "lo": str(self.lo), "hi": str(self.hi)}


class Ordered(Block):
    """hi >= p0 >= p1 >= ... >= pk >= lo, oriented by (p0, ..., pk)."""
    kind = "ordered"

    def __new__(cls, params, lo, hi):
        if len(params) == 1:
            return Interval(params[0], lo, hi)
        return Block.__new__(cls)

    def __init__(self, params, lo, hi):
        self.params = tuple(p if isinstance(p, sympy.Symbol) else _real(p) for p in params)
        self.lo, self.hi = _sym_rational(lo), _sym_rational(hi)
        if not self.lo < self.hi:
            raise DomainError("empty ordered block")

    def _rest(self, params):
        return [Ordered(params, self.lo, self.hi)] if params else []

    def facets(self):
        ps = list(self.params)
        k = len(ps)
        e = lambda j: [Fraction(int(i == j)) for i in range(k)]
        out = []
        # p0 = hi
        rest = ps[1:]
        out.append((_signed_det([e(0)] + [e(j) for j in range(1, k)]),
                    {ps[0]: self.hi}, self._rest(rest)))
        # p_j = p_{j+1}
        for j in range(k - 1):
            normal = [Fraction(0)] * k
            normal[j], normal[j + 1] = Fraction(-1), Fraction(1)
            tangents = []
            for q in range(k):
                if q == j + 1:
                    continue
                t = e(q)
                if q == j:
                    t[j + 1] = Fraction(1)
                tangents.append(t)
            rest = ps[:j + 1] + ps[j + 2:]
            out.append((_signed_det([normal] + tangents), {ps[j + 1]: ps[j]}, self._rest(rest)))
        # p_k = lo
        normal = [Fraction(0)] * k
        normal[k - 1] = Fraction(-1)
        out.append((_signed_det([normal] + [e(j) for j in range(k - 1)]),
                    {ps[-1]: self.lo}, self._rest(ps[:-1])))
        return out

    def rename(self, mapping):
        return Ordered([mapping[p] for p in self.params], self.lo, self.hi)

    def key(self):
        return ("ordered", len(self.params), self.lo, self.hi)

    def sample(self, rng):
        xs = sorted((float(self.lo) + rng.random() * float(self.hi - self.lo)
                     for _ in self.params), reverse=True)
        return dict(zip(self.params, xs))

    def to_json(self):
        return {"type": "ordered", "params": [p.name for p in self.params],
                "lo": str(self.lo), "hi": str(self.hi)}


class StdSimplex(Block):
    """t_j >= 0, sum t_j <= 1."""
    kind = "simplex"

    def __init__(self, params):
        self.params = tuple(p if isinstance(p, sympy.Symbol) else _real(p) for p in params)

    def facets(self):
        ps = list(self.params)
        k = len(ps)
        e = lambda j: [Fraction(int(i == j)) for i in range(k)]
        out = []
        for j in range(k):
            rest = ps[:j] + ps[j + 1:]
            normal = [Fraction(-int(i == j)) for i in range(k)]
            tangents = [e(q) for q in range(k) if q != j]
            out.append((_signed_det([normal] + tangents), {ps[j]: 0},
                        [StdSimplex(rest)] if rest else []))
        normal = [Fraction(1)] * k
        tangents = []
        for q in range(k - 1):
            t = e(q)
            t[k - 1] = Fraction(-1)
            tangents.append(t)
        out.append((_signed_det([normal] + tangents),
                    {ps[-1]: 1 - sum(ps[:-1], sympy.Integer(0))},
                    [StdSimplex(ps[:-1])] if k > 1 else []))
        return out

    def rename(self, mapping):
        return StdSimplex([mapping[p] for p in self.params])

    def key(self):
        return ("simplex", len(self.params))

    def sample(self, rng):
        x = rng.exponential(size=len(self.params) + 1)
        x = x / x.sum()
        return dict(zip(self.params, x[:-1]))

    def to_json(self):
        return {"type": "simplex", "params": [p.name for p in self.params]}


def half_circle(s):
    """(1 + i s)/(1 - i s): the right half of the unit circle, -i to i, for s in [-1, 1]."""
    return (1 + sympy.I * s) / (1 - sympy.I * s)


class Disk(Block):
    """Closed disk |w - center| <= radius in a complex parameter w."""
    kind = "disk"
    complex_param = True

    def __init__(self, param, center=0, radius=1):
        self.params = (param if isinstance(param, sympy.Symbol) else sympy.Symbol(param),)
        self.center = sympy.nsimplify(center)
        self.radius = _sym_rational(radius)
        if self.radius <= 0:
            raise DomainError("disk radius must be positive")

    def facets(self):
        w = self.params[0]
        out = []
        for side in (1, -1):
            s = _real(_fresh_name())
            out.append((1, {w: self.center + side * self.radius * half_circle(s)},
                        [Interval(s, -1, 1)]))
        return out

    def rename(self, mapping):
        return Disk(mapping[self.params[0]], self.center, self.radius)

    def key(self):
        return ("disk", self.center, self.radius)

    def sample(self, rng):
        r = float(self.radius) * math.sqrt(rng.random())
        th = 2 * math.pi * rng.random()
        return {self.params[0]: complex(self.center) + r * complex(math.cos(th), math.sin(th))}

    def to_json(self):
        c = complex(self.center)
        return {"type": "disk", "param": self.params[0].name,
                "center": [str(sympy.re(self.center)), str(sympy.im(self.center))],
                "radius": str(self.radius)}


class Plane(Block):
    """The whole complex line in a parameter x (closed up at infinity)."""
    kind = "plane"
    complex_param = True

    def __init__(self, param):
        self.params = (param if isinstance(param, sympy.Symbol) else sympy.Symbol(param),)

    def facets(self):
        return []

    def rename(self, mapping):
        return Plane(mapping[self.params[0]])

    def key(self):
        return ("plane",)

    def sample(self, rng):
        rho = rng.random()
        th = 2 * math.pi * rng.random()
        r = rho / (1 - rho) if rho < 1 else 1e6
        return {self.params[0]: r * complex(math.cos(th), math.sin(th))}

    def to_json(self):
        return {"type": "plane", "param": self.params[0].name}


def block_from_json(d):
    t = d["type"]
    if t == "interval":
        return Interval(d["param"], Fraction(d["lo"]), Fraction(d["hi"]))
    if t == "ordered":
        return Ordered(d["params"], Fraction(d["lo"]), Fraction(d["hi"]))
    if t == "simplex":
        return StdSimplex(d["params"])
    if t == "disk":
        c = d.get("center", ["0", "0"])
        center = _sym_rational(Fraction(c[0])) + sympy.I * _sym_rational(Fraction(c[1]))
        return Disk(d["param"], center, Fraction(d.get("radius", "1")))
    if t == "plane":
        return Plane(d["param"])
    raise ValueError("unknown block type %r" % t)


# ---------------------------------------------------------------------------
# parametrized cells

@dataclass
class FaceEntry:
    """One piece of a declared face intersection.

    ``cell`` lives in (P^1)^{n-1} (the face coordinate removed); ``slice``
    substitutes the face parameters so the parent becomes a 2-cell transverse
    to the face, used to validate ``multiplicity`` with the Thom form.
    """
    cell: "ParamCell"
    multiplicity: int
    slice: dict = field(default_factory=dict)


class ParamCell:
    """A closed-form parametrized cell.

    blocks: domain factors, orientation is the product orientation in block
    order.  exprs: one sympy expression per coordinate z_1..z_n.
    declared_faces: {(i, alpha): [FaceEntry, ...]} for codimension-one faces.
    """

    def __init__(self, blocks, exprs, orientation=1, declared_faces=None, label=None):
        self.blocks = tuple(blocks)
        names = {p.name: p for b in self.blocks for p in b.params}
        if len(names) != sum(len(b.params) for b in self.blocks):
            raise DomainError("repeated parameter names")
        self.exprs = tuple(parse_expr(e, names) if isinstance(e, str) else sympy.sympify(e)
                           for e in exprs)
        for e in self.exprs:
            extra = e.free_symbols - set(names.values())
            if extra:
                raise DomainError("map uses unknown symbols %s" % extra)
        self.orientation = 1 if orientation > 0 else -1
        self.declared_faces = {}
        for (i, a), entries in (declared_faces or {}).items():
            self.declared_faces[(int(i), _alpha(a))] = list(entries)
        self.label = label
        self._key = None
        self._numeric = None

    # -- basic data
    @property
    def n(self):
        return len(self.exprs)

    @property
    def dim(self):
        return sum(b.real_dim for b in self.blocks)

    @property
    def params(self):
        return [p for b in self.blocks for p in b.params]

    def with_orientation(self, sign):
        return ParamCell(self.blocks, self.exprs, sign, self.declared_faces, self.label)

    def __repr__(self):
        name = self.label or "cell"
        return "%s[%s]" % (name, ", ".join(str(e) for e in self.exprs))

    # -- identity
    def _canonical_data(self):
        mapping = {}
        blocks = []
        k = 0
        for b in self.blocks:
            for p in b.params:
                mapping[p] = (sympy.Symbol("w%d" % k) if b.complex_param else _real("p%d" % k))
                k += 1
            blocks.append(b.rename(mapping))
        exprs = tuple(canon(e.xreplace(mapping)) for e in self.exprs)
        faces = {}
        for key, entries in self.declared_faces.items():
            faces[key] = [FaceEntry(en.cell, en.multiplicity,
                                    {mapping.get(p, p): v for p, v in en.slice.items()})
                          for en in entries]
        return blocks, exprs, faces

    def canonical(self):
        """(cell with orientation +1 and canonical parameter names, sign)."""
        blocks, exprs, faces = self._canonical_data()
        cell = ParamCell(blocks, exprs, 1, faces, self.label)
        return cell, self.orientation

    def key(self):
        if self._key is None:
            blocks, exprs, _ = self._canonical_data()
            self._key = (tuple(b.key() for b in blocks),
                         tuple(sympy.srepr(e) for e in exprs), self.orientation)
        return self._key

    def __eq__(self, other):
        return isinstance(other, ParamCell) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    # -- geometry
    def in_divisor(self):
        return any(_is_const(e, 1) for e in self.exprs)

    def constant_slot(self, i):
        e = canon(self.exprs[i])
        return None if e.free_symbols else e

    def real_symbols(self):
        """Real coordinates of the domain and the substitution for complex params."""
        reals, subs = [], {}
        for b in self.blocks:
            for p in b.params:
                if b.complex_param:
                    u, v = _real(p.name + "_re"), _real(p.name + "_im")
                    reals += [u, v]
                    subs[p] = u + sympy.I * v
                else:
                    reals.append(p)
        return reals, subs

    def jacobian(self):
        """Complex n x dim matrix of derivatives along the oriented real directions."""
        cols = []
        for b in self.blocks:
            for p in b.params:
                d = [sympy.diff(e, p) for e in self.exprs]
                cols.append(d)
                if b.complex_param:
                    cols.append([sympy.I * x for x in d])
        if not cols:
            return sympy.zeros(self.n, 0)
        return sympy.Matrix(cols).T

    def numeric(self):
        """(real symbols, f(*reals) -> complex array of coordinates, jacobian f)."""
        if self._numeric is None:
            reals, subs = self.real_symbols()
            ex = [e.subs(subs) for e in self.exprs]
            jac = self.jacobian().subs(subs)
            f = sympy.lambdify(reals, ex, modules="numpy")
            jf = sympy.lambdify(reals, jac, modules="numpy")
            self._numeric = (reals, f, jf)
        return self._numeric

    def sample_points(self, count, seed=0):
        rng = numpy.random.default_rng(seed)
        out = []
        for _ in range(count):
            pt = {}
            for b in self.blocks:
                pt.update(b.sample(rng))
            out.append(pt)
        return out

    def evaluate(self, point):
        reals, f, _ = self.numeric()
        args = []
        for b in self.blocks:
            for p in b.params:
                if b.complex_param:
                    z = complex(point[p])
                    args += [z.real, z.imag]
                else:
                    args.append(float(point[p]))
        return numpy.array(f(*args), dtype=complex)

    def is_degenerate(self, seed=0):
        """True when the real Jacobian has rank below dim at generic points."""
        if self.dim == 0:
            return False
        reals, _, jf = self.numeric()
        for pt in self.sample_points(3, seed):
            args = []
            for b in self.blocks:
                for p in b.params:
                    if b.complex_param:
                        z = complex(pt[p])
                        args += [z.real, z.imag]
                    else:
                        args.append(float(pt[p]))
            J = numpy.array(jf(*args), dtype=complex)
            R = numpy.vstack([J.real, J.imag])
            s = numpy.linalg.svd(R, compute_uv=False)
            if s.size and s[-1] > 1e-9 * max(1.0, s[0]):
                return False
        return True

    def boundary_terms(self):
        """Facets as (canonical cell, sign); facets in D or degenerate are dropped."""
        out = {}
        offset = 0
        for j, b in enumerate(self.blocks):
            for sign, subs, new_blocks in b.facets():
                blocks = list(self.blocks[:j]) + list(new_blocks) + list(self.blocks[j + 1:])
                cell = ParamCell(blocks, [e.subs(subs) for e in self.exprs], 1, None, self.label)
                if cell.in_divisor() or cell.is_degenerate():
                    continue
                ckey, csign = cell.canonical()
                s = self.orientation * (-1) ** offset * sign * csign
                out[ckey] = out.get(ckey, 0) + s
            offset += b.real_dim
        return [(k, v) for k, v in out.items() if v]

    # -- serialization
    def to_json(self):
        d = {"kind": "param", "blocks": [b.to_json() for b in self.blocks],
             "map": [format_expr(e) for e in self.exprs], "orientation": self.orientation}
        if self.label:
            d["label"] = self.label
        if self.declared_faces:
            d["declared_faces"] = [
                {"face": [i, "inf" if a == INF else "0"],
                 "cells": [{"cell": en.cell.to_json(), "multiplicity": en.multiplicity,
                            "slice": {str(p): str(v) for p, v in en.slice.items()}}
                           for en in entries]}
                for (i, a), entries in sorted(self.declared_faces.items(), key=repr)]
        return d


def param_cell_from_json(d):
    blocks = [block_from_json(b) for b in d["blocks"]]
    names = {p.name: p for b in blocks for p in b.params}
    exprs = [parse_expr(e, names) for e in d["map"]]
    faces = {}
    for f in d.get("declared_faces", []):
        i, a = f["face"]
        entries = []
        for c in f.get("cells", []):
            sl = {names[k]: sympy.nsimplify(v) for k, v in c.get("slice", {}).items()}
            entries.append(FaceEntry(param_cell_from_json(c["cell"]), int(c["multiplicity"]), sl))
        faces[(int(i), _alpha(a))] = entries
    return ParamCell(blocks, exprs, d.get("orientation", 1), faces, d.get("label"))


# ---------------------------------------------------------------------------
# linear cells

class LinearCell:
    """Affine simplex in C^n with rational vertices (re, im) per slot."""

    def __init__(self, vertices, orientation=1):
        vs = []
        for v in vertices:
            slots = []
            for c in v:
                if c == INF:
                    raise DomainError("linear cells cannot touch infinity")
                slots.append((to_fraction(c[0]), to_fraction(c[1])) if isinstance(c, (tuple, list))
                             else (to_fraction(c), Fraction(0)))
            vs.append(tuple(slots))
        self.vertices = tuple(vs)
        self.orientation = 1 if orientation > 0 else -1
        if len({len(v) for v in self.vertices}) > 1:
            raise DomainError("vertices of different dimension")
        pts = [self.real_point(j) for j in range(len(self.vertices))]
        ech = Echelon()
        for p in pts:
            col = {k: x for k, x in enumerate(p) if x}
            col["one"] = Fraction(1)
            ech.add(col)
        if ech.rank != len(pts):
            raise DomainError("vertices are not affinely independent")

    @property
    def n(self):
        return len(self.vertices[0])

    @property
    def dim(self):
        return len(self.vertices) - 1

    def real_point(self, j):
        return tuple(x for c in self.vertices[j] for x in c)

    def canonical(self):
        order = sorted(range(len(self.vertices)), key=lambda j: self.vertices[j])
        _, sign = orient(order)
        return LinearCell([self.vertices[j] for j in order]), sign * self.orientation

    def _key(self):
        return (self.vertices, self.orientation)

    def __eq__(self, other):
        return isinstance(other, LinearCell) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "Lin%s" % (tuple(tuple(complex(float(a), float(b)) for a, b in v)
                                for v in self.vertices),)

    def boundary_terms(self):
        out = []
        for j in range(len(self.vertices)):
            face = LinearCell(self.vertices[:j] + self.vertices[j + 1:])
            if face.in_divisor():
                continue
            key, sign = face.canonical()
            out.append((key, (-1) ** j * sign * self.orientation))
        return out

    def in_divisor(self):
        return any(all(v[i] == ONE for v in self.vertices) for i in range(self.n))

    def to_param(self):
        ts = [_real("t%d" % j) for j in range(1, len(self.vertices))]
        exprs = []
        for i in range(self.n):
            base = _cq(self.vertices[0][i])
            e = base + sum((t * (_cq(self.vertices[j + 1][i]) - base) for j, t in enumerate(ts)),
                           sympy.Integer(0))
            exprs.append(e)
        return ParamCell([StdSimplex(ts)] if ts else [], exprs, self.orientation)

    def to_json(self):
        return {"kind": "linear", "orientation": self.orientation,
                "vertices": [[[str(a), str(b)] for a, b in v] for v in self.vertices]}


def linear_chain(chain, K):
    """Simplicial chain over a finite-chart complex -> chain of LinearCells."""
    items = []
    for s, c in chain.terms.items():
        items.append((LinearCell([K.vertices[v].coords for v in s]), c))
    if not items:
        return Chain.zero(chain.n, chain.degree)
    return Chain.from_cells(chain.n, items)


def cell_from_json(d):
    if d.get("kind") == "linear":
        return LinearCell([[tuple(map(Fraction, c)) for c in v] for v in d["vertices"]],
                          d.get("orientation", 1))
    return param_cell_from_json(d)


# ---------------------------------------------------------------------------
# intersections with cubical faces

def _face_rows(cell, face):
    rows = []
    for i, alpha in face.constraints:
        if alpha == INF:
            return None
        re = {j: cell.vertices[j][i - 1][0] for j in range(len(cell.vertices))}
        im = {j: cell.vertices[j][i - 1][1] for j in range(len(cell.vertices))}
        rows += [re, im]
    return rows


def _polytope_vertices(cell, rows):
    """Vertices of {lambda in simplex : rows . lambda = 0}, exact."""
    m = len(cell.vertices)
    pts = set()
    for k in range(1, m + 1):
        for S in itertools.combinations(range(m), k):
            ech = Echelon()
            for j in S:
                col = {("r", r): row[j] for r, row in enumerate(rows) if row[j]}
                col["one"] = Fraction(1)
                ech.add(col, j)
            if ech.rank != len(S):
                continue
            sol = ech.solve({"one": Fraction(1)})
            if sol is None:
                continue
            lam = [sol.get(j, Fraction(0)) for j in range(m)]
            if any(x < 0 for x in lam):
                continue
            pts.add(tuple(lam))
    return sorted(pts)


def _affine_dim(points):
    if not points:
        return -1
    ech = Echelon()
    base = points[0]
    for p in points[1:]:
        col = {k: x - y for k, (x, y) in enumerate(zip(p, base)) if x != y}
        if col:
            ech.add(col)
    return ech.rank


@dataclass
class FaceIntersection:
    dim: int
    vertices: list            # barycentric coordinates of the polytope vertices
    points: list              # the same vertices as complex coordinate tuples
    inside_divisor: bool


def cell_face_intersection(cell, face):
    """Exact dimension and vertex description of cell ∩ face (empty: dim -1)."""
    if isinstance(face, tuple):
        face = CubicalFace.single(*face)
    rows = _face_rows(cell, face)
    if rows is None:
        return FaceIntersection(-1, [], [], False)
    lams = _polytope_vertices(cell, rows)
    pts = []
    for lam in lams:
        z = []
        for i in range(cell.n):
            re = sum((l * cell.vertices[j][i][0] for j, l in enumerate(lam)), Fraction(0))
            im = sum((l * cell.vertices[j][i][1] for j, l in enumerate(lam)), Fraction(0))
            z.append((re, im))
        pts.append(tuple(z))
    dim = _affine_dim(lams)
    in_d = bool(pts) and any(all(p[i] == ONE for p in pts) for i in range(cell.n))
    return FaceIntersection(dim, lams, pts, in_d)


# ---------------------------------------------------------------------------
# admissibility

@dataclass
class FaceCheck:
    face: CubicalFace
    meet_dim: int
    chain_dim: int
    codim: int
    passed: bool
    method: str


@dataclass
class AdmissibilityReport:
    entries: list
    overall: bool

    def failures(self):
        return [e for e in self.entries if not e.passed]


def _closure_simplexes(chain):
    out = set()
    for s in chain.terms:
        for k in range(1, len(s) + 1):
            out.update(itertools.combinations(s, k))
    return out


def _combinatorial_meets(chain, K):
    """(dim, common face constraints) for closure simplexes not in D.

    Good-triangulation reading: a face meets a simplex in the face spanned
    by its vertices on the face.
    """
    out = {}
    for s in _closure_simplexes(chain):
        if K.in_divisor(s):
            continue
        common = K.common_faces(s)
        if common:
            out[common] = max(out.get(common, -1), len(s) - 1)
    return out


def _meet_dim_linear(cell, face):
    if not isinstance(cell, LinearCell):
        raise TypeError
    inter = cell_face_intersection(cell, face)
    if inter.dim < 0 or inter.inside_divisor:
        return -1
    return inter.dim


def _meet_dim_param(cell, face, sample_count=64):
    """Dimension of the meet for a ParamCell, from declared faces.

    Codimension > 1 faces recurse into the declared face cells.  Returns
    (dim, method) where method records whether the answer was declared or
    only sampled.
    """
    cons = sorted(face.constraints, key=lambda c: c[0])
    i, alpha = cons[0]
    entries = cell.declared_faces.get((i, alpha))
    if entries is None:
        hit = _sampled_hit(cell, i, alpha, sample_count)
        if hit:
            raise ValidationError("%r meets z%d=%s but declares no face data" %
                                  (cell, i, "inf" if alpha == INF else "0"))
        return -1, "sampled"
    rest = [(j - (1 if j > i else 0), a) for j, a in cons[1:]]
    best, method = -1, "declared"
    for en in entries:
        fc = en.cell
        if fc.in_divisor():
            continue
        if not rest:
            d = fc.dim
        else:
            d, m = _meet_dim_param(fc, CubicalFace(frozenset(rest)), sample_count)
            if m == "sampled":
                method = "sampled"
        best = max(best, d)
    return best, method


def _closest_approach(cell, score, count, seed=0, rounds=40):
    """Minimize score(point) over the domain by random-direction line searches.

    Every domain block is convex, so segments between domain points stay
    inside; this finds isolated hits that plain sampling misses.
    """
    from scipy.optimize import minimize_scalar
    pts = cell.sample_points(count, seed=seed)
    vals = [score(p) for p in pts]
    order = numpy.argsort(vals)
    best_p, best_v = pts[order[0]], vals[order[0]]
    partners = cell.sample_points(rounds, seed=seed + 1)
    for q in [pts[j] for j in order[1:4]] + partners:
        def along(s, q=q):
            return score({k: best_p[k] + s * (q[k] - best_p[k]) for k in best_p})
        r = minimize_scalar(along, bounds=(0.0, 1.0), method="bounded",
                            options={"xatol": 1e-13})
        if r.fun < best_v:
            best_v = r.fun
            best_p = {k: best_p[k] + r.x * (q[k] - best_p[k]) for k in best_p}
    return best_p, best_v


def _sampled_hit(cell, i, alpha, count, tol=1e-9):
    if cell.dim == 0:
        z = cell.evaluate({})[i - 1]
        return abs(z) < tol if alpha == 0 else not numpy.isfinite(z)

    def score(pt):
        z = cell.evaluate(pt)
        if alpha == 0:
            # hits inside the divisor do not count
            if any(abs(x - 1) < tol for k, x in enumerate(z) if k != i - 1):
                return 1.0
            return float(abs(z[i - 1]))
        v = abs(z[i - 1])
        return 0.0 if not numpy.isfinite(v) else float(1 / (1 + v))

    with numpy.errstate(all="ignore"):
        _, v = _closest_approach(cell, score, count, seed=i)
    return v < tol


def is_admissible(chain, K=None, faces=None):
    """Per-face admissibility report for a chain.

    Simplex keys use the complex K (good-triangulation reading); LinearCell
    keys use exact polytope intersections; ParamCells use declared faces.
    """
    n = chain.n
    faces = faces if faces is not None else all_faces(n)
    entries = []
    p = chain.degree
    meets = None
    if chain.terms and isinstance(next(iter(chain.terms)), tuple):
        if K is None:
            raise StructuralError("simplex chains need their complex")
        meets = _combinatorial_meets(chain, K)
    for face in faces:
        bound = p - 2 * face.codim
        if meets is not None:
            best = max([d for common, d in meets.items() if face.constraints <= common],
                       default=-1)
            entries.append(FaceCheck(face, best, p, face.codim, best < 0 or best <= bound,
                                     "combinatorial"))
            continue
        if not chain.terms:
            entries.append(FaceCheck(face, -1, p, face.codim, True, "empty"))
            continue
        best, method = -1, None
        for key in chain.terms:
            if isinstance(key, LinearCell):
                best = max(best, _meet_dim_linear(key, face))
                method = method or "exact"
            else:
                d, m = _meet_dim_param(key, face)
                best = max(best, d)
                method = "sampled" if m == "sampled" or method == "sampled" else "declared"
        entries.append(FaceCheck(face, best, p, face.codim, best < 0 or best <= bound, method))
    return AdmissibilityReport(entries, all(e.passed for e in entries))


def in_ac(chain, K=None, relative=True):
    """Membership in AC: the chain and its boundary are admissible."""
    from .chain_core import boundary
    r1 = is_admissible(chain, K)
    bd = boundary(chain, K, relative=relative) if K is not None or not chain.terms or \
        not isinstance(next(iter(chain.terms)), tuple) else boundary(chain)
    r2 = is_admissible(bd, K)
    return r1.overall and r2.overall, r1, r2


# ---------------------------------------------------------------------------
# good triangulations

@dataclass
class TriangulationReport:
    items: list     # (condition, passed, detail)

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.items)


def _vertex_faces(K, v):
    out = []
    for i in range(1, K.n + 1):
        c = K.vertices[v].coords[i - 1]
        if c == ZERO:
            out.append((i, 0))
        elif c == INF:
            out.append((i, INF))
    return out


def check_good_triangulation(K):
    items = []
    # (1) the divisor, read from positions, is a subcomplex; a marked "D" must match it
    pos_d = K.divisor()
    if "D" in K.marked:
        ok = K.marked["D"] == pos_d
        items.append(("divisor subcomplex", ok,
                      "marked D matches positions" if ok else "marked D disagrees with positions"))
    else:
        items.append(("divisor subcomplex", True, "decided by vertex positions"))
    # (2) facewise regular embedding: automatic for linear simplexes
    items.append(("facewise regular", True, "declared (linear simplexes are regular)"))
    # (3) every union of cubical faces is full: a simplex whose vertices can be
    # covered by faces none of which contains it breaks fullness
    bad = []
    for s in sorted(K.simplexes):
        if len(s) < 2:
            continue
        choices = [_vertex_faces(K, v) for v in s]
        if any(not c for c in choices):
            continue
        for pick in itertools.product(*choices):
            if not any(all(K.on_face(v, [f]) for v in s) for f in set(pick)):
                bad.append(s)
                break
    items.append(("faces full", not bad,
                  "ok" if not bad else "non-full at %s" % (bad[:5],)))
    # (4) {|z_i| <= 1} as marked subcomplexes, when supplied
    for i in range(1, K.n + 1):
        name = "abs_z%d_le_1" % i
        if name in K.marked:
            sub = K.marked[name]
            ok = all(_abs_le_one(K.vertices[v].coords[i - 1]) for s in sub for v in s)
            items.append((name, ok, "marked"))
    return TriangulationReport(items)


def _abs_le_one(c):
    return c != INF and c[0] * c[0] + c[1] * c[1] <= 1


# ---------------------------------------------------------------------------
# the G_n action

@dataclass(frozen=True)
class GroupElement:
    """Inversions (tuple of +1/-1, -1 inverts that slot) then a permutation.

    The image has coordinate k equal to the (possibly inverted) old
    coordinate perm[k].
    """
    inversions: tuple
    perm: tuple

    @property
    def sign(self):
        s = 1
        for e in self.inversions:
            s *= e
        _, psign = orient(self.perm)
        return s * psign

    def inverse(self):
        n = len(self.perm)
        inv_perm = [0] * n
        for k, j in enumerate(self.perm):
            inv_perm[j] = k
        # old slot perm[k] was inverted by inversions[perm[k]]
        return GroupElement(tuple(self.inversions[self.perm[k]] for k in range(n)),
                            tuple(inv_perm))


def group_elements(n):
    for inv in itertools.product((1, -1), repeat=n):
        for perm in itertools.permutations(range(n)):
            yield GroupElement(inv, perm)


def gn_transform(cell, g, check_poles=True):
    exprs = list(cell.exprs)
    new = []
    for k in range(cell.n):
        j = g.perm[k]
        e = exprs[j]
        if g.inversions[j] == -1:
            if check_poles:
                _check_no_interior_zero(cell, j)
            e = 1 / e
        new.append(e)
    return ParamCell(cell.blocks, new, cell.orientation, None, cell.label)


def _check_no_interior_zero(cell, j, tol=1e-9):
    e = canon(cell.exprs[j])
    if not e.free_symbols:
        if e == 0:
            raise DomainError("inversion of the constant 0")
        return
    with numpy.errstate(all="ignore"):
        _, v = _closest_approach(cell, lambda pt: float(abs(cell.evaluate(pt)[j])), 200, seed=17)
    if v < tol:
        raise DomainError("inversion creates a pole inside the domain")