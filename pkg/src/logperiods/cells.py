"""Parametrized cells used throughout: the disk-box family and the dilogarithm cells.

Every cell declares its meetings with codimension-one faces.  A FaceEntry's
slice fixes the face parameters so that what remains of the parent is a
2-cell crossing the face; its Thom-form integral must equal the declared
multiplicity (see ``validate_declared_faces``).  Parameters are ordered
normal directions first, face directions after.
"""

from fractions import Fraction

import sympy

from .chain_core import INF, Chain
from .geometry import (Disk, FaceEntry, Interval, Ordered, ParamCell, Plane,
                       ValidationError, all_faces)


def _q(x):
    f = Fraction(x) if not isinstance(x, str) else Fraction(x)
    return sympy.Rational(f.numerator, f.denominator)


def _r(name):
    return sympy.Symbol(name, real=True)


def disk_interval(a, b, radius=1):
    """σ = D̄ × [a, b]: z1 in the closed disk, z2 = t in [a, b], 0 < a < b."""
    a, b = _q(a), _q(b)
    w, t = sympy.Symbol("w"), _r("t")
    seg = ParamCell([Interval(t, a, b)], [t], label="segment")
    faces = {(1, 0): [FaceEntry(seg, 1, {t: (a + b) / 2})], (1, INF): [],
             (2, 0): [], (2, INF): []}
    return ParamCell([Disk(w, 0, radius), Interval(t, a, b)], [w, t], 1, faces, "disk-box")


def point(*values, label="point"):
    return ParamCell([], [_q(v) for v in values], 1, {}, label)


def rho1(a):
    """ρ1(a) = {1 - a} in P^1."""
    return point(1 - _q(a), label="rho1")


def rho2(a):
    """ρ2(a) = {(x, 1 - x, 1 - a/x)}, x over P^1."""
    a = _q(a)
    x = sympy.Symbol("x")
    pt = point(a, 1 - a, label="rho1*rho1")
    faces = {f: [] for f in _codim_one(3)}
    faces[(3, 0)] = [FaceEntry(pt, 1, {})]
    return ParamCell([Plane(x)], [x, 1 - x, 1 - a / x], 1, faces, "rho2")


def eta1(a):
    """η1(0) = {1 - t0 : 0 < t0 < a}."""
    a = _q(a)
    t0 = _r("t0")
    return ParamCell([Interval(t0, 0, a)], [1 - t0], 1, {f: [] for f in _codim_one(1)}, "eta1")


def diagonal(a):
    """{(t, 1 - t) : 0 < t < a}, the face of η2(1) on z3 = 0."""
    t = _r("t")
    return ParamCell([Interval(t, 0, _q(a))], [t, 1 - t], 1,
                     {f: [] for f in _codim_one(2)}, "diagonal")


def eta2_one(a):
    """η2(1) = {(x, 1 - x, 1 - t1/x) : x in P^1, 0 < t1 < a}."""
    a = _q(a)
    x, t1 = sympy.Symbol("x"), _r("t1")
    faces = {f: [] for f in _codim_one(3)}
    faces[(3, 0)] = [FaceEntry(diagonal(a), 1, {t1: a / 2})]
    return ParamCell([Plane(x), Interval(t1, 0, a)], [x, 1 - x, 1 - t1 / x], 1, faces, "eta2(1)")


def eta2_zero(a):
    """η2(0) = {(t1, 1 - t0) : 0 < t0 < t1 < a}, oriented by (t1, t0)."""
    a = _q(a)
    t1, t0 = _r("t1"), _r("t0")
    return ParamCell([Ordered([t1, t0], 0, a)], [t1, 1 - t0], 1,
                     {f: [] for f in _codim_one(2)}, "eta2(0)")


def _codim_one(n):
    return [(i, al) for i in range(1, n + 1) for al in (0, INF)]


def product_cell(c1, c2, label=None):
    """Coordinate concatenation c1 × c2 (parameters of c2 renamed apart)."""
    used = {p.name for p in c1.params}
    mapping = {}
    for p in c2.params:
        name = p.name
        while name in used:
            name = name + "'"
        used.add(name)
        mapping[p] = sympy.Symbol(name, **p.assumptions0)
    blocks = list(c1.blocks) + [b.rename(mapping) for b in c2.blocks]
    exprs = list(c1.exprs) + [e.xreplace(mapping) for e in c2.exprs]
    return ParamCell(blocks, exprs, c1.orientation * c2.orientation, None,
                     label or "%s*%s" % (c1.label, c2.label))


def disk_times(cell, radius=1):
    """D̄ × cell with the disk in the first coordinate, faces carried along.

    The new face (1, 0) is the cell itself; a face (i, alpha) of the cell
    becomes (i + 1, alpha) with the disk in front.  The disk has real
    dimension 2, so moving normal parameters past it costs no sign.
    """
    names = {p.name for p in cell.params}
    wname = "d"
    while wname in names:
        wname += "'"
    w = sympy.Symbol(wname)
    disk = Disk(w, 0, radius)
    fixed = _slice_point(cell)
    faces = {(1, 0): [FaceEntry(cell, 1, fixed)], (1, INF): []}
    for (i, al), entries in cell.declared_faces.items():
        new = []
        for en in entries:
            face_cell = ParamCell([Disk(w, 0, radius)] + list(en.cell.blocks),
                                  [w] + list(en.cell.exprs), en.cell.orientation, None,
                                  "D*" + str(en.cell.label))
            sl = dict(en.slice)
            sl[w] = sympy.Rational(1, 2)
            new.append(FaceEntry(face_cell, en.multiplicity, sl))
        faces[(i + 1, al)] = new
    return ParamCell([disk] + list(cell.blocks), [w] + list(cell.exprs), cell.orientation,
                     faces, "D*" + str(cell.label))


def _slice_point(cell):
    """An interior point of the cell's domain, used to slice the disk factor."""
    out = {}
    for b in cell.blocks:
        if isinstance(b, Interval):
            out[b.params[0]] = (b.lo + b.hi) / 2
        elif isinstance(b, Ordered):
            k = len(b.params)
            for j, p in enumerate(b.params):
                out[p] = b.hi - (b.hi - b.lo) * (j + 1) / (k + 1)
        elif isinstance(b, Disk):
            out[b.params[0]] = b.center + b.radius / 3
        elif isinstance(b, Plane):
            out[b.params[0]] = sympy.Rational(1, 3) + sympy.I / 5
        else:
            for j, p in enumerate(b.params):
                out[p] = sympy.Rational(1, len(b.params) + 2)
    return out


def chain_of(*cells_with_coeffs, n=None):
    items = [(c, Fraction(k)) for c, k in cells_with_coeffs]
    return Chain.from_cells(n if n is not None else items[0][0].n, items)
