"""Integrals of omega_n = (2 pi i)^-n dz_1/z_1 ^ ... ^ dz_n/z_n over cells.

Cells are integrated on their parameter domains with a nested tanh-sinh
rule: every axis gets the double exponential substitution, whose nodes pile
up at the endpoints where logarithmic singularities live.  The whole tensor
grid is evaluated in one vectorized call; the difference between two
successive step sizes is the error estimate.
"""

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy
import sympy
from scipy import integrate, optimize

from .chain_core import INF, Chain, boundary
from .geometry import (Disk, DomainError, Interval, LinearCell, Ordered,
                       ParamCell, Plane, StdSimplex, canon, cell_face_intersection,
                       CubicalFace, half_circle)

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = None          # None: 1e-8 (1-D), 1e-6 (2-D), 1e-4 (3-D and up)
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    truncation_radii: tuple = (0.02, 0.01, 0.005, 0.0025)
    seed: int = 0
    threads: int = 1
    max_level: int = None

    def __post_init__(self):
        if self.rel_tol is not None and self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        r = list(self.truncation_radii)
        if any(x <= 0 for x in r) or any(a <= b for a, b in zip(r, r[1:])):
            raise ValueError("truncation radii must be positive and strictly decreasing")

    def tol_for(self, dim):
        if self.rel_tol is not None:
            return self.rel_tol
        return {0: 1e-12, 1: 1e-8, 2: 1e-6}.get(dim, 1e-4)

    def level_for(self, dim):
        if self.max_level is not None:
            return self.max_level
        return {1: 8, 2: 6, 3: 5}.get(dim, 4)


@dataclass
class IntegralResult:
    value: complex
    error_estimate: float = 0.0
    converged: bool = True
    evaluations: int = 0
    exact: bool = False
    note: str = ""

    def __add__(self, other):
        return IntegralResult(self.value + other.value,
                              self.error_estimate + other.error_estimate,
                              self.converged and other.converged,
                              self.evaluations + other.evaluations,
                              self.exact and other.exact,
                              "; ".join(x for x in (self.note, other.note) if x))

    def scaled(self, c):
        return IntegralResult(self.value * c, self.error_estimate * abs(c), self.converged,
                              self.evaluations, self.exact, self.note)

    def to_json(self):
        return {"value": [float(numpy.real(self.value)), float(numpy.imag(self.value))],
                "err": float(self.error_estimate), "converged": bool(self.converged),
                "evaluations": int(self.evaluations), "exact": bool(self.exact)}


ZERO_RESULT = IntegralResult(0j, 0.0, True, 0, True)


# ---------------------------------------------------------------------------
# tanh-sinh nodes

_NODE_CACHE = {}


def _nodes(level, span=4.0):
    """Standard tanh-sinh nodes on [-1, 1] as (side, gap to nearest end, weight)."""
    if level in _NODE_CACHE:
        return _NODE_CACHE[level]
    h = 2.0 ** (-level)
    k = numpy.arange(-int(span / h), int(span / h) + 1)
    t = k * h
    u = 0.5 * math.pi * numpy.sinh(t)
    # gap = 1 - |x| computed without cancellation
    gap = 2.0 / (1.0 + numpy.exp(2.0 * numpy.abs(u)))
    w = h * 0.5 * math.pi * numpy.cosh(t) / numpy.cosh(u) ** 2
    side = numpy.sign(t)
    keep = w > 1e-300
    out = (side[keep], gap[keep], w[keep])
    _NODE_CACHE[level] = out
    return out


def _axis_points(lo, hi, level):
    """Nodes and weights on [lo, hi] (arrays of shape (N,)) -> (N, M) arrays."""
    side, gap, w = _nodes(level)
    L = (hi - lo)[:, None]
    x = numpy.where(side[None, :] < 0, lo[:, None] + 0.5 * L * gap[None, :],
                    hi[:, None] - 0.5 * L * gap[None, :])
    x = numpy.where(side[None, :] == 0, 0.5 * (lo + hi)[:, None], x)
    return x, 0.5 * L * w[None, :]


class Plan:
    """Integration plan: axes with dependent limits and the map to real coords."""

    def __init__(self):
        self.axes = []          # callables(vars list) -> (lo array, hi array)
        self.coord_fns = []     # callables(vars list) -> list of real coordinate arrays
        self.jac_fns = []       # callables(vars list) -> array factor

    def grid(self, level):
        vars_ = []
        W = numpy.ones(1)
        for axis in self.axes:
            size = W.shape[0]
            lo, hi = axis(vars_)
            lo = numpy.broadcast_to(numpy.asarray(lo, float), (size,))
            hi = numpy.broadcast_to(numpy.asarray(hi, float), (size,))
            x, w = _axis_points(lo, hi, level)
            M = x.shape[1]
            vars_ = [numpy.repeat(v, M) for v in vars_] + [x.ravel()]
            W = (W[:, None] * w).ravel()
        coords = []
        for fn in self.coord_fns:
            coords.extend(fn(vars_))
        for fn in self.jac_fns:
            W = W * fn(vars_)
        return coords, W


def _plan_for(cell, duffy_vertex=None):
    plan = Plan()
    for b in cell.blocks:
        start = len(plan.axes)
        if isinstance(b, Interval):
            lo, hi = float(b.lo), float(b.hi)
            plan.axes.append(lambda v, lo=lo, hi=hi: (lo, hi))
            plan.coord_fns.append(lambda v, s=start: [v[s]])
        elif isinstance(b, Ordered):
            lo, hi = float(b.lo), float(b.hi)
            k = len(b.params)
            plan.axes.append(lambda v, lo=lo, hi=hi: (lo, hi))
            for j in range(1, k):
                plan.axes.append(lambda v, lo=lo, s=start + j - 1: (lo, v[s]))
            plan.coord_fns.append(lambda v, s=start, k=k: [v[s + j] for j in range(k)])
        elif isinstance(b, StdSimplex):
            k = len(b.params)
            plan.axes.append(lambda v: (0.0, 1.0))
            for j in range(1, k):
                plan.axes.append(lambda v, s=start, j=j:
                                 (0.0, 1.0 - sum(v[s + q] for q in range(j))))
            plan.coord_fns.append(lambda v, s=start, k=k: [v[s + j] for j in range(k)])
        elif isinstance(b, Disk):
            c = complex(b.center)
            R = float(b.radius)
            plan.axes.append(lambda v, R=R: (0.0, R))
            plan.axes.append(lambda v: (0.0, 2 * math.pi))
            plan.coord_fns.append(lambda v, s=start, c=c: [c.real + v[s] * numpy.cos(v[s + 1]),
                                                           c.imag + v[s] * numpy.sin(v[s + 1])])
            plan.jac_fns.append(lambda v, s=start: v[s])
        elif isinstance(b, Plane):
            plan.axes.append(lambda v: (0.0, 1.0))
            plan.axes.append(lambda v: (0.0, 2 * math.pi))

            def coords(v, s=start):
                r = v[s] / (1 - v[s])
                return [r * numpy.cos(v[s + 1]), r * numpy.sin(v[s + 1])]
            plan.coord_fns.append(coords)
            plan.jac_fns.append(lambda v, s=start: (v[s] / (1 - v[s])) / (1 - v[s]) ** 2)
        else:
            raise DomainError("unsupported block %r" % (b,))
    return plan


def tanh_sinh(plan, f, dim, cfg, start_level=2):
    """Integrate f(*coords) over the plan; returns IntegralResult."""
    tol = cfg.tol_for(dim)
    top = cfg.level_for(dim)
    prev = None
    evals = 0
    err = float("inf")
    val = 0j
    for level in range(start_level, top + 1):
        coords, W = plan.grid(level)
        with numpy.errstate(all="ignore"):
            vals = numpy.asarray(f(*coords), dtype=complex)
            vals = numpy.broadcast_to(vals, W.shape)
            terms = vals * W
        bad = ~numpy.isfinite(terms)
        if bad.any():
            # non-finite values only tolerated at nodes of negligible weight
            if numpy.any(W[bad] > 1e-25):
                return IntegralResult(complex("nan"), float("inf"), False, evals + W.size,
                                      note="non-finite integrand")
            terms = numpy.where(bad, 0, terms)
        evals += W.size
        val = complex(terms.sum())
        if prev is not None:
            err = abs(val - prev)
            if err <= max(cfg.abs_tol, tol * abs(val)):
                return IntegralResult(val, err, True, evals)
        prev = val
    return IntegralResult(val, err, err <= max(cfg.abs_tol, tol * abs(val)), evals,
                          note="level budget exhausted")


# ---------------------------------------------------------------------------
# pullback of omega_n

_DENSITY_CACHE = {}


def omega_density(cell):
    """Symbolic det(Jacobian)/prod z_k, or exact 0 when it vanishes identically.

    Returns (expr or 0, real symbols, substitution for complex params).
    """
    key = cell.key() if isinstance(cell, ParamCell) else None
    if key is not None and key in _DENSITY_CACHE:
        # the key is name-blind: move the cached density onto this cell's symbols
        dens, old, _ = _DENSITY_CACHE[key]
        reals, subs = cell.real_symbols()
        return dens.xreplace(dict(zip(old, reals))), reals, subs
    J = cell.jacobian()
    if J.shape[0] != J.shape[1]:
        raise DomainError("cell of dimension %d cannot carry omega_%d" % (J.shape[1], J.shape[0]))
    det = J.det(method="berkowitz") if J.shape[0] else sympy.Integer(1)
    det = sympy.cancel(sympy.together(sympy.expand(det)))
    reals, subs = cell.real_symbols()
    if det == 0:
        out = (sympy.Integer(0), reals, subs)
    else:
        dens = det
        for e in cell.exprs:
            dens = dens / e
        out = (dens, reals, subs)
    if key is not None:
        _DENSITY_CACHE[key] = out
    return out


def is_type_zero(cell):
    dens, _, _ = omega_density(cell)
    return dens == 0


def _lambdify_density(cell, absolute=False):
    dens, reals, subs = omega_density(cell)
    expr = dens.subs(subs) if subs else dens
    f = sympy.lambdify(reals, expr, modules="numpy")
    if absolute:
        return lambda *a: numpy.abs(f(*a))
    return f


# ---------------------------------------------------------------------------
# linear cells: split at interior zeros of the coordinates

def _split_linear(cell):
    """Cone a linear n-cell from interior points where some z_k = 0."""
    pieces = [(cell, 1)]
    for k in range(cell.n):
        face = CubicalFace.single(k + 1, 0)
        nxt = []
        for piece, sign in pieces:
            inter = cell_face_intersection(piece, face)
            if inter.dim != 0:
                nxt.append((piece, sign))
                continue
            p = inter.points[0]
            if p in piece.vertices:
                nxt.append((piece, sign))
                continue
            for j in range(len(piece.vertices)):
                verts = list(piece.vertices)
                verts[j] = p
                try:
                    sub = LinearCell(verts, piece.orientation)
                except DomainError:
                    continue        # p lies on the facet opposite j
                nxt.append((sub, sign))
        pieces = nxt
    return pieces


# ---------------------------------------------------------------------------
# the integrals

def integrate_omega(cell, n=None, cfg=None):
    """∫_cell omega_n for a cell of real dimension n."""
    cfg = cfg or QuadratureConfig()
    n = cell.n if n is None else n
    if cell.dim != n or cell.n != n:
        raise DomainError("cell has dimension %d in (P^1)^%d, expected %d" % (cell.dim, cell.n, n))
    if n == 0:
        return IntegralResult(complex(cell.orientation), 0.0, True, 0, True)
    if cell.in_divisor():
        return IntegralResult(0j, 0.0, True, 0, True, "inside D")
    if isinstance(cell, LinearCell):
        total = ZERO_RESULT
        for piece, sign in _split_linear(cell):
            total = total + _integrate_param(piece.to_param(), n, cfg).scaled(sign)
        return total
    return _integrate_param(cell, n, cfg)


def _integrate_param(cell, n, cfg):
    dens, _, _ = omega_density(cell)
    if dens == 0:
        return IntegralResult(0j, 0.0, True, 0, True, "type-reason zero")
    f = _lambdify_density(cell)
    plan = _plan_for(cell)
    res = tanh_sinh(plan, f, cell.dim, cfg)
    scale = cell.orientation / TWO_PI_I ** n
    return res.scaled(scale)


def integrate_abs_omega(cell, n=None, cfg=None):
    """∫_cell |omega_n| (used for truncation boundary contributions)."""
    cfg = cfg or QuadratureConfig()
    n = cell.n if n is None else n
    if isinstance(cell, LinearCell):
        cell = cell.to_param()
    dens, _, _ = omega_density(cell)
    if dens == 0:
        return IntegralResult(0j, 0.0, True, 0, True, "type-reason zero")
    f = _lambdify_density(cell, absolute=True)
    res = tanh_sinh(_plan_for(cell), f, cell.dim, cfg)
    return res.scaled(1 / (2 * math.pi) ** n)


def _map(fn, items, threads):
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def I_n(gamma, cfg=None):
    """I_n(γ) = (-1)^{n(n-1)/2} Σ a_σ ∫_σ omega_n over cells not in D."""
    cfg = cfg or QuadratureConfig()
    n = gamma.n
    if gamma.degree != n and gamma.terms:
        raise DomainError("I_n needs a chain of degree n = %d, got %d" % (n, gamma.degree))
    if n == 0:
        total = sum((c for _, c in gamma.terms.items()), Fraction(0))
        return IntegralResult(complex(float(total)), 0.0, True, 0, True, "inclusion of Q")
    items = [(cell, c) for cell, c in sorted(gamma.terms.items(), key=lambda kv: repr(kv[0]))
             if not cell.in_divisor()]
    results = _map(lambda it: integrate_omega(it[0], n, cfg).scaled(float(it[1])), items,
                   cfg.threads)
    total = ZERO_RESULT
    for r in results:
        total = total + r
    sign = (-1) ** (n * (n - 1) // 2)
    return total.scaled(sign)


@dataclass
class CauchyReport:
    n: int
    boundary_term: IntegralResult       # I_{n-1}(∂γ)
    delta_term: IntegralResult          # I_n(δγ)
    residual: complex
    tolerance: float
    verdict: str                        # pass | fail | inconclusive
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json(self):
        return {"n": self.n, "I_boundary": self.boundary_term.to_json(),
                "I_delta": self.delta_term.to_json(),
                "residual": [self.residual.real, self.residual.imag],
                "abs_residual": abs(self.residual), "tolerance": self.tolerance,
                "verdict": self.verdict}


def verify_cauchy(gamma, cfg=None, tolerance=None):
    """Check I_{n-1}(∂γ) + (-1)^n I_n(δγ) = 0 for γ of degree n+1 in (P^1)^n."""
    from .face_maps import cubical_differential
    cfg = cfg or QuadratureConfig()
    n = gamma.n
    if gamma.degree != n + 1:
        raise DomainError("verify_cauchy needs degree n+1 = %d, got %d" % (n + 1, gamma.degree))
    delta = boundary(gamma)
    cub = cubical_differential(gamma)
    b_term = I_n(cub, cfg) if cub else IntegralResult(0j, 0.0, True, 0, True)
    d_term = I_n(delta, cfg) if delta else IntegralResult(0j, 0.0, True, 0, True)
    residual = b_term.value + (-1) ** n * d_term.value
    tol = tolerance if tolerance is not None else cfg.tol_for(n)
    budget = tol + b_term.error_estimate + d_term.error_estimate
    if not (b_term.converged and d_term.converged) or not numpy.isfinite(residual):
        verdict = "inconclusive"
    else:
        verdict = "pass" if abs(residual) <= budget else "fail"
    return CauchyReport(n, b_term, d_term, residual, budget, verdict,
                        {"delta_cells": len(delta), "face_cells": len(cub)})


def verify_cauchy_simplicial(K, gamma, cfg=None, tolerance=None):
    """verify_cauchy for a simplicial chain on a finite-chart linear complex.

    Face maps cap with the exact Thom cocycles; the pieces on each face
    complex and the relative boundary are integrated as linear cells.
    """
    from .face_maps import FaceContext, cubical_differential, exact_thom_cocycle, face_complex
    from .geometry import linear_chain
    cfg = cfg or QuadratureConfig()
    n = gamma.n
    if gamma.degree != n + 1:
        raise DomainError("verify_cauchy needs degree n+1 = %d, got %d" % (n + 1, gamma.degree))
    # admissibility from the exact linear realization; K need not be a good triangulation
    from .face_maps import AdmissibilityError
    from .geometry import in_ac
    lin = linear_chain(gamma, K)
    ok, r1, r2 = in_ac(lin)
    if not ok:
        raise AdmissibilityError("chain is not in AC: %s" % (r1.failures() + r2.failures())[:3])
    ctx = FaceContext(K, {(i, al): exact_thom_cocycle(K, (i, al))
                          for i in range(1, n + 1) for al in (0, INF)},
                      check_admissible=False)
    b_term = IntegralResult(0j, 0.0, True, 0, True)
    faces = 0
    for face, part in sorted(cubical_differential(gamma, ctx).items(), key=lambda kv: repr(kv[0])):
        L = face_complex(K, face)
        b_term = b_term + I_n(linear_chain(part, L), cfg)
        faces += len(part)
    delta = boundary(gamma, K, relative=True)
    d_term = I_n(linear_chain(delta, K), cfg) if delta else IntegralResult(0j, 0.0, True, 0, True)
    residual = b_term.value + (-1) ** n * d_term.value
    tol = tolerance if tolerance is not None else cfg.tol_for(n)
    budget = tol + b_term.error_estimate + d_term.error_estimate
    if not (b_term.converged and d_term.converged) or not numpy.isfinite(residual):
        verdict = "inconclusive"
    else:
        verdict = "pass" if abs(residual) <= budget else "fail"
    return CauchyReport(n, b_term, d_term, residual, budget, verdict,
                        {"delta_cells": len(delta), "face_cells": faces})


# ---------------------------------------------------------------------------
# the Thom form  T = (2 pi i)^-1 d rho_eps ^ dz/z

def cutoff(x):
    """Quintic smoothstep: 0 for x <= 0, 1 for x >= 1."""
    x = numpy.clip(x, 0.0, 1.0)
    return x * x * x * (10 - 15 * x + 6 * x * x)


def cutoff_derivative(x):
    inside = (x > 0) & (x < 1)
    return numpy.where(inside, 30 * x * x * (1 - x) ** 2, 0.0)


def rho_eps(r, eps):
    """rho_eps(r) = 0 for r < eps/2, 1 for r > eps."""
    return cutoff(2 * numpy.asarray(r) / eps - 1)


def rho_eps_prime(r, eps):
    return cutoff_derivative(2 * numpy.asarray(r) / eps - 1) * (2 / eps)


class ThomPreconditionError(ValueError):
    pass


def thom_form_value(cell, i, alpha, epsilon, cfg=None):
    """∫_cell d rho_eps ^ omega_1 for the coordinate z_i (or 1/z_i when alpha = inf).

    Pulled back this is (2 pi)^-1 rho_eps'(r)/r dx^dy with z = x + iy.
    Accepts a 2-dimensional cell or a Chain of them.
    """
    cfg = cfg or QuadratureConfig()
    if isinstance(cell, Chain):
        total = ZERO_RESULT
        for c, a in cell.terms.items():
            total = total + thom_form_value(c, i, alpha, epsilon, cfg).scaled(float(a))
        return total
    if cell.dim != 2:
        raise DomainError("the Thom form is integrated over 2-cells")
    if isinstance(cell, LinearCell):
        return _thom_linear(cell, i, alpha, epsilon)
    return _thom_param(cell, i, alpha, epsilon, cfg)


def _thom_linear(cell, i, alpha, eps):
    if alpha == INF:
        return IntegralResult(0j, 0.0, True, 0, True, "face at infinity misses the chart")
    P = [numpy.array([float(v[i - 1][0]), float(v[i - 1][1])]) for v in cell.vertices]
    e1, e2 = P[1] - P[0], P[2] - P[0]
    det = e1[0] * e2[1] - e1[1] * e2[0]
    if det == 0:
        return IntegralResult(0j, 0.0, True, 0, True, "degenerate projection")
    sign = (1 if det > 0 else -1) * cell.orientation
    # the boundary must stay outside the smoothing disk
    for a, b in ((P[0], P[1]), (P[1], P[2]), (P[2], P[0])):
        if _dist_to_segment(a, b) <= eps:
            raise ThomPreconditionError("cell boundary enters {|z| <= eps}")
    inside = _point_in_triangle(numpy.zeros(2), P)
    if not inside:
        # triangle misses the disk entirely when 0 is outside and the edges are far
        return IntegralResult(0j, 0.0, True, 0, True, "disjoint from the smoothing disk")
    # polar integration in the z-plane; radial part integrates rho' exactly
    def radial(phi):
        d = numpy.array([math.cos(phi), math.sin(phi)])
        r_in, r_out = _ray_interval(d, P)
        if r_out <= r_in:
            return 0.0
        return float(rho_eps(r_out, eps) - rho_eps(r_in, eps))
    angles = sorted(math.atan2(p[1], p[0]) % (2 * math.pi) for p in P)
    val, err = integrate.quad(radial, 0.0, 2 * math.pi, points=angles, limit=200,
                              epsabs=1e-13, epsrel=1e-12)
    return IntegralResult(complex(sign * val / (2 * math.pi)), err, True, 0)


def _dist_to_segment(a, b):
    ab = b - a
    t = numpy.clip(-a.dot(ab) / ab.dot(ab), 0, 1)
    return float(numpy.linalg.norm(a + t * ab))


def _point_in_triangle(x, P):
    s = []
    for a, b in ((P[0], P[1]), (P[1], P[2]), (P[2], P[0])):
        s.append((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]))
    return all(v > 0 for v in s) or all(v < 0 for v in s)


def _ray_interval(d, P):
    """{r >= 0 : r d in triangle P} as (r_in, r_out)."""
    lo, hi = 0.0, float("inf")
    cx = sum(P) / 3
    for a, b in ((P[0], P[1]), (P[1], P[2]), (P[2], P[0])):
        # half plane containing the centroid: n.(x - a) >= 0
        nvec = numpy.array([-(b[1] - a[1]), b[0] - a[0]])
        if nvec.dot(cx - a) < 0:
            nvec = -nvec
        num = nvec.dot(a)      # need r n.d >= n.a
        den = nvec.dot(d)
        if abs(den) < 1e-300:
            if num > 0:
                return 0.0, 0.0
            continue
        r = num / den
        if den > 0:
            lo = max(lo, r)
        else:
            hi = min(hi, r)
    return lo, hi


def _thom_param(cell, i, alpha, eps, cfg):
    reals, subs = cell.real_symbols()
    z = cell.exprs[i - 1]
    if alpha == INF:
        z = 1 / z
    z = z.subs(subs) if subs else z
    J = [sympy.diff(z, r) for r in reals]
    zf = sympy.lambdify(reals, z, modules="numpy")
    jf = sympy.lambdify(reals, J, modules="numpy")
    sign = cell.orientation

    def density(*args):
        zz = numpy.asarray(zf(*args), dtype=complex)
        jj = [numpy.asarray(x, dtype=complex) for x in jf(*args)]
        det = jj[0].real * jj[1].imag - jj[0].imag * jj[1].real
        r = numpy.abs(zz)
        with numpy.errstate(all="ignore"):
            out = rho_eps_prime(r, eps) / numpy.where(r > 0, r, 1.0) * det
        return numpy.where(r > 0, out, 0.0) / (2 * math.pi)

    if len(cell.blocks) == 1 and isinstance(cell.blocks[0], Disk):
        return _thom_disk(cell, zf, density, eps, sign, cfg)
    if not any(b.complex_param for b in cell.blocks):
        return _thom_real(cell, zf, density, eps, sign)
    # generic: nested adaptive quadrature on the parameter domain
    plan = _plan_for(cell)
    res = tanh_sinh(plan, density, 2, replace(cfg, rel_tol=cfg.rel_tol or 1e-8,
                                               max_level=cfg.max_level or 9))
    return res.scaled(sign)


def _thom_real(cell, zf, density, eps, sign):
    """Two real parameters: nested quadrature with the support of d rho located.

    For each outer u the w-range where |z| <= eps is bracketed and its edges
    are handed to the inner rule; the outer edges come from
    g(u) = min_w |z(u, w)| - eps.
    """
    plan = _plan_for(cell)
    lo_u, hi_u = plan.axes[0]([])
    absz = lambda u, w: abs(complex(zf(u, w)))
    wr = lambda u: plan.axes[1]([u])

    def wmin(u):
        a, b = wr(u)
        if b <= a:
            return a, float("inf")
        grid = numpy.linspace(a, b, 41)
        vals = [absz(u, w) for w in grid]
        j = int(numpy.argmin(vals))
        r = optimize.minimize_scalar(lambda w: absz(u, w), bounds=(grid[max(j - 1, 0)],
                                     grid[min(j + 1, 40)]), method="bounded",
                                     options={"xatol": 1e-14})
        return (r.x, r.fun) if r.fun < vals[j] else (grid[j], vals[j])

    # the boundary of the domain must stay outside the smoothing disk
    for u in numpy.linspace(lo_u, hi_u, 201):
        a, b = wr(u)
        if min(absz(u, a), absz(u, b)) <= eps:
            raise ThomPreconditionError("cell boundary enters {|z| <= eps}")
    for u in (lo_u, hi_u):
        if wmin(u)[1] <= eps:
            raise ThomPreconditionError("cell boundary enters {|z| <= eps}")

    g = lambda u: wmin(u)[1] - eps
    us = numpy.linspace(lo_u, hi_u, 201)
    gs = [g(u) for u in us]
    # refine local minima so thin supports are not stepped over
    for j in range(1, len(us) - 1):
        if gs[j] <= gs[j - 1] and gs[j] <= gs[j + 1] and gs[j] > 0:
            r = optimize.minimize_scalar(g, bounds=(us[j - 1], us[j + 1]), method="bounded",
                                         options={"xatol": 1e-14})
            if r.fun < 0:
                us = numpy.append(us, r.x)
                gs.append(r.fun)
    order = numpy.argsort(us)
    us, gs = us[order], numpy.asarray(gs)[order]
    edges = []
    for j in range(len(us) - 1):
        if (gs[j] < 0) != (gs[j + 1] < 0):
            edges.append(optimize.brentq(g, us[j], us[j + 1], xtol=1e-15))
    if not edges and not any(x < 0 for x in gs):
        return IntegralResult(0j, 0.0, True, 0, True, "disjoint from the smoothing disk")

    def inner(u):
        w0, m = wmin(u)
        if m >= eps:
            return 0.0
        a, b = wr(u)
        pts = []
        for level in (eps / 2, eps):
            h = lambda w: absz(u, w) - level
            if h(w0) < 0:
                if h(a) > 0:
                    pts.append(optimize.brentq(h, a, w0, xtol=1e-15))
                if h(b) > 0:
                    pts.append(optimize.brentq(h, w0, b, xtol=1e-15))
        pts = sorted(x for x in pts + [w0] if a < x < b)
        f = lambda w: float(density(u, w))
        with warnings.catch_warnings():
            # the cutoff has kinks at the support edges; the points above cover them
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, a, b, points=pts or None, epsabs=1e-14, epsrel=1e-12,
                                    limit=200)
        return val
    val, err = integrate.quad(inner, lo_u, hi_u, points=edges or None, epsabs=1e-12,
                              epsrel=1e-11, limit=200)
    return IntegralResult(complex(sign * val), err, True, 0)


def _thom_disk(cell, zf, density, eps, sign, cfg):
    b = cell.blocks[0]
    c, R = complex(b.center), float(b.radius)

    def absz(rho, th):
        return abs(complex(zf(c.real + rho * math.cos(th), c.imag + rho * math.sin(th))))
    ths = numpy.linspace(0, 2 * math.pi, 65)
    if min(absz(R, th) for th in ths) <= eps:
        raise ThomPreconditionError("cell boundary enters {|z| <= eps}")

    def inner(th):
        pts = []
        for level in (eps / 2, eps):
            g = lambda r: absz(r, th) - level
            try:
                if g(0.0) < 0 < g(R):
                    pts.append(optimize.brentq(g, 0.0, R, xtol=1e-15))
            except ValueError:
                pass
        if not pts:
            return 0.0

        def f(rho):
            u, v = c.real + rho * math.cos(th), c.imag + rho * math.sin(th)
            return float(density(u, v)) * rho
        # the support edges are kinks of the cutoff; hand them to the rule
        val, _ = integrate.quad(f, 0.0, R, points=sorted(pts), epsabs=1e-14, epsrel=1e-12,
                                limit=200)
        return val
    val, err = integrate.quad(inner, 0.0, 2 * math.pi, epsabs=1e-12, epsrel=1e-11, limit=200)
    return IntegralResult(complex(sign * val), err, True, 0)


# ---------------------------------------------------------------------------
# epsilon truncation

class TruncationError(ValueError):
    """Condition (P) could not be established; retry with another epsilon."""


def box_form(cell):
    """Rewrite Disk blocks as two half-disk pieces with (r, s) box parameters."""
    variants = [([], {})]
    for b in cell.blocks:
        if isinstance(b, Interval):
            variants = [(blocks + [b], subs) for blocks, subs in variants]
        elif isinstance(b, Disk):
            w = b.params[0]
            r = sympy.Symbol(w.name + "_r", real=True)
            s = sympy.Symbol(w.name + "_s", real=True)
            halves = [b.center + side * b.radius * r * half_circle(s) for side in (1, -1)]
            variants = [(blocks + [Interval(r, 0, 1), Interval(s, -1, 1)], dict(subs, **{w.name: h}))
                        for blocks, subs in variants for h in halves]
        else:
            raise TruncationError("truncation supports interval and disk blocks only")
    names = {p.name: p for p in cell.params}
    out = []
    for blocks, subs in variants:
        sub = {names[k]: v for k, v in subs.items()}
        out.append((ParamCell(blocks, [e.subs(sub) for e in cell.exprs], cell.orientation,
                              None, cell.label), 1))
    return out


def box_chain(gamma):
    items = []
    for cell, c in gamma.terms.items():
        for piece, s in box_form(cell):
            items.append((piece, c * s))
    return Chain.from_cells(gamma.n, items) if items else gamma


def _coordinate_profile(cell, k, samples=24, seed=0):
    """Which single parameter |z_k| depends on, checked by sampling.

    Returns None for constant modulus, else (param index, increasing flag).
    """
    reals, f, _ = cell.numeric()
    rng = numpy.random.default_rng(seed)
    los = [float(b.lo) for b in cell.blocks]
    his = [float(b.hi) for b in cell.blocks]
    base = [lo + (hi - lo) * rng.random() for lo, hi in zip(los, his)]

    def mod(args):
        with numpy.errstate(all="ignore"):
            return abs(complex(f(*args)[k]))
    m0 = mod(base)
    deps = []
    for j in range(len(base)):
        vals = []
        for t in numpy.linspace(los[j], his[j], samples):
            args = list(base)
            args[j] = t
            vals.append(mod(args))
        vals = numpy.array(vals)
        if numpy.ptp(vals[numpy.isfinite(vals)]) > 1e-12 * max(1.0, m0):
            deps.append((j, vals))
    if not deps:
        return None
    if len(deps) > 1:
        raise TruncationError("|z_%d| depends on several parameters" % (k + 1))
    j, vals = deps[0]
    d = numpy.diff(vals[numpy.isfinite(vals)])
    if numpy.all(d >= -1e-15):
        return j, True
    if numpy.all(d <= 1e-15):
        return j, False
    raise TruncationError("|z_%d| is not monotone" % (k + 1))


def _cut(cell, k, j, level):
    reals, f, _ = cell.numeric()
    lo, hi = float(cell.blocks[j].lo), float(cell.blocks[j].hi)
    mid = [0.5 * (float(b.lo) + float(b.hi)) for b in cell.blocks]

    def g(t):
        args = list(mid)
        args[j] = t
        with numpy.errstate(all="ignore"):
            return abs(complex(f(*args)[k])) - level
    a, b = g(lo), g(hi)
    if not (numpy.isfinite(a) and numpy.isfinite(b)) or a * b >= 0:
        return None
    t = optimize.brentq(g, lo, hi, xtol=1e-15)
    # prefer an exact rational cut when one is close
    fr = Fraction(t).limit_denominator(10 ** 6)
    if abs(float(fr) - t) < 1e-12:
        return fr
    return Fraction(t).limit_denominator(10 ** 12)


def _stays_away(cell, k, eps):
    """|z_k| keeps a margin from both eps and 1/eps on the whole cell."""
    from .geometry import _closest_approach

    def mod(pt):
        with numpy.errstate(all="ignore"):
            return float(abs(cell.evaluate(pt)[k]))
    _, lo = _closest_approach(cell, mod, 64, seed=k)
    _, neg_hi = _closest_approach(cell, lambda pt: -mod(pt), 64, seed=k)
    return numpy.isfinite(neg_hi) and lo > 2 * eps and -neg_hi < 1 / (2 * eps)


def _split_boxes(cell, eps, around=None):
    """Split the box at every |z_k| = eps and |z_k| = 1/eps; classify sub-boxes.

    A sub-box is flagged when it lies in the neighbourhood being removed:
    two coordinates near 0 or inf (around=None), or |z_i^alpha| <= eps.
    """
    cuts = {j: set() for j in range(len(cell.blocks))}
    profiles = {}
    for k in range(cell.n):
        if _stays_away(cell, k, eps):
            profiles[k] = None
            continue
        prof = _coordinate_profile(cell, k)
        profiles[k] = prof
        if prof is None:
            continue
        j, _ = prof
        for level in (eps, 1 / eps):
            c = _cut(cell, k, j, level)
            if c is not None:
                cuts[j].add(c)
    ranges = []
    for j, b in enumerate(cell.blocks):
        pts = sorted({Fraction(b.lo.p, b.lo.q), Fraction(b.hi.p, b.hi.q)} | cuts[j])
        ranges.append(list(zip(pts, pts[1:])))
    pieces = []
    for choice in itertools.product(*ranges):
        blocks = [Interval(b.params[0], lo, hi) for b, (lo, hi) in zip(cell.blocks, choice)]
        sub = ParamCell(blocks, cell.exprs, cell.orientation, None, cell.label)
        mid = [0.5 * float(lo + hi) for lo, hi in choice]
        _, f, _ = sub.numeric()
        with numpy.errstate(all="ignore"):
            m = numpy.abs(numpy.asarray(f(*mid), dtype=complex))
        if around is None:
            inside = int(numpy.sum((m < eps) | (m > 1 / eps))) >= 2
        else:
            i, alpha = around
            inside = bool(m[i - 1] > 1 / eps) if alpha == INF else bool(m[i - 1] < eps)
        pieces.append((sub, inside))
    return pieces


def truncate_chain(gamma, epsilon, around=None):
    """(γ_{>=eps}, γ_{=eps}) with γ_{=eps} = δ(γ_{>=eps}) - (δγ)_{>=eps}.

    γ_{>=eps} removes the part of each cell inside the eps-neighbourhood of
    the higher-codimensional faces (two coordinates near 0 or inf), or of
    the single face ``around = (i, alpha)``.  Cells are cut along parameter
    values where |z_k| = eps, which needs each |z_k| to be monotone in one
    parameter; otherwise TruncationError asks for another epsilon.
    """
    eps = float(epsilon)
    g = box_chain(gamma)

    def trunc(chain):
        items = []
        for cell, c in chain.terms.items():
            for sub, inside in _split_boxes(cell, eps, around):
                if not inside:
                    items.append((sub, c))
        if not items:
            return Chain.zero(chain.n, chain.degree)
        return Chain.from_cells(chain.n, items)
    geq = trunc(g)
    d_g = boundary(g)
    eq = boundary(geq) - trunc(d_g) if (geq or d_g) else Chain.zero(gamma.n, gamma.degree - 1)
    return geq, eq


def boundary_contribution(gamma, epsilon, cfg=None, around=None):
    """∫_{γ_{=eps}} |omega_n| with |coefficients|."""
    cfg = cfg or QuadratureConfig()
    _, eq = truncate_chain(gamma, epsilon, around)
    total = ZERO_RESULT
    for cell, c in eq.terms.items():
        if cell.in_divisor():
            continue
        total = total + integrate_abs_omega(cell, gamma.n, cfg).scaled(abs(float(c)))
    return total


def truncated_integral(cell, n, epsilon, cfg=None):
    """∫ omega_n with every coordinate damped by rho_eps(|z_k|) rho_eps(1/|z_k|).

    A smooth version of cutting out {|z_k| < eps} and {|z_k| > 1/eps}.
    """
    cfg = cfg or QuadratureConfig()
    if isinstance(cell, LinearCell):
        cell = cell.to_param()
    dens, reals, subs = omega_density(cell)
    if dens == 0:
        return IntegralResult(0j, 0.0, True, 0, True, "type-reason zero")
    f = _lambdify_density(cell)
    zs = sympy.lambdify(reals, [e.subs(subs) for e in cell.exprs], modules="numpy")

    def damped(*args):
        out = f(*args)
        with numpy.errstate(all="ignore"):
            for z in zs(*args):
                m = numpy.abs(numpy.asarray(z, dtype=complex))
                out = out * rho_eps(m, epsilon) * rho_eps(1 / m, epsilon)
        return out
    res = tanh_sinh(_plan_for(cell), damped, cell.dim, cfg)
    return res.scaled(cell.orientation / TWO_PI_I ** n)


def extrapolate(radii, values):
    """Fit v(eps) = L + b eps log(1/eps) + c eps and return (L, residual)."""
    eps = numpy.asarray(radii, float)
    vals = numpy.asarray(values, complex)
    A = numpy.vstack([numpy.ones_like(eps), eps * numpy.log(1 / eps), eps]).T
    coef, *_ = numpy.linalg.lstsq(A.astype(complex), vals, rcond=None)
    fit = A @ coef
    return complex(coef[0]), float(numpy.max(numpy.abs(fit - vals))) if len(eps) > 3 else 0.0


def integrate_by_truncation(cell, n, cfg=None, radii=None):
    cfg = cfg or QuadratureConfig()
    radii = radii or cfg.truncation_radii
    vals = []
    evals = 0
    ok = True
    # the damping has features at scale eps: allow finer steps than usual
    fine = replace(cfg, max_level=cfg.level_for(cell.dim) + 2)
    for e in radii:
        r = truncated_integral(cell, n, e, fine)
        vals.append(r.value)
        evals += r.evaluations
        ok = ok and r.converged
    limit, resid = extrapolate(radii, vals)
    err = max(resid, abs(vals[-1] - limit) * 0.1)
    return IntegralResult(limit, err, ok, evals, note="eps-extrapolated")


# ---------------------------------------------------------------------------
# declared face data

@dataclass
class FaceValidation:
    face: tuple
    label: str
    multiplicity: int
    thom_value: complex
    point_error: float
    ok: bool


def slice_cell(cell, entry):
    """The parent with the entry's face parameters fixed: a 2-cell across the face."""
    fixed = entry.slice
    blocks = []
    for b in cell.blocks:
        inside = [p in fixed for p in b.params]
        if all(inside):
            continue
        if any(inside):
            raise DomainError("a slice must fix whole blocks")
        blocks.append(b)
    exprs = [e.subs(fixed) for e in cell.exprs]
    return ParamCell(blocks, exprs, cell.orientation, None, cell.label)


def _localize(sl, i, alpha):
    """Replace a single complex-parameter slice by small disks around the solutions."""
    if len(sl.blocks) != 1 or not sl.blocks[0].complex_param:
        return None, []
    x = sl.blocks[0].params[0]
    z = sl.exprs[i - 1]
    target = sympy.numer(sympy.together(z)) if alpha == 0 else sympy.denom(sympy.together(z))
    roots = sympy.Poly(target, x).all_roots() if sympy.Poly(target, x).degree() > 0 else []
    roots = [sympy.nsimplify(r) for r in roots]
    special = roots + [sympy.nsimplify(r) for r in
                       sympy.Poly(sympy.denom(sympy.together(z)) if alpha == 0
                                  else sympy.numer(sympy.together(z)), x).all_roots()]
    disks = []
    for r in roots:
        others = [abs(complex(r - s)) for s in special if s != r]
        rad = min(others + [1.0]) / 2
        if isinstance(sl.blocks[0], Disk):
            rad = min(rad, float(sl.blocks[0].radius) - abs(complex(r - sl.blocks[0].center)))
        rad = Fraction(rad).limit_denominator(1000)
        disks.append(ParamCell([Disk(x, r, rad)], sl.exprs, sl.orientation, None, sl.label))
    return disks, roots


def validate_declared_faces(cell, epsilon=None, tol=1e-6, cfg=None):
    """Check every declared multiplicity against the Thom form on its slice.

    The face cell is also compared with the parent at the crossing point.
    Raises ValidationError on the first mismatch; returns the checks.
    """
    from .geometry import ValidationError
    out = []
    for (i, alpha), entries in sorted(cell.declared_faces.items(), key=str):
        for en in entries:
            sl = slice_cell(cell, en)
            if sl.dim != 2:
                raise ValidationError("slice of %r at %s is not 2-dimensional" % (cell, (i, alpha)))
            disks, roots = _localize(sl, i, alpha)
            pieces = disks if disks is not None else [sl]
            eps = epsilon
            if eps is None:
                eps = min([0.01] + [float(d.blocks[0].radius) / 4 for d in pieces
                                    if isinstance(d.blocks[0], Disk)])
            val = ZERO_RESULT
            for d in pieces:
                val = val + thom_form_value(d, i, alpha, eps, cfg)
            perr = _face_point_error(cell, en, sl, i, roots)
            ok = abs(val.value - en.multiplicity) <= tol and perr <= 1e-9
            out.append(FaceValidation((i, alpha), str(en.cell.label), en.multiplicity,
                                      val.value, perr, ok))
            if not ok:
                raise ValidationError(
                    "declared face %s of %r: multiplicity %d, Thom form gives %.8f, point error %.2e"
                    % ((i, alpha), cell, en.multiplicity, val.value.real, perr))
    return out


def _face_point_error(cell, entry, sl, i, roots):
    """Distance between the face cell and the parent at the crossing point."""
    if len(roots) != 1:
        return 0.0
    x = sl.blocks[0].params[0]
    parent = [complex(sympy.N(e.subs(x, roots[0]))) for j, e in enumerate(sl.exprs) if j != i - 1]
    face_params = [p for p in cell.params if p in entry.slice]
    fc = entry.cell
    sub = dict(zip(fc.params, [entry.slice[p] for p in face_params]))
    face = [complex(sympy.N(e.subs(sub))) for e in fc.exprs]
    if len(face) != len(parent):
        return float("inf")
    return max((abs(p - q) for p, q in zip(parent, face)), default=0.0)
