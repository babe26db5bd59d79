"""Realization of graded comodules as mixed Tate Hodge structures.

Everything runs on finite truncations.  The Betti side is spanned by named
cocycles of B(Q, N, AC x Q(*)), the de Rham side by named cocycles of B(N)
times a label 1_(s) for the copy of C(s).  Weights and Hodge levels are
read off the twist: a term with twist s has r = -s, sits in W_{2r} and, on
the de Rham side, in F^r.

The comparison map sends [a1|...|as] m (2 pi i)^s to
[a1|...|as] 1_(s) times I(m) (2 pi i)^s, where I(m) is the period integral
of the AC chain m (with its (2 pi i)^-n normalization) and I(1) = 1.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy

from . import bar_dga
from .bar_dga import UNIT, BarComplex, add, augmented, dilog_elements, twisted
from .rational_linalg import nullspace

TWO_PI_I = 2j * math.pi


class ScenarioError(ValueError):
    pass


class ComoduleError(ValueError):
    pass


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# comodules

class GradedComodule:
    """V = ⊕ V_i with a coaction V -> V ⊗ H given on a basis.

    ``coaction[e]`` is a list of (basis name, H element) pairs, with H
    elements as B(N) dicts over ``B``.
    """

    def __init__(self, B, degrees, coaction):
        self.B = B
        self.degrees = dict(degrees)
        self.coaction = {e: list(v) for e, v in coaction.items()}

    def grade_of(self, h):
        grades = {self.B.grade(k) for k in h}
        if len(grades) != 1:
            raise ComoduleError("H element is not homogeneous")
        return grades.pop()

    def delta(self, e):
        """Δ_V(e) as {(basis name, word key): coeff}."""
        out = {}
        for f, h in self.coaction[e]:
            for k, c in h.items():
                _acc(out, (f, k), c)
        return out

    def validate(self):
        B = self.B
        for e, terms in self.coaction.items():
            for f, h in terms:
                if B.d(h):
                    raise ComoduleError("coaction coefficient of %s on %s is not closed" % (e, f))
                if self.degrees[f] + self.grade_of(h) != self.degrees[e]:
                    raise ComoduleError("coaction of %s leaves the grading" % e)
            # counit: the [ ] part of Δ_V(e) is e itself
            unit = {f: B.counit(h) for f, h in terms}
            if any(v != (1 if f == e else 0) for f, v in unit.items()) or unit.get(e) != 1:
                raise ComoduleError("counit fails on %s" % e)
            # coassociativity
            lhs = {}
            for f, h in terms:
                for (g, k1), c1 in self.delta(f).items():
                    for k2, c2 in h.items():
                        _acc(lhs, (g, k1, k2), c1 * c2)
            rhs = {}
            for f, h in terms:
                for (left, right), c in B.coproduct(h).items():
                    _acc(rhs, (f, (left, UNIT, 0), right), c)
            diff = dict(lhs)
            for k, v in rhs.items():
                _acc(diff, k, -v)
            if diff:
                raise ComoduleError("coaction of %s is not coassociative" % e)
        return True


def unit_comodule(B):
    return GradedComodule(B, {"e0": 0}, {"e0": [("e0", B.word())]})


def dilog_comodule(E):
    """e2 = Li2(a), e1 = Li1(1-a), e0 = 1 inside H."""
    B = E.B
    one = B.word()
    return GradedComodule(B, {"e2": 2, "e1": 1, "e0": 0}, {
        "e2": [("e2", one), ("e1", bar_dga.scale(E.Li1_a, -1)), ("e0", E.Li2)],
        "e1": [("e1", one), ("e0", E.Li1_1ma)],
        "e0": [("e0", one)],
    })


# ---------------------------------------------------------------------------
# kernels

@dataclass
class Candidate:
    basis: str            # comodule basis element e_k
    name: str             # named cocycle
    shift: int            # extra twist putting it in grade -deg(e_k)
    element: dict         # the cocycle, shifted


@dataclass
class KernelResult:
    side: str
    candidates: list
    basis: list                     # list of {candidate index: Fraction}
    pivots: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.basis)

    def element(self, vec):
        """The kernel vector as {(basis name, bar key): coeff}."""
        out = {}
        for j, c in vec.items():
            cand = self.candidates[j]
            for k, v in cand.element.items():
                _acc(out, (cand.basis, k), c * v)
        return out


def betti_pool(E):
    return {name: (z, None) for name, z in E.Z.items()}


def derham_pool(E):
    """Named H elements with the de Rham label 1_(s) left free."""
    return {"1": E.B.word(), "Li1(a)": E.Li1_a, "Li1(1-a)": E.Li1_1ma, "Li2(a)": E.Li2}


def _candidates(V, BB, pool, side):
    cands = []
    for e in sorted(V.degrees, key=lambda k: -V.degrees[k]):
        target = -V.degrees[e]
        for name in sorted(pool):
            x = pool[name][0] if side == "betti" else pool[name]
            g = {BB.grade(k) for k in x} if side == "betti" else {V.B.grade(k) for k in x}
            g = g.pop()
            shift = target - g
            if side == "betti":
                el = twisted(x, shift)
            else:
                # label s on 1_(s) so that r(h) + s = target
                el = {(l, m, shift): c for (l, m, _), c in x.items()}
            cands.append(Candidate(e, name, shift, el))
    return cands


def _cotensor_image(V, BB, x_by_basis):
    """(Δ_V ⊗ id - id ⊗ Δ)(Σ e ⊗ X) as {(e, left word, right key): coeff}."""
    out = {}
    for e, X in x_by_basis.items():
        for f, h in V.coaction[e]:
            for hk, hc in h.items():
                for xk, xc in X.items():
                    _acc(out, (f, hk, xk), hc * xc)
        for (left, right), c in BB.coproduct(X).items():
            _acc(out, (e, (left, UNIT, 0), right), -c)
    return out


def realization_kernel(V, side, BB, pool):
    """Basis of ker_0(Δ_V ⊗ id - id ⊗ Δ) over the named cocycles in ``pool``.

    ``side`` is "betti" (BB is B(Q, N, AC x Q(*)), pool maps names to
    cocycles) or "derham" (BB is B(Q, N, Q(*)), pool maps names to B(N)
    cocycles).  The basis is normalized to be the identity on the unit
    candidates e_k ⊗ 1 (2 pi i)^-k.
    """
    V.validate()
    for name, x in pool.items():
        x = x[0] if side == "betti" else x
        if BB.d(x) if side == "betti" else V.B.d(x):
            raise ComoduleError("named cocycle %s is not closed" % name)
    cands = _candidates(V, BB, pool, side)
    cols = [_cotensor_image(V, BB, {c.basis: c.element}) for c in cands]
    basis = nullspace(cols, list(range(len(cands))))
    unit = "Z0" if side == "betti" else "1"
    pivots = [j for j, c in enumerate(cands) if c.name == unit]
    basis = _normalize(basis, pivots)
    return KernelResult(side, cands, basis, pivots)


def _normalize(basis, pivots):
    """Change basis so the pivot coordinates form an identity block where possible."""
    if not basis:
        return basis
    M = [[Fraction(vec.get(p, 0)) for p in pivots] for vec in basis]
    # Gauss-Jordan on the rows of M, applied to the basis vectors
    rows = [dict(v) for v in basis]
    r = 0
    for col in range(len(pivots)):
        piv = next((i for i in range(r, len(rows)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / M[r][col]
        M[r] = [x * inv for x in M[r]]
        rows[r] = {k: v * inv for k, v in rows[r].items()}
        for i in range(len(rows)):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
                new = dict(rows[i])
                for k, v in rows[r].items():
                    _acc(new, k, -f * v)
                rows[i] = new
        r += 1
    return [{k: v for k, v in row.items() if v} for row in rows]


# ---------------------------------------------------------------------------
# comparison map

@dataclass
class Period:
    """A coefficient c (2 pi i)^power; ``exact`` when c is a known rational."""
    coeff: complex
    power: int = 0
    exact: Fraction = None

    @property
    def value(self):
        return self.coeff * TWO_PI_I ** self.power

    def __add__(self, other):
        if other.power != self.power:
            return Period(self.value + other.value, 0, None)
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = self.exact + other.exact
        return Period(self.coeff + other.coeff, self.power, ex)

    def symbolic(self):
        if self.exact is None:
            return None
        if self.exact == 0:
            return "0"
        tw = "" if self.power == 0 else "(2pi i)^%d" % self.power
        c = "" if (self.exact == 1 and tw) else str(self.exact)
        return (c + ("*" if c and tw else "") + tw) or "1"


ZERO = Period(0j, 0, Fraction(0))


def comparison_map(x, periods):
    """c on a Betti element; ``periods`` maps module basis names to I(m).

    Values in ``periods`` are complex numbers or Fractions (exact).  Terms
    whose module part has positive degree integrate to 0.
    """
    out = {}
    for key, c in x.items():
        prefix, bar = (key[0], key[1]) if len(key) == 2 else (None, key)
        letters, (mono, name), tw = bar
        if mono:
            continue
        I = periods[name]
        if isinstance(I, Fraction):
            p = Period(complex(float(I * c)), tw, I * Fraction(c))
        else:
            p = Period(complex(I) * float(c), tw, None)
        k = (letters, UNIT, tw)
        k = (prefix, k) if prefix is not None else k
        out[k] = out[k] + p if k in out else p
    return out


# ---------------------------------------------------------------------------
# period matrix

@dataclass
class PeriodMatrix:
    betti_basis: list
    derham_basis: list
    entries: list                 # rows by de Rham element, columns by Betti element
    tate_twists: list
    residual: float = 0.0

    def numeric(self):
        return numpy.array([[e.value for e in row] for row in self.entries], dtype=complex)

    def is_lower_triangular(self):
        return all(self.entries[i][j].exact == 0
                   for i in range(len(self.entries)) for j in range(i + 1, len(self.entries)))

    def to_json(self):
        return {"betti_basis": self.betti_basis, "derham_basis": self.derham_basis,
                "tate_twists": self.tate_twists, "residual": self.residual,
                "entries": [[{"symbolic": e.symbolic(),
                              "value": [e.value.real, e.value.imag],
                              "coefficient": [complex(e.coeff).real, complex(e.coeff).imag],
                              "power": e.power} for e in row] for row in self.entries]}


def _leading_key(kernel, vec):
    """The unit term e_k ⊗ [ ] 1_(s) carried by a kernel vector."""
    for j in kernel.pivots:
        if vec.get(j):
            cand = kernel.candidates[j]
            return cand.basis, ((), UNIT, cand.shift), vec[j]
    raise ComoduleError("kernel vector has no unit term")


def period_matrix(betti, derham, periods):
    """c(v_k) in the basis w_l, read off on the unit terms of the w's.

    Each w_l carries exactly one unit term e_l ⊗ [ ] 1_(-l), with
    coefficient 1, so the coefficient of w_l in c(v_k) is the coefficient
    of that term.  The remaining terms are then checked numerically.
    """
    ws = [derham.element(w) for w in derham.basis]
    lead = [_leading_key(derham, w) for w in derham.basis]
    order = sorted(range(len(ws)), key=lambda j: lead[j][1][2])     # w2, w1, w0
    vs = [betti.element(v) for v in betti.basis]
    vlead = [_leading_key(betti, v) for v in betti.basis]
    vorder = sorted(range(len(vs)), key=lambda j: vlead[j][1][2])
    rows = []
    resid = 0.0
    for l in order:
        e, key, _ = lead[l]
        row = []
        for k in vorder:
            cv = comparison_map(vs[k], periods)
            row.append(cv.get((e, key), Period(0j, key[2], Fraction(0))))
        rows.append(row)
    for col, k in enumerate(vorder):
        cv = comparison_map(vs[k], periods)
        acc = {kk: p.value for kk, p in cv.items()}
        for row, l in enumerate(order):
            coef = rows[row][col].value
            for kk, c in ws[l].items():
                acc[kk] = acc.get(kk, 0) - coef * float(c)
        resid = max([resid] + [abs(v) for v in acc.values()])
    names_w = ["w%d" % -lead[l][1][2] for l in order]
    names_v = ["v%d" % -vlead[k][1][2] for k in vorder]
    twists = [-lead[l][1][2] for l in order]
    return PeriodMatrix(names_v, names_w, rows, twists, resid)


# ---------------------------------------------------------------------------
# filtrations

def weight_of(key):
    """Weight 2r of a term with twist (or de Rham label) s = -r."""
    bar = key[1] if len(key) == 2 else key
    return -2 * bar[2]


def filtration_level(element, kind):
    """Smallest W_n containing the element, or largest F^p (de Rham only)."""
    ws = [weight_of(k) for k in element]
    if kind == "W":
        return max(ws)
    return min(w // 2 for w in ws)


@dataclass
class GradedPiece:
    weight: int
    betti: list
    derham: list


def weight_graded(betti, derham):
    """{2r: Gr^W_{2r}} of the realization on both sides.

    A kernel vector lies in Gr^W_{2r} when its top weight is 2r; each piece
    lists the indices of the normalized basis vectors landing there.
    """
    pieces = {}
    for side, K in (("betti", betti), ("derham", derham)):
        for j, vec in enumerate(K.basis):
            w = filtration_level(K.element(vec), "W")
            if w % 2:
                raise ComoduleError("odd weight %d" % w)
            p = pieces.setdefault(w, GradedPiece(w, [], []))
            getattr(p, side).append(j)
    return pieces


def graded_piece(betti, derham, weight):
    """Gr^W_weight; odd weights are always empty."""
    return weight_graded(betti, derham).get(weight, GradedPiece(weight, [], []))


@dataclass
class MixedTateData:
    """Betti lattice with W, de Rham space with W and F, and the comparison."""
    period: numpy.ndarray         # columns: c(v_k) in w-coordinates
    weights: list                 # weight 2r of v_k = weight of w_k
    hodge: list                   # F-level of w_k

    def graded_dims(self):
        out = {}
        for w in self.weights:
            out[w] = out.get(w, 0) + 1
        return out

    def check(self, tol=1e-9):
        """Gr^W odd = 0 and F^p ∩ conj F^(2r-p) = 0 on Gr^W_{2r} for p != r."""
        if any(w % 2 for w in self.weights):
            return False
        P = self.period
        if abs(numpy.linalg.det(P)) < tol:
            return False
        for w in sorted(set(self.weights)):
            r = w // 2
            idx = [k for k, x in enumerate(self.weights) if x == w]
            G = P[numpy.ix_(idx, idx)]          # graded comparison on Gr^W_w
            Ginv = numpy.linalg.inv(G)
            for p in range(0, w + 1):
                if p == r:
                    continue
                F = [j for j, k in enumerate(idx) if self.hodge[k] >= p]
                Fc = [j for j, k in enumerate(idx) if self.hodge[k] >= w - p]
                if not F or not Fc:
                    continue
                A = numpy.eye(len(idx))[:, F]
                # conjugation acts on Betti coordinates
                B = G @ numpy.conj(Ginv @ numpy.eye(len(idx))[:, Fc])
                both = numpy.hstack([A, B])
                if numpy.linalg.matrix_rank(both, tol) < A.shape[1] + B.shape[1]:
                    return False
        return True


def mixed_tate_data(pm):
    P = pm.numeric()
    weights = [2 * t for t in pm.tate_twists]
    return MixedTateData(P, weights, list(pm.tate_twists))


# ---------------------------------------------------------------------------
# the dilogarithm scenario

@dataclass
class RelationCheck:
    name: str
    kind: str             # exact | thom | cauchy
    ok: bool
    residual: float = 0.0
    detail: str = ""


@dataclass
class DilogScenario:
    a: Fraction
    elements: object
    comodule: GradedComodule
    chains: dict
    periods: dict
    integrals: dict
    relations: list
    betti: KernelResult = None
    derham: KernelResult = None
    matrix: PeriodMatrix = None


def _chain(cell):
    from .cells import chain_of
    return chain_of((cell, 1))


def geometric_relations(a, validate_faces=True):
    """Chain-level relations among ρ, η and ξ, checked exactly or via the Thom form."""
    from .cells import eta1, eta2_one, eta2_zero, product_cell, rho1, rho2
    from .chain_core import boundary
    from .face_maps import cubical_differential
    from .integrator import validate_declared_faces

    a = Fraction(a)
    checks = []

    def exact(name, lhs, rhs):
        ok = lhs == rhs
        checks.append(RelationCheck(name, "exact", ok, 0.0 if ok else 1.0))

    e1, e1c, e21, e20 = eta1(a), eta1(1 - a), eta2_one(a), eta2_zero(a)
    r1, r1c, r2 = rho1(a), rho1(1 - a), rho2(a)
    r1c_r1 = _chain(product_cell(r1c, r1))
    exact("d rho2(a) = rho1(1-a) rho1(a)", cubical_differential(_chain(r2)), r1c_r1)
    exact("delta eta1(0) = rho1(a)", boundary(_chain(e1)), _chain(r1))
    exact("delta eta1(0) at 1-a = rho1(1-a)", boundary(_chain(e1c)), _chain(r1c))
    exact("d eta1(0) = 0", cubical_differential(_chain(e1)), 0)
    exact("delta eta2(1) = rho2(a)", boundary(_chain(e21)), _chain(r2))
    exact("delta eta2(0) = -d eta2(1) + rho1(1-a) eta1(0)", boundary(_chain(e20)),
          cubical_differential(_chain(e21)) * -1 + _chain(product_cell(r1c, e1)))
    exact("d eta2(0) = 0", cubical_differential(_chain(e20)), 0)
    # AC differential d = ∂ + (-1)^n δ on ξ1 and ξ2 = η2(1) + η2(0)
    cub1, delta1 = ac_differential(_chain(e1))
    exact("d xi1(a) = -rho1(a)", delta1, _chain(r1) * -1)
    exact("d xi1(a) has no face part", cub1, 0)
    parts = _sum_by_ambient(ac_differential(_chain(e21)), ac_differential(_chain(e20)))
    # ambient 3 keeps -rho2(a); in ambient 2 the faces of eta2(1) cancel
    exact("d xi2(a) = -rho2(a) + rho1(1-a) xi1(a) in (P^1)^3", parts[3], _chain(r2) * -1)
    exact("d xi2(a) = -rho2(a) + rho1(1-a) xi1(a) in (P^1)^2", parts[2],
          _chain(product_cell(r1c, e1)))
    if validate_faces:
        from .geometry import ValidationError
        for cell in (r2, e21):
            try:
                res = validate_declared_faces(cell)
                worst = max((abs(v.thom_value - v.multiplicity) for v in res), default=0.0)
                checks.append(RelationCheck("declared faces of %s" % cell.label, "thom",
                                            True, worst))
            except ValidationError as err:
                checks.append(RelationCheck("declared faces of %s" % cell.label, "thom",
                                            False, float("inf"), str(err)))
    return checks


def ac_differential(gamma):
    """d = ∂ + (-1)^n δ: returns (∂γ in ambient n-1, (-1)^n δγ in ambient n)."""
    from .chain_core import boundary
    from .face_maps import cubical_differential
    n = gamma.n
    return cubical_differential(gamma), boundary(gamma) * (-1) ** n


def _sum_by_ambient(*parts):
    out = {}
    for cub, delta in parts:
        for ch in (cub, delta):
            out[ch.n] = out[ch.n] + ch if ch.n in out else ch
    return out


def dilog_periods(a, cfg=None):
    """I(ξ1(a)), I(ξ1(1-a)) and I(ξ2(a)) = I_3(η2(1)) + I_2(η2(0))."""
    from .cells import eta1, eta2_one, eta2_zero
    from .integrator import I_n
    a = Fraction(a)
    ints = {
        "xi1(a)": I_n(_chain(eta1(a)), cfg),
        "xi1(1-a)": I_n(_chain(eta1(1 - a)), cfg),
        "eta2(1)": I_n(_chain(eta2_one(a)), cfg),
        "eta2(0)": I_n(_chain(eta2_zero(a)), cfg),
    }
    ints["xi2(a)"] = ints["eta2(1)"] + ints["eta2(0)"]
    periods = {"1": Fraction(1), "xi1(a)": ints["xi1(a)"].value,
               "xi1(1-a)": ints["xi1(1-a)"].value, "xi2(a)": ints["xi2(a)"].value}
    return periods, ints


def build_dilog_scenario(a, cfg=None, validate=True, compute=True):
    """Presentation, chains, cocycles, comodule, kernels and period matrix at a."""
    from .cells import eta1, eta2_one, eta2_zero, rho1, rho2
    a = Fraction(a)
    if not 0 < a < 1:
        raise ScenarioError("need 0 < a < 1, got %s" % a)
    E = dilog_elements()
    rels = []
    E.P.check()
    E.BB.M.check()
    rels.append(RelationCheck("d Li2(a) = 0", "exact", not E.B.d(E.Li2)))
    for name, z in E.Z.items():
        rels.append(RelationCheck("d %s = 0" % name, "exact", not E.BB.d(z)))
    if validate:
        rels.extend(geometric_relations(a))
    bad = [r for r in rels if not r.ok]
    if bad:
        raise ScenarioError("relation failed: %s" % bad[0].name)
    V = dilog_comodule(E)
    chains = {"rho1(a)": rho1(a), "rho1(1-a)": rho1(1 - a), "rho2(a)": rho2(a),
              "eta1(0)": eta1(a), "eta1(0) at 1-a": eta1(1 - a),
              "eta2(1)": eta2_one(a), "eta2(0)": eta2_zero(a)}
    sc = DilogScenario(a, E, V, chains, {}, {}, rels)
    if compute:
        sc.periods, sc.integrals = dilog_periods(a, cfg)
        sc.betti = realization_kernel(V, "betti", E.BB, betti_pool(E))
        sc.derham = realization_kernel(V, "derham", BarComplex(E.P, augmented(E.P)),
                                       derham_pool(E))
        sc.matrix = period_matrix(sc.betti, sc.derham, sc.periods)
    return sc


def explicit_v_basis(E):
    """v2, v1, v0 written out by hand, as {(basis, key): coeff}."""
    Z = E.Z
    BB = E.BB

    def tens(e, x):
        return {(e, k): c for k, c in x.items()}
    zm1, zm2 = BB.word(twist=-1), BB.word(twist=-2)
    v2 = add(tens("e2", zm2), tens("e1", Z["Z1(a)"]), tens("e0", Z["Z2"]), coeffs=[1, -1, 1])
    v1 = add(tens("e1", zm1), tens("e0", twisted(Z["Z1(1-a)"], 1)))
    v0 = tens("e0", Z["Z0"])
    return {"v2": v2, "v1": v1, "v0": v0}


def explicit_w_basis(E):
    B = BarComplex(E.P, augmented(E.P))

    def tens(e, x, s):
        return {(e, (l, m, s)): c for (l, m, _), c in x.items()}
    one = B.word()
    w2 = add(tens("e2", one, -2), tens("e1", E.Li1_a, -2), tens("e0", E.Li2, -2),
             coeffs=[1, -1, 1])
    w1 = add(tens("e1", one, -1), tens("e0", E.Li1_1ma, -1))
    w0 = tens("e0", one, 0)
    return {"w2": w2, "w1": w1, "w0": w0}
