"""Finite DGA presentations and their bar complexes.

N is the free graded-commutative algebra on a list of generators, each with
an r-grade (weight) and a cohomological degree, and a differential given on
generators.  Elements are dicts {monomial: coefficient}; a monomial is a
sorted tuple of generator indices, odd generators at most once.

Bar elements l[a1|...|as]m are dicts {(letters, module key, twist): coeff}
with L = Q.  Letters are monomials of N_+.  Module keys are (monomial,
basis name) pairs of a free N-module, or ((), "1") when M = Q through the
augmentation.  The twist is the exponent k of a (2 pi i)^k factor; a letter
of weight r acting on the module raises it by r.

Sign conventions
----------------
J a = (-1)^deg(a) a with deg the cohomological degree, read literally.
With the differential of the dilogarithm presentation taken as
d rho2(a) = + rho1(1-a) rho1(a), this is the only choice among the
candidates in ``CONVENTIONS`` for which d^2 = 0 holds and Li2(a) is closed
(``search_conventions`` reruns that comparison).
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy

from .rational_linalg import nullspace


class ContractError(ValueError):
    pass


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    r: int
    deg: int
    kind: str = "cycle"        # cycle (in N) or chain (in AC)


def _add(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _clean(d):
    return {k: v for k, v in d.items() if v}


class DGAPresentation:
    """Free graded-commutative algebra with a differential on generators."""

    def __init__(self, generators, differential=None, name="N"):
        self.generators = list(generators)
        self.index = {g.name: j for j, g in enumerate(self.generators)}
        if len(self.index) != len(self.generators):
            raise PresentationError("repeated generator names")
        for g in self.generators:
            if g.r < 0:
                raise PresentationError("negative r-grade for %s" % g.name)
        self.name = name
        self.diff = {}
        for gname, value in (differential or {}).items():
            self.diff[self.index[gname]] = self.element(value)

    # -- monomials
    def element(self, value):
        """Accept {tuple of names or indices: coeff} or a generator name."""
        if isinstance(value, str):
            return {(self.index[value],): Fraction(1)}
        out = {}
        for mono, c in value.items():
            if isinstance(mono, str):
                mono = (mono,)
            sign, m = self.normalize([self.index[x] if isinstance(x, str) else x for x in mono])
            if sign:
                _add(out, m, sign * Fraction(c))
        return out

    def gen(self, name):
        return {(self.index[name],): Fraction(1)}

    def deg(self, mono):
        return sum(self.generators[j].deg for j in mono)

    def r(self, mono):
        return sum(self.generators[j].r for j in mono)

    def normalize(self, seq):
        """Sort a word of generators with Koszul signs: (sign, monomial)."""
        seq = list(seq)
        sign = 1
        # insertion sort, tracking the sign of each swap
        for i in range(1, len(seq)):
            j = i
            while j > 0 and seq[j - 1] > seq[j]:
                if self.generators[seq[j]].deg % 2 and self.generators[seq[j - 1]].deg % 2:
                    sign = -sign
                seq[j - 1], seq[j] = seq[j], seq[j - 1]
                j -= 1
        for a, b in zip(seq, seq[1:]):
            if a == b and self.generators[a].deg % 2:
                return 0, None
        return sign, tuple(seq)

    def mono_mul(self, m1, m2):
        return self.normalize(m1 + m2)

    def mul(self, x, y):
        out = {}
        for m1, c1 in x.items():
            for m2, c2 in y.items():
                s, m = self.mono_mul(m1, m2)
                if s:
                    _add(out, m, s * c1 * c2)
        return out

    def d_mono(self, mono):
        """Leibniz rule on a monomial."""
        out = {}
        sign = 1
        for k, j in enumerate(mono):
            dj = self.diff.get(j)
            if dj:
                left, right = mono[:k], mono[k + 1:]
                for m, c in dj.items():
                    s, full = self.normalize(left + m + right)
                    if s:
                        _add(out, full, sign * s * c)
            if self.generators[j].deg % 2:
                sign = -sign
        return out

    def d(self, x):
        out = {}
        for m, c in x.items():
            for k, v in self.d_mono(m).items():
                _add(out, k, c * v)
        return out

    def augmentation(self, x):
        return x.get((), Fraction(0))

    # -- checks
    def check(self):
        """Bigrading, d^2 = 0 and graded commutativity on generators."""
        problems = []
        for j, g in enumerate(self.generators):
            for m, c in self.diff.get(j, {}).items():
                if self.r(m) != g.r or self.deg(m) != g.deg + 1:
                    problems.append("d(%s) leaves bidegree (%d, %d)" % (g.name, g.r, g.deg + 1))
            dd = self.d(self.diff.get(j, {}))
            if dd:
                problems.append("d^2(%s) = %s" % (g.name, dd))
            if g.r == 0 and g.deg == 0:
                problems.append("%s lies in N_0 = Q" % g.name)
        for a, b in itertools.combinations_with_replacement(range(len(self.generators)), 2):
            ab = self.mul({(a,): 1}, {(b,): 1})
            ba = self.mul({(b,): 1}, {(a,): 1})
            s = (-1) ** (self.generators[a].deg * self.generators[b].deg)
            if _clean({k: ab.get(k, 0) - s * ba.get(k, 0) for k in set(ab) | set(ba)}):
                problems.append("product of %s, %s not graded-commutative" % (a, b))
        if problems:
            raise PresentationError("; ".join(problems))
        return True

    def show(self, x):
        if not x:
            return "0"
        parts = []
        for m, c in sorted(x.items()):
            word = "*".join(self.generators[j].name for j in m) or "1"
            parts.append("%s %s" % (c, word))
        return " + ".join(parts)

    def to_json(self):
        return {"generators": [{"name": g.name, "r": g.r, "deg": g.deg, "kind": g.kind}
                               for g in self.generators],
                "differential": {self.generators[j].name:
                                 [{"monomial": [self.generators[k].name for k in m],
                                   "coeff": str(c)} for m, c in v.items()]
                                 for j, v in self.diff.items()},
                "augmentation": {"1": "1"}}

    @classmethod
    def from_json(cls, doc):
        gens = [Generator(g["name"], int(g["r"]), int(g["deg"]), g.get("kind", "cycle"))
                for g in doc["generators"]]
        diff = {name: {tuple(t["monomial"]): Fraction(t["coeff"]) for t in terms}
                for name, terms in doc.get("differential", {}).items()}
        return cls(gens, diff)


def monomials(P, r, deg, upto=None, allowed=None):
    """All monomials of N_r^deg in the generators with index < upto."""
    idx = [j for j in range(len(P.generators) if upto is None else upto)
           if (allowed is None or j in allowed) and P.generators[j].r > 0]
    out = []

    def rec(start, mono, rr, dd):
        if rr == r and dd == deg and mono:
            out.append(tuple(mono))
        if rr >= r:
            return
        for k in range(start, len(idx)):
            j = idx[k]
            g = P.generators[j]
            if rr + g.r > r:
                continue
            nxt = k + 1 if g.deg % 2 else k
            rec(nxt, mono + [j], rr + g.r, dd + g.deg)
    rec(0, [], 0, 0)
    return out


def random_presentation(rng, ngen=6, max_r=3, degs=(0, 1, 2), size=3):
    """Random presentation with d^2 = 0 by construction.

    Generators are added in order; the differential of a new generator is a
    random cycle among monomials of earlier generators in the right
    bidegree (a random vector of the kernel of d there).
    """
    gens = []
    diff = {}
    for j in range(ngen):
        r = int(rng.integers(1, max_r + 1))
        deg = int(rng.choice(degs))
        gens.append(Generator("g%d" % j, r, deg))
        P = DGAPresentation(gens, {})
        P.diff = {P.index[k]: P.element(v) for k, v in diff.items()}
        cands = monomials(P, r, deg + 1, upto=j)
        if not cands:
            continue
        cols = [P.d({m: Fraction(1)}) for m in cands]
        basis = nullspace(cols, cands)
        if not basis:
            continue
        value = {}
        for vec in basis:
            c = int(rng.integers(-size, size + 1))
            for m, v in vec.items():
                _add(value, m, c * v)
        if value:
            diff["g%d" % j] = {tuple(gens[k].name for k in m): v for m, v in value.items()}
    P = DGAPresentation(gens, diff)
    P.check()
    return P


# ---------------------------------------------------------------------------
# modules

class Module:
    """A free left N-module on named basis elements with a differential.

    ``augmented`` modules are Q with N acting through the augmentation.
    ``twisted`` modules carry the (2 pi i)^k bookkeeping of AC x Q(*).
    """

    def __init__(self, P, basis=None, differential=None, augmented=False, twisted=False):
        self.P = P
        self.augmented = augmented
        self.twisted = twisted
        self.basis = dict(basis or {"1": 0})       # name -> degree
        if "1" not in self.basis:
            self.basis["1"] = 0
        self.diff = {}
        for name, value in (differential or {}).items():
            self.diff[name] = self.element(value)

    def element(self, value):
        out = {}
        for (mono, name), c in value.items():
            if isinstance(mono, (str,)):
                mono = (mono,)
            sign, m = self.P.normalize([self.P.index[x] if isinstance(x, str) else x
                                        for x in mono])
            if sign:
                _add(out, (m, name), sign * Fraction(c))
        return out

    def deg(self, key):
        mono, name = key
        return self.P.deg(mono) + self.basis[name]

    def act(self, mono, key):
        """mono . key as (sign, key) or (0, None)."""
        m, name = key
        if self.augmented:
            return (1, key) if not mono else (0, None)
        s, full = self.P.mono_mul(mono, m)
        return (s, (full, name)) if s else (0, None)

    def d_key(self, key):
        if self.augmented:
            return {}
        mono, name = key
        out = {}
        for m, c in self.P.d_mono(mono).items():
            _add(out, (m, name), c)
        sign = (-1) ** self.P.deg(mono)
        for (m2, n2), c in self.diff.get(name, {}).items():
            s, full = self.P.mono_mul(mono, m2)
            if s:
                _add(out, (full, n2), sign * s * c)
        return out

    def check(self):
        for name in self.basis:
            dd = {}
            for k, c in self.diff.get(name, {}).items():
                for k2, c2 in self.d_key(k).items():
                    _add(dd, k2, c * c2)
            if dd:
                raise PresentationError("d^2(%s) = %s on the module" % (name, dd))
        return True


UNIT = ((), "1")


def augmented(P):
    return Module(P, {"1": 0}, {}, augmented=True)


def regular(P):
    """N as a module over itself."""
    return Module(P, {"1": 0}, {})


# ---------------------------------------------------------------------------
# bar complex

CONVENTIONS = {
    "internal": lambda deg: deg,          # J a = (-1)^deg a
    "shifted": lambda deg: deg - 1,       # J a = (-1)^(deg a - 1) a
    "trivial": lambda deg: 0,             # J = identity
}


class BarComplex:
    """B(Q, N, M) with the internal and external differentials."""

    def __init__(self, P, M=None, convention="internal"):
        self.P = P
        self.M = M if M is not None else augmented(P)
        self.jdeg = CONVENTIONS[convention]
        self.convention = convention

    # -- elements
    def word(self, *letters, m=UNIT, twist=0, coeff=1):
        """[a1|...|as]m with each letter a generator name or monomial tuple."""
        keys = []
        for a in letters:
            if isinstance(a, str):
                a = (a,)
            s, mono = self.P.normalize([self.P.index[x] if isinstance(x, str) else x for x in a])
            if not s:
                return {}
            coeff = coeff * s
            keys.append(mono)
        for mono in keys:
            if self.P.r(mono) == 0:
                raise ContractError("bar letters must lie in N_+")
        if isinstance(m, str):
            m = ((), m)
        return {(tuple(keys), m, twist): Fraction(coeff) if isinstance(coeff, int) else coeff}

    def degree(self, key):
        letters, m, _ = key
        return sum(self.P.deg(a) for a in letters) - len(letters) + self.M.deg(m)

    def grade(self, key):
        letters, (mono, _), twist = key
        # in a twisted module the action moved r into the twist already
        inner = 0 if self.M.twisted else self.P.r(mono)
        return sum(self.P.r(a) for a in letters) + twist + inner

    def _J(self, a):
        return (-1) ** (self.jdeg(self.P.deg(a)) % 2)

    def _check_letters(self, x):
        for letters, _, _ in x:
            for a in letters:
                if not a or self.P.r(a) == 0:
                    raise ContractError("bar letters must lie in N_+")

    def d_I(self, x):
        self._check_letters(x)
        out = {}
        for (letters, m, tw), c in x.items():
            s = len(letters)
            jprefix = 1
            for i in range(s):
                # (-1)^(i+1) [Ja1|...|Ja_i| d a_{i+1} | ...]  (1-based index i+1)
                for dm, dc in self.P.d_mono(letters[i]).items():
                    new = letters[:i] + (dm,) + letters[i + 1:]
                    _add(out, (new, m, tw), c * dc * jprefix * (-1) ** (i + 1))
                jprefix *= self._J(letters[i])
            for k, v in self.M.d_key(m).items():
                _add(out, (letters, k, tw), c * v * jprefix * (-1) ** s)
        return out

    def d_E(self, x):
        self._check_letters(x)
        out = {}
        for (letters, m, tw), c in x.items():
            s = len(letters)
            # the first term -(Jl) a1 [...] vanishes: L = Q acts through the augmentation
            jprefix = 1
            for i in range(s - 1):
                ja = self._J(letters[i])
                sign, prod = self.P.mono_mul(letters[i], letters[i + 1])
                if sign:
                    new = letters[:i] + (prod,) + letters[i + 2:]
                    _add(out, (new, m, tw), c * jprefix * ja * sign * (-1) ** i)
                jprefix *= ja
            if s:
                sign, key = self.M.act(letters[-1], m)
                if sign:
                    ntw = tw + (self.P.r(letters[-1]) if self.M.twisted else 0)
                    _add(out, (letters[:-1], key, ntw), c * jprefix * sign * (-1) ** (s - 1))
        return out

    def d(self, x):
        out = dict(self.d_I(x))
        for k, v in self.d_E(x).items():
            _add(out, k, v)
        return out

    # -- coalgebra and algebra structure on B(N)
    def coproduct(self, x):
        """Deconcatenation: {(left letters, right key): coeff}."""
        out = {}
        for (letters, m, tw), c in x.items():
            for i in range(len(letters) + 1):
                _add(out, (letters[:i], (letters[i:], m, tw)), c)
        return out

    def shuffle(self, x, y):
        """Shuffle product on B(N), Koszul signs with shifted degrees deg - 1."""
        out = {}
        for (la, ma, ta), ca in x.items():
            for (lb, mb, tb), cb in y.items():
                if ma != UNIT or mb != UNIT:
                    raise ContractError("the shuffle product is defined on B(N)")
                p, q = len(la), len(lb)
                for pos in itertools.combinations(range(p + q), p):
                    word = [None] * (p + q)
                    posset = set(pos)
                    ia = ib = 0
                    sign = 1
                    for k in range(p + q):
                        if k in posset:
                            word[k] = la[ia]
                            # a_ia jumps over the b's already placed
                            if (self.P.deg(la[ia]) - 1) % 2:
                                for b in lb[:ib]:
                                    if (self.P.deg(b) - 1) % 2:
                                        sign = -sign
                            ia += 1
                        else:
                            word[k] = lb[ib]
                            ib += 1
                    _add(out, (tuple(word), UNIT, ta + tb), sign * ca * cb)
        return out

    def counit(self, x):
        return sum((c for (letters, m, tw), c in x.items() if not letters), Fraction(0))

    def show(self, x):
        if not x:
            return "0"
        parts = []
        for (letters, m, tw), c in sorted(x.items(), key=repr):
            word = "|".join("*".join(self.P.generators[j].name for j in a) for a in letters)
            mono, name = m
            mod = "*".join([self.P.generators[j].name for j in mono] + [name])
            t = "" if not tw else "(2pi i)^%d" % tw
            parts.append("%s [%s]%s%s" % (c, word, mod, t))
        return " + ".join(parts)


def add(*xs, coeffs=None):
    out = {}
    for j, x in enumerate(xs):
        c = 1 if coeffs is None else coeffs[j]
        for k, v in x.items():
            _add(out, k, c * v)
    return out


def scale(x, c):
    return {k: v * c for k, v in x.items() if v * c}


def tensor_apply(f, g, t):
    """Apply f to left and g to right factors of {(lkey, rkey): c}."""
    out = {}
    for (lk, rk), c in t.items():
        for lk2, c2 in f(lk).items():
            for rk2, c3 in g(rk).items():
                _add(out, (lk2, rk2), c * c2 * c3)
    return out


def tensor_differential(BN, B, t):
    """(d ⊗ 1 + J ⊗ d) on B(N) ⊗ B(Q, N, M), J = (-1)^(bar degree) on the left."""
    out = {}
    for (left, right), c in t.items():
        lkey = (left, UNIT, 0)
        for (l2, _, _), c2 in BN.d({lkey: Fraction(1)}).items():
            _add(out, (l2, right), c * c2)
        sign = (-1) ** (BN.degree(lkey) % 2)
        for r2, c3 in B.d({right: Fraction(1)}).items():
            _add(out, (left, r2), sign * c * c3)
    return out


def coproduct_defect(BN, B, x):
    """Δ d x - (d ⊗ 1 + J ⊗ d) Δ x; zero when Δ is a chain map."""
    lhs = B.coproduct(B.d(x))
    rhs = tensor_differential(BN, B, B.coproduct(x))
    return add(lhs, rhs, coeffs=[1, -1])


def coassociativity_defect(B, x):
    """(Δ ⊗ 1)Δ x - (1 ⊗ Δ)Δ x as triples of words."""
    out = {}
    for (left, right), c in B.coproduct(x).items():
        for (l1, l2), c2 in B.coproduct({(left, UNIT, 0): Fraction(1)}).items():
            _add(out, (l1, l2[0], right), c * c2)
        for (m1, m2), c3 in B.coproduct({right: Fraction(1)}).items():
            _add(out, (left, m1, m2), -c * c3)
    return out


# ---------------------------------------------------------------------------
# random words for property checks

def random_word(B, rng, max_len=4, max_letter=2, coeff=3):
    """A random bar element with letters drawn from monomials of N_+."""
    P = B.P
    pool = []
    for r in range(1, 5):
        for deg in range(0, 5):
            pool.extend(m for m in monomials(P, r, deg) if len(m) <= max_letter)
    if not pool:
        raise PresentationError("presentation has no letters")
    s = int(rng.integers(0, max_len + 1))
    letters = tuple(pool[int(rng.integers(len(pool)))] for _ in range(s))
    if B.M.augmented:
        m = UNIT
    else:
        names = sorted(B.M.basis)
        mono = pool[int(rng.integers(len(pool)))] if rng.random() < 0.5 else ()
        m = (mono, names[int(rng.integers(len(names)))])
    c = int(rng.integers(1, coeff + 1)) * (1 if rng.random() < 0.5 else -1)
    return {(letters, m, 0): Fraction(c)}


# ---------------------------------------------------------------------------
# the dilogarithm presentation

def dilog_presentation(rho2_sign=1):
    """rho1(a), rho1(1-a) in N^1_1, rho2(a) in N^1_2 with d rho2 = ± rho1(1-a) rho1(a)."""
    gens = [Generator("rho1(a)", 1, 1), Generator("rho1(1-a)", 1, 1), Generator("rho2(a)", 2, 1)]
    return DGAPresentation(gens, {"rho2(a)": {("rho1(1-a)", "rho1(a)"): rho2_sign}}, "dilog")


def dilog_module(P):
    """AC letters xi1(a), xi1(1-a), xi2(a) with their declared differentials."""
    M = Module(P, {"1": 0, "xi1(a)": 0, "xi1(1-a)": 0, "xi2(a)": 0},
               {"xi1(a)": {(("rho1(a)",), "1"): -1},
                "xi1(1-a)": {(("rho1(1-a)",), "1"): -1},
                "xi2(a)": {(("rho2(a)",), "1"): -1, (("rho1(1-a)",), "xi1(a)"): 1}},
               twisted=True)
    return M


@dataclass
class DilogElements:
    P: DGAPresentation
    B: BarComplex           # B(N)
    BB: BarComplex          # B(N, AC x Q(*))
    Li1_a: dict
    Li1_1ma: dict
    Li2: dict
    Z: dict = field(default_factory=dict)


def dilog_elements(rho2_sign=1, convention="internal"):
    P = dilog_presentation(rho2_sign)
    B = BarComplex(P, None, convention)
    BB = BarComplex(P, dilog_module(P), convention)
    Li1_a = B.word("rho1(a)")
    Li1_1ma = B.word("rho1(1-a)")
    Li2 = add(B.word("rho2(a)"), B.word("rho1(1-a)", "rho1(a)"), coeffs=[1, -1])
    Z = {
        "Z2": add(BB.word("rho2(a)", twist=-2), BB.word("rho1(1-a)", "rho1(a)", twist=-2),
                  BB.word("rho1(1-a)", m="xi1(a)", twist=-1), BB.word(m="xi2(a)"),
                  coeffs=[1, -1, -1, 1]),
        "Z1(a)": add(BB.word("rho1(a)", twist=-2), BB.word(m="xi1(a)", twist=-1)),
        "Z1(1-a)": add(BB.word("rho1(1-a)", twist=-2), BB.word(m="xi1(1-a)", twist=-1)),
        "Z0": BB.word(),
    }
    return DilogElements(P, B, BB, Li1_a, Li1_1ma, Li2, Z)


def twisted(x, k):
    """Multiply by (2 pi i)^k: shift every twist."""
    return {(l, m, t + k): c for (l, m, t), c in x.items()}


# ---------------------------------------------------------------------------
# searching sign conventions

@dataclass
class ConventionResult:
    convention: str
    rho2_sign: int
    d_squared_zero: bool
    anticommute: bool
    li2_closed: bool
    z_closed: bool

    @property
    def consistent(self):
        return self.d_squared_zero and self.anticommute and self.li2_closed and self.z_closed


def search_conventions(rng, presentations=5, words=40):
    """Try every J convention and both signs of d rho2; report what survives."""
    pres = [random_presentation(rng) for _ in range(presentations)]
    out = []
    for conv in CONVENTIONS:
        dsq = anti = True
        for P in pres:
            for M in (augmented(P), regular(P)):
                B = BarComplex(P, M, conv)
                for _ in range(words):
                    x = random_word(B, rng)
                    if B.d(B.d(x)):
                        dsq = False
                    if add(B.d_I(B.d_E(x)), B.d_E(B.d_I(x))):
                        anti = False
        for sign in (1, -1):
            E = dilog_elements(sign, conv)
            li2 = not E.B.d(E.Li2)
            zc = all(not E.BB.d(z) for z in E.Z.values())
            dsq_d = dsq and all(not E.BB.d(E.BB.d(z)) for z in E.Z.values())
            out.append(ConventionResult(conv, sign, dsq_d, anti, li2, zc))
    return out


# ---------------------------------------------------------------------------
# alternating projector

def alt_project(x, check_poles=False):
    """Alt = |G_n|^-1 Σ sign(g) g on ParamCell chains; formal generators are fixed.

    Generators of a presentation are declared alternating, so Alt returns
    them unchanged.  For a cell or a Chain of cells the average runs over
    inversions and permutations of the coordinates.
    """
    from .chain_core import Chain
    from .geometry import ParamCell, gn_transform, group_elements
    if isinstance(x, (Generator, str)):
        return x
    if isinstance(x, ParamCell):
        x = Chain.from_cells(x.n, [(x, 1)])
    if not isinstance(x, Chain):
        raise TypeError("alt_project takes generators, cells or chains of cells")
    n = x.n
    group = list(group_elements(n))
    items = []
    for cell, c in x.terms.items():
        for g in group:
            items.append((gn_transform(cell, g, check_poles), Fraction(c) * g.sign / len(group)))
    if not items:
        return x
    return Chain.from_cells(n, items)
