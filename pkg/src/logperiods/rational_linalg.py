"""Sparse exact linear algebra over the rationals.

Vectors are dicts {row_key: Fraction}; a matrix is a list of column vectors.
Small desk-scale systems only, so plain Gaussian elimination is enough.
"""

from fractions import Fraction


def _reduce(vec, pivots):
    """Reduce vec against the echelon pivots, returning (residual, combination)."""
    vec = dict(vec)
    combo = {}
    for key, (pvec, pcombo) in pivots.items():
        c = vec.get(key)
        if not c:
            continue
        for k, v in pvec.items():
            nv = vec.get(k, 0) - c * v
            if nv:
                vec[k] = nv
            else:
                vec.pop(k, None)
        for k, v in pcombo.items():
            nv = combo.get(k, 0) - c * v
            if nv:
                combo[k] = nv
            else:
                combo.pop(k, None)
    return vec, combo


class Echelon:
    """Incremental row-echelon form of a set of column vectors.

    Each stored pivot remembers which combination of the original columns
    produced it, so we can solve A x = b and read off the kernel.
    """

    def __init__(self):
        self.pivots = {}       # pivot row key -> (vector, combination of columns)
        self.kernel = []       # combinations of columns that vanish
        self.ncols = 0

    def add(self, column, label=None):
        label = self.ncols if label is None else label
        self.ncols += 1
        vec, combo = _reduce(column, self.pivots)
        combo[label] = combo.get(label, 0) + 1
        if not vec:
            self.kernel.append({k: v for k, v in combo.items() if v})
            return False
        key = min(vec, key=_sort_key)
        c = vec[key]
        vec = {k: v / c for k, v in vec.items()}
        combo = {k: v / c for k, v in combo.items()}
        # keep the reduced form: clear this pivot from the older pivots
        for pkey, (pvec, pcombo) in list(self.pivots.items()):
            f = pvec.get(key)
            if f:
                nvec = dict(pvec)
                ncombo = dict(pcombo)
                for k, v in vec.items():
                    nv = nvec.get(k, 0) - f * v
                    if nv:
                        nvec[k] = nv
                    else:
                        nvec.pop(k, None)
                for k, v in combo.items():
                    nv = ncombo.get(k, 0) - f * v
                    if nv:
                        ncombo[k] = nv
                    else:
                        ncombo.pop(k, None)
                self.pivots[pkey] = (nvec, ncombo)
        self.pivots[key] = (vec, combo)
        return True

    @property
    def rank(self):
        return len(self.pivots)

    def solve(self, target):
        """Return a combination of columns equal to target, or None."""
        vec, combo = _reduce(target, self.pivots)
        if vec:
            return None
        return {k: -v for k, v in combo.items() if v}


def _sort_key(k):
    return repr(k)


def rank(columns):
    ech = Echelon()
    for col in columns:
        ech.add(col)
    return ech.rank


def solve(columns, target, labels=None):
    """Solve sum_j x_j columns[j] = target exactly; None if inconsistent."""
    ech = Echelon()
    for j, col in enumerate(columns):
        ech.add(col, labels[j] if labels is not None else j)
    return ech.solve(target)


def nullspace(columns, labels=None):
    """Basis of {x : sum_j x_j columns[j] = 0}, as dicts label -> Fraction."""
    ech = Echelon()
    for j, col in enumerate(columns):
        ech.add(col, labels[j] if labels is not None else j)
    return ech.kernel


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)
