"""Flags in R^n, genericity, and the triple, quadruple and double ratios.

A flag is stored as an ordered basis; its a-dimensional subspace is spanned
by the first a basis columns. A wedge product of pieces of several flags is
the determinant of the matrix assembling those columns in argument order.
"""

from math import comb

import gmpy2
from gmpy2 import mpq

from .errors import DimensionMismatch, InputError, NotGeneric
from .scalars import (Matrix, current_precision, det, inverse, is_exact, null_space,
                      to_float)


class Flag:
    __slots__ = ("basis",)

    def __init__(self, basis):
        if not isinstance(basis, Matrix):
            basis = Matrix(basis)
        if basis.nrows != basis.ncols or basis.nrows < 2:
            raise InputError("a flag basis must be a square matrix of size at least 2")
        self.basis = basis

    @classmethod
    def from_columns(cls, cols):
        return cls(Matrix.from_columns(cols))

    @property
    def n(self):
        return self.basis.nrows

    def columns(self, a):
        """The first ``a`` basis vectors (spanning the a-dimensional piece)."""
        return [self.basis.column(j) for j in range(a)]

    def line(self):
        return self.basis.column(0)

    def transform(self, m):
        return Flag(m @ self.basis)

    @property
    def is_exact(self):
        return self.basis.is_exact

    def canonical(self):
        """Basis that depends only on the flag: each column is reduced against
        the previous ones (zero at their pivot rows) and scaled so its own
        pivot entry is 1. Earlier columns are never touched by later ones."""
        return self._reduced()[0]

    def _reduced(self):
        cols = [list(c) for c in self.basis.columns()]
        exact_mode = self.is_exact
        pivots = []
        out = []
        for col in cols:
            v = [mpq(x) if exact_mode else to_float(x) for x in col]
            for p, u in zip(pivots, out):
                f = v[p]
                if f:
                    v = [x - f * y for x, y in zip(v, u)]
            if exact_mode:
                p = next(i for i, x in enumerate(v) if x != 0)
            else:
                p = max((i for i in range(len(v)) if i not in pivots), key=lambda i: abs(v[i]))
            lead = v[p]
            v = [x / lead for x in v]
            pivots.append(p)
            out.append(v)
        return tuple(tuple(c) for c in out), pivots

    def same_as(self, other, tol=None):
        """Equality as flags (not as bases)."""
        if self.n != other.n:
            return False
        if self.is_exact and other.is_exact:
            return self.canonical() == other.canonical()
        if tol is None:
            tol = gmpy2.mpfr(2) ** (-(current_precision() // 2))
        # the j-th basis vector of ``other`` must lie in the (j+1)-dimensional
        # piece of ``self``: reduce it against the canonical columns
        reduced, pivots = self._reduced()
        for j, col in enumerate(other.basis.columns()[:-1]):
            v = [to_float(x) for x in col]
            scale = max(abs(x) for x in v)
            for p, u in zip(pivots[:j + 1], reduced[:j + 1]):
                f = v[p]
                v = [x - f * y for x, y in zip(v, u)]
            if max(abs(x) for x in v) > tol * scale:
                return False
        return True

    def to_json(self):
        return {"n": self.n, "basis": self.basis.to_json()}

    @classmethod
    def from_json(cls, data, exact_mode=True):
        flag = cls(Matrix.from_json(data["basis"], exact_mode))
        if flag.n != data.get("n", flag.n):
            raise InputError("flag dimension does not match its basis")
        return flag

    def __repr__(self):
        return f"Flag({self.basis!r})"


def standard_flag(n):
    """Coordinate flag spanned successively by e1, e2, ..., en."""
    return Flag(Matrix.identity(n))


def opposite_flag(n):
    """Coordinate flag spanned successively by en, ..., e1."""
    ident = Matrix.identity(n)
    return Flag.from_columns([ident.column(n - 1 - j) for j in range(n)])


def osculating_flag(t, n):
    """Osculating flag at parameter t of the curve (1, t, ..., t^(n-1))."""
    t = mpq(t) if is_exact(t) else t
    cols = []
    for k in range(n):
        cols.append(tuple(comb(i, k) * t ** (i - k) if i >= k else mpq(0) for i in range(n)))
    return Flag.from_columns(cols)


def span_flag(vectors):
    """Flag whose a-th piece is spanned by the first a given vectors,
    completed to a basis with coordinate vectors when fewer than n are given."""
    vectors = [tuple(v) for v in vectors]
    n = len(vectors[0])
    ident = Matrix.identity(n)
    cols = list(vectors)
    for j in range(n):
        if len(cols) == n:
            break
        trial = cols + [ident.column(j)]
        rows = Matrix.from_columns(trial).rows
        if len(null_space(Matrix(rows))) == 0:
            cols = trial
    return Flag.from_columns(cols)


# ---------------------------------------------------------------- wedges

def wedge(*pieces):
    """Determinant of the columns taken from ``(flag, count)`` pieces in order."""
    cols = []
    for flag, count in pieces:
        cols.extend(flag.columns(count))
    if not cols:
        return mpq(1)
    return det(Matrix.from_columns(cols))


def _check_dims(flags):
    n = flags[0].n
    if any(f.n != n for f in flags):
        raise DimensionMismatch("flags of different dimensions")
    return n


def _nonzero(value, pieces, tol_bits=None):
    if is_exact(value):
        return value != 0
    cols = []
    for flag, count in pieces:
        cols.extend([abs(to_float(x)) for x in c] for c in flag.columns(count))
    # Equilibrate rows by exact powers of two first, so the threshold does not
    # move under diagonal changes of basis (the ratios do not either).
    exps = []
    for i in range(len(cols[0])):
        top = max(c[i] for c in cols)
        if top == 0:
            return False
        exps.append(gmpy2.get_exp(top))
    scale = gmpy2.mpfr(2) ** sum(exps)
    for c in cols:
        scale *= max(gmpy2.mul_2exp(x, -e) for x, e in zip(c, exps))
    bits = tol_bits if tol_bits is not None else current_precision() // 4
    return abs(value) > scale * gmpy2.mpfr(2) ** (-bits)


def compositions(total, parts, minimum=0):
    """All tuples of ``parts`` integers >= minimum summing to ``total``."""
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


def is_generic(flags):
    """True when every wedge of complementary pieces is nonzero."""
    flags = list(flags)
    if not 2 <= len(flags) <= 4:
        raise InputError("genericity is defined for 2 to 4 flags")
    n = _check_dims(flags)
    for dims in compositions(n, len(flags)):
        pieces = list(zip(flags, dims))
        if not _nonzero(wedge(*pieces), pieces):
            return False
    return True


def triple_indices(n):
    """All (a, b, c) with a, b, c >= 1 and a + b + c = n."""
    return list(compositions(n, 3, minimum=1))


def _ratio(numerators, denominators):
    value = mpq(1)
    for pieces in denominators:
        w = wedge(*pieces)
        if not _nonzero(w, pieces):
            raise NotGeneric("a required wedge product vanishes")
        value /= w
    for pieces in numerators:
        w = wedge(*pieces)
        if not _nonzero(w, pieces):
            raise NotGeneric("a required wedge product vanishes")
        value *= w
    return value


def triple_ratio(E, F, G, a, b, c):
    n = _check_dims([E, F, G])
    if min(a, b, c) < 1 or a + b + c != n:
        raise InputError(f"bad triple index ({a},{b},{c}) for n={n}")
    num = [((E, a + 1), (F, b), (G, c - 1)),
           ((E, a), (F, b - 1), (G, c + 1)),
           ((E, a - 1), (F, b + 1), (G, c))]
    den = [((E, a - 1), (F, b), (G, c + 1)),
           ((E, a), (F, b + 1), (G, c - 1)),
           ((E, a + 1), (F, b - 1), (G, c))]
    return _ratio(num, den)


def quadruple_ratio(E, F, G, a):
    n = _check_dims([E, F, G])
    if not 1 <= a <= n - 1:
        raise InputError(f"quadruple index {a} out of range for n={n}")
    m = n - a
    num = [((E, a - 1), (F, m), (G, 1)),
           ((E, a), (F, 1), (G, m - 1)),
           ((E, a + 1), (F, m - 1)),
           ((E, a), (G, m))]
    den = [((E, a), (F, m - 1), (G, 1)),
           ((E, a - 1), (F, 1), (G, m)),
           ((E, a + 1), (G, m - 1)),
           ((E, a), (F, m))]
    return _ratio(num, den)


def double_ratio(E, F, G, G2, a):
    n = _check_dims([E, F, G, G2])
    if not 1 <= a <= n - 1:
        raise InputError(f"double ratio index {a} out of range for n={n}")
    m = n - a
    num = [((E, a), (F, m - 1), (G, 1)),
           ((E, a - 1), (F, m), (G2, 1))]
    den = [((E, a), (F, m - 1), (G2, 1)),
           ((E, a - 1), (F, m), (G, 1))]
    return -_ratio(num, den)


def all_triple_ratios(E, F, G):
    return {idx: triple_ratio(E, F, G, *idx) for idx in triple_indices(E.n)}


def all_double_ratios(E, F, G, G2):
    return [double_ratio(E, F, G, G2, a) for a in range(1, E.n)]


def is_positive(flags):
    """Positivity of a flag triple, or of a quadruple (E, F, G, G')."""
    flags = list(flags)
    if len(flags) == 3:
        if not is_generic(flags):
            raise NotGeneric("flag triple is not generic")
        return all(t > 0 for t in all_triple_ratios(*flags).values())
    if len(flags) == 4:
        E, F, G, G2 = flags
        if not is_generic(flags):
            raise NotGeneric("flag quadruple is not generic")
        return (is_positive([E, F, G]) and is_positive([E, F, G2])
                and all(d > 0 for d in all_double_ratios(E, F, G, G2)))
    raise InputError("positivity is defined for 3 or 4 flags")


# ---------------------------------------------------------------- adapted bases

def transverse_lines(E, F):
    """Vectors e_1..e_n with e_a spanning E^(a) meet F^(n-a+1)."""
    n = _check_dims([E, F])
    out = []
    for a in range(1, n + 1):
        cols = E.columns(a) + [tuple(-x for x in v) for v in F.columns(n - a + 1)]
        kernel = null_space(Matrix.from_columns(cols))
        if len(kernel) != 1:
            raise NotGeneric("flag pair is not transverse")
        coeffs = kernel[0][:a]
        vec = tuple(sum((c * v[i] for c, v in zip(coeffs, E.columns(a))), mpq(0))
                    for i in range(n))
        out.append(vec)
    return out


def coordinates_in(basis_vectors, v):
    """Coordinates of v in the given basis."""
    from .scalars import solve
    return solve(Matrix.from_columns(basis_vectors), v)


def map_triple(source, target):
    """The projective map sending (E, F, G^(1)) to (E', F', G'^(1)).

    Built from the lines E^(a) meet F^(n-a+1) of both pairs, scaled so the
    first vector of G lands on a multiple of the first vector of G'.
    """
    E, F, G = source
    E2, F2, G2 = target
    lines = transverse_lines(E, F)
    lines2 = transverse_lines(E2, F2)
    gamma = coordinates_in(lines, G.line())
    gamma2 = coordinates_in(lines2, G2.line())
    if any(x == 0 for x in gamma) or any(x == 0 for x in gamma2):
        raise NotGeneric("third flag line is not generic with respect to the pair")
    scaled = [tuple(x * (g2 / g) for x in v) for v, g, g2 in zip(lines2, gamma, gamma2)]
    return Matrix.from_columns(scaled) @ inverse(Matrix.from_columns(lines))
