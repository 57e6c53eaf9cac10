"""Two-level scalar arithmetic (exact rationals, big binary floats) and the
dense linear algebra kernels used throughout the package.

Exact scalars are ``gmpy2.mpq`` values, which are always kept in lowest
terms. Big floats are ``gmpy2.mpfr`` values; their precision comes from the
active gmpy2 context, which :func:`working_precision` sets. Mixing an exact
rational with a big float promotes the result to a big float.
"""

import contextlib
import fractions
import math

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import InputError, NonRealSpectrum, RepeatedModulus

DEFAULT_PRECISION = 256

MPQ = type(mpq(0))
MPFR = type(mpfr(0))
MPZ = type(mpz(0))


def _ensure_default_context():
    ctx = gmpy2.get_context()
    if ctx.precision < DEFAULT_PRECISION:
        ctx.precision = DEFAULT_PRECISION


_ensure_default_context()


@contextlib.contextmanager
def working_precision(bits):
    """Run the enclosed block with big floats carrying ``bits`` mantissa bits."""
    with gmpy2.context(gmpy2.get_context(), precision=int(bits)) as ctx:
        yield ctx


def current_precision():
    return gmpy2.get_context().precision


# ---------------------------------------------------------------- scalars

def exact(x):
    """Convert ``x`` to an exact rational, refusing binary floats."""
    if isinstance(x, MPQ):
        return x
    if isinstance(x, bool):
        raise InputError("booleans are not scalars")
    if isinstance(x, (int, type(mpz(0)))):
        return mpq(x)
    if isinstance(x, fractions.Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return mpq(x.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise InputError(f"not an exact rational: {x!r}") from err
    raise InputError(f"not an exact rational: {x!r}")


def to_float(x):
    """Big-float value of ``x`` at the working precision."""
    if isinstance(x, str):
        return mpfr(exact(x)) if "/" in x else mpfr(x)
    if isinstance(x, fractions.Fraction):
        return mpfr(mpq(x.numerator, x.denominator))
    return mpfr(x)


def parse_scalar(x, exact_mode=True):
    """Read a JSON scalar: strings and integers, plus floats outside exact mode."""
    if exact_mode:
        return exact(x)
    if isinstance(x, str) and "/" not in x:
        try:
            return exact(x)
        except InputError:
            return mpfr(x)
    if isinstance(x, float):
        return mpfr(x)
    try:
        return exact(x)
    except InputError:
        return to_float(x)


def is_exact(x):
    return isinstance(x, (MPQ, MPZ, int))


def format_scalar(x):
    """JSON form: "p/q" (or "p") for rationals, a decimal string for floats."""
    if isinstance(x, MPQ):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    digits = max(1, int(x.precision * 0.30103))
    return gmpy2.mpfr(x).__format__(f".{digits}g")


def is_zero(x, tol=None):
    if is_exact(x):
        return x == 0
    if tol is None:
        tol = default_tolerance()
    return abs(x) <= tol


def default_tolerance():
    """Half-precision tolerance 2^(-precision/2) for float comparisons."""
    return mpfr(2) ** (-(current_precision() // 2))


def log_value(x):
    """Natural log at the working precision (for I/O only)."""
    return gmpy2.log(to_float(x))


def nth_root_exact(x, n):
    """Exact rational n-th root of a positive rational, or None."""
    if x <= 0:
        return None
    num, ok_num = gmpy2.iroot(mpz(x.numerator), n)
    den, ok_den = gmpy2.iroot(mpz(x.denominator), n)
    if ok_num and ok_den:
        return mpq(num, den)
    return None


# ---------------------------------------------------------------- matrices

class Matrix:
    """Dense immutable matrix stored by rows.

    Column j is read as the j-th basis vector when a matrix encodes a flag.
    """

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise InputError("matrix rows must be non-empty and of equal length")
        self.rows = rows

    @classmethod
    def from_columns(cls, cols):
        cols = [tuple(c) for c in cols]
        return cls(zip(*cols))

    @classmethod
    def identity(cls, n):
        one, zero = mpq(1), mpq(0)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values):
        n = len(values)
        zero = mpq(0)
        return cls([[values[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def exact_from(cls, rows):
        return cls([[exact(x) for x in r] for r in rows])

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0])

    @property
    def n(self):
        return self.nrows

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self):
        return Matrix(zip(*self.rows))

    @property
    def is_exact(self):
        return all(is_exact(x) for r in self.rows for x in r)

    def to_float(self):
        return Matrix([[to_float(x) for x in r] for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            cols = other.columns()
            return Matrix([[_dot(r, c) for c in cols] for r in self.rows])
        return tuple(_dot(r, other) for r in self.rows)

    def __mul__(self, scalar):
        return Matrix([[x * scalar for x in r] for r in self.rows])

    __rmul__ = __mul__

    def __neg__(self):
        return Matrix([[-x for x in r] for r in self.rows])

    def __add__(self, other):
        return Matrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return Matrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = ", ".join("[" + ", ".join(format_scalar(x) for x in r) + "]" for r in self.rows)
        return f"Matrix([{body}])"

    def trace(self):
        return sum((self.rows[i][i] for i in range(self.nrows)), mpq(0))

    def max_abs(self):
        return max(abs(x) for r in self.rows for x in r)

    def to_json(self):
        return [[format_scalar(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data, exact_mode=True):
        if not isinstance(data, list) or not data:
            raise InputError("matrix must be a non-empty list of rows")
        return cls([[parse_scalar(x, exact_mode) for x in r] for r in data])


def _dot(u, v):
    total = mpq(0)
    for x, y in zip(u, v):
        if x and y:
            total += x * y
    return total


# ---------------------------------------------------------------- determinant

def det(m):
    """Determinant: fraction-free elimination when exact, pivoting otherwise."""
    if m.nrows != m.ncols:
        raise InputError("determinant of a non-square matrix")
    if m.is_exact:
        return _det_bareiss(m.rows)
    return _det_float(m.rows)


def _det_bareiss(rows):
    n = len(rows)
    scale = mpz(1)
    a = []
    for r in rows:
        lcm = mpz(1)
        for x in r:
            lcm = gmpy2.lcm(lcm, mpq(x).denominator)
        a.append([mpq(x * lcm).numerator for x in r])
        scale *= lcm
    sign = 1
    prev = mpz(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return mpq(0)
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = gmpy2.divexact(row_i[j] * pivot - aik * row_k[j], prev)
        prev = pivot
    return mpq(sign * a[n - 1][n - 1], scale)


def _det_float(rows):
    a = [[to_float(x) for x in r] for r in rows]
    n = len(a)
    result = mpfr(1)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[p][k] == 0:
            return mpfr(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            result = -result
        pivot = a[k][k]
        result *= pivot
        for i in range(k + 1, n):
            f = a[i][k] / pivot
            if f:
                for j in range(k + 1, n):
                    a[i][j] -= f * a[k][j]
    return result


# ---------------------------------------------------------------- elimination

def _row_reduce(rows, tol=None):
    """Reduced row echelon form. Returns (rows, pivot columns).

    Exact input uses the first nonzero pivot; float input uses the largest
    pivot and treats entries below ``tol`` (relative) as zero.
    """
    exact_mode = all(is_exact(x) for r in rows for x in r)
    a = [[mpq(x) if exact_mode else to_float(x) for x in r] for r in rows]
    nr, nc = len(a), len(a[0]) if a else 0
    if not exact_mode:
        scale = max((abs(x) for r in a for x in r), default=mpfr(0))
        if tol is None:
            tol = default_tolerance()
        threshold = tol * (scale if scale else 1)
    pivots = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        if exact_mode:
            p = next((i for i in range(r, nr) if a[i][c] != 0), None)
        else:
            p = max(range(r, nr), key=lambda i: abs(a[i][c]))
            if abs(a[p][c]) <= threshold:
                p = None
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(rows, tol=None):
    if not rows:
        return 0
    return len(_row_reduce(rows, tol)[1])


def null_space(m, tol=None):
    """Basis (list of column vectors) of the kernel of ``m``."""
    rows = m.rows if isinstance(m, Matrix) else m
    a, pivots = _row_reduce(rows, tol)
    nc = len(rows[0])
    free = [c for c in range(nc) if c not in pivots]
    exact_mode = all(is_exact(x) for r in rows for x in r)
    one = mpq(1) if exact_mode else mpfr(1)
    zero = mpq(0) if exact_mode else mpfr(0)
    basis = []
    for f in free:
        v = [zero] * nc
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -a[i][f]
        basis.append(tuple(v))
    return basis


def solve(m, rhs):
    """Solve ``m X = rhs`` for square invertible ``m``; ``rhs`` a Matrix or vector."""
    n = m.nrows
    if isinstance(rhs, Matrix):
        cols = rhs.columns()
    else:
        cols = [tuple(rhs)]
    aug = [list(m.rows[i]) + [c[i] for c in cols] for i in range(n)]
    if m.is_exact and all(is_exact(x) for c in cols for x in c):
        reduced, pivots = _row_reduce(aug)
    else:
        reduced, pivots = _solve_float(aug, n)
    if pivots[:n] != list(range(n)):
        raise InputError("singular matrix in linear solve")
    sol = [tuple(reduced[i][n + k] for i in range(n)) for k in range(len(cols))]
    if isinstance(rhs, Matrix):
        return Matrix.from_columns(sol)
    return sol[0]


def _solve_float(aug, n):
    """Partially pivoted elimination, pivoting only over the first n columns."""
    a = [[to_float(x) for x in r] for r in aug]
    width = len(a[0])
    for c in range(n):
        p = max(range(c, n), key=lambda i: abs(a[i][c]))
        if a[p][c] == 0:
            return a, list(range(c))
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [a[i][j] - f * a[c][j] for j in range(width)]
    return a, list(range(n))


def inverse(m):
    return solve(m, Matrix.identity(m.nrows))


# ---------------------------------------------------------------- polynomials

def char_poly(m):
    """Monic characteristic polynomial coefficients, lowest degree first
    (Faddeev-LeVerrier recursion)."""
    n = m.nrows
    coeffs = [mpq(0)] * (n + 1)
    coeffs[n] = mpq(1)
    ident = Matrix.identity(n)
    acc = Matrix([[mpq(0)] * n for _ in range(n)])
    for k in range(1, n + 1):
        acc = m @ acc + ident * coeffs[n - k + 1]
        coeffs[n - k] = -(m @ acc).trace() / k
    return coeffs


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _poly_eval(p, x):
    acc = mpq(0) if is_exact(x) and all(is_exact(c) for c in p) else mpfr(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_deriv(p):
    return [c * i for i, c in enumerate(p)][1:] or [mpq(0)]


def _poly_rem(a, b):
    a = list(a)
    b = _trim(b)
    db, lead = len(b) - 1, b[-1]
    while len(_trim(a)) - 1 >= db and any(a):
        a = _trim(a)
        shift = len(a) - 1 - db
        f = a[-1] / lead
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a.pop()
        if not a:
            a = [mpq(0)]
    return _trim(a)


def _poly_div(a, b):
    a = list(a)
    b = _trim(b)
    db = len(b) - 1
    q = [mpq(0)] * max(1, len(a) - db)
    while len(a) - 1 >= db and len(a) > 0:
        shift = len(a) - 1 - db
        f = a[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a.pop()
    return _trim(q)


def _poly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while not (len(b) == 1 and b[0] == 0):
        a, b = b, _poly_rem(a, b)
    return [c / a[-1] for c in a]


def _sturm_chain(p):
    chain = [p, _poly_deriv(p)]
    while len(chain[-1]) > 1:
        r = _poly_rem(chain[-2], chain[-1])
        if len(r) == 1 and r[0] == 0:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain, x):
    signs = [gmpy2.sign(_poly_eval(p, x)) for p in chain]
    signs = [s for s in signs if s != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _isolate_real_roots(p):
    """Isolate the real roots of a squarefree rational polynomial.

    Returns a list of items, each either ("exact", root) or ("interval", lo, hi)
    with p(lo), p(hi) of opposite signs and exactly one root inside.
    """
    chain = _sturm_chain(p)
    bound = 1 + max(abs(c / p[-1]) for c in p[:-1]) if len(p) > 1 else mpq(1)
    bound = mpq(math.ceil(bound))
    out = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        count = _sign_changes(chain, lo) - _sign_changes(chain, hi)
        if count == 0:
            continue
        if count == 1:
            if _poly_eval(p, hi) == 0:
                out.append(("exact", hi))
            else:
                out.append(("interval", lo, hi))
            continue
        mid = (lo + hi) / 2
        if _poly_eval(p, mid) == 0:
            out.append(("exact", mid))
            delta = (hi - lo) / 4
            while True:
                left, right = mid - delta, mid + delta
                if (_poly_eval(p, left) != 0 and _poly_eval(p, right) != 0
                        and _sign_changes(chain, left) - _sign_changes(chain, right) == 1):
                    break
                delta /= 2
            stack.append((lo, left))
            stack.append((right, hi))
        else:
            stack.append((lo, mid))
            stack.append((mid, hi))
    return out


def _refine_root(p, lo, hi, bits):
    """Polish a bracketed simple root to ``bits`` bits (bisection, then Newton)."""
    sign_lo = gmpy2.sign(_poly_eval(p, lo))
    while hi - lo > abs(hi + lo) / (1 << 40) + mpq(1, 1 << 40):
        mid = (lo + hi) / 2
        s = gmpy2.sign(_poly_eval(p, mid))
        if s == 0:
            return mid
        if s == sign_lo:
            lo = mid
        else:
            hi = mid
    dp = _poly_deriv(p)
    with working_precision(bits + 32):
        fp = [mpfr(c) for c in p]
        fdp = [mpfr(c) for c in dp]
        flo, fhi = mpfr(lo), mpfr(hi)
        x = (flo + fhi) / 2
        eps = mpfr(2) ** (-bits - 8)
        for _ in range(400):
            value = _poly_eval(fp, x)
            if value == 0:
                break
            # keep the bracket around the sign change
            if gmpy2.sign(value) == sign_lo:
                flo = x
            else:
                fhi = x
            nxt = x - value / _poly_eval(fdp, x)
            if not flo <= nxt <= fhi:
                nxt = (flo + fhi) / 2
            done = abs(nxt - x) <= abs(x) * eps or fhi - flo <= abs(x) * eps
            x = nxt
            if done:
                break
        return x


def _clear_denominators(p):
    lcm = mpz(1)
    for c in p:
        lcm = gmpy2.lcm(lcm, mpq(c).denominator)
    ints = [mpq(c * lcm).numerator for c in p]
    g = mpz(0)
    for c in ints:
        g = gmpy2.gcd(g, c)
    return [c // g for c in ints]


def real_roots(coeffs, precision=None):
    """All real roots of a polynomial, with multiplicity problems reported.

    Returns (roots, squarefree) where each root is an exact rational when it
    can be certified rational and a big float otherwise.
    """
    if precision is None:
        precision = current_precision()
    p = _trim([mpq(c) for c in coeffs])
    dp = _poly_deriv(p)
    g = _poly_gcd(p, dp)
    squarefree = len(g) == 1
    core = p if squarefree else _poly_div(p, g)
    integer_core = _clear_denominators(core)
    lead = abs(integer_core[-1])
    # enough bits to recover a rational root whose denominator divides ``lead``
    recover_bits = 2 * int(gmpy2.bit_length(lead)) + 64
    items = _isolate_real_roots([mpq(c) for c in integer_core])
    roots = []
    for item in items:
        if item[0] == "exact":
            roots.append(item[1])
            continue
        _, lo, hi = item
        bound = max(abs(lo), abs(hi), mpq(1))
        bits = max(precision, recover_bits + int(gmpy2.bit_length(mpz(math.ceil(bound)))))
        approx = _refine_root(integer_core, lo, hi, bits)
        if isinstance(approx, MPQ):
            roots.append(approx)
            continue
        candidate = fractions.Fraction(int(mpq(approx).numerator), int(mpq(approx).denominator))
        candidate = candidate.limit_denominator(int(lead))
        cand = mpq(candidate.numerator, candidate.denominator)
        if _poly_eval(integer_core, cand) == 0:
            roots.append(cand)
        else:
            with working_precision(precision):
                roots.append(mpfr(approx))
    return roots, squarefree, len(core) - 1


def real_eigen(m, precision=None):
    """Real eigenvalues (strictly decreasing modulus) with eigenvectors.

    Each eigenvector is normalized so its first nonzero coordinate is 1.
    Exact matrices with rational eigenvalues give exact output.
    """
    if precision is None:
        precision = current_precision()
    n = m.nrows
    with working_precision(precision):
        coeffs = char_poly(m if m.is_exact else m.to_float())
        roots, squarefree, distinct = real_roots(coeffs, precision)
        if not squarefree:
            if len(roots) == distinct:
                raise RepeatedModulus("repeated eigenvalue")
            raise NonRealSpectrum("characteristic polynomial has non-real roots")
        if len(roots) < n:
            raise NonRealSpectrum(
                f"only {len(roots)} of {n} eigenvalues are real")
        roots.sort(key=lambda r: abs(r), reverse=True)
        tol = default_tolerance()
        for x, y in zip(roots, roots[1:]):
            if is_exact(x) and is_exact(y):
                same = abs(x) == abs(y)
            else:
                same = abs(abs(mpfr(x)) - abs(mpfr(y))) <= tol * max(abs(mpfr(x)), mpfr(1))
            if same:
                raise RepeatedModulus("two eigenvalues share the same absolute value")
        out = []
        for lam in roots:
            shifted = m - Matrix.identity(n) * lam
            if shifted.is_exact:
                kernel = null_space(shifted)
            else:
                kernel = _float_kernel(shifted)
            out.append((lam, normalize_vector(kernel[0])))
        return out


def _float_kernel(m):
    """Kernel vector of a numerically singular float matrix of rank n-1.

    Elimination with complete pivoting; the last (smallest) pivot is taken
    to be zero, so no threshold is needed.
    """
    a = [[to_float(x) for x in r] for r in m.rows]
    n = len(a)
    perm = list(range(n))
    for k in range(n - 1):
        i, j = max(((i, j) for i in range(k, n) for j in range(k, n)), key=lambda ij: abs(a[ij[0]][ij[1]]))
        a[k], a[i] = a[i], a[k]
        for row in a:
            row[k], row[j] = row[j], row[k]
        perm[k], perm[j] = perm[j], perm[k]
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[k])]
    x = [mpfr(0)] * n
    x[n - 1] = mpfr(1)
    for k in range(n - 2, -1, -1):
        x[k] = -sum((a[k][j] * x[j] for j in range(k + 1, n)), mpfr(0)) / a[k][k]
    out = [mpfr(0)] * n
    for k in range(n):
        out[perm[k]] = x[k]
    return [tuple(out)]


def normalize_vector(v):
    """Scale a vector so its first nonzero coordinate equals 1."""
    if all(is_exact(x) for x in v):
        lead = next(x for x in v if x != 0)
        return tuple(mpq(x) / lead for x in v)
    scale = max(abs(x) for x in v)
    tol = default_tolerance() * scale
    lead = next(x for x in v if abs(x) > tol)
    return tuple(to_float(x) / lead for x in v)
