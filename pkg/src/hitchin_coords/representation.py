"""Surface-group representations given by generator matrices, word
evaluation, positive eigendata with stable/unstable flags, and the
irreducible symmetric-power lift of SL(2)."""

from dataclasses import dataclass
from math import comb

from gmpy2 import mpq

from .errors import (DeterminantNotOne, InputError, MixedSigns, NonRealSpectrum,
                     NotLoxodromic, RepeatedModulus, UnknownGenerator)
from .flags import Flag
from .scalars import (Matrix, default_tolerance, det, inverse, is_exact, nth_root_exact,
                      real_eigen, to_float, working_precision)
from .words import format_word, parse_word


class Representation:
    """Assignment of an n x n matrix to each generator name."""

    def __init__(self, n, generators, check_det=True):
        self.n = int(n)
        self.generators = dict(generators)
        for name, m in self.generators.items():
            if m.nrows != self.n or m.ncols != self.n:
                raise InputError(f"generator {name} is not {self.n} x {self.n}")
            if check_det:
                d = det(m)
                if is_exact(d):
                    ok = abs(d) == 1
                else:
                    ok = abs(abs(d) - 1) <= default_tolerance()
                if not ok:
                    raise DeterminantNotOne(f"generator {name} has determinant {d}")
        self._inverses = {}
        self._cache = {}

    @property
    def is_exact(self):
        return all(m.is_exact for m in self.generators.values())

    def matrix(self, name, exponent=1):
        if name not in self.generators:
            raise UnknownGenerator(f"unknown generator {name!r}")
        if exponent == 1:
            return self.generators[name]
        if name not in self._inverses:
            self._inverses[name] = inverse(self.generators[name])
        return self._inverses[name]

    def conjugate(self, a):
        """The representation gamma -> a rho(gamma) a^-1."""
        a_inv = inverse(a)
        return Representation(self.n, {k: a @ m @ a_inv for k, m in self.generators.items()},
                              check_det=False)

    def to_json(self):
        return {"n": self.n,
                "generators": {k: self.generators[k].to_json() for k in sorted(self.generators)}}

    @classmethod
    def from_json(cls, data, exact_mode=True):
        try:
            n = int(data["n"])
            gens = {str(k): Matrix.from_json(v, exact_mode) for k, v in data["generators"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as err:
            raise InputError(f"malformed representation: {err}") from err
        return cls(n, gens)


def eval_word(rep, word):
    """Ordered product of generator matrices (and inverses) along ``word``."""
    word = parse_word(word) if isinstance(word, str) else tuple(word)
    if word in rep._cache:
        return rep._cache[word]
    if not word:
        result = Matrix.identity(rep.n)
    elif len(word) == 1:
        result = rep.matrix(*word[0])
    else:
        half = len(word) // 2
        result = eval_word(rep, word[:half]) @ eval_word(rep, word[half:])
    if len(rep._cache) < 4096:
        rep._cache[word] = result
    return result


@dataclass(frozen=True)
class EigenData:
    eigenvalues: tuple
    eigenlines: tuple
    stable_flag: Flag
    unstable_flag: Flag

    def flag(self, end):
        """Attracting (end +1) or repelling (end -1) fixed flag."""
        return self.stable_flag if end > 0 else self.unstable_flag

    def length_ratios(self):
        return [x / y for x, y in zip(self.eigenvalues, self.eigenvalues[1:])]


def positive_eigendata(m, precision=None):
    n = m.nrows
    try:
        pairs = real_eigen(m, precision)
    except (NonRealSpectrum, RepeatedModulus) as err:
        raise NotLoxodromic(str(err)) from err
    values = [lam for lam, _ in pairs]
    if all(v > 0 for v in values):
        pass
    elif all(v < 0 for v in values):
        if n % 2:
            raise MixedSigns("all eigenvalues negative in odd dimension (determinant sign)")
        values = [-v for v in values]
    else:
        raise MixedSigns("eigenvalues of both signs: not of Hitchin type")
    lines = tuple(v for _, v in pairs)
    stable = Flag.from_columns(lines)
    unstable = Flag.from_columns(lines[::-1])
    return EigenData(tuple(values), lines, stable, unstable)


def sl2_symmetric_lift(m, n):
    """Action of a 2 x 2 matrix on degree n-1 binary forms, in the basis
    X^(n-1), X^(n-2) Y, ..., Y^(n-1)."""
    if m.nrows != 2 or m.ncols != 2:
        raise InputError("symmetric lift needs a 2 x 2 matrix")
    if det(m) != 1:
        raise DeterminantNotOne("symmetric lift needs determinant exactly 1")
    (a, b), (c, d) = m.rows
    deg = n - 1
    cols = []
    for k in range(n):
        # image of X^(deg-k) Y^k is (aX + cY)^(deg-k) (bX + dY)^k
        first = [comb(deg - k, i) * a ** (deg - k - i) * c ** i for i in range(deg - k + 1)]
        second = [comb(k, i) * b ** (k - i) * d ** i for i in range(k + 1)]
        col = [mpq(0)] * n
        for i, x in enumerate(first):
            for j, y in enumerate(second):
                col[i + j] += x * y
        cols.append(tuple(col))
    return Matrix.from_columns(cols)


def lift_to_sl(m, precision=None):
    """Scale a projective class representative to determinant +1.

    Exact when the n-th root of |det| is rational; otherwise the scale
    factor is a big float at the working precision.
    """
    n = m.nrows
    d = det(m)
    if d == 0:
        raise InputError("singular matrix has no special linear lift")
    if n % 2 == 0 and d < 0:
        raise DeterminantNotOne("even dimension with negative determinant")
    sign = 1 if d > 0 else -1
    if is_exact(d):
        root = nth_root_exact(abs(d), n)
        if root is not None:
            return m * (sign / root)
    if precision is None:
        from .scalars import current_precision
        precision = current_precision()
    with working_precision(precision):
        scale = sign / to_float(abs(d)) ** (to_float(1) / n)
        return m.to_float() * scale


def representation_summary(rep, words):
    return {format_word(w): eval_word(rep, w).to_json() for w in words}
