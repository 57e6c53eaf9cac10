"""Constraints on coordinate vectors: closed-leaf side products, membership,
dimension, global triangle relations and sampling of interior points.

Everything is multiplicative. A constraint row is an integer exponent vector
over the free variables; "linear in logarithms" becomes "monomial = 1".
Free variables are one triple ratio per (triangle, index) read at vertex 0
(the other two vertices are tied to it by rotation) and one double ratio per
(leaf, index).
"""

import random
from dataclasses import dataclass

from gmpy2 import mpq

from .coords import CoordinateVector
from .errors import IndexOutOfRange, SamplingFailed
from .flags import triple_indices
from .lamination import SIDES, require_valid, spiral_sequence
from .scalars import _row_reduce, default_tolerance, rank


# ---------------------------------------------------------------- side products

def _bar_index(entry, a, n):
    return a if entry.toward else n - a


def _side_terms(lam, n, closed_leaf, side, a):
    """(power, [(leaf, index)], [(triangle, vertex, (a,b,c))]) for one side."""
    if not 1 <= a <= n - 1:
        raise IndexOutOfRange(f"length index {a} out of range for n={n}")
    entries = spiral_sequence(lam, closed_leaf, side)
    direction = lam.direction((closed_leaf, side))
    k = a if direction == "with" else n - a
    power = 1 if (side == "right") == (direction == "with") else -1
    shears = [(e.leaf, _bar_index(e, k, n)) for e in entries]
    tris = [(e.triangle, e.vertex, (k, b, n - k - b)) for e in entries for b in range(1, n - k)]
    return power, shears, tris


def side_length_product(coords, lam, closed_leaf, side, a):
    """exp of the side sum for the closed leaf (four cases by side and direction)."""
    power, shears, tris = _side_terms(lam, coords.n, closed_leaf, side, a)
    value = mpq(1)
    for leaf, idx in shears:
        value *= coords.sigma(leaf, idx)
    for t, v, idx in tris:
        value *= coords.tau(t, v, idx)
    return value if power == 1 else 1 / value


# ---------------------------------------------------------------- variables

def unrotate(vertex, idx):
    """Index at vertex 0 carrying the value of ``idx`` at ``vertex``."""
    a, b, c = idx
    for _ in range(vertex % 3):
        a, b, c = c, a, b
    return (a, b, c)


def variables(lam, n):
    """Ordered free variables: infinite-leaf shears, triangle values, closed shears."""
    out = [("sigma", g, a) for g in lam.leaf_ids for a in range(1, n)]
    out += [("tau", t, idx) for t in lam.triangle_ids for idx in triple_indices(n)]
    out += [("sigma", c, a) for c in lam.closed_ids for a in range(1, n)]
    return out


def side_exponents(lam, n, closed_leaf, side, a):
    """Exponent vector (dict variable -> int) of the side product."""
    power, shears, tris = _side_terms(lam, n, closed_leaf, side, a)
    row = {}
    for leaf, idx in shears:
        key = ("sigma", leaf, idx)
        row[key] = row.get(key, 0) + power
    for t, v, idx in tris:
        key = ("tau", t, unrotate(v, idx))
        row[key] = row.get(key, 0) + power
    return row


def equality_rows(lam, n):
    rows = []
    for c in lam.closed_ids:
        for a in range(1, n):
            row = dict(side_exponents(lam, n, c, "right", a))
            for key, e in side_exponents(lam, n, c, "left", a).items():
                row[key] = row.get(key, 0) - e
            rows.append(((c, a), {k: v for k, v in row.items() if v}))
    return rows


def _dense(rows, var_list):
    pos = {v: i for i, v in enumerate(var_list)}
    out = []
    for row in rows:
        dense = [mpq(0)] * len(var_list)
        for key, e in row.items():
            dense[pos[key]] = mpq(e)
        out.append(dense)
    return out


def affine_dimension(lam, n):
    """Free variables after rotation identification minus the exact rank of
    the closed-leaf equalities."""
    require_valid(lam)
    var_list = variables(lam, n)
    rows = [r for _, r in equality_rows(lam, n)]
    return len(var_list) - rank(_dense(rows, var_list))


def free_variable_count(lam, n):
    u, s, t = len(lam.triangles), len(lam.closed_leaves), len(lam.infinite_leaves)
    return u * (n - 1) * (n - 2) // 2 + (s + t) * (n - 1)


# ---------------------------------------------------------------- membership

@dataclass
class MembershipReport:
    passed: bool
    violations: list
    equalities: dict
    inequalities: dict

    def to_json(self, dimension=None):
        from .scalars import format_scalar
        out = {"pass": self.passed, "violations": self.violations,
               "lengths": {f"{c}/{a}": format_scalar(v) for (c, a), v in sorted(self.inequalities.items())}}
        if dimension is not None:
            out["dimension"] = dimension
        return out


def check_membership(coords, lam):
    """Rotation condition, closed-leaf equalities and inequalities."""
    n = coords.n
    violations = []
    equalities = {}
    inequalities = {}
    expected = {(t, v, idx) for t in lam.triangle_ids for v in range(3) for idx in triple_indices(n)}
    missing = expected - set(coords.triangle_exp)
    missing_shears = {(g, a) for g in lam.leaf_ids + lam.closed_ids for a in range(1, n)} - set(coords.shear_exp)
    if missing or missing_shears:
        violations.append(f"incomplete coordinates: {len(missing) + len(missing_shears)} entries missing")
        return MembershipReport(False, violations, equalities, inequalities)
    if any(x <= 0 for x in coords.all_values()):
        violations.append("nonpositive coordinate")
    if not coords.rotation_ok():
        violations.append("rotation condition fails")
    exact_mode = coords.is_exact
    tol = default_tolerance()
    for c in lam.closed_ids:
        for a in range(1, n):
            right = side_length_product(coords, lam, c, "right", a)
            left = side_length_product(coords, lam, c, "left", a)
            equalities[(c, a)] = (right, left)
            inequalities[(c, a)] = right
            same = right == left if exact_mode else abs(right / left - 1) <= tol
            if not same:
                violations.append(f"equality {c}/{a}: right {right} != left {left}")
            if not right > 1:
                violations.append(f"inequality {c}/{a}: exp L = {right} <= 1")
    return MembershipReport(not violations, violations, equalities, inequalities)


# ---------------------------------------------------------------- global relation

def relation_residual_at(coords, a):
    """Product over all stored triangle vertices of
    prod_{b+c=n-a} exp tau_abc / prod_{b+c=a} exp tau_(n-a)bc."""
    n = coords.n
    vertices = sorted({(t, v) for (t, v, _) in coords.triangle_exp})
    value = mpq(1)
    for t, v in vertices:
        for b in range(1, n - a):
            value *= coords.tau(t, v, (a, b, n - a - b))
        for b in range(1, a):
            value /= coords.tau(t, v, (n - a, b, a - b))
    return value


def global_relation_residual(coords, n=None):
    n = n or coords.n
    return {a: relation_residual_at(coords, a) for a in range(1, (n - 1) // 2 + 1)}


# ---------------------------------------------------------------- sampling

def _rational_in(rng, lo, hi, power, scale=24):
    """Random rational r with r**power in [lo, hi]."""
    for _ in range(1000):
        r = mpq(rng.randint(1, 8 * scale), scale)
        if lo <= r ** power <= hi:
            return r
    raise SamplingFailed("could not draw a rational in range")


def _solve_plan(rows, var_list, unknown_order):
    """Row-reduce rows (over ``unknown_order`` columns, then an identity
    block tracking row combinations). Returns (pivot vars, reduced rows)."""
    m = len(rows)
    dense = _dense(rows, unknown_order)
    aug = [r + [mpq(1) if i == j else mpq(0) for j in range(m)] for i, r in enumerate(dense)]
    reduced, pivots = _row_reduce(aug)
    pivots = [p for p in pivots if p < len(unknown_order)]
    return pivots, reduced


def sample_interior(lam, n, seed, power=1, max_rounds=50):
    """Rational interior point of the polytope, deterministic per seed.

    The closed-leaf lengths are drawn first; both side products of every
    closed leaf are then forced to equal the drawn length by an exact solve
    for a maximal set of infinite-leaf shears (and, where the shears alone
    cannot absorb the constraints, triangle values). All drawn values are
    ``d``-th powers, with ``d`` clearing every denominator of the solve, so
    the solved values stay rational. ``power`` raises every draw further
    (``power=2`` makes every coordinate a rational square).
    """
    require_valid(lam)
    rng = random.Random(seed)
    var_list = variables(lam, n)
    unknown_order = ([v for v in var_list if v[0] == "sigma" and v[1] in lam.leaf_ids]
                     + [v for v in var_list if v[0] == "tau"])
    side_rows = []
    for c in lam.closed_ids:
        for a in range(1, n):
            for side in SIDES:
                side_rows.append(((c, a), side_exponents(lam, n, c, side, a)))
    rows = [r for _, r in side_rows]
    pivots, reduced = _solve_plan(rows, var_list, unknown_order)
    targets_mode = len(pivots) == len(rows)
    if not targets_mode:
        eq = equality_rows(lam, n)
        rows = [r for _, r in eq]
        side_rows = eq
        pivots, reduced = _solve_plan(rows, var_list, unknown_order)
    pivot_vars = [unknown_order[p] for p in pivots]
    denom = 1
    for r in reduced:
        for x in r:
            denom = denom * x.denominator // _gcd(denom, x.denominator)
    d = denom * power
    for _ in range(max_rounds):
        values = {}
        for v in var_list:
            if v in pivot_vars:
                continue
            if v[0] == "tau":
                values[v] = _rational_in(rng, mpq(1, 3), mpq(3), d) ** d
            elif v[1] in lam.closed_ids:
                values[v] = _rational_in(rng, mpq(1, 4), mpq(4), d) ** d
            else:
                values[v] = _rational_in(rng, mpq(1, 3), mpq(3), d) ** d
        lengths = {}
        for c in lam.closed_ids:
            for a in range(1, n):
                lengths[(c, a)] = _rational_in(rng, mpq(9, 8), mpq(4), d) ** d
        rhs = [lengths[key] if targets_mode else mpq(1) for key, _ in side_rows]
        pos = {v: i for i, v in enumerate(unknown_order)}
        width = len(unknown_order)
        for i, p in enumerate(pivots):
            row = reduced[i]
            value = mpq(1)
            for v, x in values.items():
                if v in pos and row[pos[v]]:
                    value *= _qpow(x, -row[pos[v]])
            for j, coef in enumerate(row[width:]):
                if coef:
                    value *= _qpow(rhs[j], coef)
            values[unknown_order[p]] = value
        coords = CoordinateVector(n, lam.id)
        for t in lam.triangle_ids:
            coords.set_triangle(t, {idx: values[("tau", t, idx)] for idx in triple_indices(n)})
        for v in var_list:
            if v[0] == "sigma":
                coords.shear_exp[(v[1], v[2])] = values[v]
        if check_membership(coords, lam).passed:
            return coords
    raise SamplingFailed(f"no interior point after {max_rounds} rounds")


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _qpow(x, e):
    """x ** e for rational e whose denominator divides the built-in power."""
    e = mpq(e)
    if e.denominator == 1:
        return x ** int(e.numerator)
    from .scalars import nth_root_exact
    root = nth_root_exact(x, int(e.denominator))
    if root is None:
        raise SamplingFailed("solved exponent left the rationals")
    return root ** int(e.numerator)
