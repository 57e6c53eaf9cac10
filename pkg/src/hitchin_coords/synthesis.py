"""Reconstruction of a representation from coordinates.

Every triangle gets a canonical flag triple realizing its triple ratios at
vertex 0. Crossing an infinite leaf is an elementary transform: the flags of
the neighbouring triangle, built in the current triangle's frame with the
prescribed shears, are matched against the neighbour's canonical triple.
Crossing a closed leaf uses the monodromies around the two spiralling fans,
which must be conjugate; the remaining diagonal freedom is fixed by the
closed-leaf shears. A holonomy is the product of elementary transforms along
a dual-graph loop.
"""

from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import (EigenvalueMismatch, MembershipFailed, MixedSigns, NotLoxodromic,
                     RealizationFailed, RelatorViolation)
from .flags import (Flag, coordinates_in, double_ratio, map_triple, opposite_flag,
                    standard_flag, transverse_lines, triple_indices, triple_ratio)
from .lamination import require_valid
from .polytope import check_membership, side_length_product
from .representation import Representation, eval_word, lift_to_sl
from .scalars import (Matrix, _row_reduce, default_tolerance, det, inverse, is_exact,
                      to_float)


def _close(x, y, exact_mode):
    if exact_mode:
        return x == y
    return abs(x - y) <= default_tolerance() * max(1, abs(y))


def _unit(n, j, one):
    return tuple(one if i == j else 0 * one for i in range(n))


def _solve_underdetermined(rows, rhs):
    """One solution of rows . x = rhs (free variables set to zero)."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = _row_reduce(aug)
    width = len(rows[0])
    if width in pivots:
        raise RealizationFailed("inconsistent linear system while building a flag")
    x = [0 * rhs[0]] * width
    for i, p in enumerate(pivots):
        x[p] = reduced[i][width]
    return tuple(x)


# ---------------------------------------------------------------- triples

def realize_triple(exp_tau, n):
    """Flag triple (E, F, G) with T_abc(E, F, G) equal to the given values.

    E is the standard coordinate flag and F the opposite one. G is built one
    column at a time: each new column is fixed by the wedges of E, F and the
    first c+1 columns of G, whose successive quotients are forced by the
    triple ratios with third index c.
    """
    values = {tuple(k): v for k, v in exp_tau.items()}
    if set(values) != set(triple_indices(n)):
        raise RealizationFailed(f"need exactly the triple ratios for n={n}")
    if any(v <= 0 for v in values.values()):
        raise RealizationFailed("prescribed triple ratios must be positive")
    exact_mode = all(is_exact(v) for v in values.values())
    one = mpq(1) if exact_mode else to_float(1)
    E, F = standard_flag(n), opposite_flag(n)
    cols = []

    def wedge(a, b, extra):
        c = n - a - b
        return det(Matrix.from_columns(E.columns(a) + F.columns(b) + cols[:c - 1] + [extra]))

    def next_column(c, targets):
        # wedge(r, n-c-r, extra) is linear in the new column
        rows = [[wedge(r, n - c - r, _unit(n, j, one)) for j in range(n)]
                for r in range(len(targets))]
        return _solve_underdetermined(rows, targets)

    cols.append(next_column(1, [one] * n))
    for c in range(1, n - 1):
        targets = [one]
        for r in range(n - c - 1):
            a, b = r + 1, n - c - r - 1
            # wedges with the first c-1 and c columns of G
            top = _wedge_fixed(E, F, cols, a + 1, b, c - 1) * _wedge_fixed(E, F, cols, a - 1, b + 1, c)
            bottom = _wedge_fixed(E, F, cols, a, b + 1, c - 1) * _wedge_fixed(E, F, cols, a + 1, b - 1, c)
            targets.append(targets[-1] * values[(a, b, c)] * bottom / top)
        cols.append(next_column(c + 1, targets))
    for j in range(n):
        trial = cols + [_unit(n, j, one)]
        if det(Matrix.from_columns(trial)) != 0:
            cols = trial
            break
    G = Flag.from_columns(cols)
    for idx, v in values.items():
        if not _close(triple_ratio(E, F, G, *idx), v, exact_mode):
            raise RealizationFailed(f"realized triple ratio {idx} does not match")
    return E, F, G


def _wedge_fixed(E, F, cols, a, b, c):
    return det(Matrix.from_columns(E.columns(a) + F.columns(b) + list(cols[:c])))


# ---------------------------------------------------------------- leaves

def extend_across_leaf(E, F, G, exp_tau_opposite, exp_sigma):
    """Flag G' on the other side of the leaf joining E and F.

    ``exp_tau_opposite`` are the triple ratios of the adjacent triangle read
    at the vertex carrying E, i.e. T_abc(E, G', F). ``exp_sigma`` lists
    D_a(E, F, G, G') for a = 1..n-1.
    """
    n = E.n
    exact_mode = E.is_exact and F.is_exact and G.is_exact and all(
        is_exact(x) for x in list(exp_sigma) + list(exp_tau_opposite.values()))
    if len(exp_sigma) != n - 1 or any(x <= 0 for x in exp_sigma):
        raise RealizationFailed("need n-1 positive double ratios")
    P, Q, R = realize_triple(exp_tau_opposite, n) if n > 2 else (standard_flag(n), None, opposite_flag(n))
    lines = transverse_lines(E, F)
    basis = Matrix.from_columns(lines)
    move = basis @ inverse(Matrix.from_columns(transverse_lines(P, R)))
    if Q is None:
        G0 = Flag.from_columns([tuple(x + y for x, y in zip(lines[0], lines[1])), lines[0]])
    else:
        G0 = Q.transform(move)
    gamma = coordinates_in(lines, G.line())
    gamma2 = coordinates_in(lines, G0.line())
    beta = [gamma[0] * 0 + 1]
    for a in range(n - 1):
        current = -(gamma[a + 1] * gamma2[a]) / (gamma2[a + 1] * gamma[a])
        beta.append(beta[-1] * current / exp_sigma[a])
    adjust = basis @ Matrix.diagonal(beta) @ inverse(basis)
    G2 = G0.transform(adjust)
    for a in range(1, n):
        if not _close(double_ratio(E, F, G, G2, a), exp_sigma[a - 1], exact_mode):
            raise RealizationFailed(f"double ratio {a} not matched across the leaf")
    for idx, v in exp_tau_opposite.items():
        if not _close(triple_ratio(E, G2, F, *idx), v, exact_mode):
            raise RealizationFailed(f"opposite triple ratio {idx} not matched")
    return G2


# ---------------------------------------------------------------- closed leaves

@dataclass
class SpiralSide:
    """Monodromy of [c] around one side, in one triangle's frame.

    ``fixed_flag`` is the flag at the spiralling corner (preserved by the
    monodromy), ``end`` says whether it should be the attracting (+1) or
    repelling (-1) flag, ``far_flag`` is the flag at the far vertex.
    """
    monodromy: Matrix
    fixed_flag: Flag
    end: int
    far_flag: Flag


def flag_eigendata(m, flag, end=None):
    """Eigenvalues (decreasing) and eigenvectors of a matrix preserving
    ``flag``, read off its triangular form in the flag's basis."""
    n = m.nrows
    exact_mode = m.is_exact and flag.is_exact
    H = flag.basis
    U = inverse(H) @ m @ H
    scale = max(abs(x) for x in (U.rows[i][i] for i in range(n)))
    for i in range(n):
        for j in range(i):
            x = U.rows[i][j]
            if (x != 0) if exact_mode else abs(x) > default_tolerance() * scale:
                raise RealizationFailed("monodromy does not preserve the spiralling flag")
    diag = [U.rows[i][i] for i in range(n)]
    if all(x > 0 for x in diag):
        sign = 1
    elif all(x < 0 for x in diag):
        sign = -1
    else:
        raise MixedSigns("monodromy eigenvalues of both signs")
    diag = [sign * x for x in diag]
    ratios = [x / y for x, y in zip(diag, diag[1:])]
    if all(r > 1 for r in ratios):
        stable = True
    elif all(r < 1 for r in ratios):
        stable = False
    else:
        raise NotLoxodromic("monodromy eigenvalues are not strictly ordered along the flag")
    if end is not None and stable != (end > 0):
        raise RealizationFailed("spiralling flag is not the expected fixed flag of the monodromy")
    vectors = []
    for k in range(n):
        v = [diag[0] * 0] * n
        v[k] = diag[0] * 0 + 1
        for j in range(k - 1, -1, -1):
            s = sum((U.rows[j][i] * v[i] for i in range(j + 1, k + 1)), diag[0] * 0)
            v[j] = -s / (U.rows[j][j] - U.rows[k][k])
        vectors.append(tuple(sum((H.rows[r][i] * v[i] for i in range(n)), diag[0] * 0)
                             for r in range(n)))
    order = list(range(n)) if stable else list(range(n - 1, -1, -1))
    return [diag[k] for k in order], [vectors[k] for k in order]


def glue_across_closed_leaf(left, right, exp_lengths, exp_sigma):
    """Matrix Y taking the right triangle's frame into the left one's.

    Y conjugates the right monodromy to the left one (their eigenvalue
    ratios must both equal ``exp_lengths``) and its diagonal freedom in the
    common eigenbasis is fixed so that D_a(x, y, z, Y z') = exp_sigma[a-1],
    with x, y the attracting and repelling flags, z the left far flag and z'
    the right far flag.
    """
    n = left.monodromy.nrows
    exact_mode = all(m.is_exact for m in (left.monodromy, right.monodromy))
    vals_l, vecs_l = flag_eigendata(left.monodromy, left.fixed_flag, left.end)
    vals_r, vecs_r = flag_eigendata(right.monodromy, right.fixed_flag, right.end)
    for a in range(n - 1):
        for vals, side in ((vals_l, "left"), (vals_r, "right")):
            if not _close(vals[a] / vals[a + 1], exp_lengths[a], exact_mode):
                raise EigenvalueMismatch(
                    f"{side} monodromy eigenvalue ratio {a + 1} is {vals[a] / vals[a + 1]}, "
                    f"expected {exp_lengths[a]}", index=a + 1, side=side)
    gamma = coordinates_in(vecs_l, left.far_flag.line())
    p = coordinates_in(vecs_r, right.far_flag.line())
    d = [gamma[0] * 0 + 1]
    for a in range(n - 1):
        d.append(-d[-1] * gamma[a + 1] * p[a] / (p[a + 1] * gamma[a] * exp_sigma[a]))
    Y = Matrix.from_columns(vecs_l) @ Matrix.diagonal(d) @ inverse(Matrix.from_columns(vecs_r))
    x = Flag.from_columns(vecs_l)
    y = Flag.from_columns(vecs_l[::-1])
    z2 = right.far_flag.transform(Y)
    for a in range(1, n):
        if not _close(double_ratio(x, y, left.far_flag, z2, a), exp_sigma[a - 1], exact_mode):
            raise RealizationFailed(f"arc double ratio {a} not matched")
    return Y


# ---------------------------------------------------------------- reconstruction

@dataclass
class Reconstruction:
    """Output of the reconstruction.

    ``projective`` holds exact representatives of the projective classes
    (determinant made positive in odd dimension); ``representation`` holds
    their determinant-one lifts, exact when the n-th root of the determinant
    is rational and big-float otherwise.
    """
    projective: Representation
    representation: Representation
    triples: dict
    leaf_transforms: dict = field(default_factory=dict)
    arc_transforms: dict = field(default_factory=dict)


class _Builder:
    def __init__(self, coords, lam):
        self.coords = coords
        self.lam = lam
        self.n = coords.n
        self.triples = {}
        self.leaf_transforms = {}
        self.arc_transforms = {}

    def triple(self, tid):
        if tid not in self.triples:
            E, F, G = realize_triple(self.coords.tau_at(tid, 0), self.n) if self.n > 2 \
                else _line_triple(self.coords)
            self.triples[tid] = (E, F, G)
        return self.triples[tid]

    def leaf_transform(self, tid, s):
        key = (tid, s)
        if key not in self.leaf_transforms:
            n = self.n
            leaf, nt, ns, own = self.lam.neighbor(tid, s)
            V = self.triple(tid)
            E, F, G = V[s], V[(s + 1) % 3], V[(s + 2) % 3]
            sig = [self.coords.sigma(leaf, a if own == "left" else n - a) for a in range(1, n)]
            opposite = self.coords.tau_at(nt, (ns + 1) % 3)
            G2 = extend_across_leaf(E, F, G, opposite, sig)
            W = [None] * 3
            W[(ns + 1) % 3], W[ns], W[(ns + 2) % 3] = E, F, G2
            X = map_triple(self.triple(nt), W)
            for k in range(3):
                if not self.triple(nt)[k].transform(X).same_as(W[k]):
                    raise RealizationFailed(f"leaf transform {tid}:{s} does not match flags")
            self.leaf_transforms[key] = X
        return self.leaf_transforms[key]

    def fan_monodromy(self, tid, c, clockwise):
        m = Matrix.identity(self.n)
        for (t, _), _, _, s in self.lam.corner_cycle(tid, c, clockwise):
            m = m @ self.leaf_transform(t, s)
        return m

    def arc_transform(self, cid):
        if cid not in self.arc_transforms:
            lam = self.lam
            arc = lam.arc_of(cid)
            (tl, cl), (tr, cr) = arc.left, arc.right
            right = SpiralSide(self.fan_monodromy(tr, cr, True), self.triple(tr)[cr],
                               1 if lam.spin((cid, "right")) == "cw" else -1,
                               self.triple(tr)[lam.far_corner(tr, cr)])
            left = SpiralSide(self.fan_monodromy(tl, cl, False), self.triple(tl)[cl],
                              1 if lam.spin((cid, "left")) == "ccw" else -1,
                              self.triple(tl)[lam.far_corner(tl, cl)])
            lengths = [side_length_product(self.coords, lam, cid, "right", a) for a in range(1, self.n)]
            sig = self.coords.sigmas(cid)
            self.arc_transforms[cid] = glue_across_closed_leaf(left, right, lengths, sig)
        return self.arc_transforms[cid]

    def walk(self, start, steps):
        """Product of elementary transforms along a dual-graph path."""
        m = Matrix.identity(self.n)
        tid = start
        for step in steps:
            if "side" in step:
                s = int(step["side"])
                m = m @ self.leaf_transform(tid, s)
                tid = self.lam.neighbor(tid, s)[1]
            else:
                cid = step["arc"]
                arc = self.lam.arc_of(cid)
                if step["from"] == "left":
                    if tid != arc.left[0]:
                        raise RelatorViolation(f"arc step {cid} taken from the wrong triangle")
                    m = m @ self.arc_transform(cid)
                    tid = arc.right[0]
                else:
                    if tid != arc.right[0]:
                        raise RelatorViolation(f"arc step {cid} taken from the wrong triangle")
                    m = m @ inverse(self.arc_transform(cid))
                    tid = arc.left[0]
        return m, tid


def _line_triple(coords):
    one = mpq(1) if coords.is_exact else to_float(1)
    E = Flag.from_columns([(one, 0 * one), (0 * one, one)])
    F = Flag.from_columns([(0 * one, one), (one, 0 * one)])
    G = Flag.from_columns([(one, one), (one, 0 * one)])
    return E, F, G


def is_scalar_matrix(m, exact_mode=None):
    n = m.nrows
    if exact_mode is None:
        exact_mode = m.is_exact
    lead = m.rows[0][0]
    if lead == 0:
        return False
    for i in range(n):
        for j in range(n):
            want = lead if i == j else 0
            x = m.rows[i][j]
            if exact_mode:
                if x != want:
                    return False
            elif abs(x - want) > default_tolerance() * abs(lead):
                return False
    return True


def _positive_det_representative(m):
    n = m.nrows
    d = det(m)
    if d < 0:
        if n % 2 == 0:
            raise RealizationFailed("holonomy has negative determinant in even dimension")
        return -m
    return m


def reconstruct(coords, lam, atlas, precision=None):
    """Representation whose coordinates are ``coords``, normalized so the
    base triangle carries its canonical flag triple."""
    require_valid(lam)
    report = check_membership(coords, lam)
    if not report.passed:
        raise MembershipFailed("coordinates are not in the polytope", violations=report.violations)
    builder = _Builder(coords, lam)
    base = atlas.base_triangle
    gens = {}
    for g in atlas.generators:
        m, end = builder.walk(base, atlas.edge_paths[g])
        if end != base:
            raise RelatorViolation(f"edge path of {g} does not return to the base triangle")
        gens[g] = _positive_det_representative(m)
    projective = Representation(coords.n, gens, check_det=False)
    if not is_scalar_matrix(eval_word(projective, atlas.relator)):
        raise RelatorViolation("surface relator is not the identity in the projective group")
    lifted = {g: lift_to_sl(m, precision) for g, m in gens.items()}
    representation = Representation(coords.n, lifted)
    rel = eval_word(representation, atlas.relator)
    if not is_scalar_matrix(rel) or not _close(abs(rel.rows[0][0]), 1, rel.is_exact):
        raise RelatorViolation("surface relator is not plus or minus the identity")
    return Reconstruction(projective, representation, builder.triples,
                          builder.leaf_transforms, builder.arc_transforms)
