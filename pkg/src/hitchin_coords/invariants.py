"""Coordinates of a representation: triangle invariants, shears along
infinite and closed leaves, and lengths of closed leaves.

Every lifted ideal vertex is named by the atlas as an end of a lifted
closed leaf; its flag is the attracting or repelling eigenflag of the
holonomy of that closed leaf, moved by the holonomy of the prefix word.
"""

from .atlas import SITE_KEYS
from .coords import CoordinateVector
from .errors import (HitchinError, InputError, NotHitchinCompatible, NotPositive,
                     UnknownLeaf)
from .flags import all_triple_ratios, double_ratio
from .lamination import require_valid
from .polytope import check_membership
from .representation import eval_word, positive_eigendata


class FlagResolver:
    """Flags at annotated vertices, with eigendata cached per closed leaf."""

    def __init__(self, rep, atlas, precision=None):
        self.rep = rep
        self.atlas = atlas
        self.precision = precision
        self._eigen = {}
        self._flags = {}

    def eigendata(self, closed_leaf):
        if closed_leaf not in self._eigen:
            if closed_leaf not in self.atlas.closed_words:
                raise UnknownLeaf(f"atlas has no word for closed leaf {closed_leaf!r}")
            m = eval_word(self.rep, self.atlas.closed_words[closed_leaf])
            self._eigen[closed_leaf] = positive_eigendata(m, self.precision)
        return self._eigen[closed_leaf]

    def flag(self, annotation):
        if annotation not in self._flags:
            base = self.eigendata(annotation.closed_leaf).flag(annotation.end)
            self._flags[annotation] = base.transform(eval_word(self.rep, annotation.prefix))
        return self._flags[annotation]


def _lift(table, key, lift, what):
    if key not in table:
        raise UnknownLeaf(f"atlas has no {what} {key!r}")
    lifts = table[key]
    if not 0 <= lift < len(lifts):
        raise InputError(f"{what} {key!r} has no lift number {lift}")
    return lifts[lift]


def triangle_invariants(rep, lam, atlas, triangle, lift=0, resolver=None):
    """exp tau_abc(T, v) for every vertex v and index (a, b, c)."""
    resolver = resolver or FlagResolver(rep, atlas)
    flags = [resolver.flag(a) for a in _lift(atlas.triangles, triangle, lift, "triangle")]
    out = {}
    for v in range(3):
        values = all_triple_ratios(flags[v], flags[(v + 1) % 3], flags[(v + 2) % 3])
        if any(x <= 0 for x in values.values()):
            raise NotPositive(f"flag triple at triangle {triangle} is not positive", triangle=triangle)
        for idx, x in values.items():
            out[(v, idx)] = x
    return out


def _site_shears(resolver, site, name):
    x, y, z, zp = (resolver.flag(site[k]) for k in SITE_KEYS)
    n = x.n
    values = [double_ratio(x, y, z, zp, a) for a in range(1, n)]
    if any(v <= 0 for v in values):
        raise NotPositive(f"flag quadruple across {name} is not positive", leaf=name)
    return values


def shear_infinite(rep, lam, atlas, leaf, lift=0, resolver=None):
    """exp sigma_a(g) for a = 1..n-1."""
    if leaf not in lam.leaf_ids:
        raise UnknownLeaf(f"unknown infinite leaf {leaf!r}")
    resolver = resolver or FlagResolver(rep, atlas)
    return _site_shears(resolver, _lift(atlas.infinite_leaves, leaf, lift, "infinite leaf"), leaf)


def shear_closed(rep, lam, atlas, closed_leaf, lift=0, resolver=None):
    """exp sigma_a(c) for a = 1..n-1, measured with the transverse arc."""
    if closed_leaf not in lam.closed_ids:
        raise UnknownLeaf(f"unknown closed leaf {closed_leaf!r}")
    resolver = resolver or FlagResolver(rep, atlas)
    return _site_shears(resolver, _lift(atlas.closed_leaves, closed_leaf, lift, "closed leaf"),
                        closed_leaf)


def lengths(rep, word, precision=None):
    """exp ell_a = m_a / m_(a+1) for the holonomy of ``word``."""
    return positive_eigendata(eval_word(rep, word), precision).length_ratios()


def full_coordinates(rep, lam, atlas, lift=0, precision=None, check=True):
    """Assemble every coordinate; the result must lie in the polytope."""
    require_valid(lam)
    if rep.n < 2:
        raise InputError("dimension must be at least 2")
    resolver = FlagResolver(rep, atlas, precision)
    coords = CoordinateVector(rep.n, lam.id)
    for t in lam.triangle_ids:
        for (v, idx), x in triangle_invariants(rep, lam, atlas, t, lift, resolver).items():
            coords.triangle_exp[(t, v, idx)] = x
    for g in lam.leaf_ids:
        for a, x in enumerate(shear_infinite(rep, lam, atlas, g, lift, resolver), start=1):
            coords.shear_exp[(g, a)] = x
    for c in lam.closed_ids:
        for a, x in enumerate(shear_closed(rep, lam, atlas, c, lift, resolver), start=1):
            coords.shear_exp[(c, a)] = x
        for a, x in enumerate(resolver.eigendata(c).length_ratios(), start=1):
            coords.length_exp[(c, a)] = x
    if check:
        report = check_membership(coords, lam)
        if not report.passed:
            raise NotHitchinCompatible("coordinates of the representation violate the polytope",
                                       violations=report.violations)
    return coords


def site_errors(rep, lam, atlas):
    """Map site -> error for every site whose invariant cannot be computed."""
    resolver = FlagResolver(rep, atlas)
    out = {}
    jobs = ([("triangle", t, triangle_invariants) for t in lam.triangle_ids]
            + [("leaf", g, shear_infinite) for g in lam.leaf_ids]
            + [("closed", c, shear_closed) for c in lam.closed_ids])
    for kind, key, fn in jobs:
        try:
            fn(rep, lam, atlas, key, resolver=resolver)
        except HitchinError as err:
            out[f"{kind}:{key}"] = err
    return out
