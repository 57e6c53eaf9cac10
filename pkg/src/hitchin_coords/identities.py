"""Randomized exact checks of the flag-ratio identities.

Each trial draws four integer flags, a random invertible matrix and a random
change of basis representative. Draws that are not generic are skipped and
counted, never checked. Every identity is tested with exact equality.
"""

import random

from gmpy2 import mpq

from .errors import IdentityViolation
from .flags import (Flag, all_double_ratios, all_triple_ratios, double_ratio, is_generic,
                    quadruple_ratio, triple_ratio)
from .scalars import Matrix, det

CHECKS = (
    "triple_rotation",
    "triple_reversal",
    "quadruple_product",
    "quadruple_top_is_one",
    "quadruple_swap",
    "double_swap",
    "double_reversal",
    "pgl_invariance",
    "representative_invariance",
)


def _random_invertible(rng, n, lo=-9, hi=9):
    while True:
        m = Matrix([[mpq(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)])
        if det(m) != 0:
            return m


def random_flag(rng, n):
    return Flag(_random_invertible(rng, n))


def _rebase(rng, flag):
    """Same flag, different basis: rescale every column by a nonzero rational
    and add random multiples of earlier columns to later ones."""
    cols = [list(c) for c in flag.basis.columns()]
    out = []
    for j, col in enumerate(cols):
        scale = mpq(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))
        new = [scale * x for x in col]
        for k in range(j):
            coef = mpq(rng.randint(-2, 2))
            new = [x + coef * y for x, y in zip(new, cols[k])]
        out.append(tuple(new))
    return Flag.from_columns(out)


def _all_ratios(E, F, G, G2):
    n = E.n
    out = {("T",) + idx: v for idx, v in all_triple_ratios(E, F, G).items()}
    out.update({("Q", a): quadruple_ratio(E, F, G, a) for a in range(1, n)})
    out.update({("D", a): v for a, v in enumerate(all_double_ratios(E, F, G, G2), start=1)})
    return out


def _check_tuple(E, F, G, G2, M, rebased):
    """Failures (name, detail) for one generic quadruple."""
    n = E.n
    fails = {name: [] for name in CHECKS}
    T = all_triple_ratios(E, F, G)
    for (a, b, c), t in T.items():
        if triple_ratio(F, G, E, b, c, a) != t:
            fails["triple_rotation"].append((a, b, c))
        if triple_ratio(F, E, G, b, a, c) * t != 1:
            fails["triple_reversal"].append((a, b, c))
    for a in range(1, n):
        q = quadruple_ratio(E, F, G, a)
        prod = mpq(1)
        for b in range(1, n - a):
            prod *= T[(a, b, n - a - b)]
        if q != prod:
            fails["quadruple_product"].append(a)
        if quadruple_ratio(E, G, F, a) * q != 1:
            fails["quadruple_swap"].append(a)
    if quadruple_ratio(E, F, G, n - 1) != 1:
        fails["quadruple_top_is_one"].append(n - 1)
    D = all_double_ratios(E, F, G, G2)
    for a in range(1, n):
        if double_ratio(E, F, G2, G, a) * D[a - 1] != 1:
            fails["double_swap"].append(a)
        if double_ratio(F, E, G, G2, a) * D[n - a - 1] != 1:
            fails["double_reversal"].append(a)
    base = _all_ratios(E, F, G, G2)
    moved = _all_ratios(*(f.transform(M) for f in (E, F, G, G2)))
    fails["pgl_invariance"] = [k for k in base if moved[k] != base[k]]
    rebased_values = _all_ratios(*rebased)
    fails["representative_invariance"] = [k for k in base if rebased_values[k] != base[k]]
    return fails


def run_identities(n, trials, seed, inject_degenerate=0, max_draws=None):
    """Check ``trials`` generic draws at dimension ``n``.

    Non-generic draws are skipped, counted, and replaced by fresh ones. Every
    ``inject_degenerate``-th draw (when positive) reuses the first flag as
    the third, which is never generic.
    """
    rng = random.Random(seed)
    counts = {name: {"passed": 0, "failed": 0} for name in CHECKS}
    failures = []
    skipped = 0
    checked = 0
    draw = 0
    limit = max_draws if max_draws is not None else 50 * trials + 10
    while checked < trials and draw < limit:
        E, F, G, G2 = (random_flag(rng, n) for _ in range(4))
        if inject_degenerate and draw % inject_degenerate == 0:
            G = E
        draw += 1
        M = _random_invertible(rng, n)
        rebased = [_rebase(rng, f) for f in (E, F, G, G2)]
        if not is_generic([E, F, G, G2]):
            skipped += 1
            continue
        checked += 1
        for name, bad in _check_tuple(E, F, G, G2, M, rebased).items():
            if bad:
                counts[name]["failed"] += 1
                failures.append({"draw": draw - 1, "identity": name,
                                 "indices": [str(b) for b in bad]})
            else:
                counts[name]["passed"] += 1
    report = {"n": n, "trials": trials, "seed": seed, "checked": checked,
              "skipped_degenerate": skipped, "pass": not failures and checked == trials}
    if trials:
        report["identities"] = counts
    if failures:
        report["failures"] = failures
    return report


def require_identities(n, trials, seed, inject_degenerate=0):
    report = run_identities(n, trials, seed, inject_degenerate)
    if not report["pass"]:
        raise IdentityViolation(f"{len(report.get('failures', []))} identity failures at n={n}",
                                checked=report["checked"])
    return report
