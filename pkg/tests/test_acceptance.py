"""Acceptance criteria 1-8. Each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed to the
terminal even when output is captured) or ``python tests/test_acceptance.py``.
"""

import json
import sys
import time

import pytest
from gmpy2 import mpfr, mpq

from hitchin_coords import fixtures
from hitchin_coords.atlas import LiftAtlas
from hitchin_coords.cli import main as cli_main
from hitchin_coords.errors import (EigenvalueMismatch, MembershipFailed, MixedSigns,
                                   NotLoxodromic, RelatorViolation)
from hitchin_coords.flags import double_ratio, is_generic, is_positive, osculating_flag, triple_indices
from hitchin_coords.identities import run_identities
from hitchin_coords.invariants import full_coordinates, lengths
from hitchin_coords.polytope import (affine_dimension, global_relation_residual, sample_interior,
                                     side_length_product)
from hitchin_coords.representation import (Representation, eval_word, positive_eigendata,
                                           sl2_symmetric_lift)
from hitchin_coords.scalars import Matrix, det, working_precision
from hitchin_coords.synthesis import (SpiralSide, glue_across_closed_leaf, is_scalar_matrix,
                                      reconstruct)

# pinned tolerances and budgets
PRECISION_BITS = 256
FLOAT_TOLERANCE = mpfr(2) ** -128          # criteria 4 and 7 where floats intervene
IDENTITY_TOLERANCE = 0                      # criterion 1: exact equality
IDENTITY_TRIALS = 100
IDENTITY_SECONDS = 60
ROUNDTRIP_SAMPLES = 10
ROUNDTRIP_SECONDS_PER_FIXTURE = 300
RELATION_SAMPLES = 20

_capture = None


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


@pytest.fixture(autouse=True)
def _terminal(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


# ---------------------------------------------------------------- 1

def test_criterion_1_identity_suite():
    start = time.perf_counter()
    counts = {}
    ok = True
    for n in (3, 4, 5):
        r = run_identities(n, IDENTITY_TRIALS, seed=n)
        counts[n] = (r["checked"], r["skipped_degenerate"])
        ok &= r["pass"] and r["checked"] >= IDENTITY_TRIALS
        ok &= all(c["failed"] == IDENTITY_TOLERANCE for c in r["identities"].values())
    elapsed = time.perf_counter() - start
    ok &= elapsed < IDENTITY_SECONDS
    report(1, ok, f"exact identities, checked/skipped per n {counts}, {elapsed:.1f}s "
                  f"(budget {IDENTITY_SECONDS}s)")


# ---------------------------------------------------------------- 2

def test_criterion_2_fuchsian_eigenvalue_pattern():
    ok = True
    for n in range(2, 9):
        m = sl2_symmetric_lift(Matrix.diagonal([mpq(2), mpq(1, 2)]), n)
        data = positive_eigendata(m)
        ok &= list(data.eigenvalues) == [mpq(2) ** (n - 2 * k + 1) for k in range(1, n + 1)]
        rep = Representation(n, {"a": m})
        ok &= lengths(rep, "a") == [4] * (n - 1)
    report(2, ok, "eigenvalues 2^(n-2k+1) and exp length 4, n = 2..8, exact")


# ---------------------------------------------------------------- 3

def _brute_det(cols):
    """Leibniz-formula determinant, independent of the library kernel."""
    from itertools import permutations
    n = len(cols)
    total = mpq(0)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = mpq(sign)
        for j, i in enumerate(perm):
            term *= cols[j][i]
        total += term
    return total


def _brute_triple(E, F, G, a, b, c):
    def w(i, j, k):
        return _brute_det(E.columns(i) + F.columns(j) + G.columns(k))
    return (w(a + 1, b, c - 1) * w(a, b - 1, c + 1) * w(a - 1, b + 1, c)
            / (w(a - 1, b, c + 1) * w(a, b + 1, c - 1) * w(a + 1, b - 1, c)))


def _brute_double(E, F, G, G2, a):
    n = E.n
    m = n - a

    def w(i, j, third, k):
        return _brute_det(E.columns(i) + F.columns(j) + third.columns(k))
    return -(w(a, m - 1, G, 1) * w(a - 1, m, G2, 1)) / (w(a, m - 1, G2, 1) * w(a - 1, m, G, 1))


def test_criterion_3_moment_curve_oracle():
    ts = [mpq(-2), mpq(-1, 3), mpq(1, 2), mpq(3), mpq(5)]
    ok = True
    checked = 0
    for n in (3, 4):
        flags = {t: osculating_flag(t, n) for t in ts}
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                for k in range(j + 1, len(ts)):
                    E, F, G = flags[ts[i]], flags[ts[j]], flags[ts[k]]
                    for idx in triple_indices(n):
                        ok &= _brute_triple(E, F, G, *idx) == 1
                        checked += 1
                    ok &= is_positive([E, F, G])
        # increasing t1 < t2 < t3 < t4 give the positive quadruple (t1, t3, t2, t4):
        # G and G' lie on opposite sides of the arc from E to F
        for q in [(0, 1, 2, 3), (0, 1, 3, 4), (1, 2, 3, 4), (0, 2, 3, 4)]:
            t1, t2, t3, t4 = (ts[x] for x in q)
            E, F, G, G2 = flags[t1], flags[t3], flags[t2], flags[t4]
            ok &= is_generic([E, F, G, G2])
            ok &= all(_brute_double(E, F, G, G2, a) > 0 for a in range(1, n))
            ok &= all(double_ratio(E, F, G, G2, a) == _brute_double(E, F, G, G2, a)
                      for a in range(1, n))
            ok &= is_positive([E, F, G, G2])
    report(3, ok, f"moment curve: {checked} triple ratios = 1 by Leibniz determinants; "
                  "quadruples positive, n = 3, 4, exact")


# ---------------------------------------------------------------- 4

def test_criterion_4_lengths_from_spiral_products():
    ok = True
    worst_float = mpfr(0)
    cases = 0
    for name in fixtures.NAMES:
        lam, atlas = fixtures.load(name)
        for n in (2, 3, 4):
            rep = fixtures.fuchsian(name, n)
            coords = full_coordinates(rep, lam, atlas)
            for c, word in atlas.closed_words.items():
                eig = positive_eigendata(eval_word(rep, word)).length_ratios()
                for a in range(1, n):
                    for side in ("left", "right"):
                        ok &= side_length_product(coords, lam, c, side, a) == eig[a - 1]
                        cases += 1
            with working_precision(PRECISION_BITS):
                frep = Representation(n, {g: m.to_float() for g, m in rep.generators.items()})
                fcoords = full_coordinates(frep, lam, atlas, precision=PRECISION_BITS)
                for c, word in atlas.closed_words.items():
                    for a in range(1, n):
                        for side in ("left", "right"):
                            exact_value = coords.length_exp[(c, a)]
                            dev = abs(side_length_product(fcoords, lam, c, side, a)
                                      - fcoords.length_exp[(c, a)]) / exact_value
                            worst_float = max(worst_float, dev)
    ok &= worst_float <= FLOAT_TOLERANCE
    report(4, ok, f"{cases} exact side products = eigenvalue ratios; float route at "
                  f"{PRECISION_BITS} bits max deviation {float(worst_float):.2e} "
                  f"(tolerance 2^-128)")


# ---------------------------------------------------------------- 5

def test_criterion_5_dimension():
    got = {(name, n): affine_dimension(fixtures.lamination(name), n)
           for name in fixtures.NAMES for n in (2, 3, 4)}
    ok = all(got[(name, n)] == {2: 6, 3: 16, 4: 30}[n] for name, n in got)
    report(5, ok, f"affine dimensions {sorted(set(got.values()))} by exact rank")


# ---------------------------------------------------------------- 6

def test_criterion_6_global_relations():
    ok = True
    samples = 0
    for name in fixtures.NAMES:
        lam, atlas = fixtures.load(name)
        for n in (3, 4, 5):
            coords = full_coordinates(fixtures.fuchsian(name, n), lam, atlas)
            ok &= set(global_relation_residual(coords).values()) == {1}
            for seed in range(RELATION_SAMPLES):
                s = sample_interior(lam, n, seed)
                ok &= set(global_relation_residual(s).values()) == {1}
                samples += 1
    report(6, ok, f"residual exactly 1 on Fuchsian coordinates and {samples} samples, n = 3, 4, 5")


# ---------------------------------------------------------------- 7

def _deviation(a, b):
    left, right = a.comparable_items(), b.comparable_items()
    if set(left) != set(right):
        return None
    return max(abs(right[k] - x) / x for k, x in left.items())


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_criterion_7_round_trip(name):
    lam, atlas = fixtures.load(name)
    start = time.perf_counter()
    ok = True
    exact_devs = []
    float_dev = mpfr(0)
    relator_dev = mpfr(0)
    for n in (2, 3):
        for seed in range(ROUNDTRIP_SAMPLES):
            coords = sample_interior(lam, n, seed)
            with working_precision(PRECISION_BITS):
                result = reconstruct(coords, lam, atlas, precision=PRECISION_BITS)
                proj = result.projective
                ok &= is_scalar_matrix(eval_word(proj, atlas.relator), exact_mode=True)
                exact_devs.append(_deviation(coords, full_coordinates(proj, lam, atlas)))
                sl = result.representation
                rel = eval_word(sl, atlas.relator)
                sign = 1 if rel.rows[0][0] > 0 else -1
                relator_dev = max(relator_dev, (rel - Matrix.identity(n) * sign).max_abs())
                again = full_coordinates(sl, lam, atlas, precision=PRECISION_BITS)
                dev = _deviation(coords, again)
                ok &= dev is not None
                float_dev = max(float_dev, dev if dev is not None else mpfr(1))
                ok &= all(det(m) == 1 if m.is_exact else abs(det(m) - 1) <= FLOAT_TOLERANCE
                          for m in sl.generators.values())
    elapsed = time.perf_counter() - start
    ok &= all(d == 0 for d in exact_devs)
    ok &= float_dev <= FLOAT_TOLERANCE and relator_dev <= FLOAT_TOLERANCE
    ok &= elapsed < ROUNDTRIP_SECONDS_PER_FIXTURE
    report(7, ok, f"{name}: {len(exact_devs)} samples n = 2, 3; exact deviation "
                  f"{max(exact_devs)}; SL lift deviation {float(float_dev):.2e}, relator "
                  f"{float(relator_dev):.2e} (tolerance 2^-128); {elapsed:.1f}s")


# ---------------------------------------------------------------- 8

def _cli(argv, capsys):
    code = cli_main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_criterion_8_error_paths(tmp_path, capsys):
    outcomes = {}
    lam, atlas = fixtures.load("single_leaf")
    ident = Matrix.identity(2)
    rot = Matrix([[mpq(3, 5), mpq(-4, 5)], [mpq(4, 5), mpq(3, 5)]])
    rep = Representation(2, {"d2": ident, "d3": ident, "e12": ident, "e23": rot})
    try:
        full_coordinates(rep, lam, atlas)
        outcomes["non-loxodromic"] = False
    except NotLoxodromic:
        outcomes["non-loxodromic"] = True
    path = tmp_path / "rot.json"
    path.write_text(json.dumps(rep.to_json()))
    code, out = _cli(["invariants", str(path), "--fixture", "single_leaf"], capsys)
    outcomes["non-loxodromic exit 2"] = code == 2 and out["error"] == "NotLoxodromic"

    ident3 = Matrix.identity(3)
    mixed = Matrix.diagonal([mpq(2), mpq(3), mpq(-1, 6)])
    rep = Representation(3, {"d2": ident3, "d3": ident3, "e12": ident3, "e23": mixed})
    try:
        full_coordinates(rep, lam, atlas)
        outcomes["mixed signs"] = False
    except MixedSigns:
        outcomes["mixed signs"] = True
    path = tmp_path / "mixed.json"
    path.write_text(json.dumps(rep.to_json()))
    code, out = _cli(["invariants", str(path), "--fixture", "single_leaf"], capsys)
    outcomes["mixed signs exit 2"] = code == 2 and out["error"] == "MixedSigns"

    plam, patlas = fixtures.load("pants")
    coords = sample_interior(plam, 3, 1)
    coords.shear_exp[("g4", 1)] *= 7
    try:
        reconstruct(coords, plam, patlas)
        outcomes["equality violated"] = False
    except MembershipFailed:
        outcomes["equality violated"] = True
    left = SpiralSide(Matrix.diagonal([mpq(4), mpq(2), mpq(1)]), fixtures_flag(3), 1,
                      osculating_flag(1, 3))
    right = SpiralSide(Matrix.diagonal([mpq(9), mpq(3), mpq(1)]), fixtures_flag(3), 1,
                       osculating_flag(-1, 3))
    try:
        glue_across_closed_leaf(left, right, [mpq(2), mpq(2)], [mpq(1), mpq(1)])
        outcomes["eigenvalue mismatch"] = False
    except EigenvalueMismatch:
        outcomes["eigenvalue mismatch"] = True
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(coords.to_json()))
    code, out = _cli(["reconstruct", str(path), "--fixture", "pants"], capsys)
    outcomes["equality violated exit 2"] = code == 2 and out["error"] == "MembershipFailed"

    data = patlas.to_json()
    data["edge_paths"]["g4"] = data["edge_paths"]["g4"][::-1]
    try:
        reconstruct(sample_interior(plam, 3, 1), plam, LiftAtlas.from_json(data))
        outcomes["scrambled atlas"] = False
    except RelatorViolation:
        outcomes["scrambled atlas"] = True
    path = tmp_path / "scrambled.json"
    path.write_text(json.dumps(data))
    lam_path = tmp_path / "lam.json"
    lam_path.write_text(json.dumps(plam.to_json()))
    code, out = _cli(["roundtrip", str(lam_path), str(path), "--n", "3", "--seed", "7"], capsys)
    outcomes["scrambled atlas exit 3"] = code == 3 and out["error"] == "RelatorViolation"

    path = tmp_path / "trunc.json"
    path.write_text(json.dumps(fixtures.fuchsian("pants").to_json())[:50])
    code, out = _cli(["invariants", str(path), "--fixture", "pants"], capsys)
    outcomes["truncated JSON exit 1"] = code == 1

    failed = [k for k, v in outcomes.items() if not v]
    report(8, not failed, f"{len(outcomes) - len(failed)}/{len(outcomes)} error paths "
                          f"raise their designated error and exit code"
                          + (f"; failing: {failed}" if failed else ""))


def fixtures_flag(n):
    from hitchin_coords.flags import standard_flag
    return standard_flag(n)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
