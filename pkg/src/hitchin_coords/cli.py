"""Command line front end. Every verb prints one JSON document.

Exit codes: 0 success, 1 malformed input, 2 failed mathematical
precondition, 3 inconsistent reconstruction, 4 violated identity.
"""

import argparse
import json
import sys

from . import fixtures
from .atlas import LiftAtlas
from .coords import CoordinateVector
from .errors import HitchinError, InputError, RelatorViolation
from .identities import run_identities
from .invariants import full_coordinates
from .lamination import LaminationComplex, require_valid, validate
from .polytope import affine_dimension, check_membership, global_relation_residual, sample_interior
from .representation import Representation, eval_word
from .scalars import default_tolerance, format_scalar, is_exact, to_float, working_precision
from .synthesis import is_scalar_matrix, reconstruct


class ParseError(InputError):
    pass


# ---------------------------------------------------------------- loading

def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err.strerror}") from err
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: invalid JSON ({err.msg} at line {err.lineno})") from err


def _lamination(args):
    if args.lamination:
        return LaminationComplex.from_json(_read_json(args.lamination))
    if args.fixture:
        return fixtures.lamination(args.fixture)
    raise InputError("a lamination file or --fixture is required")


def _atlas(args):
    if getattr(args, "atlas", None):
        return LiftAtlas.from_json(_read_json(args.atlas))
    if args.fixture:
        return fixtures.atlas(args.fixture)
    raise InputError("an atlas file or --fixture is required")


def _exact_flag(args):
    return bool(getattr(args, "exact", False))


def _coords(args):
    return CoordinateVector.from_json(_read_json(args.coords), _exact_flag(args))


def _representation(args):
    if args.rep:
        return Representation.from_json(_read_json(args.rep), _exact_flag(args))
    if args.fixture:
        return fixtures.fuchsian(args.fixture, args.n or 2)
    raise InputError("a representation file or --fixture is required")


def _tolerance(args):
    if args.tolerance is not None:
        return to_float(2) ** (-args.tolerance)
    return default_tolerance()


# ---------------------------------------------------------------- verbs

def cmd_validate_lamination(args):
    lam = _lamination(args)
    report = validate(lam).to_json()
    return report, 0 if report["valid"] else 1


def cmd_invariants(args):
    rep = _representation(args)
    lam = _lamination(args)
    atlas = _atlas(args)
    coords = full_coordinates(rep, lam, atlas, precision=args.precision)
    return coords.to_json(with_logs=args.logs, precision=args.precision), 0


def cmd_check_polytope(args):
    lam = _lamination(args)
    coords = _coords(args)
    require_valid(lam)
    report = check_membership(coords, lam)
    return report.to_json(affine_dimension(lam, coords.n)), 0 if report.passed else 2


def cmd_sample(args):
    lam = _lamination(args)
    coords = sample_interior(lam, args.n or 3, args.seed)
    return coords.to_json(), 0


def cmd_reconstruct(args):
    lam = _lamination(args)
    atlas = _atlas(args)
    coords = _coords(args)
    result = reconstruct(coords, lam, atlas, precision=args.precision)
    rep = result.projective if args.projective else result.representation
    out = rep.to_json()
    out["exact"] = rep.is_exact
    out["class"] = "projective" if args.projective else "special_linear"
    return out, 0


def _max_deviation(a, b):
    """Largest relative componentwise deviation; exact zero when all agree."""
    left, right = a.comparable_items(), b.comparable_items()
    if set(left) != set(right):
        raise InputError("coordinate vectors have different entries")
    worst = 0
    for key, x in left.items():
        y = right[key]
        if is_exact(x) and is_exact(y):
            dev = abs(x - y) / x
        else:
            dev = abs(to_float(x) - to_float(y)) / abs(to_float(x))
        if dev > worst:
            worst = dev
    return worst


def cmd_roundtrip(args):
    lam = _lamination(args)
    atlas = _atlas(args)
    n = args.n or 3
    trials = max(1, args.trials or 1)
    rows = []
    worst = 0
    tol = _tolerance(args)
    for k in range(trials):
        seed = args.seed + k
        coords = sample_interior(lam, n, seed)
        result = reconstruct(coords, lam, atlas, precision=args.precision)
        rep = result.representation if args.special_linear else result.projective
        relator = eval_word(rep, atlas.relator)
        if not is_scalar_matrix(relator):
            raise RelatorViolation("relator is not scalar after reconstruction")
        again = full_coordinates(rep, lam, atlas, precision=args.precision)
        dev = _max_deviation(coords, again)
        worst = max(worst, dev)
        rows.append({"seed": seed, "deviation": format_scalar(dev), "exact": rep.is_exact})
    ok = worst == 0 or worst <= tol
    report = {"lamination": lam.id, "n": n, "samples": rows,
              "max_deviation": format_scalar(worst), "tolerance": format_scalar(tol),
              "representation": "special_linear" if args.special_linear else "projective",
              "pass": ok}
    return report, 0 if ok else 3


def cmd_identities(args):
    report = run_identities(args.n or 3, args.trials if args.trials is not None else 100,
                            args.seed, inject_degenerate=args.inject_degenerate)
    if report.get("failures"):
        return report, 4
    return report, 0


def cmd_relations(args):
    coords = _coords(args)
    residuals = global_relation_residual(coords)
    tol = _tolerance(args)
    ok = all(r == 1 if is_exact(r) else abs(r - 1) <= tol for r in residuals.values())
    return {"n": coords.n, "residuals": {str(a): format_scalar(r) for a, r in residuals.items()},
            "pass": ok}, 0 if ok else 4


# ---------------------------------------------------------------- parser

def _common(p, lamination=True, atlas=False, coords=False, rep=False):
    if rep:
        p.add_argument("rep", nargs="?", help="representation JSON")
    if coords:
        p.add_argument("coords", help="coordinates JSON")
    if lamination:
        p.add_argument("lamination", nargs="?", help="lamination JSON")
    if atlas:
        p.add_argument("atlas", nargs="?", help="lift atlas JSON")
    p.add_argument("--fixture", choices=fixtures.NAMES,
                   help="use a bundled fixture for missing lamination/atlas/representation")


def build_parser():
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--precision", type=int, default=256, help="float precision in bits")
    options.add_argument("--exact", action="store_true", help="reject non-rational input scalars")
    options.add_argument("--seed", type=int, default=0)
    options.add_argument("--tolerance", type=int, default=None,
                         help="tolerance exponent k (float comparisons use 2^-k)")
    options.add_argument("--out", help="write the report here instead of stdout")
    options.add_argument("--n", type=int, default=None, help="dimension")
    options.add_argument("--trials", type=int, default=None)
    parser = argparse.ArgumentParser(prog="hitchin-coords", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[options])

    p = verb("validate-lamination", "structural checks of a lamination")
    _common(p)
    p.set_defaults(run=cmd_validate_lamination)

    p = verb("invariants", "coordinates of a representation")
    _common(p, atlas=True, rep=True)
    p.add_argument("--logs", action="store_true", help="also emit logarithms")
    p.set_defaults(run=cmd_invariants)

    p = verb("check-polytope", "membership report for a coordinate vector")
    _common(p, coords=True)
    p.set_defaults(run=cmd_check_polytope)

    p = verb("sample", "rational interior point of the polytope")
    _common(p)
    p.set_defaults(run=cmd_sample)

    p = verb("reconstruct", "representation from coordinates")
    _common(p, atlas=True, coords=True)
    p.add_argument("--projective", action="store_true",
                   help="emit the exact projective representatives instead of the SL lift")
    p.set_defaults(run=cmd_reconstruct)

    p = verb("roundtrip", "sample, reconstruct and recompute coordinates")
    _common(p, atlas=True)
    p.add_argument("--special-linear", action="store_true",
                   help="recompute from the determinant-one lift instead of the projective class")
    p.set_defaults(run=cmd_roundtrip)

    p = verb("identities", "randomized exact flag-ratio identities")
    p.add_argument("--inject-degenerate", type=int, default=0, metavar="K",
                   help="make every K-th draw degenerate")
    p.set_defaults(run=cmd_identities)

    p = verb("relations", "global triangle relation residuals")
    p.add_argument("coords", help="coordinates JSON")
    p.set_defaults(run=cmd_relations)
    return parser


def _emit(report, out):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    with working_precision(args.precision):
        try:
            report, code = args.run(args)
        except HitchinError as err:
            report, code = err.to_json(), err.exit_code
        except RecursionError as err:
            report, code = {"error": "InputError", "message": f"input too deep: {err}"}, 1
    _emit(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
