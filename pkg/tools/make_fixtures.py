"""Regenerate the bundled genus-2 fixtures.

Each lamination is written from a compact description (clockwise vertex
punctures, side leaves, leaf orientations, spiral directions, arcs); the
lift atlas is derived from it, and the Fuchsian representation is obtained
by reconstructing from rational shear coordinates whose exponentials are
squares, so that the holonomies land in SL(2, Q).

Usage: python tools/make_fixtures.py
"""

import json
import pathlib
import sys
from fractions import Fraction

from gmpy2 import mpq

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from hitchin_coords.atlas import build_atlas  # noqa: E402
from hitchin_coords.invariants import full_coordinates  # noqa: E402
from hitchin_coords.lamination import LaminationComplex, spiral_items, validate  # noqa: E402
from hitchin_coords.polytope import sample_interior  # noqa: E402
from hitchin_coords.representation import eval_word  # noqa: E402
from hitchin_coords.scalars import det  # noqa: E402
from hitchin_coords.synthesis import _Builder, is_scalar_matrix, reconstruct  # noqa: E402

DATA = ROOT / "src" / "hitchin_coords" / "data"
SEED_SEARCH = range(40)


def compact_lamination(name, triangles, punctures, directions, left_slot, arcs, closed):
    """Expand a compact description into lamination JSON.

    triangles: id -> (three vertex labels clockwise, three side leaf ids)
    punctures: vertex label -> (closed leaf, side)
    directions: (closed leaf, side) -> "with" | "against"
    left_slot: leaf -> (triangle, side index) lying on the leaf's left
    arcs: closed leaf -> (arc id, left corner, right corner)
    """
    def spike(label):
        cid, side = punctures[label]
        return {"closed_leaf": cid, "side": side, "direction": directions[(cid, side)]}

    tri_json = []
    leaf_ends = {}
    for tid, (verts, sides) in triangles.items():
        side_json = []
        for s, leaf in enumerate(sides):
            on_left = left_slot[leaf] == (tid, s)
            side_json.append({"leaf": leaf, "side": "left" if on_left else "right"})
            if on_left:
                leaf_ends[leaf] = (spike(verts[s]), spike(verts[(s + 1) % 3]))
        tri_json.append({"id": tid, "sides": side_json, "vertices": [spike(v) for v in verts]})
    leaves = [{"id": g, "plus": leaf_ends[g][0], "minus": leaf_ends[g][1]} for g in sorted(leaf_ends)]
    data = {
        "id": name,
        "genus": 2,
        "closed_leaves": [{"id": c, "arc": arcs[c][0]} for c in closed],
        "arcs": [{"id": arcs[c][0], "closed_leaf": c,
                  "left": {"triangle": arcs[c][1][0], "vertex": arcs[c][1][1]},
                  "right": {"triangle": arcs[c][2][0], "vertex": arcs[c][2][1]}} for c in closed],
        "infinite_leaves": leaves,
        "triangles": tri_json,
    }
    lam = LaminationComplex.from_json(data)
    orders = {}
    for c in closed:
        for side in ("left", "right"):
            items = spiral_items(lam, c, side)
            orders[f"{c}/{side}"] = [
                {"triangle": i[1], "vertex": i[2]} if i[0] == "spike" else {"leaf": i[1], "end": i[2]}
                for i in items]
    data["spiral_orders"] = orders
    return data


def pants_lamination():
    # two pairs of pants, each the double of an ideal triangle
    triangles = {
        "T1": (("p0", "p1", "p2"), ("g1", "g2", "g3")),
        "T2": (("p0", "p2", "p1"), ("g3", "g2", "g1")),
        "T3": (("q0", "q1", "q2"), ("g4", "g5", "g6")),
        "T4": (("q0", "q2", "q1"), ("g6", "g5", "g4")),
    }
    punctures = {"p0": ("c1", "right"), "p1": ("c2", "right"), "p2": ("c3", "right"),
                 "q0": ("c1", "left"), "q1": ("c2", "left"), "q2": ("c3", "left")}
    directions = {("c1", "right"): "with", ("c1", "left"): "with",
                  ("c2", "right"): "against", ("c2", "left"): "against",
                  ("c3", "right"): "with", ("c3", "left"): "against"}
    left_slot = {"g1": ("T1", 0), "g2": ("T2", 1), "g3": ("T1", 2),
                 "g4": ("T4", 2), "g5": ("T3", 1), "g6": ("T3", 2)}
    arcs = {"c1": ("k1", ("T3", 0), ("T1", 0)),
            "c2": ("k2", ("T4", 2), ("T2", 2)),
            "c3": ("k3", ("T3", 2), ("T2", 1))}
    return compact_lamination("genus2-pants", triangles, punctures, directions, left_slot,
                              arcs, ["c1", "c2", "c3"])


def single_leaf_lamination():
    # hexagon with opposite sides identified (a torus), zigzag triangulated;
    # its two vertex classes are the two sides of one nonseparating closed leaf
    triangles = {
        "A": (("h0", "h2", "h1"), ("d1", "e12", "e01")),
        "B": (("h0", "h5", "h2"), ("e23", "d2", "d1")),
        "C": (("h2", "h5", "h3"), ("d2", "d3", "e23")),
        "D": (("h3", "h5", "h4"), ("d3", "e12", "e01")),
    }
    punctures = {h: ("c1", "right") for h in ("h0", "h2", "h4")}
    punctures.update({h: ("c1", "left") for h in ("h1", "h3", "h5")})
    directions = {("c1", "right"): "with", ("c1", "left"): "against"}
    left_slot = {"d1": ("A", 0), "d2": ("C", 0), "d3": ("D", 0),
                 "e01": ("A", 2), "e12": ("D", 1), "e23": ("B", 0)}
    arcs = {"c1": ("k1", ("C", 2), ("A", 0))}
    return compact_lamination("genus2-single-leaf", triangles, punctures, directions, left_slot,
                              arcs, ["c1"])


def fuchsian(lam, atlas, seed):
    """SL(2, Q) representation from n = 2 shear coordinates.

    Infinite-leaf shears and lengths are rational squares (sampled with
    power 2), which makes every leaf transform have square determinant. Each
    closed-leaf shear is then chosen in the square class of the arc
    transform's determinant, which makes the holonomies have square
    determinant too, so they lift exactly to SL(2, Q).
    """
    coords = sample_interior(lam, 2, seed, power=2)
    for c in lam.closed_ids:
        coords.shear_exp[(c, 1)] = mpq(1)
        d = abs(det(_Builder(coords, lam).arc_transform(c)))
        approx = max(Fraction(1 / float(d) ** 0.5).limit_denominator(12), Fraction(1, 12))
        q = mpq(approx.numerator, approx.denominator)
        coords.shear_exp[(c, 1)] = d * q * q
    result = reconstruct(coords, lam, atlas)
    rep = result.representation
    if not rep.is_exact:
        raise SystemExit("fuchsian representation is not exact")
    for m in rep.generators.values():
        if det(m) != 1:
            raise SystemExit("generator not in SL(2)")
    if not is_scalar_matrix(eval_word(rep, atlas.relator)):
        raise SystemExit("relator fails")
    recomputed = full_coordinates(rep, lam, atlas)
    a, b = coords.comparable_items(), recomputed.comparable_items()
    if any(a[k] != b[k] for k in a):
        raise SystemExit("round trip fails on the fuchsian fixture")
    return rep, coords


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    for stem, data in (("pants", pants_lamination()), ("single_leaf", single_leaf_lamination())):
        lam = LaminationComplex.from_json(data)
        report = validate(lam)
        if not report.valid:
            raise SystemExit(f"{stem}: {report.violations}")
        atlas = build_atlas(lam)
        (DATA / f"{stem}_lamination.json").write_text(json.dumps(data, indent=1) + "\n")
        (DATA / f"{stem}_atlas.json").write_text(json.dumps(atlas.to_json(), indent=1) + "\n")
        print(stem, report.to_json()["k"], "generators", atlas.generators)
        print("  relator", atlas.to_json()["relator"])
        # the seed giving the shortest matrix entries, for readable fixtures
        seed = min(SEED_SEARCH, key=lambda k: len(json.dumps(fuchsian(lam, atlas, k)[0].to_json())))
        rep, coords = fuchsian(lam, atlas, seed)
        out = {"description": "Fuchsian representation (SL(2, Q)) reconstructed from the "
                              "recorded n = 2 coordinates; lift with the symmetric power "
                              "for higher n",
               "seed": seed,
               "representation": rep.to_json(),
               "coordinates": coords.to_json()}
        (DATA / f"{stem}_fuchsian.json").write_text(json.dumps(out, indent=1) + "\n")
        print("  fuchsian", {k: v.to_json() for k, v in rep.generators.items()})


if __name__ == "__main__":
    main()
