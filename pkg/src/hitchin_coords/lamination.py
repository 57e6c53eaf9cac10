"""Combinatorial model of a maximal lamination with finitely many leaves.

Conventions fixed by the data format:

* Triangle vertices are listed clockwise. Side ``s`` of a triangle joins
  vertex ``s`` to vertex ``s + 1`` (indices mod 3).
* An infinite leaf has one triangle side on its left and one on its right.
  A triangle on the left of its side ``s`` has the leaf's positive end at
  vertex ``s``; a triangle on the right has it at vertex ``s + 1``.
* Each spike (vertex) spirals onto one side of one closed leaf, either in
  the direction of that leaf's orientation ("with") or against it.
* Around a spiralling side, the spikes are visited by repeatedly crossing
  one side of each triangle. Crossing side ``s`` at vertex ``s`` is the
  clockwise turn, crossing side ``s - 1`` the counterclockwise one. The
  forward turn (toward the spikes' common end) is clockwise exactly for
  right/with and left/against sides.
"""

from dataclasses import dataclass, field

from .errors import InputError, LaminationInvalid, UnknownLeaf

SIDES = ("left", "right")
DIRECTIONS = ("with", "against")


@dataclass(frozen=True)
class Spike:
    closed_leaf: str
    side: str
    direction: str

    @property
    def puncture(self):
        return (self.closed_leaf, self.side)

    def to_json(self):
        return {"closed_leaf": self.closed_leaf, "side": self.side, "direction": self.direction}


@dataclass(frozen=True)
class InfiniteLeaf:
    id: str
    plus: Spike
    minus: Spike


@dataclass(frozen=True)
class TriangleSide:
    leaf: str
    leaf_side: str


@dataclass(frozen=True)
class Triangle:
    id: str
    sides: tuple
    vertices: tuple


@dataclass(frozen=True)
class Arc:
    id: str
    closed_leaf: str
    left: tuple
    right: tuple


@dataclass(frozen=True)
class ClosedLeaf:
    id: str
    arc: str


def spin_of(side, direction):
    """Rotational sense of the forward turn around a spiralling side."""
    clockwise = (side == "right") == (direction == "with")
    return "cw" if clockwise else "ccw"


@dataclass
class LaminationComplex:
    id: str
    genus: int
    closed_leaves: list
    infinite_leaves: list
    triangles: list
    arcs: list
    spiral_orders: dict = field(default_factory=dict)

    # ------------------------------------------------------------ parsing

    @classmethod
    def from_json(cls, data):
        try:
            def spike(d):
                return Spike(str(d["closed_leaf"]), str(d["side"]), str(d["direction"]))

            closed = [ClosedLeaf(str(c["id"]), str(c["arc"])) for c in data["closed_leaves"]]
            leaves = [InfiniteLeaf(str(g["id"]), spike(g["plus"]), spike(g["minus"]))
                      for g in data["infinite_leaves"]]
            triangles = []
            for t in data["triangles"]:
                sides = tuple(TriangleSide(str(s["leaf"]), str(s["side"])) for s in t["sides"])
                verts = tuple(spike(v) for v in t["vertices"])
                triangles.append(Triangle(str(t["id"]), sides, verts))
            arcs = [Arc(str(a["id"]), str(a["closed_leaf"]),
                        (str(a["left"]["triangle"]), int(a["left"]["vertex"])),
                        (str(a["right"]["triangle"]), int(a["right"]["vertex"])))
                    for a in data["arcs"]]
            orders = {}
            for key, items in data.get("spiral_orders", {}).items():
                parsed = []
                for item in items:
                    if "leaf" in item:
                        parsed.append(("leaf", str(item["leaf"]), str(item["end"])))
                    else:
                        parsed.append(("spike", str(item["triangle"]), int(item["vertex"])))
                orders[str(key)] = parsed
            return cls(str(data["id"]), int(data["genus"]), closed, leaves, triangles, arcs, orders)
        except (KeyError, TypeError, ValueError) as err:
            raise InputError(f"malformed lamination: {err!r}") from err

    def to_json(self):
        def order_item(item):
            if item[0] == "leaf":
                return {"leaf": item[1], "end": item[2]}
            return {"triangle": item[1], "vertex": item[2]}

        return {
            "id": self.id,
            "genus": self.genus,
            "closed_leaves": [{"id": c.id, "arc": c.arc} for c in self.closed_leaves],
            "arcs": [{"id": a.id, "closed_leaf": a.closed_leaf,
                      "left": {"triangle": a.left[0], "vertex": a.left[1]},
                      "right": {"triangle": a.right[0], "vertex": a.right[1]}} for a in self.arcs],
            "infinite_leaves": [{"id": g.id, "plus": g.plus.to_json(), "minus": g.minus.to_json()}
                                for g in self.infinite_leaves],
            "triangles": [{"id": t.id,
                           "sides": [{"leaf": s.leaf, "side": s.leaf_side} for s in t.sides],
                           "vertices": [v.to_json() for v in t.vertices]} for t in self.triangles],
            "spiral_orders": {k: [order_item(i) for i in v] for k, v in sorted(self.spiral_orders.items())},
        }

    # ------------------------------------------------------------ lookups

    def triangle(self, tid):
        for t in self.triangles:
            if t.id == tid:
                return t
        raise InputError(f"unknown triangle {tid!r}")

    def leaf(self, gid):
        for g in self.infinite_leaves:
            if g.id == gid:
                return g
        raise UnknownLeaf(f"unknown infinite leaf {gid!r}")

    def closed_leaf(self, cid):
        for c in self.closed_leaves:
            if c.id == cid:
                return c
        raise UnknownLeaf(f"unknown closed leaf {cid!r}")

    def arc_of(self, cid):
        arc_id = self.closed_leaf(cid).arc
        for a in self.arcs:
            if a.id == arc_id:
                return a
        raise InputError(f"closed leaf {cid} references unknown arc {arc_id}")

    @property
    def closed_ids(self):
        return [c.id for c in self.closed_leaves]

    @property
    def leaf_ids(self):
        return [g.id for g in self.infinite_leaves]

    @property
    def triangle_ids(self):
        return [t.id for t in self.triangles]

    def spin(self, puncture):
        cid, side = puncture
        directions = {v.direction for t in self.triangles for v in t.vertices if v.puncture == puncture}
        if len(directions) != 1:
            raise InputError(f"side {cid}/{side} has no consistent spiral direction")
        return spin_of(side, directions.pop())

    def direction(self, puncture):
        for t in self.triangles:
            for v in t.vertices:
                if v.puncture == puncture:
                    return v.direction
        raise InputError(f"no spike spirals onto {puncture}")

    # ------------------------------------------------------------ gluing

    def slots(self):
        """leaf id -> {"left": (triangle, side index), "right": (...)}."""
        out = {g.id: {} for g in self.infinite_leaves}
        for t in self.triangles:
            for s, ts in enumerate(t.sides):
                if ts.leaf not in out:
                    raise InputError(f"triangle {t.id} references unknown leaf {ts.leaf}")
                if ts.leaf_side in out[ts.leaf]:
                    raise InputError(f"leaf {ts.leaf} has two triangles on its {ts.leaf_side}")
                out[ts.leaf][ts.leaf_side] = (t.id, s)
        return out

    def neighbor(self, tid, s):
        """Across side ``s`` of ``tid``: (leaf, neighbor triangle, neighbor side, own leaf side)."""
        ts = self.triangle(tid).sides[s]
        slot = self.slots()[ts.leaf]
        other = "right" if ts.leaf_side == "left" else "left"
        nt, ns = slot[other]
        return ts.leaf, nt, ns, ts.leaf_side

    def forward_side(self, tid, c):
        """Index of the side crossed when moving forward from corner ``c``."""
        spin = self.spin(self.triangle(tid).vertices[c].puncture)
        return c if spin == "cw" else (c - 1) % 3

    def turn(self, tid, c, clockwise):
        """Corner reached by crossing the clockwise (or counterclockwise) side
        at corner ``c``; returns (leaf, leaf side of the current triangle,
        side index crossed, next triangle, next corner)."""
        s = c if clockwise else (c - 1) % 3
        leaf, nt, ns, leaf_side = self.neighbor(tid, s)
        # vertex c is glued to the neighbor's vertex ns + 1 when s == c,
        # and to vertex ns when s == c - 1
        nc = (ns + 1) % 3 if clockwise else ns
        return leaf, leaf_side, s, nt, nc

    def corner_cycle(self, tid, c, clockwise):
        """Corners visited turning repeatedly in one sense, starting at (tid, c)."""
        out = []
        cur = (tid, c)
        for _ in range(3 * len(self.triangles) + 1):
            leaf, leaf_side, s, nt, nc = self.turn(cur[0], cur[1], clockwise)
            out.append((cur, leaf, leaf_side, s))
            cur = (nt, nc)
            if cur == (tid, c):
                return out
        raise InputError(f"corner cycle at {tid}:{c} does not close")

    def forward_cycle(self, tid, c):
        puncture = self.triangle(tid).vertices[c].puncture
        return self.corner_cycle(tid, c, self.spin(puncture) == "cw")

    def far_corner(self, tid, c):
        """Vertex of the triangle farthest from the closed leaf its corner ``c``
        spirals onto (used by the closed-leaf shear)."""
        spin = self.spin(self.triangle(tid).vertices[c].puncture)
        return (c + 1) % 3 if spin == "cw" else (c + 2) % 3

    def punctures(self):
        return [(c.id, side) for c in self.closed_leaves for side in SIDES]


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple
    s: int
    t: int
    u: int
    k: dict

    def to_json(self):
        return {"valid": self.valid, "violations": list(self.violations),
                "counts": {"s": self.s, "t": self.t, "u": self.u},
                "k": {f"{c}/{side}": v for (c, side), v in sorted(self.k.items())}}


def validate(lam):
    """Check every structural invariant; never raises on bad data."""
    v = []
    g = lam.genus
    s, t, u = len(lam.closed_leaves), len(lam.infinite_leaves), len(lam.triangles)
    if g < 2:
        v.append(f"genus {g} < 2")
    if u != 4 * (g - 1):
        v.append(f"count: {u} triangles, expected {4 * (g - 1)}")
    if t != 6 * (g - 1):
        v.append(f"count: {t} infinite leaves, expected {6 * (g - 1)}")
    if not 1 <= s <= 3 * (g - 1):
        v.append(f"count: {s} closed leaves, expected between 1 and {3 * (g - 1)}")
    ids = [x.id for x in lam.closed_leaves + lam.infinite_leaves + lam.triangles + lam.arcs]
    dup = {x for x in ids if ids.count(x) > 1}
    if dup:
        v.append(f"duplicate ids: {sorted(dup)}")
    closed = set(lam.closed_ids)
    for tri in lam.triangles:
        if len(tri.sides) != 3 or len(tri.vertices) != 3:
            v.append(f"triangle {tri.id} must have 3 sides and 3 vertices")
            return ValidationReport(False, tuple(v), s, t, u, {})
        for sp in tri.vertices:
            if sp.closed_leaf not in closed or sp.side not in SIDES or sp.direction not in DIRECTIONS:
                v.append(f"triangle {tri.id} has malformed spike {sp}")
    for leaf in lam.infinite_leaves:
        for sp in (leaf.plus, leaf.minus):
            if sp.closed_leaf not in closed or sp.side not in SIDES or sp.direction not in DIRECTIONS:
                v.append(f"leaf {leaf.id} has malformed end {sp}")
    # each leaf bounds exactly one left and one right triangle side
    slots = {x.id: {} for x in lam.infinite_leaves}
    for tri in lam.triangles:
        for si, ts in enumerate(tri.sides):
            if ts.leaf not in slots:
                v.append(f"dangling side reference: {tri.id} side {si} -> {ts.leaf}")
                continue
            if ts.leaf_side not in SIDES:
                v.append(f"{tri.id} side {si}: bad leaf side {ts.leaf_side!r}")
                continue
            if ts.leaf_side in slots[ts.leaf]:
                v.append(f"leaf {ts.leaf} has two triangle sides on its {ts.leaf_side}")
            slots[ts.leaf][ts.leaf_side] = (tri.id, si)
    for gid, slot in slots.items():
        if set(slot) != set(SIDES):
            v.append(f"leaf {gid} bounds {len(slot)} triangle sides, expected 2")
    if v:
        return ValidationReport(False, tuple(v), s, t, u, {})
    # spike records agree with the leaf ends on both adjacent sides
    for tri in lam.triangles:
        for si, ts in enumerate(tri.sides):
            leaf = lam.leaf(ts.leaf)
            plus_at = si if ts.leaf_side == "left" else (si + 1) % 3
            minus_at = (si + 1) % 3 if ts.leaf_side == "left" else si
            if tri.vertices[plus_at] != leaf.plus:
                v.append(f"{tri.id} vertex {plus_at} disagrees with the positive end of {leaf.id}")
            if tri.vertices[minus_at] != leaf.minus:
                v.append(f"{tri.id} vertex {minus_at} disagrees with the negative end of {leaf.id}")
    # one spiral direction per side of each closed leaf
    for p in lam.punctures():
        dirs = {sp.direction for tri in lam.triangles for sp in tri.vertices if sp.puncture == p}
        if len(dirs) > 1:
            v.append(f"side {p[0]}/{p[1]} has spikes spiralling both ways")
        if not dirs:
            v.append(f"side {p[0]}/{p[1]} receives no spikes")
    if v:
        return ValidationReport(False, tuple(v), s, t, u, {})
    # corner cycles: each side of each closed leaf is one cycle
    k = {}
    seen = set()
    for p in lam.punctures():
        corners = [(tri.id, c) for tri in lam.triangles for c in range(3)
                   if tri.vertices[c].puncture == p]
        try:
            cycle = lam.corner_cycle(*corners[0], True)
        except InputError as err:
            v.append(str(err))
            continue
        cyc = {item[0] for item in cycle}
        if cyc != set(corners):
            v.append(f"side {p[0]}/{p[1]} spikes do not form a single cycle")
        seen |= cyc
        k[p] = len(cycle)
    if sum(k.values()) != 2 * t:
        v.append(f"spiral multiplicities sum to {sum(k.values())}, expected {2 * t}")
    # arcs
    arc_ids = {a.id: a for a in lam.arcs}
    for c in lam.closed_leaves:
        a = arc_ids.get(c.arc)
        if a is None:
            v.append(f"closed leaf {c.id} references unknown arc {c.arc}")
            continue
        if a.closed_leaf != c.id:
            v.append(f"arc {a.id} does not cross closed leaf {c.id}")
        for side, (tid, corner) in (("left", a.left), ("right", a.right)):
            try:
                sp = lam.triangle(tid).vertices[corner]
            except (InputError, IndexError):
                v.append(f"arc {a.id} references unknown corner {tid}:{corner}")
                continue
            if sp.puncture != (c.id, side):
                v.append(f"arc {a.id} {side} end is not a spike on the {side} of {c.id}")
    # declared spiral orders (one period, alternating spike / leaf end)
    for key, items in lam.spiral_orders.items():
        v.extend(_check_spiral_order(lam, key, items, k))
    return ValidationReport(not v, tuple(v), s, t, u, k)


def _check_spiral_order(lam, key, items, k):
    try:
        cid, side = key.split("/")
    except ValueError:
        return [f"spiral order key {key!r} must read closed_leaf/side"]
    out = []
    if (cid, side) not in k:
        return [f"spiral order for unknown side {key}"]
    if len(items) != 2 * k[(cid, side)]:
        return [f"spiral order {key} has {len(items)} items, expected {2 * k[(cid, side)]}"]
    kinds = [i[0] for i in items]
    if kinds[0::2] != ["spike"] * (len(items) // 2) or kinds[1::2] != ["leaf"] * (len(items) // 2):
        return [f"spiral order {key} does not alternate spike / leaf end"]
    expected = spiral_items(lam, cid, side, start=(items[0][1], items[0][2]))
    if expected is None or [tuple(i) for i in items] != expected:
        out.append(f"spiral order {key} disagrees with the triangle gluing")
    return out


def spiral_items(lam, cid, side, start=None):
    """Forward alternating list of spikes and crossed leaf ends for one side."""
    p = (cid, side)
    corners = [(tri.id, c) for tri in lam.triangles for c in range(3)
               if tri.vertices[c].puncture == p]
    if not corners:
        return None
    if start is None:
        arc = lam.arc_of(cid)
        start = arc.left if side == "left" else arc.right
    if start not in corners:
        return None
    items = []
    for (tid, c), leaf, leaf_side, s in lam.forward_cycle(*start):
        items.append(("spike", tid, c))
        # the crossed leaf's end at this spike is the end spiralling onto p
        plus_here = (s == c) == (leaf_side == "left")
        items.append(("leaf", leaf, "+" if plus_here else "-"))
    return items


@dataclass(frozen=True)
class SpiralEntry:
    leaf: str
    toward: bool
    triangle: str
    vertex: int


def spiral_sequence(lam, closed_leaf, side):
    """Leaves and spikes spiralling onto one side of a closed leaf, in the
    forward order. Each leaf end is flagged toward (positive end) or away."""
    if closed_leaf not in lam.closed_ids:
        raise UnknownLeaf(f"unknown closed leaf {closed_leaf!r}")
    if side not in SIDES:
        raise InputError(f"side must be left or right, got {side!r}")
    items = spiral_items(lam, closed_leaf, side)
    if not items:
        raise InputError(f"no leaves spiral onto {closed_leaf}/{side}")
    out = []
    for spike, leaf in zip(items[0::2], items[1::2]):
        out.append(SpiralEntry(leaf[1], leaf[2] == "+", spike[1], spike[2]))
    return out


def require_valid(lam):
    report = validate(lam)
    if not report.valid:
        raise LaminationInvalid(report.violations)
    return report
