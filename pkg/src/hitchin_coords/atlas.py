"""Lift annotations: group-word names for lifted ideal vertices, plus the
dual-graph paths used to extract holonomies.

The universal cover is described through the dual graph of the
triangulation of the surface cut open along the closed leaves. Its vertices
are triangles; its edges are the infinite leaves and one transverse arc per
closed leaf. After choosing a spanning tree, every lifted triangle is
``(triangle, g)`` for a group element ``g``, and crossing an edge from
``(T, g)`` reaches ``(T', g h)`` where ``h`` is the edge label (trivial on
tree edges). Every ideal vertex is an end of a lifted closed leaf, hence a
fixed point of a conjugate ``p [c] p^-1``; an annotation records ``p``,
``c`` and which end.
"""

from collections import deque
from dataclasses import dataclass, field

from .errors import InputError, UnknownGenerator
from .lamination import require_valid
from .words import (concat, cyclic_reduce, exponent_sums, format_word, inverse_word,
                    letters_used, parse_word, reduce_word, substitute)


@dataclass(frozen=True)
class VertexAnnotation:
    prefix: tuple
    closed_leaf: str
    end: int

    def translate(self, word):
        return VertexAnnotation(concat(word, self.prefix), self.closed_leaf, self.end)

    def to_json(self):
        return {"prefix": format_word(self.prefix), "closed_leaf": self.closed_leaf,
                "end": "+" if self.end > 0 else "-"}

    @classmethod
    def from_json(cls, data):
        end = data["end"]
        if end not in ("+", "-"):
            raise InputError(f"vertex end must be + or -, got {end!r}")
        return cls(parse_word(data["prefix"]), str(data["closed_leaf"]), 1 if end == "+" else -1)


SITE_KEYS = ("x", "y", "z", "zp")


@dataclass
class LiftAtlas:
    lamination: str
    generators: list
    relator: tuple
    closed_words: dict
    base_triangle: str
    triangles: dict = field(default_factory=dict)
    infinite_leaves: dict = field(default_factory=dict)
    closed_leaves: dict = field(default_factory=dict)
    edge_paths: dict = field(default_factory=dict)

    def check_words(self):
        gens = set(self.generators)
        words = [self.relator] + list(self.closed_words.values())
        for lifts in self.triangles.values():
            words += [a.prefix for lift in lifts for a in lift]
        for sites in (self.infinite_leaves, self.closed_leaves):
            for lifts in sites.values():
                words += [lift[k].prefix for lift in lifts for k in SITE_KEYS]
        for w in words:
            bad = letters_used(w) - gens
            if bad:
                raise UnknownGenerator(f"atlas word uses undeclared generators {sorted(bad)}")

    def to_json(self):
        def site(lift):
            return {k: lift[k].to_json() for k in SITE_KEYS}

        return {
            "lamination": self.lamination,
            "generators": list(self.generators),
            "relator": format_word(self.relator),
            "closed_leaf_words": {k: format_word(v) for k, v in sorted(self.closed_words.items())},
            "base_triangle": self.base_triangle,
            "triangles": {k: [[a.to_json() for a in lift] for lift in v]
                          for k, v in sorted(self.triangles.items())},
            "infinite_leaves": {k: [site(l) for l in v] for k, v in sorted(self.infinite_leaves.items())},
            "closed_leaves": {k: [site(l) for l in v] for k, v in sorted(self.closed_leaves.items())},
            "edge_paths": {k: list(v) for k, v in sorted(self.edge_paths.items())},
        }

    @classmethod
    def from_json(cls, data):
        try:
            def site(d):
                return {k: VertexAnnotation.from_json(d[k]) for k in SITE_KEYS}

            atlas = cls(
                lamination=str(data["lamination"]),
                generators=[str(g) for g in data["generators"]],
                relator=parse_word(data["relator"]),
                closed_words={str(k): parse_word(v) for k, v in data["closed_leaf_words"].items()},
                base_triangle=str(data["base_triangle"]),
                triangles={str(k): [tuple(VertexAnnotation.from_json(a) for a in lift) for lift in v]
                           for k, v in data["triangles"].items()},
                infinite_leaves={str(k): [site(l) for l in v] for k, v in data["infinite_leaves"].items()},
                closed_leaves={str(k): [site(l) for l in v] for k, v in data["closed_leaves"].items()},
                edge_paths={str(k): [dict(step) for step in v] for k, v in data["edge_paths"].items()},
            )
        except (KeyError, TypeError, ValueError, AttributeError) as err:
            raise InputError(f"malformed atlas: {err!r}") from err
        atlas.check_words()
        for k, a in atlas.triangles.items():
            if any(len(lift) != 3 for lift in a):
                raise InputError(f"triangle {k} lift must annotate 3 vertices")
        return atlas


# ---------------------------------------------------------------- construction

@dataclass(frozen=True)
class DualEdge:
    id: str
    kind: str            # "leaf" or "arc"
    source: tuple        # leaf: (triangle, side) on the leaf's left; arc: (triangle, corner) left
    target: tuple        # leaf: right slot; arc: right (triangle, corner)
    closed_leaf: str = ""


def dual_edges(lam):
    slots = lam.slots()
    edges = [DualEdge(g.id, "leaf", slots[g.id]["left"], slots[g.id]["right"])
             for g in lam.infinite_leaves]
    for c in lam.closed_leaves:
        arc = lam.arc_of(c.id)
        edges.append(DualEdge(arc.id, "arc", arc.left, arc.right, c.id))
    return edges


def _step(edge, from_source):
    """Path step crossing ``edge`` from its source (or target) end."""
    if edge.kind == "leaf":
        slot = edge.source if from_source else edge.target
        return {"side": slot[1]}
    return {"arc": edge.closed_leaf, "from": "left" if from_source else "right"}


def spanning_tree(lam, base):
    """Breadth-first spanning tree of the dual graph.

    Returns (tree edge ids, path steps from the base to each triangle).
    """
    edges = dual_edges(lam)
    paths = {base: []}
    tree = set()
    queue = deque([base])
    while queue:
        tid = queue.popleft()
        for e in edges:
            for from_source in (True, False):
                here = (e.source if from_source else e.target)[0]
                there = (e.target if from_source else e.source)[0]
                if here == tid and there not in paths:
                    paths[there] = paths[tid] + [_step(e, from_source)]
                    tree.add(e.id)
                    queue.append(there)
    if set(paths) != set(lam.triangle_ids):
        raise InputError("dual graph is disconnected")
    return tree, paths


def reverse_path(lam, start, steps):
    """Steps undoing ``steps`` taken from triangle ``start``.

    Returns the reversed steps and the triangle the forward steps end at."""
    edges = {e.id: e for e in dual_edges(lam)}
    arcs = {e.closed_leaf: e for e in edges.values() if e.kind == "arc"}
    trail = []
    tid = start
    for step in steps:
        if "side" in step:
            leaf, nt, ns, _ = lam.neighbor(tid, step["side"])
            trail.append({"side": ns})
            tid = nt
        else:
            e = arcs[step["arc"]]
            if step["from"] == "left":
                trail.append({"arc": step["arc"], "from": "right"})
                tid = e.target[0]
            else:
                trail.append({"arc": step["arc"], "from": "left"})
                tid = e.source[0]
    return list(reversed(trail)), tid


def tietze_reduce(generators, relators):
    """Eliminate generators occurring once in a relator until one relator
    remains. Returns (surviving generators, relator, substitutions)."""
    gens = list(generators)
    rels = [cyclic_reduce(r) for r in relators]
    subs = {}
    while len(rels) > 1:
        found = None
        for ri, r in enumerate(rels):
            counts = {}
            for name, _ in r:
                counts[name] = counts.get(name, 0) + 1
            for g in gens:
                if counts.get(g) == 1:
                    found = (ri, g)
                    break
            if found:
                break
        if found is None:
            raise InputError("relators cannot be reduced to a single relation")
        ri, g = found
        r = rels.pop(ri)
        pos = next(i for i, (name, _) in enumerate(r) if name == g)
        rotated = r[pos:] + r[:pos]
        eps = rotated[0][1]
        rest = rotated[1:]
        image = inverse_word(rest) if eps == 1 else reduce_word(rest)
        subs = {k: substitute(v, {g: image}) for k, v in subs.items()}
        subs[g] = image
        rels = [cyclic_reduce(substitute(x, {g: image})) for x in rels]
        gens.remove(g)
    return gens, rels[0], subs


def build_atlas(lam, base=None):
    """Derive a lift atlas from the lamination's combinatorics."""
    require_valid(lam)
    base = base or lam.triangle_ids[0]
    edges = dual_edges(lam)
    tree, paths = spanning_tree(lam, base)
    labels = {e.id: (() if e.id in tree else ((e.id, 1),)) for e in edges}
    slot_owner = {}
    for e in edges:
        if e.kind == "leaf":
            slot_owner[e.source] = (e, True)
            slot_owner[e.target] = (e, False)

    def crossing_word(tid, s):
        e, from_source = slot_owner[(tid, s)]
        w = labels[e.id]
        return w if from_source else inverse_word(w)

    def loop(tid, c, clockwise):
        """Word of the loop around a puncture and the partial products."""
        partial = []
        word = ()
        for (t, corner), _, _, s in lam.corner_cycle(tid, c, clockwise):
            partial.append(((t, corner), word))
            word = concat(word, crossing_word(t, s))
        return word, partial

    relators = []
    closed_raw = {}
    arc_label = {}
    for c in lam.closed_leaves:
        arc = lam.arc_of(c.id)
        h = labels[arc.id]
        arc_label[c.id] = h
        right_loop, _ = loop(*arc.right, True)
        left_loop, _ = loop(*arc.left, False)
        left_conj = concat(inverse_word(h), left_loop, h)
        closed_raw[c.id] = right_loop
        relators.append(concat(right_loop, inverse_word(left_conj)))
    raw_gens = [e.id for e in edges if e.id not in tree]
    gens, relator, subs = tietze_reduce(raw_gens, relators)
    if any(exponent_sums(relator).get(g, 0) for g in gens):
        raise InputError("surface relator has nonzero exponent sum")

    def sub(w):
        return substitute(w, subs)

    # annotations of the base lift of every corner
    corner = {}
    for c in lam.closed_leaves:
        arc = lam.arc_of(c.id)
        spin_r = lam.spin((c.id, "right"))
        end_r = 1 if spin_r == "cw" else -1
        _, partial = loop(*arc.right, spin_r == "cw")
        for (t, k), pi in partial:
            corner[(t, k)] = VertexAnnotation(sub(inverse_word(pi)), c.id, end_r)
        spin_l = lam.spin((c.id, "left"))
        end_l = 1 if spin_l == "ccw" else -1
        _, partial = loop(*arc.left, spin_l == "cw")
        h = arc_label[c.id]
        for (t, k), psi in partial:
            corner[(t, k)] = VertexAnnotation(sub(concat(inverse_word(psi), h)), c.id, end_l)

    shift = ((gens[0], 1),)
    triangles = {}
    for tri in lam.triangles:
        lift = tuple(corner[(tri.id, k)] for k in range(3))
        triangles[tri.id] = [lift, tuple(a.translate(shift) for a in lift)]

    leaves = {}
    for e in edges:
        if e.kind != "leaf":
            continue
        (a_tid, a_s), (b_tid, b_s) = e.source, e.target
        h = sub(labels[e.id])
        # base lift of the left triangle, neighbor translated by h
        first = {"x": corner[(a_tid, a_s)], "y": corner[(a_tid, (a_s + 1) % 3)],
                 "z": corner[(a_tid, (a_s + 2) % 3)],
                 "zp": corner[(b_tid, (b_s + 2) % 3)].translate(h)}
        # base lift of the right triangle, left neighbor translated by h^-1
        hinv = inverse_word(h)
        second = {"x": corner[(b_tid, (b_s + 1) % 3)], "y": corner[(b_tid, b_s)],
                  "z": corner[(a_tid, (a_s + 2) % 3)].translate(hinv),
                  "zp": corner[(b_tid, (b_s + 2) % 3)]}
        leaves[e.id] = [first, second]

    closed = {}
    for c in lam.closed_leaves:
        arc = lam.arc_of(c.id)
        h = sub(arc_label[c.id])
        word = sub(closed_raw[c.id])
        far_l = (arc.left[0], lam.far_corner(*arc.left))
        far_r = (arc.right[0], lam.far_corner(*arc.right))
        first = {"x": VertexAnnotation((), c.id, 1), "y": VertexAnnotation((), c.id, -1),
                 "z": corner[far_l].translate(inverse_word(h)), "zp": corner[far_r]}
        second = {k: v.translate(word) for k, v in first.items()}
        closed[c.id] = [first, second]

    edge_paths = {}
    by_id = {e.id: e for e in edges}
    for g in gens:
        e = by_id[g]
        src_tid = e.source[0]
        dst_tid = e.target[0]
        back, end = reverse_path(lam, base, paths[dst_tid])
        assert end == dst_tid
        edge_paths[g] = paths[src_tid] + [_step(e, True)] + back

    atlas = LiftAtlas(lamination=lam.id, generators=gens, relator=relator,
                      closed_words={c.id: sub(closed_raw[c.id]) for c in lam.closed_leaves},
                      base_triangle=base, triangles=triangles, infinite_leaves=leaves,
                      closed_leaves=closed, edge_paths=edge_paths)
    atlas.check_words()
    return atlas
