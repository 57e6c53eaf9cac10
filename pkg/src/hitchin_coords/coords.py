"""Exponentiated coordinate vectors (triple ratios, double ratios, length ratios)."""

from dataclasses import dataclass, field

from .errors import IndexOutOfRange, InputError
from .flags import triple_indices
from .scalars import format_scalar, log_value, parse_scalar, working_precision


def rotate_index(idx):
    """Index at the next clockwise vertex carrying the same value:
    exp tau_abc(T, v) = exp tau_bca(T, v')."""
    a, b, c = idx
    return (b, c, a)


@dataclass
class CoordinateVector:
    n: int
    lamination: str
    triangle_exp: dict = field(default_factory=dict)   # (triangle, vertex, (a,b,c)) -> value
    shear_exp: dict = field(default_factory=dict)      # (leaf, a) -> value
    length_exp: dict = field(default_factory=dict)     # (closed leaf, a) -> value

    def tau(self, triangle, vertex, idx):
        key = (triangle, vertex % 3, tuple(idx))
        if key not in self.triangle_exp:
            raise IndexOutOfRange(f"no triangle invariant {key}")
        return self.triangle_exp[key]

    def tau_at(self, triangle, vertex):
        return {idx: self.tau(triangle, vertex, idx) for idx in triple_indices(self.n)}

    def sigma(self, leaf, a):
        if (leaf, a) not in self.shear_exp:
            raise IndexOutOfRange(f"no shear invariant ({leaf}, {a})")
        return self.shear_exp[(leaf, a)]

    def sigmas(self, leaf):
        return [self.sigma(leaf, a) for a in range(1, self.n)]

    def set_triangle(self, triangle, values_at_vertex0):
        """Store values given at vertex 0 for all three vertices."""
        for idx, value in values_at_vertex0.items():
            key = tuple(idx)
            for v in range(3):
                self.triangle_exp[(triangle, v, key)] = value
                key = rotate_index(key)

    def rotation_ok(self, tol=None):
        """Rotation condition; exact for rationals, relative ``tol`` otherwise."""
        from .scalars import default_tolerance, is_exact
        if tol is None:
            tol = default_tolerance()
        for (t, v, idx), value in self.triangle_exp.items():
            other = self.triangle_exp.get((t, (v + 1) % 3, rotate_index(idx)))
            if other is None:
                return False
            if is_exact(value) and is_exact(other):
                if other != value:
                    return False
            elif abs(other - value) > tol * abs(value):
                return False
        return True

    def all_values(self):
        return (list(self.triangle_exp.values()) + list(self.shear_exp.values())
                + list(self.length_exp.values()))

    @property
    def is_exact(self):
        from .scalars import is_exact
        return all(is_exact(x) for x in self.all_values())

    def comparable_items(self):
        """Stored triangle and shear entries keyed for componentwise comparison."""
        out = {("tau",) + k[:2] + (k[2],): v for k, v in self.triangle_exp.items()}
        out.update({("sigma",) + k: v for k, v in self.shear_exp.items()})
        return out

    def to_json(self, with_logs=False, precision=None):
        def entry(value):
            out = {"exp": format_scalar(value)}
            if with_logs:
                with working_precision(precision or 256):
                    out["log"] = format_scalar(log_value(value))
            return out

        tri = {}
        for (t, v, idx), value in sorted(self.triangle_exp.items()):
            tri.setdefault(t, {}).setdefault(str(v), {})[",".join(map(str, idx))] = entry(value)
        shear = {}
        for (g, a), value in sorted(self.shear_exp.items()):
            shear.setdefault(g, {})[str(a)] = entry(value)
        lengths = {}
        for (c, a), value in sorted(self.length_exp.items()):
            lengths.setdefault(c, {})[str(a)] = entry(value)
        out = {"n": self.n, "lamination": self.lamination, "triangles": tri, "shears": shear}
        if lengths:
            out["lengths"] = lengths
        if with_logs:
            out["log_precision_bits"] = precision or 256
        return out

    @classmethod
    def from_json(cls, data, exact_mode=True):
        try:
            n = int(data["n"])
            coords = cls(n, str(data["lamination"]))
            for t, verts in data.get("triangles", {}).items():
                for v, entries in verts.items():
                    for key, e in entries.items():
                        idx = tuple(int(x) for x in key.split(","))
                        coords.triangle_exp[(t, int(v), idx)] = _value(e, exact_mode)
            for g, entries in data.get("shears", {}).items():
                for a, e in entries.items():
                    coords.shear_exp[(g, int(a))] = _value(e, exact_mode)
            for c, entries in data.get("lengths", {}).items():
                for a, e in entries.items():
                    coords.length_exp[(c, int(a))] = _value(e, exact_mode)
        except (KeyError, TypeError, ValueError, AttributeError) as err:
            raise InputError(f"malformed coordinates: {err!r}") from err
        if any(x <= 0 for x in coords.all_values()):
            raise InputError("coordinates must be positive")
        return coords


def _value(entry, exact_mode):
    if isinstance(entry, dict):
        entry = entry["exp"]
    return parse_scalar(entry, exact_mode)
