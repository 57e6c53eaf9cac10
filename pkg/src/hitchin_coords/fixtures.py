"""Bundled genus-2 fixtures.

``pants`` has three closed leaves (a pants decomposition, each pair of pants
cut into two ideal triangles); ``single_leaf`` has one nonseparating closed
leaf. The lift atlases are derived from the laminations by
``tools/make_fixtures.py`` and the Fuchsian representations are SL(2, Q)
reconstructions from recorded n = 2 coordinates. None of this data is
transcribed from figures; it is validated by the test suites.
"""

import json
from importlib import resources

from .atlas import LiftAtlas
from .coords import CoordinateVector
from .errors import InputError
from .lamination import LaminationComplex
from .representation import Representation, sl2_symmetric_lift

NAMES = ("pants", "single_leaf")


def _load(name, kind):
    if name not in NAMES:
        raise InputError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    text = resources.files(__package__).joinpath("data", f"{name}_{kind}.json").read_text()
    return json.loads(text)


def lamination(name):
    return LaminationComplex.from_json(_load(name, "lamination"))


def atlas(name):
    return LiftAtlas.from_json(_load(name, "atlas"))


def fuchsian(name, n=2):
    """Fuchsian representation composed with the n-dimensional irreducible
    representation of SL(2)."""
    rep = Representation.from_json(_load(name, "fuchsian")["representation"])
    if n == 2:
        return rep
    return Representation(n, {g: sl2_symmetric_lift(m, n) for g, m in rep.generators.items()})


def fuchsian_coordinates(name):
    """The n = 2 coordinates the Fuchsian fixture was reconstructed from."""
    return CoordinateVector.from_json(_load(name, "fuchsian")["coordinates"])


def load(name):
    """(lamination, atlas) pair."""
    return lamination(name), atlas(name)
