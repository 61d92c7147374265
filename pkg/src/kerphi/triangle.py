"""Algebraic triangles: a fixed 25-region template filled in with group data.

Given three kernel elements ``a``, ``b``, ``c``, the template below is
"actualized": every one of its 36 vertices receives a kernel element,
every one of its 60 edges receives a short connecting word over the
vector alphabet of the edge's subgroup, and every one of its 25 regions
becomes a loop in the corresponding face subgroup.  Each connecting
word's length is bounded by a small sum of coordinate distances between
the corner elements, which is what makes the template useful: filling a
geodesic triangle costs at most 25 Dehn-function evaluations at
perimeter ``24 * D``, where ``D`` is the summed side length.

The template has an order-3 symmetry (corner rotation).  Vertex data is
specified on a fundamental domain of 20 vertices and 28 edges and
propagated by rotating elements ``a -> b -> c`` and shifting slot
classes by two.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .abelian import ZVec, project_block
from .factor import DistanceEstimate, Word, evaluate_phi, ks_spelling
from .lattice import (
    EDGE_ALPHA_ALIASES,
    EDGE_LABELS,
    GenLetter,
    LAColumn,
    LAEncoding,
    alpha,
    alpha_union,
    alphabet_keys,
    apply_la_encoding,
    build_subgroup,
    canonical_letter_key,
    class_of_slot,
    encoding_from_string,
    format_letter,
    placement_slot,
    realize_word,
)
from .product import (
    Instance,
    ProductElement,
    pad,
    phi,
    restricted_distance,
)


class NotInKernel(ValueError):
    """An input element has a nonzero abelian image."""


class VerificationFailure(AssertionError):
    """An actualized triangle failed one of its structural checks."""


class UnsupportedConstruction(ValueError):
    """The instance is outside the scope of the constructive machinery."""


# --- the template -----------------------------------------------------------
#
# Vertex names: corners A/B/C; side vertices {X}{Y}1, {X}{Y}2 walking from
# corner X toward corner Y, with A1/A2/B1/B2/C1/C2 at side midpoints;
# interior vertices {X}IU/{X}IL/{X}IR around each corner; hex0..hex5
# around the central hexagon.

_SIDE_RIGHT = (
    ("A", "AC1", "G6N"),
    ("AC1", "AC2", "A3N_16"),
    ("AC2", "A1", "G12"),
    ("A1", "C2", "A1_14"),
    ("C2", "CA2", "G34"),
    ("CA2", "CA1", "A2N_35"),
    ("CA1", "C", "G5N"),
)
_SIDE_LEFT = (
    ("A", "AB1", "G3N"),
    ("AB1", "AB2", "A3N_13"),
    ("AB2", "A2", "G12"),
    ("A2", "B1", "A2_25"),
    ("B1", "BA2", "G56"),
    ("BA2", "BA1", "A1N_45"),
    ("BA1", "B", "G4N"),
)
_SIDE_BOTTOM = (
    ("B", "BC1", "G1N"),
    ("BC1", "BC2", "A1N_15"),
    ("BC2", "B2", "G56"),
    ("B2", "C1", "A3_36"),
    ("C1", "CB2", "G34"),
    ("CB2", "CB1", "A2N_23"),
    ("CB1", "C", "G2N"),
)
_CORNER_A = (
    ("AC1", "AIU", "G3N"),
    ("AB1", "AIU", "G6N"),
    ("AIU", "AIR", "A3N_16"),
    ("AIU", "AIL", "A3N_13"),
    ("AIL", "AIR", "A3_36"),
    ("AIR", "AC2", "G3"),
    ("AIL", "AB2", "G6"),
    ("A2", "hex2", "G16"),
    ("A1", "hex1", "G23"),
    ("hex1", "AIR", "G12"),
    ("hex2", "AIL", "G12"),
    ("hex1", "hex2", "A3_36"),
)
_CORNER_B = (
    ("BA1", "BIU", "G1N"),
    ("BC1", "BIU", "G4N"),
    ("BIU", "BIR", "A1N_45"),
    ("BIL", "BIU", "A1N_15"),
    ("BIL", "BIR", "A1_14"),
    ("BIR", "BA2", "G1"),
    ("BC2", "BIL", "G4"),
    ("hex3", "B1", "G16"),
    ("hex4", "B2", "G45"),
    ("hex3", "BIR", "G56"),
    ("hex4", "BIL", "G56"),
    ("hex3", "hex4", "A1_14"),
)
_CORNER_C = (
    ("CA1", "CIU", "G2N"),
    ("CB1", "CIU", "G5N"),
    ("CIR", "CIU", "A2N_23"),
    ("CIU", "CIL", "A2N_35"),
    ("CIL", "CIR", "A2_25"),
    ("CIL", "CA2", "G2"),
    ("CB2", "CIR", "G5"),
    ("hex5", "C1", "G45"),
    ("hex0", "C2", "G23"),
    ("hex5", "CIR", "G34"),
    ("hex0", "CIL", "G34"),
    ("hex5", "hex0", "A2_25"),
)
_HEX_CHORDS = (
    ("hex2", "hex3", "A2_25"),
    ("hex0", "hex1", "A1_14"),
    ("hex4", "hex5", "A3_36"),
)

_EDGES: tuple[tuple[str, str, str], ...] = (
    _SIDE_RIGHT
    + _SIDE_LEFT
    + _SIDE_BOTTOM
    + _CORNER_A
    + _CORNER_B
    + _CORNER_C
    + _HEX_CHORDS
)

_FACES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("G36N", ("A", "AC1", "AIU", "AB1")),
    ("A3G3N", ("AC1", "AC2", "AIR", "AIU")),
    ("A3G6N", ("AB1", "AB2", "AIL", "AIU")),
    ("A33N", ("AIU", "AIL", "AIR")),
    ("G123", ("AC2", "A1", "hex1", "AIR")),
    ("G126", ("AB2", "A2", "hex2", "AIL")),
    ("A3G12", ("AIL", "AIR", "hex1", "hex2")),
    ("A1G23", ("A1", "C2", "hex0", "hex1")),
    ("G25N", ("C", "CB1", "CIU", "CA1")),
    ("A2G5N", ("CB1", "CB2", "CIR", "CIU")),
    ("A2G2N", ("CA1", "CA2", "CIL", "CIU")),
    ("A22N", ("CIU", "CIL", "CIR")),
    ("G345", ("CB2", "C1", "hex5", "CIR")),
    ("G234", ("CA2", "C2", "hex0", "CIL")),
    ("A2G34", ("CIL", "CIR", "hex5", "hex0")),
    ("A3G45", ("C1", "B2", "hex4", "hex5")),
    ("G14N", ("B", "BC1", "BIU", "BA1")),
    ("A1G4N", ("BC1", "BC2", "BIL", "BIU")),
    ("A1G1N", ("BA1", "BA2", "BIR", "BIU")),
    ("A11N", ("BIU", "BIL", "BIR")),
    ("G456", ("BC2", "B2", "hex4", "BIL")),
    ("G156", ("BA2", "B1", "hex3", "BIR")),
    ("A1G56", ("BIL", "BIR", "hex3", "hex4")),
    ("A2G16", ("B1", "A2", "hex2", "hex3")),
    ("L", ("hex0", "hex1", "hex2", "hex3", "hex4", "hex5")),
)

# One application of the order-3 corner rotation (A -> C -> B -> A).
_ROTATION: dict[str, str] = {
    "A": "C", "C": "B", "B": "A",
    "AC1": "CB1", "AC2": "CB2", "A1": "C1",
    "C2": "B2", "CA2": "BC2", "CA1": "BC1",
    "AB1": "CA1", "AB2": "CA2", "A2": "C2",
    "B1": "A1", "BA2": "AC2", "BA1": "AC1",
    "BC1": "AB1", "BC2": "AB2", "B2": "A2",
    "C1": "B1", "CB2": "BA2", "CB1": "BA1",
    "AIU": "CIU", "CIU": "BIU", "BIU": "AIU",
    "AIL": "CIL", "CIL": "BIL", "BIL": "AIL",
    "AIR": "CIR", "CIR": "BIR", "BIR": "AIR",
    **{f"hex{i}": f"hex{(i + 4) % 6}" for i in range(6)},
}
_ROTATION_INV = {v: u for u, v in _ROTATION.items()}

_VERTICES: tuple[str, ...] = tuple(sorted(_ROTATION))

# Numbered vertices of the fundamental domain (the right side, the upper
# third and the hexagon); all other vertices are their rotations.
_P_VERTEX: dict[int, str] = {
    1: "A", 2: "AC1", 3: "AC2", 4: "A1", 5: "C2", 6: "CA2", 7: "CA1",
    8: "C", 9: "AB1", 10: "AIU", 11: "AB2", 12: "AIL", 13: "AIR",
    14: "A2", 15: "hex2", 16: "hex1", 17: "hex0", 18: "hex5",
    19: "hex4", 20: "hex3",
}
_P_INDEX = {v: p for p, v in _P_VERTEX.items()}


def rotate_vertex(name: str, k: int = 1) -> str:
    for _ in range(k % 3):
        name = _ROTATION[name]
    return name


def _unrotate_vertex(name: str, k: int) -> str:
    for _ in range(k % 3):
        name = _ROTATION_INV[name]
    return name


def _rot_slot_class(c: int, k: int) -> int:
    return (c - 1 + 2 * k) % 6 + 1


def _rot_block_class(c: int, k: int) -> int:
    return (c - 1 + 2 * k) % 3 + 1


def rotate_label(label: str, k: int = 1) -> str:
    """Rotate a face or edge label along with the corner rotation."""
    k %= 3
    if label == "L" or k == 0:
        return label
    if label.startswith("A") and label[1].isdigit():
        t = _rot_block_class(int(label[1]), k)
        rest = label[2:]
        if rest.startswith("G"):
            body = rest[1:]
            suffix = ""
            if body.endswith("N"):
                body, suffix = body[:-1], "N"
            classes = sorted(_rot_slot_class(int(d), k) for d in body)
            return f"A{t}G{''.join(map(str, classes))}{suffix}"
        if rest.endswith("N") and not rest.startswith("_"):
            # A{tt}N triangular faces
            return f"A{t}{t}N"
        dotted = rest.startswith("N")
        body = rest[2:] if dotted else rest[1:]
        classes = sorted(_rot_slot_class(int(d), k) for d in body)
        tag = "N_" if dotted else "_"
        return f"A{t}{tag}{''.join(map(str, classes))}"
    if label.startswith("G"):
        body = label[1:]
        suffix = ""
        if body.endswith("N"):
            body, suffix = body[:-1], "N"
        classes = sorted(_rot_slot_class(int(d), k) for d in body)
        return f"G{''.join(map(str, classes))}{suffix}"
    raise ValueError(f"cannot rotate label {label!r}")


@dataclass(frozen=True)
class TriangleTemplate:
    """The combinatorial triangle: 36 vertices, 60 edges, 25 regions."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str], ...]
    faces: tuple[tuple[str, tuple[str, ...]], ...]

    def edge_label(self, u: str, v: str) -> str:
        return _EDGE_LOOKUP[frozenset((u, v))]

    def validate(self) -> None:
        if len(self.vertices) != 36 or len(self.edges) != 60:
            raise VerificationFailure("template size mismatch")
        if len(self.faces) != 25:
            raise VerificationFailure("template face count mismatch")
        if len(self.vertices) - len(self.edges) + len(self.faces) != 1:
            raise VerificationFailure("template Euler count is not 1")
        seen: set[frozenset[str]] = set()
        for u, v, label in self.edges:
            if u == v or frozenset((u, v)) in seen:
                raise VerificationFailure(f"bad edge ({u}, {v})")
            seen.add(frozenset((u, v)))
            if label not in EDGE_LABELS and label not in EDGE_ALPHA_ALIASES:
                raise VerificationFailure(f"unknown edge label {label}")
            # the rotated edge must exist, with the rotated label
            ru, rv = rotate_vertex(u), rotate_vertex(v)
            if _EDGE_LOOKUP[frozenset((ru, rv))] != rotate_label(label):
                raise VerificationFailure(
                    f"rotation breaks edge ({u}, {v}, {label})"
                )
        covered: set[frozenset[str]] = set()
        face_cycles = {label: cycle for label, cycle in self.faces}
        for label, cycle in self.faces:
            for i, u in enumerate(cycle):
                v = cycle[(i + 1) % len(cycle)]
                if frozenset((u, v)) not in seen:
                    raise VerificationFailure(
                        f"face {label} uses a non-edge ({u}, {v})"
                    )
                covered.add(frozenset((u, v)))
            rotated = tuple(rotate_vertex(x) for x in cycle)
            target = face_cycles[rotate_label(label)]
            if set(rotated) != set(target):
                raise VerificationFailure(f"rotation breaks face {label}")
        if covered != seen:
            raise VerificationFailure("some edge lies on no face")


_EDGE_LOOKUP: dict[frozenset[str], str] = {
    frozenset((u, v)): label for u, v, label in _EDGES
}

TEMPLATE = TriangleTemplate(_VERTICES, _EDGES, _FACES)


# --- vertex formulas --------------------------------------------------------
#
# Each numbered vertex is (product of pads) * (placed deficit):
# ``pads`` restrict the corner elements to slot classes, ``deficits``
# sum coordinate differences over slot classes, and ``matrix`` is the
# arrangement placing the deficit vector block by block.

_Term = tuple[tuple[int, ...], str, str]


@dataclass(frozen=True)
class _Formula:
    pads: tuple[tuple[str, tuple[int, ...]], ...]
    deficits: tuple[_Term, ...]
    matrix: str | None


_HEX_PADS = (("a", (4, 5)), ("b", (1, 6)), ("c", (2, 3)))
_HEX_DEF: tuple[_Term, ...] = (
    ((1,), "a", "b"),
    ((2,), "a", "c"),
    ((3,), "a", "c"),
    ((6,), "a", "b"),
)

_P_FORMULAS: dict[int, _Formula] = {
    1: _Formula((("a", (1, 2, 3, 4, 5, 6)),), (), None),
    2: _Formula(
        (("a", (1, 2, 3, 4, 5)), ("b", (6,))),
        (((6,), "a", "b"),),
        "1 2 3. / 4 5 1",
    ),
    3: _Formula(
        (("a", (1, 2, 3, 4, 5)), ("b", (6,))),
        (((6,), "a", "b"),),
        "1 2 3 / 4 5 6",
    ),
    4: _Formula(
        (("a", (3, 4, 5)), ("b", (1, 2, 6))),
        (((1,), "a", "b"), ((2,), "a", "b"), ((6,), "a", "b")),
        "1 2 3 / 4 5 6",
    ),
    5: _Formula(
        (("b", (1, 2, 6)), ("a", (3, 4, 5))),
        (((3,), "b", "a"), ((4,), "b", "a"), ((5,), "b", "a")),
        "1 2 3 / 1 5 6",
    ),
    6: _Formula(
        (("b", (1, 2, 3, 4, 6)), ("a", (5,))),
        (((5,), "b", "a"),),
        "1 2 3 / 1 5 6",
    ),
    7: _Formula(
        (("b", (1, 2, 3, 4, 6)), ("a", (5,))),
        (((5,), "b", "a"),),
        "1 2. 3 / 1 3 6",
    ),
    8: _Formula((("b", (1, 2, 3, 4, 5, 6)),), (), None),
    9: _Formula(
        (("a", (1, 2, 4, 5, 6)), ("c", (3,))),
        (((3,), "a", "c"),),
        "1 2 3. / 4 5 1",
    ),
    10: _Formula(
        (("a", (1, 2, 4, 5)), ("b", (6,)), ("c", (3,))),
        (((3,), "a", "c"), ((6,), "a", "b")),
        "1 2 3. / 4 5 1",
    ),
    11: _Formula(
        (("a", (1, 2, 4, 5, 6)), ("c", (3,))),
        (((3,), "a", "c"),),
        "1 2 3 / 4 5 3",
    ),
    12: _Formula(
        (("a", (1, 2, 4, 5)), ("b", (6,)), ("c", (3,))),
        (((3,), "a", "c"), ((6,), "a", "b")),
        "1 2 3 / 4 5 3",
    ),
    13: _Formula(
        (("a", (1, 2, 4, 5)), ("b", (6,)), ("c", (3,))),
        (((3,), "a", "c"), ((6,), "a", "b")),
        "1 2 3 / 4 5 6",
    ),
    14: _Formula(
        (("a", (4, 5, 6)), ("c", (1, 2, 3))),
        (((1,), "a", "c"), ((2,), "a", "c"), ((3,), "a", "c")),
        "1 2 3 / 4 5 3",
    ),
    15: _Formula(_HEX_PADS, _HEX_DEF, "1 2 3 / 4 5 3"),
    16: _Formula(_HEX_PADS, _HEX_DEF, "1 2 3 / 4 5 6"),
    17: _Formula(_HEX_PADS, _HEX_DEF, "1 2 3 / 1 5 6"),
    18: _Formula(_HEX_PADS, _HEX_DEF, "1 2 3 / 1 2 6"),
    19: _Formula(_HEX_PADS, _HEX_DEF, "1 2 3 / 1 2 3"),
    20: _Formula(_HEX_PADS, _HEX_DEF, "1 2 3 / 4 2 3"),
}

# The mid-side vertex admits a second, equal expression whose deficit is
# measured on the complementary classes; equality is exactly the kernel
# condition on a and b and is checked during actualization.
_P4_ALT = _Formula(
    (("a", (3, 4, 5)), ("b", (1, 2, 6))),
    (((3,), "b", "a"), ((4,), "b", "a"), ((5,), "b", "a")),
    "1 2 3 / 4 5 6",
)

_ELT_NEXT = {"a": "b", "b": "c", "c": "a"}


def _rot_elt(name: str, k: int) -> str:
    for _ in range(k % 3):
        name = _ELT_NEXT[name]
    return name


def _rot_classes(classes: tuple[int, ...], k: int) -> tuple[int, ...]:
    return tuple(sorted(_rot_slot_class(c, k) for c in classes))


def _rot_terms(terms: tuple[_Term, ...], k: int) -> tuple[_Term, ...]:
    return tuple(
        (_rot_classes(cs, k), _rot_elt(x, k), _rot_elt(y, k))
        for cs, x, y in terms
    )


@lru_cache(maxsize=None)
def _rot_encoding(text: str, k: int) -> LAEncoding:
    enc = encoding_from_string(text)
    cols = [
        LAColumn(
            _rot_block_class(col.block_class, k),
            col.dotted,
            tuple(_rot_slot_class(s, k) for s in col.slots),
        )
        for col in enc.columns
    ]
    return LAEncoding(tuple(sorted(cols, key=lambda c: c.block_class)))


def _rot_formula(f: _Formula, k: int) -> _Formula:
    return _Formula(
        tuple((_rot_elt(e, k), _rot_classes(cs, k)) for e, cs in f.pads),
        _rot_terms(f.deficits, k),
        f.matrix,  # rotated at application time, via _rot_encoding
    )


def _deficit_vector(
    inst: Instance, terms: tuple[_Term, ...], elements: Mapping[str, ProductElement]
) -> ZVec:
    vec = inst.decomposition.zero()
    for classes, x, y in terms:
        for i in alpha_union(inst.n, classes):
            spec = inst.factor(i)
            vec = vec + evaluate_phi(spec, elements[x].entry(i))
            vec = vec - evaluate_phi(spec, elements[y].entry(i))
    return vec


def _evaluate_formula(
    inst: Instance,
    formula: _Formula,
    k: int,
    elements: Mapping[str, ProductElement],
) -> ProductElement:
    rotated = _rot_formula(formula, k)
    out = inst.identity()
    for elt, classes in rotated.pads:
        out = out * pad(elements[elt], alpha_union(inst.n, classes)).realize()
    if formula.matrix is not None:
        vec = _deficit_vector(inst, rotated.deficits, elements)
        out = out * apply_la_encoding(inst, vec, _rot_encoding(formula.matrix, k))
    return out


# --- bounds -----------------------------------------------------------------


@dataclass(frozen=True)
class Bound:
    """A sum of coordinate distances ``d_a{classes}(x, y)``."""

    terms: tuple[_Term, ...]

    def display(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"d_a{''.join(map(str, cs))}({x},{y})" for cs, x, y in self.terms
        )

    def rotate(self, k: int) -> "Bound":
        return Bound(_rot_terms(self.terms, k))

    def evaluate(
        self,
        inst: Instance,
        elements: Mapping[str, ProductElement],
        budget: int | None = None,
    ) -> DistanceEstimate:
        total, exact = 0, True
        for classes, x, y in self.terms:
            est = restricted_distance(
                elements[x], elements[y], alpha_union(inst.n, classes), budget
            )
            total += est.value
            exact = exact and est.exact
        return DistanceEstimate(total, exact)


# --- segment recipes --------------------------------------------------------


@dataclass(frozen=True)
class _Recipe:
    """How to spell the connecting word of one fundamental-domain edge.

    ``conv`` recipes change pads: for each (classes, x, y) move they
    spell the coordinate path from x to y on those slot classes, with
    lift letters sinking at the arrangement's placements.  ``shift``
    recipes keep pads and move the placed deficit of one block class
    between the two endpoint arrangements.
    """

    kind: str  # "conv" | "shift"
    moves: tuple[_Term, ...] = ()
    block_class: int = 0
    bound: tuple[_Term, ...] = ()


def _conv(*moves: _Term, bound: tuple[_Term, ...] = ()) -> _Recipe:
    return _Recipe("conv", moves=moves, bound=bound or moves)


def _shift(block_class: int, bound: tuple[_Term, ...]) -> _Recipe:
    return _Recipe("shift", block_class=block_class, bound=bound)


_D3_AC: tuple[_Term, ...] = (((3,), "a", "c"),)
_D6_AB: tuple[_Term, ...] = (((6,), "a", "b"),)
_D36: tuple[_Term, ...] = (((3,), "a", "c"), ((6,), "a", "b"))
_HEX_BOUND: tuple[_Term, ...] = (((2, 3), "a", "c"), ((1, 6), "a", "b"))

_RECIPES: dict[tuple[int, int], _Recipe] = {
    (1, 2): _conv(((6,), "a", "b")),
    (2, 3): _shift(3, _D6_AB),
    (3, 4): _conv(((1, 2), "a", "b")),
    (4, 5): _shift(1, (((1, 2, 6), "a", "b"),)),
    (5, 6): _conv(((3, 4), "a", "b")),
    (6, 7): _shift(2, (((5,), "a", "b"),)),
    (7, 8): _conv(((5,), "a", "b")),
    (1, 9): _conv(((3,), "a", "c")),
    (2, 10): _conv(((3,), "a", "c")),
    (9, 10): _conv(((6,), "a", "b")),
    (9, 11): _shift(3, _D3_AC),
    (10, 12): _shift(3, _D36),
    (10, 13): _shift(3, _D36),
    (12, 13): _shift(3, _D36),
    (11, 12): _conv(((6,), "a", "b")),
    (11, 14): _conv(((1, 2), "a", "c")),
    (13, 16): _conv(((1,), "a", "b"), ((2,), "a", "c")),
    (12, 15): _conv(((1,), "a", "b"), ((2,), "a", "c")),
    (14, 15): _conv(((1,), "c", "b"), ((6,), "a", "b")),
    (4, 16): _conv(((2,), "b", "c"), ((3,), "a", "c")),
    (5, 17): _conv(((2,), "b", "c"), ((3,), "a", "c")),
    (15, 16): _shift(3, _HEX_BOUND),
    (16, 17): _shift(1, _HEX_BOUND),
    (17, 18): _shift(2, _HEX_BOUND),
    (18, 19): _shift(3, _HEX_BOUND),
    (19, 20): _shift(1, _HEX_BOUND),
    (20, 15): _shift(2, _HEX_BOUND),
    (3, 13): _conv(((3,), "a", "c")),
}

_RECIPE_BY_PAIR: dict[frozenset[str], tuple[int, int]] = {
    frozenset((_P_VERTEX[u], _P_VERTEX[v])): (u, v) for u, v in _RECIPES
}


@dataclass(frozen=True)
class Segment:
    """A directed edge of the actualized triangle."""

    from_vertex: str
    to_vertex: str
    edge_label: str
    word: tuple[GenLetter, ...]
    claimed_bound: Bound

    def __len__(self) -> int:
        return len(self.word)

    def reversed_word(self) -> tuple[GenLetter, ...]:
        return tuple(l.inverse() for l in reversed(self.word))


def _conversion_word(
    inst: Instance,
    moves: tuple[_Term, ...],
    enc: LAEncoding,
    elements: Mapping[str, ProductElement],
) -> tuple[GenLetter, ...]:
    n = inst.n
    letters: list[GenLetter] = []
    for classes, xname, yname in moves:
        x, y = elements[xname], elements[yname]
        for i in alpha_union(n, classes):
            spec = inst.factor(i)
            w = x.entry(i).inverse() * y.entry(i)
            for sym, sign in ks_spelling(spec, w).letters:
                if sym[0] == "Y":
                    letters.append(GenLetter.y(i, sym[1], sign))
                else:
                    _, j, r = sym
                    col = enc.column_for(class_of_slot(n, j))
                    sink = placement_slot(n, col, j)
                    letters.append(GenLetter.z(j, i, sink, r, sign))
    return tuple(letters)


def _shift_word(
    inst: Instance,
    block_class: int,
    from_enc: LAEncoding,
    to_enc: LAEncoding,
    deficit: ZVec,
) -> tuple[GenLetter, ...]:
    n = inst.n
    old_col = from_enc.column_for(block_class)
    new_col = to_enc.column_for(block_class)
    letters: list[GenLetter] = []
    for j in alpha(n, block_class):
        old_slot = placement_slot(n, old_col, j)
        new_slot = placement_slot(n, new_col, j)
        if old_slot == new_slot:
            continue
        blk = project_block(deficit, j)
        for r, coeff in enumerate(blk.coords, start=1):
            if coeff == 0:
                continue
            sign = -1 if coeff > 0 else 1
            letters.extend(
                GenLetter.z(j, old_slot, new_slot, r, sign)
                for _ in range(abs(coeff))
            )
    return tuple(letters)


def _build_segment(
    inst: Instance,
    u: str,
    v: str,
    label: str,
    elements: Mapping[str, ProductElement],
) -> Segment:
    for k in range(3):
        pair = frozenset((_unrotate_vertex(u, k), _unrotate_vertex(v, k)))
        key = _RECIPE_BY_PAIR.get(pair)
        if key is None:
            continue
        pu, pv = key
        recipe = _RECIPES[key]
        f_from = _P_FORMULAS[pu]
        f_to = _P_FORMULAS[pv]
        if recipe.kind == "conv":
            matrix = f_from.matrix or f_to.matrix
            if f_from.matrix and f_to.matrix and f_from.matrix != f_to.matrix:
                raise VerificationFailure(
                    f"conversion endpoints {pu}, {pv} disagree on placement"
                )
            word = _conversion_word(
                inst,
                _rot_terms(recipe.moves, k),
                _rot_encoding(matrix, k),
                elements,
            )
        else:
            deficit = _deficit_vector(
                inst, _rot_terms(f_from.deficits, k), elements
            )
            word = _shift_word(
                inst,
                _rot_block_class(recipe.block_class, k),
                _rot_encoding(f_from.matrix, k),
                _rot_encoding(f_to.matrix, k),
                deficit,
            )
        return Segment(
            from_vertex=rotate_vertex(_P_VERTEX[pu], k),
            to_vertex=rotate_vertex(_P_VERTEX[pv], k),
            edge_label=label,
            word=word,
            claimed_bound=Bound(recipe.bound).rotate(k),
        )
    raise VerificationFailure(f"no recipe covers edge ({u}, {v})")


# --- actualization ----------------------------------------------------------


def _require_supported(inst: Instance) -> None:
    sizes = inst.decomposition.block_sizes
    if any(s != 1 for s in sizes):
        raise UnsupportedConstruction(
            "triangle construction needs every summand to be one-dimensional"
            f" (got block sizes {sizes}): basis-lift sections do not"
            " commute within larger blocks, so shared sink slots would"
            " accumulate out of order"
        )


def _require_kernel(inst: Instance, name: str, g: ProductElement) -> None:
    img = phi(g)
    if not img.is_zero():
        raise NotInKernel(f"{name} has nonzero abelian image {img}")


@dataclass(frozen=True)
class RegionLoop:
    """The boundary of one template region, read as a loop of letters."""

    label: str
    boundary: tuple[tuple[Segment, int], ...]

    @property
    def perimeter(self) -> int:
        return sum(len(seg.word) for seg, _ in self.boundary)

    def letters(self) -> tuple[GenLetter, ...]:
        out: list[GenLetter] = []
        for seg, orient in self.boundary:
            out.extend(seg.word if orient == 1 else seg.reversed_word())
        return tuple(out)


@dataclass(frozen=True)
class SegmentCheck:
    edge: tuple[str, str]
    label: str
    length: int
    bound: str
    bound_value: int
    within_bound: bool
    within_4d: bool


@dataclass(frozen=True)
class RegionCheck:
    label: str
    perimeter: int
    within_24d: bool


@dataclass(frozen=True)
class AreaBound:
    """Two upper bounds for the filling area of the triangle."""

    coarse: int  # 25 * model(24 D)
    refined: int  # sum of model(perimeter) over the 25 regions
    D: int


@dataclass(frozen=True)
class Actualization:
    """A filled triangle over three kernel elements."""

    instance: Instance
    a: ProductElement
    b: ProductElement
    c: ProductElement
    vertex_values: Mapping[str, ProductElement]
    segments: Mapping[frozenset[str], Segment]
    regions: tuple[RegionLoop, ...]
    D: int
    D_exact: bool

    @property
    def elements(self) -> dict[str, ProductElement]:
        return {"a": self.a, "b": self.b, "c": self.c}

    def segment_checks(self) -> tuple[SegmentCheck, ...]:
        out = []
        for seg in self.segments.values():
            est = seg.claimed_bound.evaluate(self.instance, self.elements)
            out.append(
                SegmentCheck(
                    edge=(seg.from_vertex, seg.to_vertex),
                    label=seg.edge_label,
                    length=len(seg.word),
                    bound=seg.claimed_bound.display(),
                    bound_value=est.value,
                    within_bound=len(seg.word) <= est.value,
                    within_4d=len(seg.word) <= 4 * self.D,
                )
            )
        return tuple(out)

    def region_checks(self) -> tuple[RegionCheck, ...]:
        return tuple(
            RegionCheck(r.label, r.perimeter, r.perimeter <= 24 * self.D)
            for r in self.regions
        )

    def area_bound(self, model) -> AreaBound:
        """Bound the filling area with a perimeter-to-area model."""
        coarse = 25 * model(24 * self.D)
        refined = sum(model(r.perimeter) for r in self.regions)
        return AreaBound(coarse=coarse, refined=refined, D=self.D)


def _candidate_values(
    inst: Instance, vertex: str, elements: Mapping[str, ProductElement]
) -> list[tuple[int, ProductElement]]:
    out = []
    for k in range(3):
        p = _P_INDEX.get(_unrotate_vertex(vertex, k))
        if p is not None:
            out.append((k, _evaluate_formula(inst, _P_FORMULAS[p], k, elements)))
    return out


def _edge_alphabet_keys(inst: Instance, label: str) -> frozenset[tuple]:
    face = EDGE_ALPHA_ALIASES.get(label, label)
    return alphabet_keys(build_subgroup(inst, face).generators)


# Keyed by id with a held reference: instances need not be hashable.
_ALPHABET_CACHE: dict[int, tuple[Instance, dict[str, frozenset[tuple]]]] = {}


def _alphabet_for(inst: Instance, label: str) -> frozenset[tuple]:
    entry = _ALPHABET_CACHE.get(id(inst))
    if entry is None or entry[0] is not inst:
        entry = (inst, {})
        _ALPHABET_CACHE[id(inst)] = entry
    per_label = entry[1]
    if label not in per_label:
        per_label[label] = _edge_alphabet_keys(inst, label)
    return per_label[label]


def actualize(
    inst: Instance,
    a: ProductElement,
    b: ProductElement,
    c: ProductElement,
) -> Actualization:
    """Fill the template over the triangle with corners a, b=a-side end, c.

    Vertex ``A`` carries ``a``, vertex ``C`` carries ``b`` and vertex
    ``B`` carries ``c``; the right side interpolates from a to b, the
    left side from a to c, the bottom from c to b.  Raises
    :class:`VerificationFailure` if any vertex value disagrees between
    rotation frames, any connecting word fails to connect, or any
    region fails to close over its subgroup's alphabet.
    """
    _require_supported(inst)
    _require_kernel(inst, "a", a)
    _require_kernel(inst, "b", b)
    _require_kernel(inst, "c", c)
    elements = {"a": a, "b": b, "c": c}

    vertex_values: dict[str, ProductElement] = {}
    for vertex in TEMPLATE.vertices:
        candidates = _candidate_values(inst, vertex, elements)
        first = candidates[0][1]
        for k, value in candidates[1:]:
            if value != first:
                raise VerificationFailure(
                    f"vertex {vertex}: frame-{k} value disagrees with"
                    f" frame-{candidates[0][0]}"
                )
        vertex_values[vertex] = first

    segments: dict[frozenset[str], Segment] = {}
    for u, v, label in TEMPLATE.edges:
        seg = _build_segment(inst, u, v, label, elements)
        got = vertex_values[seg.from_vertex] * realize_word(inst, seg.word)
        if got != vertex_values[seg.to_vertex]:
            raise VerificationFailure(
                f"edge ({u}, {v}, {label}): word does not connect its"
                " endpoints"
            )
        allowed = _alphabet_for(inst, label)
        for letter in seg.word:
            if canonical_letter_key(letter) not in allowed:
                raise VerificationFailure(
                    f"edge ({u}, {v}, {label}): letter"
                    f" {format_letter(letter)} outside the edge alphabet"
                )
        segments[frozenset((u, v))] = seg

    regions = []
    for label, cycle in TEMPLATE.faces:
        start = cycle.index(min(cycle))
        ordered = cycle[start:] + cycle[:start]
        boundary = []
        for i, u in enumerate(ordered):
            v = ordered[(i + 1) % len(ordered)]
            seg = segments[frozenset((u, v))]
            boundary.append((seg, 1 if seg.from_vertex == u else -1))
        loop = RegionLoop(label, tuple(boundary))
        if not realize_word(inst, loop.letters()).is_identity():
            raise VerificationFailure(f"region {label} does not close")
        regions.append(loop)

    dd = [
        restricted_distance(x, y, tuple(inst.slots()))
        for x, y in ((a, b), (b, c), (c, a))
    ]
    return Actualization(
        instance=inst,
        a=a,
        b=b,
        c=c,
        vertex_values=vertex_values,
        segments=segments,
        regions=tuple(regions),
        D=sum(e.value for e in dd),
        D_exact=all(e.exact for e in dd),
    )


# --- the seven-segment side path --------------------------------------------

_SIDE_BOUNDS = (
    _D6_AB,
    _D6_AB,
    (((1, 2), "a", "b"),),
    (((3, 4, 5), "a", "b"),),
    (((3, 4), "a", "b"),),
    (((5,), "a", "b"),),
    (((5,), "a", "b"),),
)


def seam_values(
    inst: Instance, a: ProductElement, b: ProductElement
) -> tuple[ProductElement, ProductElement]:
    """The mid-side vertex evaluated through both of its deficit forms."""
    elements = {"a": a, "b": b}
    return (
        _evaluate_formula(inst, _P_FORMULAS[4], 0, elements),
        _evaluate_formula(inst, _P4_ALT, 0, elements),
    )


def spanning_path(
    inst: Instance, a: ProductElement, b: ProductElement
) -> tuple[Segment, ...]:
    """Seven segments from ``a`` to ``b`` along the template's right side.

    Each segment's length is bounded by its claimed coordinate
    distance; the middle segment carries the complementary-classes
    bound, which is what makes the total collapse to a constant for
    adjacent elements.
    """
    _require_supported(inst)
    _require_kernel(inst, "a", a)
    _require_kernel(inst, "b", b)
    elements = {"a": a, "b": b}
    left, right = seam_values(inst, a, b)
    if left != right:
        raise VerificationFailure(
            "mid-side seam: the two deficit forms evaluate differently"
        )
    values = {
        name: _evaluate_formula(inst, _P_FORMULAS[_P_INDEX[name]], 0, elements)
        for name, _unused, _lbl in _SIDE_RIGHT
    }
    values["C"] = _evaluate_formula(inst, _P_FORMULAS[8], 0, elements)
    out = []
    for i, (u, v, label) in enumerate(_SIDE_RIGHT):
        seg = _build_segment(inst, u, v, label, elements)
        seg = Segment(
            seg.from_vertex,
            seg.to_vertex,
            seg.edge_label,
            seg.word,
            Bound(_SIDE_BOUNDS[i]),
        )
        got = values[seg.from_vertex] * realize_word(inst, seg.word)
        if got != values[seg.to_vertex]:
            raise VerificationFailure(
                f"side segment ({u}, {v}, {label}) does not connect"
            )
        out.append(seg)
    return tuple(out)


@dataclass(frozen=True)
class SpanningBound:
    """Per-class coefficients bounding the total side-path length."""

    coefficients: tuple[tuple[tuple[int, ...], int], ...]

    def display(self) -> str:
        parts = []
        for classes, coeff in self.coefficients:
            name = f"d_a{''.join(map(str, classes))}(a,b)"
            parts.append(name if coeff == 1 else f"{coeff}*{name}")
        return " + ".join(parts)

    def evaluate(
        self, inst: Instance, a: ProductElement, b: ProductElement
    ) -> DistanceEstimate:
        total, exact = 0, True
        for classes, coeff in self.coefficients:
            est = restricted_distance(a, b, alpha_union(inst.n, classes))
            total += coeff * est.value
            exact = exact and est.exact
        return DistanceEstimate(total, exact)


def spanning_bound_expression() -> SpanningBound:
    """Bound on the summed length of the seven side segments.

    Evaluated on a pair at distance one this is at most 3 for a kernel
    word letter (one slot class moves) and at most 6 for a lift-pair
    letter (two slot classes move), giving the uniform constant 6.
    """
    return SpanningBound(((((1, 2), 3), ((3, 4), 1), ((5,), 2), ((6,), 3))))
