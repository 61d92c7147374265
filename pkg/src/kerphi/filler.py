"""Filling kernel loops: subdivision diagrams and area accounting.

A loop over the vector alphabet is padded to length ``3 * 2**k`` and
spanned by a Farey-style fan: a central triangle on the three third
points, then ``k + 2`` reflection rounds, each round reflecting every
frontier chord to the midpoint of its boundary arc.  Rounds past the
unit-arc resolution only exist formally (their apex coincides with an
endpoint); they are counted separately so the combinatorial census
stays a closed form.  Every non-degenerate triangle is actualized with
the 25-region template and every unit arc closes into a bigon whose
inner side is a seven-segment path of at most six letters.

Summing a perimeter-to-area model over this diagram gives the total
filling cost; depending on whether the model is superadditive the cost
collapses to one of two closed-form branches, which is what the area
reports compare against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .lattice import GenLetter, format_letter, parse_letter, realize_word, vector_alphabet
from .product import Instance, ProductElement
from .triangle import actualize, spanning_path


class OpenLoop(ValueError):
    """A letter sequence that was supposed to close does not."""


class ModelRangeError(ValueError):
    """A table-backed model was evaluated outside its table."""


# --- perimeter-to-area models ------------------------------------------------


@dataclass(frozen=True)
class DehnModel:
    """A nonnegative, nondecreasing perimeter-to-area estimate.

    ``superadditive`` selects the closed-form branch used by area
    reports: superadditive models admit the merged single-evaluation
    bound, others go through their superadditive closure and pay a
    logarithmic factor.
    """

    kind: str
    superadditive: bool
    degree: int = 2
    table: tuple[int, ...] = ()
    func: Callable[[int], int] | None = None

    @classmethod
    def quadratic(cls) -> "DehnModel":
        return cls(kind="quadratic", superadditive=True)

    @classmethod
    def polynomial(cls, degree: int) -> "DehnModel":
        if degree < 1:
            raise ValueError("polynomial degree must be at least 1")
        return cls(kind="polynomial", superadditive=True, degree=degree)

    @classmethod
    def from_table(
        cls, values: Iterable[int], superadditive: bool = False
    ) -> "DehnModel":
        table = tuple(int(v) for v in values)
        if not table:
            raise ValueError("table model needs at least one value")
        return cls(kind="table", superadditive=superadditive, table=table)

    @classmethod
    def from_function(
        cls, func: Callable[[int], int], superadditive: bool = False
    ) -> "DehnModel":
        return cls(kind="user", superadditive=superadditive, func=func)

    def __call__(self, x: int) -> int:
        if x < 0:
            raise ValueError("perimeter must be nonnegative")
        if self.kind == "quadratic":
            return x * x
        if self.kind == "polynomial":
            return x**self.degree
        if self.kind == "table":
            if x >= len(self.table):
                raise ModelRangeError(
                    f"table covers arguments 0..{len(self.table) - 1},"
                    f" needed {x}"
                )
            return self.table[x]
        assert self.func is not None
        return self.func(x)


def superadditive_closure(values: Sequence[int]) -> tuple[int, ...]:
    """Pointwise-least superadditive majorant, by splitting.

    ``out[x] = max(values[x], max_i out[i] + out[x - i])``.
    """
    out: list[int] = []
    for x, v in enumerate(values):
        best = v
        for i in range(1, x // 2 + 1):
            cand = out[i] + out[x - i]
            if cand > best:
                best = cand
        out.append(best)
    return tuple(out)


_CLOSURE_CACHE: dict[int, tuple[DehnModel, tuple[int, ...]]] = {}


def _closure_value(model: DehnModel, x: int) -> int:
    hit = _CLOSURE_CACHE.get(id(model))
    if hit is None or hit[0] is not model or len(hit[1]) <= x:
        closed = superadditive_closure([model(i) for i in range(x + 1)])
        _CLOSURE_CACHE[id(model)] = (model, closed)
        return closed[x]
    return hit[1][x]


def dominance_check(
    f: Callable[[int], int],
    g: Callable[[int], int],
    upto: int,
    c_max: int = 64,
) -> int | None:
    """Smallest ``C <= c_max`` with ``f(n) <= C*g(C*n + C) + C*n + C`` on
    ``1..upto``, or None.  A finite-range probe, not a proof."""
    for c in range(1, c_max + 1):
        if all(f(n) <= c * g(c * n + c) + c * n + c for n in range(1, upto + 1)):
            return c
    return None


# --- loops -------------------------------------------------------------------


@dataclass(frozen=True)
class KernelLoop:
    """A word over the vector alphabet that multiplies to the identity."""

    letters: tuple[GenLetter, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def validate(self, inst: Instance) -> None:
        value = realize_word(inst, self.letters)
        if not value.is_identity():
            raise OpenLoop(
                f"letter sequence of length {len(self.letters)} evaluates"
                f" to a nontrivial element with support {value.support()}"
            )

    def display(self) -> str:
        return " ".join(format_letter(l) for l in self.letters)

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "KernelLoop":
        return cls(tuple(parse_letter(t) for t in tokens))


def pad_loop(loop: KernelLoop) -> tuple[int, tuple[GenLetter | None, ...]]:
    """Round the loop length up to ``3 * 2**k`` with identity steps.

    Returns ``(k, steps)`` where ``steps`` has exactly ``3 * 2**k``
    entries and ``None`` marks a padding step (stay at the same
    element).  Loops shorter than 3 are rejected.
    """
    length = len(loop)
    if length < 3:
        raise ValueError("a loop needs at least 3 letters to span")
    k = 0
    while 3 * 2**k < length:
        k += 1
    target = 3 * 2**k
    steps: tuple[GenLetter | None, ...] = loop.letters + (None,) * (
        target - length
    )
    return k, steps


def random_kernel_loop(
    inst: Instance, target_length: int, seed: int | None = None
) -> KernelLoop:
    """A seeded random loop: a random half, closed by a side path.

    Draws roughly half the budget as random signed letters, then closes
    the resulting element back to the identity along the seven-segment
    side path.  Retries with a shorter random half until the closed
    loop fits the budget.
    """
    if target_length < 3:
        raise ValueError("target length must be at least 3")
    rng = random.Random(seed)
    alphabet = vector_alphabet(inst)
    half = max(1, target_length // 2)
    for _ in range(32):
        drawn = [rng.choice(alphabet) for _ in range(half)]
        letters = tuple(
            l if rng.random() < 0.5 else l.inverse() for l in drawn
        )
        g = realize_word(inst, letters)
        closing: list[GenLetter] = []
        for seg in spanning_path(inst, g, inst.identity()):
            closing.extend(seg.word)
        candidate = letters + tuple(closing)
        if 3 <= len(candidate) <= target_length:
            loop = KernelLoop(candidate)
            loop.validate(inst)
            return loop
        half = max(1, (3 * half) // 4)
    raise RuntimeError(
        f"could not close a random loop within {target_length} letters"
    )


# --- the subdivision diagram -------------------------------------------------


@dataclass(frozen=True)
class FareyTriangle:
    """One reflection triangle, possibly only formal."""

    corners: tuple[int, int, int]  # boundary indices, increasing
    level: int  # 0 = central, then reflection rounds 1..k+2
    beta: tuple[int, ...]  # apex lineage, one entry per round
    degenerate: bool


@dataclass(frozen=True)
class VertexLabel:
    index: int
    letter: str  # a / b / c
    depth: int
    beta: tuple[int, ...]


@dataclass(frozen=True)
class FareyDiagram:
    k: int
    size: int  # 3 * 2**k boundary steps
    triangles: tuple[FareyTriangle, ...]
    labels: tuple[VertexLabel, ...]

    @property
    def formal_triangle_count(self) -> int:
        return len(self.triangles)

    @property
    def degenerate_count(self) -> int:
        return sum(1 for t in self.triangles if t.degenerate)

    @property
    def nondegenerate_count(self) -> int:
        return len(self.triangles) - self.degenerate_count

    @property
    def bigon_count(self) -> int:
        return self.size

    def label_map(self) -> dict[int, VertexLabel]:
        return {label.index: label for label in self.labels}


def formal_triangle_census(k: int) -> int:
    return 3 * 2 ** (k + 2) - 2


def bigon_census(k: int) -> int:
    return 3 * 2**k


_LETTER_STEP = {"a": 1, "b": 2, "c": 3}


def tessellate(k: int) -> FareyDiagram:
    """The formal reflection fan over ``3 * 2**k`` boundary steps.

    The central triangle sits on the three third points; each round
    reflects every frontier chord onto the midpoint of its arc.  Two
    rounds past unit resolution are kept as degenerate bookkeeping so
    the census is independent of the loop.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    size = 3 * 2**k
    third = 2**k
    corners = (0, third, 2 * third)
    letters = {0: "a", third: "b", 2 * third: "c", size: "a"}
    labels = [
        VertexLabel(corners[0], "a", 0, ()),
        VertexLabel(corners[1], "b", 0, ()),
        VertexLabel(corners[2], "c", 0, ()),
    ]
    triangles = [FareyTriangle(corners, 0, (), False)]
    # frontier arcs: (left index, right index, parent beta)
    arcs = [
        (0, third, ()),
        (third, 2 * third, ()),
        (2 * third, size, ()),
    ]
    for level in range(1, k + 3):
        next_arcs = []
        for left, right, parent_beta in arcs:
            mid = (left + right) // 2
            # min() keeps the choice stable when a zero-length arc makes
            # the complement ambiguous
            apex_letter = min({"a", "b", "c"} - {letters[left], letters[right]})
            beta = parent_beta + (_LETTER_STEP[apex_letter],)
            degenerate = mid in (left, right)
            triangles.append(
                FareyTriangle(
                    tuple(sorted((left, mid, right))), level, beta, degenerate
                )
            )
            if not degenerate:
                letters[mid] = apex_letter
                labels.append(VertexLabel(mid, apex_letter, level, beta))
            next_arcs.extend(
                ((left, mid, beta), (mid, right, beta))
            )
        arcs = next_arcs
    return FareyDiagram(
        k=k, size=size, triangles=tuple(triangles), labels=tuple(labels)
    )


# --- filling -----------------------------------------------------------------


@dataclass(frozen=True)
class TriangleCost:
    corners: tuple[int, int, int]
    D: int  # letter-metric bound on the summed corner distances
    cost: int  # 25 * model(24 * D)


@dataclass(frozen=True)
class AreaReport:
    """Total filling cost of one padded loop against a model."""

    loop_length: int  # padded length 3 * 2**k
    k: int
    triangle_count: int  # formal census
    nondegenerate_count: int
    degenerate_count: int
    bigon_count: int
    triangle_costs: tuple[TriangleCost, ...]
    bigon_constant: int
    exact_sum: int
    closed_form_bound: int
    branch: str  # "superadditive" | "logarithmic"


def superadditive_branch_bound(model: DehnModel, n: int, M: int) -> int:
    return 100 * model(32 * n) + M * n


def logarithmic_branch_bound(model: DehnModel, n: int, M: int) -> int:
    if n % 3 != 0 or n // 3 & (n // 3 - 1):
        raise ValueError("branch bounds apply to padded lengths 3 * 2**k")
    k = (n // 3).bit_length() - 1
    return (75 * k + 25) * _closure_value(model, 24 * n) + M * n


def closed_form_bound(model: DehnModel, n: int, M: int) -> tuple[int, str]:
    if model.superadditive:
        return superadditive_branch_bound(model, n, M), "superadditive"
    return logarithmic_branch_bound(model, n, M), "logarithmic"


class _SpanLengths:
    """Memoized letter counts of side paths between boundary vertices."""

    def __init__(self, inst: Instance, prefixes: Sequence[ProductElement]):
        self.inst = inst
        self.prefixes = prefixes
        self.cache: dict[tuple[int, int], int] = {}

    def __call__(self, i: int, j: int) -> int:
        size = len(self.prefixes) - 1
        a, b = i % size, j % size
        key = (min(a, b), max(a, b))
        if key[0] == key[1]:
            return 0
        found = self.cache.get(key)
        if found is None:
            segments = spanning_path(
                self.inst, self.prefixes[key[0]], self.prefixes[key[1]]
            )
            found = sum(len(seg.word) for seg in segments)
            self.cache[key] = found
        return found


def fill(
    inst: Instance,
    loop: KernelLoop,
    model: DehnModel,
    M: int | None = None,
) -> AreaReport:
    """Actualize every diagram triangle of the padded loop and price it.

    Each non-degenerate triangle is actualized (raising on any
    structural failure) and charged ``25 * model(24 * D)``, where ``D``
    bounds the summed corner distances in the letter metric: the
    boundary arc count capped by the memoized side-path length.  Each
    unit arc is charged the bigon constant ``M`` (defaulting to
    ``model(7)``, the bigon perimeter bound).  The total is compared
    against the branch closed form for the padded length.
    """
    if model is None:
        raise ValueError("an area model is required")
    loop.validate(inst)
    k, steps = pad_loop(loop)
    diagram = tessellate(k)

    prefixes: list[ProductElement] = [inst.identity()]
    for step in steps:
        if step is None:
            prefixes.append(prefixes[-1])
        else:
            prefixes.append(prefixes[-1] * step.realize(inst))
    if not prefixes[-1].is_identity():
        raise OpenLoop("padded boundary does not return to the identity")

    bigon_constant = model(7) if M is None else M
    spans = _SpanLengths(inst, prefixes)

    def chord(i: int, j: int) -> int:
        arc = min(abs(j - i), diagram.size - abs(j - i))
        return min(arc, spans(i, j))

    costs = []
    for triangle in diagram.triangles:
        if triangle.degenerate:
            continue
        i, m, j = triangle.corners
        actualize(inst, prefixes[i], prefixes[j], prefixes[m])
        D = chord(i, m) + chord(m, j) + chord(i, j)
        costs.append(
            TriangleCost(triangle.corners, D, 25 * model(24 * D))
        )

    exact_sum = sum(c.cost for c in costs) + diagram.bigon_count * bigon_constant
    bound, branch = closed_form_bound(model, diagram.size, bigon_constant)
    return AreaReport(
        loop_length=diagram.size,
        k=k,
        triangle_count=diagram.formal_triangle_count,
        nondegenerate_count=diagram.nondegenerate_count,
        degenerate_count=diagram.degenerate_count,
        bigon_count=diagram.bigon_count,
        triangle_costs=tuple(costs),
        bigon_constant=bigon_constant,
        exact_sum=exact_sum,
        closed_form_bound=bound,
        branch=branch,
    )
