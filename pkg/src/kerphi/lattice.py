"""The distinguished subgroups of the kernel and their verification.

Factor slots 1..2n are grouped into six label sequences: the first three
split the blocks 1..n into consecutive runs of sizes ceil(n/3) >= ... ,
and the last three are their shifts by n.  Over these sequences the
module builds the 46 distinguished subgroups of the kernel -- 13
standard faces, 12 shifted ("dotted") faces, and 21 edge subgroups --
each as an explicit list of vector generators (:class:`GenLetter`),
together with three verifiable descriptions:

* a *pattern*: what the projection to every factor slot looks like
  (the whole factor, lifts of one block, or trivial);
* a *linear-algebra encoding*: at which slot each coordinate block may
  sit, with a dot marking the shifted placement;
* a *determinacy* statement: a set A of slots such that every remaining
  slot of a kernel element of the subgroup is a forced section lift.

The verifiers work generator by generator and report witnesses instead
of just booleans, so a failing table entry points at the offending
letter and slot.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .abelian import ZVec, project_block
from .factor import (
    FactorSpec,
    Word,
    evaluate_phi,
    kernel_section_gens,
    section_word,
)
from .product import Instance, ProductElement, phi


class EncodingNotExecutable(ValueError):
    """Applying a descriptive (multi-slot) encoding column was requested."""


class UnknownLabel(KeyError):
    pass


# --- label sequences -------------------------------------------------------


@dataclass(frozen=True)
class LabelSequence:
    """One of the six slot classes: consecutive factor slots."""

    id: int
    members: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)


def build_label_sequences(n: int) -> tuple[LabelSequence, ...]:
    """The six slot classes for a product of 2n factors.

    Classes 1..3 partition slots 1..n into consecutive runs with sizes
    ``ceil(i * n / 3) - ceil((i - 1) * n / 3)`` (weakly decreasing);
    classes 4..6 are their shifts by n.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    firsts = []
    for i in (1, 2, 3):
        lo = math.ceil((i - 1) * n / 3) + 1
        hi = math.ceil(i * n / 3)
        firsts.append(tuple(range(lo, hi + 1)))
    seqs = [LabelSequence(i + 1, m) for i, m in enumerate(firsts)]
    seqs += [
        LabelSequence(i + 4, tuple(s + n for s in m))
        for i, m in enumerate(firsts)
    ]
    return tuple(seqs)


def alpha(n: int, c: int) -> tuple[int, ...]:
    """Members of class ``c`` (1..6) for the given n."""
    return build_label_sequences(n)[c - 1].members


def alpha_union(n: int, classes: Iterable[int]) -> tuple[int, ...]:
    """Ascending union of several classes."""
    out: list[int] = []
    for c in classes:
        out.extend(alpha(n, c))
    return tuple(sorted(out))


def class_of_slot(n: int, slot: int) -> int:
    for seq in build_label_sequences(n):
        if slot in seq.members:
            return seq.id
    raise ValueError(f"slot {slot} out of range 1..{2 * n}")


def dotted_shift(n: int, c: int, j: int) -> int:
    """The shifted sink slot for a block ``j`` of class ``c`` in 1..3.

    Class 1 blocks shift past the top half into the head of classes
    5/6, class 2 blocks into the head of classes 3/4, class 3 blocks
    into the head of classes 1/2.
    """
    seqs = build_label_sequences(n)
    if c == 1:
        if j not in seqs[0].members:
            raise ValueError(f"block {j} is not in class 1")
        return j + n + len(seqs[0])
    if c == 2:
        if j not in seqs[1].members:
            raise ValueError(f"block {j} is not in class 2")
        return j + len(seqs[1])
    if c == 3:
        if j not in seqs[2].members:
            raise ValueError(f"block {j} is not in class 3")
        return j - len(seqs[0]) - len(seqs[1])
    raise ValueError(f"dotted shifts exist for classes 1..3 only, got {c}")


def dotted_head_class(c: int) -> int:
    """The printed slot-class label of the shifted placement for class c."""
    return {1: 5, 2: 3, 3: 1}[c]


# --- generator letters -----------------------------------------------------


@dataclass(frozen=True)
class GenLetter:
    """A vector generator: one kernel word or one balanced lift pair.

    ``Y(i, t)`` places the t-th kernel word of factor ``i`` at slot i.
    ``Z(j, i, k, r, sign)`` places the lift of ``sign * e_{j,r}`` at the
    source slot ``i`` and the lift of ``-sign * e_{j,r}`` at the sink
    slot ``k`` (``i != k``), so it always lies in the kernel.
    """

    kind: str
    factor: int | None = None
    index: int | None = None
    block: int | None = None
    source: int | None = None
    sink: int | None = None
    basis: int | None = None
    sign: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.kind == "Y":
            if self.factor is None or self.index is None:
                raise ValueError("Y letters need (factor, index)")
        elif self.kind == "Z":
            if None in (self.block, self.source, self.sink, self.basis):
                raise ValueError("Z letters need (block, source, sink, basis)")
            if self.source == self.sink:
                raise ValueError(
                    "Z letters need distinct source and sink slots"
                )
        else:
            raise ValueError(f"unknown letter kind {self.kind!r}")

    @classmethod
    def y(cls, factor: int, index: int, sign: int = 1) -> "GenLetter":
        return cls(kind="Y", factor=factor, index=index, sign=sign)

    @classmethod
    def z(
        cls, block: int, source: int, sink: int, basis: int, sign: int = 1
    ) -> "GenLetter":
        return cls(
            kind="Z",
            block=block,
            source=source,
            sink=sink,
            basis=basis,
            sign=sign,
        )

    def inverse(self) -> "GenLetter":
        return GenLetter(
            kind=self.kind,
            factor=self.factor,
            index=self.index,
            block=self.block,
            source=self.source,
            sink=self.sink,
            basis=self.basis,
            sign=-self.sign,
        )

    def base(self) -> "GenLetter":
        """The positively signed version of this letter."""
        return self if self.sign == 1 else self.inverse()

    def realize(self, inst: Instance) -> ProductElement:
        if self.kind == "Y":
            inst.check_slot(self.factor)
            spec = inst.factor(self.factor)
            gens = kernel_section_gens(spec)
            spec.check_gen(self.index)
            w = gens.Y[self.index - 1]
            if self.sign == -1:
                w = w.inverse()
            return inst.identity().with_entry(self.factor, w)
        inst.check_slot(self.source)
        inst.check_slot(self.sink)
        src_spec = inst.factor(self.source)
        sink_spec = inst.factor(self.sink)
        size = inst.decomposition.block_size(self.block)
        if not 1 <= self.basis <= size:
            raise ValueError(
                f"basis index {self.basis} out of range for block {self.block}"
            )
        coords = [0] * size
        coords[self.basis - 1] = self.sign
        src_word = section_word(src_spec, self.block, tuple(coords))
        sink_word = section_word(
            sink_spec, self.block, tuple(-c for c in coords)
        )
        return (
            inst.identity()
            .with_entry(self.source, src_word)
            .with_entry(self.sink, sink_word)
        )


def format_letter(letter: GenLetter) -> str:
    if letter.kind == "Y":
        body = f"Y({letter.factor},{letter.index})"
        return body if letter.sign == 1 else "-" + body
    s = "+" if letter.sign == 1 else "-"
    return f"Z({letter.block},{letter.source},{letter.sink},{letter.basis},{s})"


def parse_letter(token: str) -> GenLetter:
    token = token.strip()
    negate = False
    if token.startswith("-"):
        negate = True
        token = token[1:].strip()
    if not token.endswith(")"):
        raise ValueError(f"malformed letter token {token!r}")
    head, _, inner = token[:-1].partition("(")
    parts = [p.strip() for p in inner.split(",")]
    if head == "Y" and len(parts) == 2:
        letter = GenLetter.y(int(parts[0]), int(parts[1]))
    elif head == "Z" and len(parts) == 5:
        if parts[4] not in ("+", "-"):
            raise ValueError(f"Z sign must be + or -, got {parts[4]!r}")
        letter = GenLetter.z(
            int(parts[0]),
            int(parts[1]),
            int(parts[2]),
            int(parts[3]),
            1 if parts[4] == "+" else -1,
        )
    else:
        raise ValueError(f"malformed letter token {token!r}")
    return letter.inverse() if negate else letter


def realize_word(inst: Instance, letters: Sequence[GenLetter]) -> ProductElement:
    out = inst.identity()
    for letter in letters:
        out = out * letter.realize(inst)
    return out


# --- linear-algebra encodings ----------------------------------------------


@dataclass(frozen=True)
class LAColumn:
    """One column: a block class, optional dot, allowed slot classes."""

    block_class: int
    dotted: bool
    slots: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.block_class <= 3:
            raise ValueError("column tops are block classes 1..3")
        standard = {self.block_class, self.block_class + 3}
        nonstandard = [s for s in self.slots if s not in standard]
        if self.dotted and not nonstandard:
            raise ValueError(
                "a dotted column must allow a shifted slot class"
            )
        if not self.dotted and nonstandard:
            raise ValueError(
                f"undotted column for class {self.block_class} cannot sit at"
                f" slot classes {nonstandard}"
            )

    @property
    def executable(self) -> bool:
        return len(self.slots) == 1


@dataclass(frozen=True)
class LAEncoding:
    columns: tuple[LAColumn, ...]

    def column_for(self, block_class: int) -> LAColumn:
        for col in self.columns:
            if col.block_class == block_class:
                return col
        raise KeyError(f"no column for block class {block_class}")


def encoding_to_string(enc: LAEncoding) -> str:
    tops, bottoms = [], []
    for col in enc.columns:
        tops.append(f"{col.block_class}." if col.dotted else f"{col.block_class}")
        bottoms.append("/".join(str(s) for s in col.slots))
    return " ".join(tops) + " / " + " ".join(bottoms)


def encoding_from_string(text: str) -> LAEncoding:
    top_text, _, bottom_text = text.partition(" / ")
    tops = top_text.split()
    bottoms = bottom_text.split()
    if not bottom_text or len(tops) != len(bottoms):
        raise ValueError(f"malformed encoding {text!r}")
    cols = []
    for top, bottom in zip(tops, bottoms):
        dotted = top.endswith(".")
        c = int(top[:-1] if dotted else top)
        slots = tuple(int(s) for s in bottom.split("/"))
        cols.append(LAColumn(c, dotted, slots))
    return LAEncoding(tuple(cols))


def placement_slot(n: int, col: LAColumn, j: int) -> int:
    """The slot where an executable column places block ``j`` of its class."""
    if not col.executable:
        raise EncodingNotExecutable(
            f"column for block class {col.block_class} lists slot classes"
            f" {col.slots} and cannot be applied"
        )
    s = col.slots[0]
    if s == col.block_class:
        return j
    if s == col.block_class + 3:
        return j + n
    return dotted_shift(n, col.block_class, j)


def apply_la_encoding(
    inst: Instance, v: ZVec, enc: LAEncoding
) -> ProductElement:
    """Place the canonical lift of each block of ``v`` at its encoded slot.

    Only single-slot columns are executable; a column listing several
    slot classes is descriptive and raises :class:`EncodingNotExecutable`.
    """
    if v.decomposition != inst.decomposition:
        raise ValueError("vector does not match the instance decomposition")
    n = inst.n
    out = inst.identity()
    covered: set[int] = set()
    for col in enc.columns:
        if not col.executable:
            raise EncodingNotExecutable(
                f"column for block class {col.block_class} lists slot classes"
                f" {col.slots} and cannot be applied"
            )
        for j in alpha(n, col.block_class):
            covered.add(j)
            blk = project_block(v, j)
            if blk.is_zero():
                continue
            slot = placement_slot(n, col, j)
            lift = section_word(inst.factor(slot), j, blk.coords)
            out = out * inst.identity().with_entry(slot, lift)
    for j in range(1, n + 1):
        if j not in covered and not project_block(v, j).is_zero():
            raise EncodingNotExecutable(
                f"encoding has no column for block {j} but the vector is"
                " nonzero there"
            )
    return out


# --- patterns ---------------------------------------------------------------


def pattern_shape(group_class: int) -> tuple[tuple[int, ...], ...]:
    """Position -> covered slot classes, for the 6- and 5-entry shapes."""
    if group_class == 0:
        return ((1,), (2,), (3,), (4,), (5,), (6,))
    if group_class == 1:
        return ((1,), (2,), (3,), (4,), (5, 6))
    if group_class == 2:
        return ((1,), (2,), (3, 4), (5,), (6,))
    if group_class == 3:
        return ((1, 2), (3,), (4,), (5,), (6,))
    raise ValueError(f"group class must be 0..3, got {group_class}")


@dataclass(frozen=True)
class Pattern:
    """A pattern row: one entry per (possibly merged) slot-class position.

    Entries are ``"G"`` (full factor), ``"E"`` (trivial), ``"A<c>"``
    (lifts of the class-c blocks, matched to slots in order) or
    ``"A<c>E"`` (the same on the leading |class c| slots of a merged
    position, trivial on the rest).
    """

    group_class: int
    entries: tuple[str, ...]

    def __post_init__(self) -> None:
        shape = pattern_shape(self.group_class)
        if len(self.entries) != len(shape):
            raise ValueError(
                f"expected {len(shape)} entries, got {len(self.entries)}"
            )
        for e in self.entries:
            if e not in ("G", "E", "A1", "A2", "A3", "A1E", "A2E", "A3E"):
                raise ValueError(f"unknown pattern entry {e!r}")

    def resolve(self, n: int) -> dict[int, tuple]:
        """Per-slot expectations: ``("E",)``, ``("G",)`` or ``("A", block)``."""
        out: dict[int, tuple] = {}
        for classes, entry in zip(pattern_shape(self.group_class), self.entries):
            slots = alpha_union(n, classes)
            if entry == "E":
                for s in slots:
                    out[s] = ("E",)
            elif entry == "G":
                for s in slots:
                    out[s] = ("G",)
            else:
                c = int(entry[1])
                blocks = alpha(n, c)
                partial = entry.endswith("E")
                if not partial and len(slots) != len(blocks):
                    raise ValueError(
                        f"entry {entry} covers {len(slots)} slots but class"
                        f" {c} has {len(blocks)} blocks"
                    )
                for p, s in enumerate(slots):
                    if p < len(blocks):
                        out[s] = ("A", blocks[p])
                    else:
                        out[s] = ("E",)
        return out

    def display(self) -> str:
        return "(" + ", ".join(self.entries) + ")"


# --- subgroup definitions ----------------------------------------------------


@dataclass(frozen=True)
class DeterminacyOption:
    """One choice of determining slots A with its slot -> block map."""

    name: str
    A: tuple[int, ...]
    f: tuple[tuple[int, int], ...]  # (slot outside A, forced block)

    def f_map(self) -> dict[int, int]:
        return dict(self.f)


@dataclass(frozen=True)
class SubgroupDef:
    """A distinguished subgroup: generators plus its expected table rows."""

    label: str
    kind: str  # "face" or "edge"
    group_class: int  # 0 standard, 1/2/3 for shifted families
    generators: tuple[GenLetter, ...]
    pattern: Pattern
    encoding: LAEncoding
    determinacy: tuple[DeterminacyOption, ...]
    trivial_b_classes: tuple[int, ...] = ()
    alt_pattern: Pattern | None = None
    notes: str = ""

    def alphabet(self) -> tuple[GenLetter, ...]:
        return self.generators


def _std_determinacy(n: int, name: str, classes: Iterable[int]) -> DeterminacyOption:
    A = alpha_union(n, classes)
    f = tuple(
        (j, (j - 1) % n + 1)
        for j in range(1, 2 * n + 1)
        if j not in set(A)
    )
    return DeterminacyOption(name=name, A=A, f=f)


def _group_determinacy(n: int, g: int) -> DeterminacyOption:
    """The determining slots shared by all faces of shifted family g."""
    seqs = build_label_sequences(n)
    if g == 1:
        head = [dotted_shift(n, 1, j) for j in seqs[0].members]
        A = tuple(sorted(set(alpha_union(n, (1, 4, 5, 6))) - set(head)))
        f = [(j, j) for j in alpha_union(n, (2, 3))]
        f += [(s, j) for j, s in zip(seqs[0].members, head)]
    elif g == 2:
        head = [dotted_shift(n, 2, j) for j in seqs[1].members]
        A = tuple(sorted(set(alpha_union(n, (2, 3, 4, 5))) - set(head)))
        f = [(j, j) for j in alpha(n, 1)]
        f += [(j, j - n) for j in alpha(n, 6)]
        f += [(s, j) for j, s in zip(seqs[1].members, head)]
    elif g == 3:
        head = [dotted_shift(n, 3, j) for j in seqs[2].members]
        A = tuple(sorted(set(alpha_union(n, (1, 2, 3, 6))) - set(head)))
        f = [(j, j - n) for j in alpha_union(n, (4, 5))]
        f += [(s, j) for j, s in zip(seqs[2].members, head)]
    else:
        raise ValueError(f"group class must be 1..3, got {g}")
    return DeterminacyOption(
        name=f"shifted family {g}", A=A, f=tuple(sorted(f))
    )


def _y_letters(inst: Instance, slot: int) -> list[GenLetter]:
    gens = kernel_section_gens(inst.factor(slot))
    return [GenLetter.y(slot, t) for t in gens.nonidentity_y_indices]


def _z_letters(
    inst: Instance, block: int, source: int, sink: int
) -> list[GenLetter]:
    size = inst.decomposition.block_size(block)
    return [
        GenLetter.z(block, source, sink, r) for r in range(1, size + 1)
    ]


def _source_letters(
    inst: Instance,
    source_slots: Iterable[int],
    sink_slots: Iterable[int],
    dotted_class: int | None,
) -> tuple[GenLetter, ...]:
    """Generators of the face families: per source, kernel words plus one
    balanced lift pair into every listed sink slot (block matched to the
    sink's class), plus the shifted pairs when a dotted class is given."""
    n = inst.n
    letters: list[GenLetter] = []
    for i in source_slots:
        letters.extend(_y_letters(inst, i))
        for j in sink_slots:
            letters.extend(_z_letters(inst, (j - 1) % n + 1, i, j))
        if dotted_class is not None:
            for j in alpha(n, dotted_class):
                letters.extend(
                    _z_letters(inst, j, i, dotted_shift(n, dotted_class, j))
                )
    return tuple(letters)


def _pair_letters(
    inst: Instance, block_class: int, low_source: bool, dotted: bool
) -> tuple[GenLetter, ...]:
    """Generators of the pure lift-pair families: one balanced pair per
    block of the class, from slot j (or j+n) to the opposite standard
    slot or to the shifted slot."""
    n = inst.n
    letters: list[GenLetter] = []
    for j in alpha(n, block_class):
        src = j if low_source else j + n
        dst = dotted_shift(n, block_class, j) if dotted else (j + n if low_source else j)
        letters.extend(_z_letters(inst, j, src, dst))
    return tuple(letters)


# Table rows.  Standard faces: (source classes, encoding, pattern entries).
_STD_FACES: dict[str, tuple[tuple[int, ...], str, tuple[str, ...]]] = {
    "G123": ((1, 2, 3), "1 2 3 / 4 5 6", ("G", "G", "G", "A1", "A2", "A3")),
    "G126": ((1, 2, 6), "1 2 3 / 4 5 3", ("G", "G", "A3", "A1", "A2", "G")),
    "G156": ((1, 5, 6), "1 2 3 / 4 2 3", ("G", "A2", "A3", "A1", "G", "G")),
    "G234": ((2, 3, 4), "1 2 3 / 1 5 6", ("A1", "G", "G", "G", "A2", "A3")),
    "G345": ((3, 4, 5), "1 2 3 / 1 2 6", ("A1", "A2", "G", "G", "G", "A3")),
    "G456": ((4, 5, 6), "1 2 3 / 1 2 3", ("A1", "A2", "A3", "G", "G", "G")),
    "A3G12": ((1, 2), "1 2 3 / 4 5 3/6", ("G", "G", "A3", "A1", "A2", "A3")),
    "A2G16": ((1, 6), "1 2 3 / 4 2/5 3", ("G", "A2", "A3", "A1", "A2", "G")),
    "A1G23": ((2, 3), "1 2 3 / 1/4 5 6", ("A1", "G", "G", "A1", "A2", "A3")),
    "A2G34": ((3, 4), "1 2 3 / 1 2/5 6", ("A1", "A2", "G", "G", "A2", "A3")),
    "A3G45": ((4, 5), "1 2 3 / 1 2 3/6", ("A1", "A2", "A3", "G", "G", "A3")),
    "A1G56": ((5, 6), "1 2 3 / 1/4 2 3", ("A1", "A2", "A3", "A1", "G", "G")),
}

# t such that A^t pairs with the two-class standard faces, by source set.
_STD_FACE_T = {
    "A3G12": 3, "A2G16": 2, "A1G23": 1, "A2G34": 2, "A3G45": 3, "A1G56": 1,
}

# Shifted faces: (sources, standard sink classes, family, encoding, pattern).
_NONSTD_FACES: dict[
    str, tuple[tuple[int, ...], tuple[int, ...], int, str, tuple[str, ...]]
] = {
    "G14N": ((1, 4), (2, 3), 1, "1. 2 3 / 5 2 3", ("G", "A2", "A3", "G", "A1E")),
    "G25N": ((2, 5), (1, 6), 2, "1 2. 3 / 1 3 6", ("A1", "G", "A2E", "G", "A3")),
    "G36N": ((3, 6), (4, 5), 3, "1 2 3. / 4 5 1", ("A3E", "G", "A1", "A2", "G")),
    "A1G1N": ((1,), (2, 3, 4), 1, "1. 2 3 / 4/5 2 3", ("G", "A2", "A3", "A1", "A1E")),
    "A1G4N": ((4,), (1, 2, 3), 1, "1. 2 3 / 1/5 2 3", ("A1", "A2", "A3", "G", "A1E")),
    "A2G2N": ((2,), (1, 5, 6), 2, "1 2. 3 / 1 3/5 6", ("A1", "G", "A2E", "A2", "A3")),
    "A2G5N": ((5,), (1, 2, 6), 2, "1 2. 3 / 1 2/3 6", ("A1", "A2", "A2E", "G", "A3")),
    "A3G3N": ((3,), (4, 5, 6), 3, "1 2 3. / 4 5 1/6", ("A3E", "G", "A1", "A2", "A3")),
    "A3G6N": ((6,), (3, 4, 5), 3, "1 2 3. / 4 5 1/3", ("A3E", "A3", "A1", "A2", "G")),
}

# Pure pair faces: (family, encoding, pattern, trivial projection classes).
_PAIR_FACES: dict[str, tuple[int, str, tuple[str, ...], tuple[int, ...]]] = {
    "A11N": (1, "1. / 1/4/5", ("A1", "E", "E", "A1", "A1E"), (2, 3)),
    "A22N": (2, "2. / 2/3/5", ("E", "A2", "A2E", "A2", "E"), (1, 6)),
    "A33N": (3, "3. / 1/3/6", ("A3E", "A3", "E", "E", "A3"), (4, 5)),
}

# Edge subgroups of the full-factor kind: (source class, sink classes,
# determining face, encoding, pattern).
_G_EDGES: dict[str, tuple[int, tuple[int, ...], str, str, tuple[str, ...]]] = {
    "G1": (1, (2, 3, 4), "G156", "1 2 3 / 4 2 3", ("G", "A2", "A3", "A1", "E", "E")),
    "G2": (2, (1, 5, 6), "G234", "1 2 3 / 1 5 6", ("A1", "G", "E", "E", "A2", "A3")),
    "G3": (3, (4, 5, 6), "G123", "1 2 3 / 4 5 6", ("E", "E", "G", "A1", "A2", "A3")),
    "G4": (4, (1, 2, 3), "G456", "1 2 3 / 1 2 3", ("A1", "A2", "A3", "G", "E", "E")),
    "G5": (5, (1, 2, 6), "G345", "1 2 3 / 1 2 6", ("A1", "A2", "E", "E", "G", "A3")),
    "G6": (6, (3, 4, 5), "G126", "1 2 3 / 4 5 3", ("E", "E", "A3", "A1", "A2", "G")),
}

# Shifted edges: (source class, standard sink classes, family, encoding,
# pattern).
_GN_EDGES: dict[
    str, tuple[int, tuple[int, ...], int, str, tuple[str, ...]]
] = {
    "G1N": (1, (2, 3), 1, "1. 2 3 / 5 2 3", ("G", "A2", "A3", "E", "A1E")),
    "G2N": (2, (1, 6), 2, "1 2. 3 / 1 3 6", ("A1", "G", "A2E", "E", "A3")),
    "G3N": (3, (4, 5), 3, "1 2 3. / 4 5 1", ("A3E", "G", "A1", "A2", "E")),
    "G4N": (4, (2, 3), 1, "1. 2 3 / 5 2 3", ("E", "A2", "A3", "G", "A1E")),
    "G5N": (5, (1, 6), 2, "1 2. 3 / 1 3 6", ("A1", "E", "A2E", "G", "A3")),
    "G6N": (6, (4, 5), 3, "1 2 3. / 4 5 1", ("A3E", "E", "A1", "A2", "G")),
}

# Pure pair edges: (family, low source?, dotted?, encoding, pattern,
# group class of the pattern shape).
_PAIR_EDGES: dict[
    str, tuple[int, bool, bool, str, tuple[str, ...], int]
] = {
    "A1_14": (1, True, False, "1 / 1/4", ("A1", "E", "E", "A1", "E", "E"), 0),
    "A2_25": (2, True, False, "2 / 2/5", ("E", "A2", "E", "E", "A2", "E"), 0),
    "A3_36": (3, True, False, "3 / 3/6", ("E", "E", "A3", "E", "E", "A3"), 0),
    "A1N_15": (1, True, True, "1. / 1/5", ("A1", "E", "E", "E", "A1E"), 1),
    "A1N_45": (1, False, True, "1. / 4/5", ("E", "E", "E", "A1", "A1E"), 1),
    "A2N_23": (2, True, True, "2. / 2/3", ("E", "A2", "A2E", "E", "E"), 2),
    "A2N_35": (2, False, True, "2. / 3/5", ("E", "E", "A2E", "A2", "E"), 2),
    "A3N_13": (3, True, True, "3. / 1/3", ("A3E", "A3", "E", "E", "E"), 3),
    "A3N_16": (3, False, True, "3. / 1/6", ("A3E", "E", "E", "E", "A3"), 3),
}

# Which face each shifted or pure-pair edge borrows its determinacy from.
_EDGE_DETERMINACY_FACE = {
    "G1N": "A1G1N", "A1N_45": "A1G1N",
    "G4N": "A1G4N", "A1N_15": "A1G4N",
    "G2N": "A2G2N", "A2N_35": "A2G2N",
    "G5N": "A2G5N", "A2N_23": "A2G5N",
    "G3N": "A3G3N", "A3N_16": "A3G3N",
    "G6N": "A3G6N", "A3N_13": "A3G6N",
}

FACE_LABELS: tuple[str, ...] = (
    tuple(_STD_FACES) + ("L",) + tuple(_NONSTD_FACES) + tuple(_PAIR_FACES)
)
EDGE_LABELS: tuple[str, ...] = (
    tuple(_G_EDGES) + tuple(_GN_EDGES) + tuple(_PAIR_EDGES)
)
ALL_LABELS: tuple[str, ...] = FACE_LABELS + EDGE_LABELS


def _build_face(inst: Instance, label: str) -> SubgroupDef:
    n = inst.n
    if label in _STD_FACES:
        sources, enc, entries = _STD_FACES[label]
        sink_classes = tuple(c for c in range(1, 7) if c not in sources)
        letters = _source_letters(
            inst, alpha_union(n, sources), alpha_union(n, sink_classes), None
        )
        if label in _STD_FACE_T:
            t = _STD_FACE_T[label]
            det = (
                _std_determinacy(n, f"classes {sources + (t,)}", sources + (t,)),
                _std_determinacy(
                    n, f"classes {sources + (t + 3,)}", sources + (t + 3,)
                ),
            )
        else:
            det = (_std_determinacy(n, f"classes {sources}", sources),)
        return SubgroupDef(
            label, "face", 0, letters, Pattern(0, entries),
            encoding_from_string(enc), det,
        )
    if label == "L":
        letters = tuple(
            letter
            for c in (1, 2, 3)
            for letter in _pair_letters(inst, c, True, False)
        )
        det = (
            _std_determinacy(n, "classes (1, 2, 3)", (1, 2, 3)),
            _std_determinacy(n, "classes (4, 5, 6)", (4, 5, 6)),
        )
        return SubgroupDef(
            "L", "face", 0, letters,
            Pattern(0, ("A1", "A2", "A3", "A1", "A2", "A3")),
            encoding_from_string("1 2 3 / 1/4 2/5 3/6"), det,
        )
    if label in _NONSTD_FACES:
        sources, sink_classes, g, enc, entries = _NONSTD_FACES[label]
        letters = _source_letters(
            inst, alpha_union(n, sources), alpha_union(n, sink_classes), g
        )
        return SubgroupDef(
            label, "face", g, letters, Pattern(g, entries),
            encoding_from_string(enc), (_group_determinacy(n, g),),
        )
    if label in _PAIR_FACES:
        g, enc, entries, trivial = _PAIR_FACES[label]
        letters = _pair_letters(inst, g, True, False) + _pair_letters(
            inst, g, True, True
        )
        return SubgroupDef(
            label, "face", g, letters, Pattern(g, entries),
            encoding_from_string(enc), (_group_determinacy(n, g),),
            trivial_b_classes=trivial,
        )
    raise UnknownLabel(label)


def _build_edge(inst: Instance, label: str) -> SubgroupDef:
    n = inst.n
    if label in _G_EDGES:
        source, sink_classes, det_face, enc, entries = _G_EDGES[label]
        letters = _source_letters(
            inst, alpha(n, source), alpha_union(n, sink_classes), None
        )
        det = (_std_determinacy(
            n, f"classes {_STD_FACES[det_face][0]}", _STD_FACES[det_face][0]
        ),)
        return SubgroupDef(
            label, "edge", 0, letters, Pattern(0, entries),
            encoding_from_string(enc), det,
        )
    if label in _GN_EDGES:
        source, sink_classes, g, enc, entries = _GN_EDGES[label]
        letters = _source_letters(
            inst, alpha(n, source), alpha_union(n, sink_classes), g
        )
        return SubgroupDef(
            label, "edge", g, letters, Pattern(g, entries),
            encoding_from_string(enc), (_group_determinacy(n, g),),
        )
    if label in _PAIR_EDGES:
        g, low, dotted, enc, entries, shape = _PAIR_EDGES[label]
        letters = _pair_letters(inst, g, low, dotted)
        if dotted:
            det = (_group_determinacy(n, g),)
        else:
            det = (_std_determinacy(n, "classes (1, 2, 3)", (1, 2, 3)),)
        alt = None
        notes = ""
        if label == "A2N_35":
            # The published pattern row for this edge mixes the merged and
            # plain shapes; the row derived from the generators is used for
            # verification and the printed variant is kept for display.
            alt = Pattern(2, ("E", "E", "A2", "E", "A2E"))
            notes = "pattern row ambiguous in source table; derived row used"
        return SubgroupDef(
            label, "edge", shape if not dotted else g, letters,
            Pattern(shape, entries) if not dotted else Pattern(g, entries),
            encoding_from_string(enc), det, alt_pattern=alt, notes=notes,
        )
    raise UnknownLabel(label)


def build_standard_face(inst: Instance, label: str) -> SubgroupDef:
    if label not in tuple(_STD_FACES) + ("L",):
        raise UnknownLabel(label)
    return _build_face(inst, label)


def build_nonstandard_face(inst: Instance, label: str) -> SubgroupDef:
    if label not in tuple(_NONSTD_FACES) + tuple(_PAIR_FACES):
        raise UnknownLabel(label)
    return _build_face(inst, label)


def build_edge(inst: Instance, label: str) -> SubgroupDef:
    return _build_edge(inst, label)


def build_subgroup(inst: Instance, label: str) -> SubgroupDef:
    if label in FACE_LABELS:
        return _build_face(inst, label)
    if label in EDGE_LABELS:
        return _build_edge(inst, label)
    raise UnknownLabel(label)


def build_all_subgroups(inst: Instance) -> dict[str, SubgroupDef]:
    return {label: build_subgroup(inst, label) for label in ALL_LABELS}


# --- verification ------------------------------------------------------------


@dataclass(frozen=True)
class SlotCheck:
    slot: int
    expected: str
    ok: bool
    witness: str = ""


@dataclass(frozen=True)
class PatternReport:
    label: str
    ok: bool
    slots: tuple[SlotCheck, ...]
    notes: str = ""


@dataclass(frozen=True)
class OptionCheck:
    option: str
    ok: bool
    witnesses: tuple[str, ...]


@dataclass(frozen=True)
class DeterminacyReport:
    label: str
    ok: bool
    options: tuple[OptionCheck, ...]


@dataclass(frozen=True)
class BPatternReport:
    label: str
    ok: bool
    options: tuple[OptionCheck, ...]


def verify_phi_zero(inst: Instance, sdef: SubgroupDef) -> tuple[bool, tuple[str, ...]]:
    """Check every generator realizes to an element of the kernel."""
    witnesses = tuple(
        format_letter(letter)
        for letter in sdef.generators
        if not phi(letter.realize(inst)).is_zero()
    )
    return (not witnesses, witnesses)


def _as_lift_power(spec: FactorSpec, block: int, w: Word) -> tuple[int, int] | None:
    """Recognize ``w`` as lift(e_r)^q for the given block; (r, q) or None."""
    if w.is_identity():
        return None
    for r in range(1, spec.decomposition.block_size(block) + 1):
        lift = spec.section_table[block - 1][r - 1]
        if len(w) % len(lift):
            continue
        q = len(w) // len(lift)
        for signed_q in (q, -q):
            if lift.power(signed_q) == w:
                return (r, signed_q)
    return None


def verify_pattern(
    inst: Instance, sdef: SubgroupDef, pattern: Pattern | None = None
) -> PatternReport:
    """Check the realized generators against a pattern row, slot by slot."""
    n = inst.n
    pattern = pattern or sdef.pattern
    expectations = pattern.resolve(n)
    realized = [
        (letter, letter.realize(inst)) for letter in sdef.generators
    ]
    checks: list[SlotCheck] = []
    for slot in inst.slots():
        expected = expectations[slot]
        spec = inst.factor(slot)
        entries = [
            (letter, g.entries[slot - 1])
            for letter, g in realized
            if not g.entries[slot - 1].is_identity()
        ]
        if expected[0] == "E":
            bad = [format_letter(l) for l, _ in entries]
            checks.append(
                SlotCheck(
                    slot, "E", not bad,
                    f"unexpected letters {bad}" if bad else "",
                )
            )
            continue
        if expected[0] == "G":
            have = set()
            for _, w in entries:
                have.add(w)
                have.add(w.inverse())
            gens = kernel_section_gens(spec)
            missing = [
                f"kernel word {t}"
                for t in gens.nonidentity_y_indices
                if gens.Y[t - 1] not in have
            ]
            for j in range(1, inst.decomposition.n + 1):
                for r, lift in enumerate(gens.Z[j - 1], start=1):
                    if lift not in have:
                        missing.append(f"lift of block {j} basis {r}")
            checks.append(
                SlotCheck(
                    slot, "G", not missing,
                    f"missing {missing}" if missing else "",
                )
            )
            continue
        block = expected[1]
        bad = []
        seen_basis: set[int] = set()
        for letter, w in entries:
            hit = _as_lift_power(spec, block, w)
            if hit is None:
                bad.append(
                    f"{format_letter(letter)} puts {w} at slot {slot},"
                    f" not a block-{block} lift"
                )
            else:
                seen_basis.add(hit[0])
        for r in range(1, inst.decomposition.block_size(block) + 1):
            if r not in seen_basis:
                bad.append(f"basis {r} of block {block} never occurs")
        checks.append(
            SlotCheck(
                slot, f"A{block}", not bad, "; ".join(bad)
            )
        )
    ok = all(c.ok for c in checks)
    return PatternReport(sdef.label, ok, tuple(checks), notes=sdef.notes)


def verify_determinacy(inst: Instance, sdef: SubgroupDef) -> DeterminacyReport:
    """Check that slots outside A carry exactly the forced section lifts."""
    options: list[OptionCheck] = []
    for option in sdef.determinacy:
        A = set(option.A)
        fmap = option.f_map()
        witnesses: list[str] = []
        for letter in sdef.generators:
            g = letter.realize(inst)
            residual = inst.decomposition.zero()
            for i in A:
                residual = residual + evaluate_phi(
                    inst.factor(i), g.entries[i - 1]
                )
            for j in inst.slots():
                if j in A:
                    continue
                k = fmap[j]
                target = project_block(-residual, k)
                expected = section_word(inst.factor(j), k, target.coords)
                if g.entries[j - 1] != expected:
                    witnesses.append(
                        f"{format_letter(letter)}: slot {j} holds"
                        f" {g.entries[j - 1]}, forced value {expected}"
                    )
        options.append(OptionCheck(option.name, not witnesses, tuple(witnesses)))
    return DeterminacyReport(
        sdef.label, all(o.ok for o in options), tuple(options)
    )


def verify_b_pattern(inst: Instance, sdef: SubgroupDef) -> BPatternReport | None:
    """Check the slot claims outside A: forced block lifts with full basis
    coverage, or trivial on the declared classes.  Faces only."""
    if sdef.kind != "face":
        return None
    n = inst.n
    options: list[OptionCheck] = []
    realized = [(letter, letter.realize(inst)) for letter in sdef.generators]
    for option in sdef.determinacy:
        A = set(option.A)
        fmap = option.f_map()
        witnesses: list[str] = []
        for k in inst.slots():
            if k in A:
                continue
            spec = inst.factor(k)
            entries = [
                (letter, g.entries[k - 1])
                for letter, g in realized
                if not g.entries[k - 1].is_identity()
            ]
            if class_of_slot(n, k) in sdef.trivial_b_classes:
                for letter, w in entries:
                    witnesses.append(
                        f"slot {k} should be trivial but"
                        f" {format_letter(letter)} puts {w} there"
                    )
                continue
            block = fmap[k]
            seen: set[int] = set()
            for letter, w in entries:
                hit = _as_lift_power(spec, block, w)
                if hit is None:
                    witnesses.append(
                        f"slot {k}: {format_letter(letter)} entry {w} is not"
                        f" a power of a block-{block} basis lift"
                    )
                else:
                    seen.add(hit[0])
            for r in range(1, inst.decomposition.block_size(block) + 1):
                if r not in seen:
                    witnesses.append(
                        f"slot {k}: basis {r} of block {block} never occurs"
                    )
        options.append(OptionCheck(option.name, not witnesses, tuple(witnesses)))
    return BPatternReport(
        sdef.label, all(o.ok for o in options), tuple(options)
    )


# --- edge/face incidence ------------------------------------------------------
#
# Transcribed incidence data (kept as literal rows on purpose so they can be
# audited against the written table rather than re-derived by the code they
# are meant to check).

EDGE_FACE_ADJACENCY: dict[str, tuple[str, ...]] = {
    "G1": ("A1G1N", "G156"),
    "G2": ("A2G2N", "G234"),
    "G3": ("A3G3N", "G123"),
    "G4": ("A1G4N", "G456"),
    "G5": ("A2G5N", "G345"),
    "G6": ("A3G6N", "G126"),
    "G1N": ("G14N", "A1G1N"),
    "G2N": ("G25N", "A2G2N"),
    "G3N": ("G36N", "A3G3N"),
    "G4N": ("G14N", "A1G4N"),
    "G5N": ("G25N", "A2G5N"),
    "G6N": ("G36N", "A3G6N"),
    "A1_14": ("A1G23", "A1G56", "A11N", "L"),
    "A2_25": ("A2G16", "A2G34", "A22N", "L"),
    "A3_36": ("A3G12", "A3G45", "A33N", "L"),
    "A1N_15": ("A1G4N", "A11N"),
    "A1N_45": ("A1G1N", "A11N"),
    "A2N_23": ("A2G5N", "A22N"),
    "A2N_35": ("A2G2N", "A22N"),
    "A3N_13": ("A3G6N", "A33N"),
    "A3N_16": ("A3G3N", "A33N"),
}

# The six two-class labels used on triangle edges are not among the 21 edge
# subgroups; as alphabets they alias the matching standard face.
EDGE_ALPHA_ALIASES: dict[str, str] = {
    "G12": "A3G12",
    "G34": "A2G34",
    "G56": "A1G56",
    "G23": "A1G23",
    "G16": "A2G16",
    "G45": "A3G45",
}

# Faces incident to those alias edges (checked by the template tests).
ALIAS_FACE_ADJACENCY: dict[str, tuple[str, ...]] = {
    "G12": ("G123", "G126", "A3G12"),
    "G34": ("G234", "G345", "A2G34"),
    "G56": ("G156", "G456", "A1G56"),
    "G23": ("G123", "G234", "A1G23"),
    "G16": ("G126", "G156", "A2G16"),
    "G45": ("G345", "G456", "A3G45"),
}


@dataclass(frozen=True)
class ContainmentWitness:
    letter: str
    word: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.word)


def edge_in_face_witnesses(
    inst: Instance, edge: SubgroupDef, face: SubgroupDef
) -> tuple[ContainmentWitness, ...]:
    """Spell each edge generator over the face's generators.

    Every edge generator is either literally a face generator (up to
    inversion) or the product of two; the returned witnesses record the
    spelling found.  Raises ``ValueError`` if some generator has no
    spelling of length <= 2, which would contradict the incidence table.
    """
    signed: list[GenLetter] = []
    for letter in face.generators:
        signed.append(letter)
        signed.append(letter.inverse())
    table = {letter.realize(inst): letter for letter in signed}
    out = []
    for letter in edge.generators:
        target = letter.realize(inst)
        hit = table.get(target)
        if hit is not None:
            out.append(
                ContainmentWitness(format_letter(letter), (format_letter(hit),))
            )
            continue
        found = None
        for first in signed:
            rest = first.realize(inst).inverse() * target
            second = table.get(rest)
            if second is not None:
                found = (first, second)
                break
        if found is None:
            raise ValueError(
                f"edge letter {format_letter(letter)} of {edge.label} has no"
                f" short spelling over {face.label}"
            )
        out.append(
            ContainmentWitness(
                format_letter(letter),
                tuple(format_letter(l) for l in found),
            )
        )
    return tuple(out)


def edge_face_containment_report(
    inst: Instance,
) -> dict[str, dict[str, tuple[ContainmentWitness, ...]]]:
    """Witness table for all 21 edges against their incident faces."""
    defs = build_all_subgroups(inst)
    report: dict[str, dict[str, tuple[ContainmentWitness, ...]]] = {}
    for edge_label, face_labels in EDGE_FACE_ADJACENCY.items():
        row = {}
        for face_label in face_labels:
            row[face_label] = edge_in_face_witnesses(
                inst, defs[edge_label], defs[face_label]
            )
        report[edge_label] = row
    return report


# --- table dumps --------------------------------------------------------------


def subgroup_summaries(inst: Instance) -> list[dict]:
    """One JSON-ready record per subgroup, in fixed table order."""
    out = []
    for label in ALL_LABELS:
        sdef = build_subgroup(inst, label)
        record = {
            "label": label,
            "kind": sdef.kind,
            "family": sdef.group_class,
            "pattern": sdef.pattern.display(),
            "encoding": encoding_to_string(sdef.encoding),
            "determinacy": [
                {"name": o.name, "A": list(o.A)} for o in sdef.determinacy
            ],
            "generators": [format_letter(l) for l in sdef.generators],
        }
        if sdef.alt_pattern is not None:
            record["alt_pattern"] = sdef.alt_pattern.display()
        if sdef.notes:
            record["notes"] = sdef.notes
        out.append(record)
    return out


def tables_json(inst: Instance) -> str:
    payload = {
        "n": inst.n,
        "subgroups": subgroup_summaries(inst),
        "edge_face_adjacency": {
            k: list(v) for k, v in EDGE_FACE_ADJACENCY.items()
        },
        "edge_alphabet_aliases": dict(EDGE_ALPHA_ALIASES),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def tables_text(inst: Instance) -> str:
    lines = [f"subgroup tables for n={inst.n}", ""]
    for record in subgroup_summaries(inst):
        lines.append(
            f"{record['label']:<8} {record['kind']:<5}"
            f" pattern={record['pattern']}"
        )
        lines.append(f"{'':8} encoding: {record['encoding']}")
        for det in record["determinacy"]:
            lines.append(
                f"{'':8} determined by A={det['A']} ({det['name']})"
            )
        lines.append(
            f"{'':8} {len(record['generators'])} generators"
        )
        if "notes" in record:
            lines.append(f"{'':8} note: {record['notes']}")
    lines.append("")
    lines.append("edge -> incident faces")
    for edge, faces in EDGE_FACE_ADJACENCY.items():
        lines.append(f"{edge:<8} {', '.join(faces)}")
    lines.append("")
    lines.append("alias edge labels -> alphabet face")
    for alias, face in EDGE_ALPHA_ALIASES.items():
        lines.append(f"{alias:<8} {face}")
    return "\n".join(lines) + "\n"


def canonical_letter_key(letter: GenLetter) -> tuple:
    """Sign-insensitive membership key; balanced pairs are slot-symmetric.

    ``Z(j, p, q, r, s)`` and ``Z(j, q, p, r, -s)`` realize the same
    element, so both map to one key.
    """
    if letter.kind == "Y":
        return ("Y", letter.factor, letter.index)
    lo, hi = sorted((letter.source, letter.sink))
    return ("Z", letter.block, lo, hi, letter.basis)


def alphabet_keys(letters: Iterable[GenLetter]) -> frozenset[tuple]:
    return frozenset(canonical_letter_key(l) for l in letters)


def vector_alphabet(inst: Instance) -> tuple[GenLetter, ...]:
    """The full vector generating set of the kernel: every kernel word of
    every factor and every balanced lift pair between distinct slots."""
    letters: list[GenLetter] = []
    for i in inst.slots():
        letters.extend(_y_letters(inst, i))
    for j in range(1, inst.n + 1):
        for i in inst.slots():
            for k in inst.slots():
                if i != k:
                    letters.extend(_z_letters(inst, j, i, k))
    return tuple(letters)
