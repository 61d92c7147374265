"""The ambient direct product of 2n factors and its padding calculus.

An :class:`Instance` bundles a block decomposition with 2n factor
specs (all sharing the decomposition) and an optional area model.  A
:class:`ProductElement` is a tuple of one reduced word per factor;
the summed homomorphism :func:`phi` adds up the factor images.

Padding restricts an element to a set of factor slots.  It is kept as a
small description object (:class:`PaddedSpec`) so callers can talk about
"the part of ``a`` living on these slots" before realizing it; support
bookkeeping like

    ``a * (pad(a, S).realize()^-1 * pad(b, S).realize())``
    ``== pad(a, complement of S).realize() * pad(b, S).realize()``

is exercised in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .abelian import BlockDecomposition, ZVec
from .factor import (
    DistanceEstimate,
    FactorSpec,
    Word,
    distance_or_bound,
    evaluate_phi,
)


class InstanceMismatch(ValueError):
    """Raised when elements of different instances are combined."""


@dataclass(frozen=True)
class Instance:
    """A direct product of ``2n`` factors over one block decomposition."""

    decomposition: BlockDecomposition
    factors: tuple[FactorSpec, ...]
    dehn_model: Any = None

    def __post_init__(self) -> None:
        n = self.decomposition.n
        if len(self.factors) != 2 * n:
            raise ValueError(
                f"expected {2 * n} factors for n={n}, got {len(self.factors)}"
            )
        for i, f in enumerate(self.factors, start=1):
            if f.decomposition != self.decomposition:
                raise ValueError(
                    f"factor {i} uses a different decomposition"
                )

    @property
    def n(self) -> int:
        return self.decomposition.n

    @property
    def slot_count(self) -> int:
        return 2 * self.decomposition.n

    def slots(self) -> range:
        """All factor slots, 1-based."""
        return range(1, self.slot_count + 1)

    def factor(self, i: int) -> FactorSpec:
        self.check_slot(i)
        return self.factors[i - 1]

    def check_slot(self, i: int) -> None:
        if not 1 <= i <= self.slot_count:
            raise ValueError(
                f"factor slot {i} out of range 1..{self.slot_count}"
            )

    def identity(self) -> "ProductElement":
        return ProductElement(self, (Word(),) * self.slot_count)


def df_instance(
    n: int,
    block_sizes: Sequence[int] | None = None,
    dehn_model: Any = None,
) -> Instance:
    """An instance whose 2n factors are all doubled free factors."""
    from .factor import df_factor_spec

    if block_sizes is None:
        dec = BlockDecomposition.uniform(n)
    else:
        dec = BlockDecomposition(
            m=sum(block_sizes), n=n, block_sizes=tuple(block_sizes)
        )
    spec = df_factor_spec(dec)
    return Instance(dec, (spec,) * (2 * n), dehn_model)


@dataclass(frozen=True)
class ProductElement:
    """An element of the product: one reduced word per factor slot."""

    instance: Instance
    entries: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.instance.slot_count:
            raise ValueError(
                f"expected {self.instance.slot_count} entries,"
                f" got {len(self.entries)}"
            )

    def entry(self, i: int) -> Word:
        self.instance.check_slot(i)
        return self.entries[i - 1]

    def _check_same(self, other: "ProductElement") -> None:
        if self.instance != other.instance:
            raise InstanceMismatch("elements belong to different instances")

    def __mul__(self, other: "ProductElement") -> "ProductElement":
        self._check_same(other)
        return ProductElement(
            self.instance,
            tuple(a * b for a, b in zip(self.entries, other.entries)),
        )

    def inverse(self) -> "ProductElement":
        return ProductElement(
            self.instance, tuple(w.inverse() for w in self.entries)
        )

    def is_identity(self) -> bool:
        return all(w.is_identity() for w in self.entries)

    def support(self) -> tuple[int, ...]:
        """1-based slots with a nonidentity entry."""
        return tuple(
            i
            for i, w in enumerate(self.entries, start=1)
            if not w.is_identity()
        )

    def with_entry(self, i: int, word: Word) -> "ProductElement":
        self.instance.check_slot(i)
        entries = list(self.entries)
        entries[i - 1] = word
        return ProductElement(self.instance, tuple(entries))


def phi(g: ProductElement) -> ZVec:
    """The summed abelian image of a product element."""
    inst = g.instance
    acc = inst.decomposition.zero()
    for spec, w in zip(inst.factors, g.entries):
        acc = acc + evaluate_phi(spec, w)
    return acc


@dataclass(frozen=True)
class PaddedSpec:
    """The restriction of an element to a set of factor slots."""

    source: ProductElement
    support: frozenset[int]

    def __post_init__(self) -> None:
        for i in self.support:
            self.source.instance.check_slot(i)

    def realize(self) -> ProductElement:
        inst = self.source.instance
        return ProductElement(
            inst,
            tuple(
                w if i in self.support else Word()
                for i, w in enumerate(self.source.entries, start=1)
            ),
        )


def pad(g: ProductElement, slots: Iterable[int]) -> PaddedSpec:
    """Keep the entries of ``g`` on ``slots``, identity elsewhere."""
    return PaddedSpec(g, frozenset(slots))


def complement(inst: Instance, slots: Iterable[int]) -> tuple[int, ...]:
    keep = set(slots)
    return tuple(i for i in inst.slots() if i not in keep)


def multiply(*elements: ProductElement) -> ProductElement:
    """Product of one or more elements, left to right."""
    if not elements:
        raise ValueError("need at least one element")
    out = elements[0]
    for g in elements[1:]:
        out = out * g
    return out


def l1_distance(
    a: ProductElement, b: ProductElement, budget: int | None = None
) -> DistanceEstimate:
    """Sum of factor distances; exact only if every factor was exact."""
    a._check_same(b)
    return restricted_distance(a, b, a.instance.slots(), budget)


def restricted_distance(
    a: ProductElement,
    b: ProductElement,
    slots: Iterable[int],
    budget: int | None = None,
) -> DistanceEstimate:
    """Sum of factor distances over the given slots only."""
    a._check_same(b)
    inst = a.instance
    total, exact = 0, True
    for i in slots:
        inst.check_slot(i)
        est = distance_or_bound(
            inst.factors[i - 1], a.entries[i - 1], b.entries[i - 1], budget
        )
        total += est.value
        exact = exact and est.exact
    return DistanceEstimate(total, exact)
