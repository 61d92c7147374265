"""Free abelian groups split into ordered blocks of coordinates.

The target of every homomorphism in this package is a free abelian group
Z^m whose coordinates are partitioned into ``n`` consecutive blocks
A_1 ⊕ ... ⊕ A_n.  A :class:`BlockDecomposition` records the partition,
:class:`ZVec` is an immutable integer vector tied to a decomposition, and
:class:`BlockVec` is the restriction of a vector to a single block.

All arithmetic is over Python integers, so coordinates never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


class DecompositionMismatch(ValueError):
    """Raised when vectors from different decompositions are combined."""


@dataclass(frozen=True)
class BlockDecomposition:
    """A partition of the coordinates of Z^m into n consecutive blocks.

    Parameters
    ----------
    m : int
        Total rank.  Must be >= n.
    n : int
        Number of blocks.  Must be >= 3.
    block_sizes : tuple of int
        Exactly ``n`` positive integers summing to ``m``; entry ``j - 1``
        is the rank of block ``j``.

    Notes
    -----
    Block indices are 1-based in the public API.  ``block_offsets[j - 1]``
    is the number of coordinates preceding block ``j``.
    """

    m: int
    n: int
    block_sizes: tuple[int, ...]
    block_offsets: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"need at least 3 blocks, got n={self.n}")
        if self.m < self.n:
            raise ValueError(f"need m >= n, got m={self.m}, n={self.n}")
        sizes = tuple(int(s) for s in self.block_sizes)
        if len(sizes) != self.n:
            raise ValueError(
                f"expected {self.n} block sizes, got {len(sizes)}"
            )
        if any(s <= 0 for s in sizes):
            raise ValueError(f"block sizes must be positive: {sizes}")
        if sum(sizes) != self.m:
            raise ValueError(
                f"block sizes {sizes} sum to {sum(sizes)}, expected m={self.m}"
            )
        object.__setattr__(self, "block_sizes", sizes)
        offsets = []
        acc = 0
        for s in sizes:
            offsets.append(acc)
            acc += s
        object.__setattr__(self, "block_offsets", tuple(offsets))

    @classmethod
    def uniform(cls, n: int, size: int = 1) -> "BlockDecomposition":
        """All ``n`` blocks of equal ``size``."""
        return cls(m=n * size, n=n, block_sizes=(size,) * n)

    def block_size(self, j: int) -> int:
        """Rank of block ``j`` (1-based)."""
        self._check_block(j)
        return self.block_sizes[j - 1]

    def block_range(self, j: int) -> range:
        """0-based coordinate range of block ``j``."""
        self._check_block(j)
        off = self.block_offsets[j - 1]
        return range(off, off + self.block_sizes[j - 1])

    def block_of_coordinate(self, t: int) -> int:
        """Block index (1-based) containing global coordinate ``t`` (1-based)."""
        if not 1 <= t <= self.m:
            raise ValueError(f"coordinate {t} out of range 1..{self.m}")
        for j in range(1, self.n + 1):
            if t - 1 in self.block_range(j):
                return j
        raise AssertionError("unreachable")

    def position_in_block(self, t: int) -> int:
        """1-based position of global coordinate ``t`` within its block."""
        j = self.block_of_coordinate(t)
        return t - self.block_offsets[j - 1]

    def zero(self) -> "ZVec":
        return ZVec((0,) * self.m, self)

    def basis(self, t: int) -> "ZVec":
        """Standard basis vector e_t of Z^m (``t`` 1-based)."""
        if not 1 <= t <= self.m:
            raise ValueError(f"coordinate {t} out of range 1..{self.m}")
        coords = [0] * self.m
        coords[t - 1] = 1
        return ZVec(tuple(coords), self)

    def block_basis(self, j: int, r: int) -> "ZVec":
        """Basis vector e_{j,r}: the r-th coordinate of block j (both 1-based)."""
        self._check_block(j)
        if not 1 <= r <= self.block_sizes[j - 1]:
            raise ValueError(
                f"basis index {r} out of range 1..{self.block_sizes[j - 1]}"
                f" for block {j}"
            )
        return self.basis(self.block_offsets[j - 1] + r)

    def _check_block(self, j: int) -> None:
        if not 1 <= j <= self.n:
            raise ValueError(f"block index {j} out of range 1..{self.n}")


@dataclass(frozen=True)
class ZVec:
    """An element of Z^m, tied to its :class:`BlockDecomposition`."""

    coords: tuple[int, ...]
    decomposition: BlockDecomposition

    def __post_init__(self) -> None:
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != self.decomposition.m:
            raise ValueError(
                f"expected {self.decomposition.m} coordinates,"
                f" got {len(coords)}"
            )
        object.__setattr__(self, "coords", coords)

    def _check_same(self, other: "ZVec") -> None:
        if self.decomposition != other.decomposition:
            raise DecompositionMismatch(
                "vectors belong to different decompositions"
            )

    def __add__(self, other: "ZVec") -> "ZVec":
        self._check_same(other)
        return ZVec(
            tuple(a + b for a, b in zip(self.coords, other.coords)),
            self.decomposition,
        )

    def __neg__(self) -> "ZVec":
        return ZVec(tuple(-a for a in self.coords), self.decomposition)

    def __sub__(self, other: "ZVec") -> "ZVec":
        return self + (-other)

    def scale(self, k: int) -> "ZVec":
        return ZVec(tuple(k * a for a in self.coords), self.decomposition)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def l1(self) -> int:
        return sum(abs(c) for c in self.coords)

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class BlockVec:
    """The restriction of a vector to one block of a decomposition."""

    block_index: int
    coords: tuple[int, ...]
    decomposition: BlockDecomposition

    def __post_init__(self) -> None:
        j = self.block_index
        self.decomposition._check_block(j)
        coords = tuple(int(c) for c in self.coords)
        expected = self.decomposition.block_sizes[j - 1]
        if len(coords) != expected:
            raise ValueError(
                f"block {j} has rank {expected}, got {len(coords)} coordinates"
            )
        object.__setattr__(self, "coords", coords)

    def __add__(self, other: "BlockVec") -> "BlockVec":
        if (
            self.decomposition != other.decomposition
            or self.block_index != other.block_index
        ):
            raise DecompositionMismatch("blocks do not match")
        return BlockVec(
            self.block_index,
            tuple(a + b for a, b in zip(self.coords, other.coords)),
            self.decomposition,
        )

    def __neg__(self) -> "BlockVec":
        return BlockVec(
            self.block_index,
            tuple(-a for a in self.coords),
            self.decomposition,
        )

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def l1(self) -> int:
        return sum(abs(c) for c in self.coords)


def project_block(v: ZVec, j: int) -> BlockVec:
    """The block-``j`` component of ``v`` as a :class:`BlockVec`."""
    dec = v.decomposition
    rng = dec.block_range(j)
    return BlockVec(j, tuple(v.coords[i] for i in rng), dec)


def embed_block(b: BlockVec) -> ZVec:
    """Include a block vector back into Z^m, zero outside its block."""
    dec = b.decomposition
    coords = [0] * dec.m
    for pos, i in enumerate(dec.block_range(b.block_index)):
        coords[i] = b.coords[pos]
    return ZVec(tuple(coords), dec)


def sum_vectors(vectors: Iterable[ZVec], decomposition: BlockDecomposition) -> ZVec:
    """Sum an iterable of vectors (empty sum is zero)."""
    acc = decomposition.zero()
    for v in vectors:
        acc = acc + v
    return acc
