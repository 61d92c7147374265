"""Free factor groups, their sections, and kernel-section generating sets.

Each factor G_i of the ambient product is a free group on ``p``
generators together with a homomorphism phi_i onto the blocked abelian
group and, for every block ``j``, a section table lifting the block's
basis vectors back into G_i.  From this data the module derives the
kernel-section generating set: one kernel word ``y_t`` per generator
(possibly trivial) plus the section lifts themselves.  Together these
generate the factor, and word length over them ("ks length") is the
distance function used everywhere downstream.

Two distance backends are provided.  When the kernel-section generators
happen to form a free basis of the factor (as in the doubled model built
by :func:`df_factor_spec`), a substitution homomorphism rewrites any
element into its unique reduced ks spelling and the distance is exact
and fast.  Otherwise a budgeted bidirectional breadth-first search is
used; it either certifies an exact distance or raises
:class:`DistanceBudgetExceeded` carrying the best upper bound seen.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Iterable, NamedTuple, Sequence

from .abelian import BlockDecomposition, BlockVec, ZVec, project_block


class SpecInvalid(ValueError):
    """A factor description violates one of its structural identities."""


class UnsupportedRewrite(ValueError):
    """Exact rewriting requested for a factor without a free ks basis."""


class DistanceBudgetExceeded(Exception):
    """Search budget ran out before a distance could be certified.

    Attributes
    ----------
    best_bound : int
        The smallest upper bound established before giving up (always
        finite: the substitution spelling provides one).
    """

    def __init__(self, best_bound: int, message: str | None = None):
        self.best_bound = best_bound
        super().__init__(
            message
            or f"distance not certified within budget; best bound {best_bound}"
        )


@dataclass(frozen=True)
class Word:
    """A freely reduced word over hashable generator symbols.

    ``letters`` is a tuple of ``(symbol, sign)`` pairs with sign +1 or
    -1.  The constructor trusts its input to be reduced; use
    :meth:`from_letters` for arbitrary letter sequences.
    """

    letters: tuple[tuple[Hashable, int], ...] = ()

    @classmethod
    def identity(cls) -> "Word":
        return cls(())

    @classmethod
    def gen(cls, symbol: Hashable, sign: int = 1) -> "Word":
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        return cls(((symbol, sign),))

    @classmethod
    def from_letters(cls, letters: Iterable[tuple[Hashable, int]]) -> "Word":
        """Build a word from letters, performing free reduction."""
        stack: list[tuple[Hashable, int]] = []
        for sym, sign in letters:
            if sign not in (1, -1):
                raise ValueError(f"sign must be +1 or -1, got {sign}")
            if stack and stack[-1][0] == sym and stack[-1][1] == -sign:
                stack.pop()
            else:
                stack.append((sym, sign))
        return cls(tuple(stack))

    def __mul__(self, other: "Word") -> "Word":
        a, b = self.letters, other.letters
        i, j = len(a), 0
        while i > 0 and j < len(b):
            if a[i - 1][0] == b[j][0] and a[i - 1][1] == -b[j][1]:
                i -= 1
                j += 1
            else:
                break
        return Word(a[:i] + b[j:])

    def inverse(self) -> "Word":
        return Word(tuple((s, -e) for s, e in reversed(self.letters)))

    def power(self, k: int) -> "Word":
        if k == 0:
            return Word()
        base = self if k > 0 else self.inverse()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def __len__(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def symbols(self) -> set:
        return {s for s, _ in self.letters}

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        parts = []
        for sym, sign in self.letters:
            parts.append(f"{sym}" if sign == 1 else f"{sym}^-1")
        return " ".join(parts)


@dataclass(frozen=True)
class FactorSpec:
    """One factor: a free group with an abelian image and block sections.

    Parameters
    ----------
    generator_count : int
        Number ``p`` of free generators; generator symbols are the
        integers 1..p.
    phi_images : tuple of ZVec
        Image of each generator under phi, in generator order.
    decomposition : BlockDecomposition
        The blocked target shared by all factors of an instance.
    section_table : tuple of tuple of Word
        ``section_table[j - 1][r - 1]`` is the chosen lift in the factor
        of the r-th basis vector of block ``j``.  Every lift must map to
        exactly that basis vector under phi.
    ks_free_basis : bool
        Whether the kernel-section generators form a free basis of the
        factor, enabling exact rewriting.
    bfs_budget : int
        Default search budget for the fallback distance backend.
    name : str
        Optional display name.
    """

    generator_count: int
    phi_images: tuple[ZVec, ...]
    decomposition: BlockDecomposition
    section_table: tuple[tuple[Word, ...], ...]
    ks_free_basis: bool = False
    bfs_budget: int = 10
    name: str = ""

    def __post_init__(self) -> None:
        p = self.generator_count
        if p < 1:
            raise SpecInvalid(f"need at least one generator, got {p}")
        if len(self.phi_images) != p:
            raise SpecInvalid(
                f"expected {p} phi images, got {len(self.phi_images)}"
            )
        dec = self.decomposition
        for t, v in enumerate(self.phi_images, start=1):
            if v.decomposition != dec:
                raise SpecInvalid(
                    f"phi image of generator {t} uses a foreign decomposition"
                )
        if len(self.section_table) != dec.n:
            raise SpecInvalid(
                f"expected {dec.n} section rows, got {len(self.section_table)}"
            )
        for j in range(1, dec.n + 1):
            row = self.section_table[j - 1]
            if len(row) != dec.block_sizes[j - 1]:
                raise SpecInvalid(
                    f"section row for block {j} has {len(row)} entries,"
                    f" expected {dec.block_sizes[j - 1]}"
                )

    def check_gen(self, t: int) -> None:
        if not 1 <= t <= self.generator_count:
            raise ValueError(
                f"generator index {t} out of range 1..{self.generator_count}"
            )


@dataclass(frozen=True)
class KernelSectionGenSet:
    """The kernel-section generating set of one factor.

    Attributes
    ----------
    Y : tuple of Word
        One kernel word per generator of the factor (index t-1 for
        generator t).  Entries may be the identity word; those are kept
        in place but excluded from generating alphabets.
    Z : tuple of tuple of Word
        The section lifts, ``Z[j - 1][r - 1]`` for block j, basis r
        (a copy of the factor's section table).
    """

    Y: tuple[Word, ...]
    Z: tuple[tuple[Word, ...], ...]

    @property
    def nonidentity_y_indices(self) -> tuple[int, ...]:
        return tuple(
            t for t, w in enumerate(self.Y, start=1) if not w.is_identity()
        )


class DistanceEstimate(NamedTuple):
    value: int
    exact: bool


def evaluate_phi(spec: FactorSpec, word: Word) -> ZVec:
    """Image of a factor word under phi (a vector in Z^m)."""
    acc = spec.decomposition.zero()
    for sym, sign in word.letters:
        spec.check_gen(sym)
        img = spec.phi_images[sym - 1]
        acc = acc + (img if sign == 1 else -img)
    return acc


def section_word(spec: FactorSpec, j: int, coords: Sequence[int]) -> Word:
    """Canonical section spelling of a block-``j`` vector.

    The lift of ``(v_1, ..., v_k)`` is spelled in ascending basis order,
    ``lift(e_1)^{v_1} ... lift(e_k)^{v_k}``.  This fixes one element per
    vector even when the lifts of distinct basis vectors do not commute.
    """
    dec = spec.decomposition
    dec._check_block(j)
    if len(coords) != dec.block_sizes[j - 1]:
        raise ValueError(
            f"block {j} expects {dec.block_sizes[j - 1]} coordinates,"
            f" got {len(coords)}"
        )
    out = Word()
    for r, v in enumerate(coords, start=1):
        if v:
            out = out * spec.section_table[j - 1][r - 1].power(v)
    return out


def section_word_of_block(spec: FactorSpec, b: BlockVec) -> Word:
    return section_word(spec, b.block_index, b.coords)


def build_kernel_section_gens(spec: FactorSpec) -> KernelSectionGenSet:
    """Derive the kernel-section generating set of a factor.

    Verifies the section identity first: the lift of every basis vector
    must map to exactly that basis vector under phi.  A violation raises
    :class:`SpecInvalid` naming the offending block and basis index.

    The kernel word for generator ``a_t`` is

        ``y_t = a_t * s_1(pr_1 phi(a_t))^-1 * ... * s_n(pr_n phi(a_t))^-1``

    so that ``a_t = y_t * s_n(pr_n phi(a_t)) * ... * s_1(pr_1 phi(a_t))``.
    """
    dec = spec.decomposition
    for j in range(1, dec.n + 1):
        for r in range(1, dec.block_sizes[j - 1] + 1):
            lift = spec.section_table[j - 1][r - 1]
            expected = dec.block_basis(j, r)
            if evaluate_phi(spec, lift) != expected:
                raise SpecInvalid(
                    f"section lift for block {j}, basis element {r} maps to"
                    f" {evaluate_phi(spec, lift)}, expected {expected}"
                )
    ys = []
    for t in range(1, spec.generator_count + 1):
        w = Word.gen(t)
        img = spec.phi_images[t - 1]
        for j in range(1, dec.n + 1):
            blk = project_block(img, j)
            w = w * section_word(spec, j, blk.coords).inverse()
        ys.append(w)
    return KernelSectionGenSet(Y=tuple(ys), Z=spec.section_table)


def df_factor_spec(decomposition: BlockDecomposition) -> FactorSpec:
    """The doubled free factor over a decomposition of Z^m.

    The factor is free of rank 2m on generators ``x_1 .. x_{2m}``, with
    ``phi(x_t) = e_t`` for ``t <= m`` and ``phi(x_{m+u}) = e_u``.  Block
    sections lift basis vectors to the matching first-half generators.
    The kernel-section generators are then ``{x_t : t <= m}`` together
    with ``{x_{m+u} x_u^-1 : u <= m}``, which form a free basis, so the
    spec is marked for exact rewriting.
    """
    dec = decomposition
    m = dec.m
    images = [dec.basis(t) for t in range(1, m + 1)]
    images += [dec.basis(u) for u in range(1, m + 1)]
    table = tuple(
        tuple(Word.gen(dec.block_offsets[j - 1] + r) for r in range(1, dec.block_sizes[j - 1] + 1))
        for j in range(1, dec.n + 1)
    )
    return FactorSpec(
        generator_count=2 * m,
        phi_images=tuple(images),
        decomposition=dec,
        section_table=table,
        ks_free_basis=True,
        name=f"DF({m})",
    )


# --- ks-symbol machinery -------------------------------------------------
#
# ks symbols are ("Y", t) for the kernel word of generator t and
# ("S", j, r) for the section lift of basis r of block j.  A word over ks
# symbols evaluates back into the factor via _evaluate_ks.


def _ks_spelling_of_generator(
    spec: FactorSpec, gens: KernelSectionGenSet, t: int
) -> Word:
    """The reconstruction spelling of generator t over ks symbols."""
    dec = spec.decomposition
    letters: list[tuple[Hashable, int]] = []
    if not gens.Y[t - 1].is_identity():
        letters.append((("Y", t), 1))
    img = spec.phi_images[t - 1]
    for j in range(dec.n, 0, -1):
        blk = project_block(img, j)
        for r, v in enumerate(blk.coords, start=1):
            letters.extend(((("S", j, r), 1 if v > 0 else -1),) * abs(v))
    return Word.from_letters(letters)


def _ks_substitution(spec: FactorSpec, word: Word) -> Word:
    out: list[tuple[Hashable, int]] = []
    spellings = _spec_cache(spec).generator_spellings
    for sym, sign in word.letters:
        spec.check_gen(sym)
        w = spellings[sym - 1]
        out.extend((w if sign == 1 else w.inverse()).letters)
    return Word.from_letters(out)


def evaluate_ks_word(spec: FactorSpec, word: Word) -> Word:
    """Evaluate a word over ks symbols back into the factor."""
    gens = kernel_section_gens(spec)
    out = Word()
    for sym, sign in word.letters:
        if not isinstance(sym, tuple):
            raise ValueError(f"not a ks symbol: {sym!r}")
        if sym[0] == "Y":
            w = gens.Y[sym[1] - 1]
        elif sym[0] == "S":
            w = gens.Z[sym[1] - 1][sym[2] - 1]
        else:
            raise ValueError(f"not a ks symbol: {sym!r}")
        out = out * (w if sign == 1 else w.inverse())
    return out


def rewrite_to_ks_basis(spec: FactorSpec, word: Word) -> Word:
    """Rewrite a factor word into its reduced ks spelling.

    Only valid when the factor's ks generators form a free basis
    (``ks_free_basis``); the reduced spelling is then unique and its
    length is the exact ks distance to the identity.
    """
    if not spec.ks_free_basis:
        raise UnsupportedRewrite(
            "factor is not marked as having a free ks basis"
        )
    return _ks_substitution(spec, word)


def ks_length_upper_bound(spec: FactorSpec, word: Word) -> int:
    """Length of the substitution spelling: an upper bound on ks distance."""
    return len(_ks_substitution(spec, word))


def ks_spelling(spec: FactorSpec, word: Word) -> Word:
    """A ks spelling of ``word``: geodesic when the ks generators form a
    free basis, otherwise the (still correct) substitution spelling."""
    return _ks_substitution(spec, word)


# --- per-spec cache and distances ----------------------------------------


class _SpecCache:
    def __init__(self, spec: FactorSpec):
        self.spec = spec
        self.gens = build_kernel_section_gens(spec)
        self.generator_spellings = tuple(
            _ks_spelling_of_generator(spec, self.gens, t)
            for t in range(1, spec.generator_count + 1)
        )
        alphabet: list[Word] = []
        for t in self.gens.nonidentity_y_indices:
            alphabet.append(self.gens.Y[t - 1])
        for row in self.gens.Z:
            alphabet.extend(row)
        self.signed_gen_words: tuple[Word, ...] = tuple(
            alphabet + [w.inverse() for w in alphabet]
        )
        # forward ball around the identity, grown on demand
        self.ball: dict[tuple, int] = {(): 0}
        self.frontier: list[Word] = [Word()]
        self.radius = 0

    def grow_ball(self, radius: int) -> dict[tuple, int]:
        while self.radius < radius and self.frontier:
            nxt: list[Word] = []
            d = self.radius + 1
            for w in self.frontier:
                for g in self.signed_gen_words:
                    v = w * g
                    key = v.letters
                    if key not in self.ball:
                        self.ball[key] = d
                        nxt.append(v)
            self.frontier = nxt
            self.radius += 1
        return self.ball


_CACHES: dict[FactorSpec, _SpecCache] = {}


def _spec_cache(spec: FactorSpec) -> _SpecCache:
    cache = _CACHES.get(spec)
    if cache is None:
        cache = _SpecCache(spec)
        _CACHES[spec] = cache
    return cache


def kernel_section_gens(spec: FactorSpec) -> KernelSectionGenSet:
    """Cached kernel-section generating set of a factor."""
    return _spec_cache(spec).gens


def distance(
    spec: FactorSpec, a: Word, b: Word, budget: int | None = None
) -> int:
    """Exact ks distance between two factor elements.

    Uses the rewriting backend when available, otherwise a budgeted
    bidirectional search.  Raises :class:`DistanceBudgetExceeded` (with
    the best bound found) when the search budget runs out first.
    """
    x = a.inverse() * b
    if x.is_identity():
        return 0
    if spec.ks_free_basis:
        return len(rewrite_to_ks_basis(spec, x))
    return _bfs_distance(spec, x, spec.bfs_budget if budget is None else budget)


def distance_or_bound(
    spec: FactorSpec, a: Word, b: Word, budget: int | None = None
) -> DistanceEstimate:
    """Like :func:`distance` but never raises: flags inexact bounds."""
    try:
        return DistanceEstimate(distance(spec, a, b, budget), True)
    except DistanceBudgetExceeded as exc:
        return DistanceEstimate(exc.best_bound, False)


def _bfs_distance(spec: FactorSpec, x: Word, budget: int) -> int:
    cache = _spec_cache(spec)
    sub_bound = len(_ks_substitution(spec, x))
    if sub_bound == 0:
        return 0
    radius = (budget + 1) // 2
    ball = cache.grow_ball(radius)
    hit = ball.get(x.letters)
    if hit is not None:
        return hit
    best: int | None = None
    seen: set[tuple] = {x.letters}
    frontier: list[Word] = [x]
    gens = cache.signed_gen_words
    for t in range(1, max(0, budget - radius) + 1):
        nxt: list[Word] = []
        for w in frontier:
            for g in gens:
                v = w * g
                key = v.letters
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(v)
                d = ball.get(key)
                if d is not None and (best is None or d + t < best):
                    best = d + t
        frontier = nxt
        # every length <= radius + t has been exhausted; a candidate in
        # that range is therefore a geodesic
        if best is not None and best <= radius + t:
            return best
    bounds = [sub_bound] + ([best] if best is not None else [])
    raise DistanceBudgetExceeded(min(bounds))
