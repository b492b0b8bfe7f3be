"""Ground sets, bit-vector subsets and canonical set families.

Subsets of the ground set [n] = {1, ..., n} are plain Python integers used
as bit vectors: element ``e`` is present iff bit ``e-1`` is set.  Python
ints are arbitrary-width, so the same representation serves exact engines
(n <= 64) and sampling-only paths (n up to 4096).

Families keep their members in the canonical order (cardinality ascending,
then numeric mask value ascending); every operation that returns a family
re-canonicalizes, so equality of families is equality of values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import EmptyFamilyError

MAX_GROUND_SET = 4096


@dataclass(frozen=True)
class GroundSet:
    """The universe [n]."""

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GROUND_SET:
            raise ValueError(f"ground set size must be in [1, {MAX_GROUND_SET}]")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1


def mask_of(elements: Iterable[int], n: Optional[int] = None) -> int:
    """Bit mask of a collection of 1-based elements."""
    m = 0
    for e in elements:
        if e < 1 or (n is not None and e > n):
            raise ValueError(f"element {e} outside [1, {n}]")
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    """1-based elements of a mask, ascending."""
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def iter_submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def canonical_key(mask: int) -> tuple[int, int]:
    return (mask.bit_count(), mask)


@dataclass(frozen=True)
class SetFamily:
    """A family of distinct subsets of a ground set, canonically ordered."""

    universe: GroundSet
    members: tuple[int, ...]

    def __post_init__(self):
        full = self.universe.full_mask
        seen = set()
        prev = None
        for m in self.members:
            if m & ~full:
                raise ValueError("member has bits outside the ground set")
            if m in seen:
                raise ValueError("members must be distinct")
            seen.add(m)
            key = canonical_key(m)
            if prev is not None and key < prev:
                raise ValueError("members not in canonical order")
            prev = key

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "SetFamily":
        members = sorted(set(masks), key=canonical_key)
        return cls(GroundSet(n), tuple(members))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls.from_masks(n, (mask_of(s, n) for s in sets))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, mask: int) -> bool:
        return mask in set(self.members)

    @property
    def n(self) -> int:
        return self.universe.n

    def as_sets(self) -> list[tuple[int, ...]]:
        return [elements_of(m) for m in self.members]


def canonicalize(family: SetFamily) -> SetFamily:
    """Idempotent: families are always stored canonical."""
    return SetFamily.from_masks(family.n, family.members)


def core(family: SetFamily) -> int:
    """Intersection of all members."""
    if not family.members:
        raise EmptyFamilyError("core of an empty family is undefined")
    y = family.universe.full_mask
    for m in family.members:
        y &= m
    return y


def link(family: SetFamily, t: int) -> SetFamily:
    """{F \\ T : F in family, T subset of F}, deduplicated and canonical."""
    masks = [m & ~t for m in family.members if m & t == t]
    return SetFamily.from_masks(family.n, masks)


def is_uniform(family: SetFamily, size: int) -> bool:
    """True iff every member has exactly ``size`` elements (vacuous if empty)."""
    return all(m.bit_count() == size for m in family.members)


def uniform_size(family: SetFamily) -> int:
    """Common member cardinality; raises if the family is not uniform."""
    if not family.members:
        raise EmptyFamilyError("uniformity size of an empty family is undefined")
    size = family.members[0].bit_count()
    if not is_uniform(family, size):
        raise ValueError("family is not uniform")
    return size


@dataclass(frozen=True)
class SpreadReport:
    is_spread: bool
    witness: Optional[int]
    link_size: int


def check_spread(family: SetFamily, r) -> SpreadReport:
    """Check r-spreadness: no nonempty T lies in more than |F|/r^|T| members.

    Only T that are subsets of some member are enumerated; any other T has
    link size 0 and satisfies the bound trivially.  The witness of a failure
    is the violating T of smallest cardinality, ties broken by numeric mask
    value.  Comparisons are exact (r is taken as a rational).
    """
    if not family.members:
        raise EmptyFamilyError("spreadness of an empty family is undefined")
    if r <= 0:
        raise ValueError("r must be positive")
    r = Fraction(r)
    counts: dict[int, int] = {}
    for m in family.members:
        for t in iter_submasks(m):
            if t:
                counts[t] = counts.get(t, 0) + 1
    size = len(family.members)
    worst = None
    for t, cnt in counts.items():
        # violation: cnt > |F| / r^|T|, i.e. cnt * r^|T| > |F|
        if cnt * r ** t.bit_count() > size:
            key = canonical_key(t)
            if worst is None or key < worst[0]:
                worst = (key, t, cnt)
    if worst is None:
        return SpreadReport(True, None, 0)
    return SpreadReport(False, worst[1], worst[2])


def family_to_text(family: SetFamily) -> str:
    """Line format: ``n=<int>`` then one member per line as 1-based indices."""
    lines = [f"n={family.n}"]
    for m in family.members:
        lines.append(",".join(str(e) for e in elements_of(m)))
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> SetFamily:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("family text must start with 'n=<int>'")
    n = int(lines[0][2:])
    masks = []
    for ln in lines[1:]:
        ln = ln.strip()
        if ln == "":
            masks.append(0)  # the empty set serializes as a blank line
        else:
            masks.append(mask_of((int(tok) for tok in ln.split(",")), n))
    return SetFamily.from_masks(n, masks)
