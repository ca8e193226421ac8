"""Clock regions, region words, region sets and the delay solver.

A region records, per clock: the integer value (point), the open unit
interval containing it, or "above the ceiling"; plus the ordering of
fractional parts among the open clocks (grouped into blocks of equal
fraction, listed in increasing order).  Regions are canonical and hashable,
so sets of regions double as guard predicates for synthesized automata.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, NamedTuple, Optional, Sequence

from .words import ClockedWord, Rat

POINT = 0
OPEN = 1
UNBOUNDED = 2

Ceilings = tuple[int, ...]
# (lo, lo_strict, hi, hi_strict); hi None = unbounded above
IntervalAtom = tuple[int, bool, Optional[int], bool]

FULL_ATOM: IntervalAtom = (0, False, None, False)


class Region(NamedTuple):
    ceilings: Ceilings
    kinds: tuple[tuple[int, int], ...]
    blocks: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        parts = []
        for j, (kind, k) in enumerate(self.kinds):
            c = "c%d" % (j + 1)
            if kind == POINT:
                parts.append("%s=%d" % (c, k))
            elif kind == OPEN:
                parts.append("%d<%s<%d" % (k, c, k + 1))
            else:
                parts.append("%s>%d" % (c, self.ceilings[j]))
        for block in self.blocks:
            if len(block) > 1:
                parts.append(
                    "frac(" + ")=frac(".join("c%d" % (j + 1) for j in block) + ")"
                )
        for left, right in zip(self.blocks, self.blocks[1:]):
            parts.append(
                "frac(c%d)<frac(c%d)" % (left[0] + 1, right[0] + 1)
            )
        return " & ".join(parts) if parts else "true"


class RegionLetter(NamedTuple):
    action: str
    region: Region


RegionWord = tuple[RegionLetter, ...]


def region_of(values: Sequence[Fraction], ceilings: Ceilings) -> Region:
    return _region_of(tuple(values), tuple(ceilings))


@lru_cache(maxsize=1 << 18)
def _region_of(values: tuple[Fraction, ...], ceilings: Ceilings) -> Region:
    kinds = []
    fracs = []  # (fraction, clock index) for open clocks
    for j, v in enumerate(values):
        if v < 0:
            raise ValueError("negative clock value %s" % v)
        if v > ceilings[j]:
            kinds.append((UNBOUNDED, 0))
            continue
        floor = int(v)
        frac = v - floor
        if frac == 0:
            kinds.append((POINT, floor))
        else:
            kinds.append((OPEN, floor))
            fracs.append((frac, j))
    fracs.sort()
    blocks: list[tuple[int, ...]] = []
    current: list[int] = []
    current_frac: Optional[Fraction] = None
    for frac, j in fracs:
        if frac != current_frac:
            if current:
                blocks.append(tuple(current))
            current = [j]
            current_frac = frac
        else:
            current.append(j)
    if current:
        blocks.append(tuple(current))
    return Region(ceilings, tuple(kinds), tuple(blocks))


def representative(region: Region) -> tuple[Fraction, ...]:
    """A canonical member valuation: block b gets fraction (b+1)/(nblocks+1)."""
    n_blocks = len(region.blocks)
    block_of = {}
    for b, block in enumerate(region.blocks):
        for j in block:
            block_of[j] = b
    values = []
    for j, (kind, k) in enumerate(region.kinds):
        if kind == POINT:
            values.append(Fraction(k))
        elif kind == UNBOUNDED:
            values.append(Fraction(region.ceilings[j] + 1))
        else:
            values.append(k + Fraction(block_of[j] + 1, n_blocks + 1))
    return tuple(values)


def delay_successor(region: Region) -> Optional[Region]:
    """The next region reached by letting time pass; None once absorbing."""
    kinds = list(region.kinds)
    points = [j for j, (kind, _) in enumerate(kinds) if kind == POINT]
    if points:
        fresh = []
        for j in points:
            k = kinds[j][1]
            if k == region.ceilings[j]:
                kinds[j] = (UNBOUNDED, 0)
            else:
                kinds[j] = (OPEN, k)
                fresh.append(j)
        blocks = ((tuple(fresh),) if fresh else ()) + region.blocks
        return Region(region.ceilings, tuple(kinds), blocks)
    if not region.blocks:
        return None  # every clock is above its ceiling
    for j in region.blocks[-1]:
        kinds[j] = (POINT, kinds[j][1] + 1)
    return Region(region.ceilings, tuple(kinds), region.blocks[:-1])


@lru_cache(maxsize=None)
def delay_successors(region: Region) -> tuple[Region, ...]:
    """The full chain of time successors, starting with the region itself."""
    chain = [region]
    current = region
    while True:
        current = delay_successor(current)
        if current is None:
            return tuple(chain)
        chain.append(current)


def reset_region(region: Region, reset_clocks: Iterable[int]) -> Region:
    """Region after resetting the given (0-based) clocks to zero."""
    reset = set(reset_clocks)
    kinds = list(region.kinds)
    for j in reset:
        kinds[j] = (POINT, 0)
    blocks = tuple(
        kept
        for block in region.blocks
        if (kept := tuple(j for j in block if j not in reset))
    )
    return Region(region.ceilings, tuple(kinds), blocks)


def project(region: Region, keep: Sequence[int], new_ceilings: Ceilings) -> Region:
    """Project onto a clock subset, coarsening to smaller-or-equal ceilings."""
    kinds = []
    index = {}
    for i, j in enumerate(keep):
        index[j] = i
        kind, k = region.kinds[j]
        cap = new_ceilings[i]
        if cap > region.ceilings[j]:
            raise ValueError("projection cannot refine ceilings")
        if kind == UNBOUNDED or (kind == POINT and k > cap) or (kind == OPEN and k >= cap):
            kinds.append((UNBOUNDED, 0))
        else:
            kinds.append((kind, k))
    blocks = []
    for block in region.blocks:
        kept = tuple(
            index[j]
            for j in block
            if j in index and kinds[index[j]][0] == OPEN
        )
        if kept:
            blocks.append(kept)
    return Region(tuple(new_ceilings), tuple(kinds), tuple(blocks))


def region_in_intervals(region: Region, atoms: Sequence[IntervalAtom]) -> bool:
    """True when every valuation of the region satisfies the per-clock atoms
    (exact because atom constants never exceed the ceilings)."""
    for j, (lo, lo_strict, hi, hi_strict) in enumerate(atoms):
        kind, k = region.kinds[j]
        if kind == POINT:
            if k < lo or (lo_strict and k == lo):
                return False
            if hi is not None and (k > hi or (hi_strict and k == hi)):
                return False
        elif kind == OPEN:
            if k < lo:
                return False
            if hi is not None and k + 1 > hi:
                return False
        else:  # UNBOUNDED
            if lo > region.ceilings[j]:
                raise ValueError("atom constant above ceiling")
            if hi is not None:
                return False
    return True


def _ordered_set_partitions(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    rest_pool = items
    for size in range(1, len(items) + 1):
        for first in itertools.combinations(rest_pool, size):
            remaining = tuple(j for j in rest_pool if j not in first)
            for tail in _ordered_set_partitions(remaining):
                yield (first,) + tail


@lru_cache(maxsize=None)
def enumerate_regions(ceilings: Ceilings) -> tuple[Region, ...]:
    n = len(ceilings)
    per_clock = []
    for j in range(n):
        options = [(POINT, k) for k in range(ceilings[j] + 1)]
        options += [(OPEN, k) for k in range(ceilings[j])]
        options.append((UNBOUNDED, 0))
        per_clock.append(options)
    out = []
    for kinds in itertools.product(*per_clock):
        opens = tuple(j for j in range(n) if kinds[j][0] == OPEN)
        for blocks in _ordered_set_partitions(opens):
            out.append(Region(ceilings, kinds, blocks))
    return tuple(out)


def region_count_bound(n_clocks: int, ceilings: Ceilings) -> int:
    bound = factorial(n_clocks) * 2**n_clocks
    for kappa in ceilings:
        bound *= 2 * kappa + 2
    return bound


def region_word_of(word: ClockedWord, ceilings: Ceilings) -> RegionWord:
    return tuple(RegionLetter(l.action, region_of(l.values, ceilings)) for l in word)


def solve_delay(values: Sequence[Fraction], target: Region) -> Optional[Fraction]:
    """Least-commitment exact delay d >= 0 with values+d in the target region.

    Walks the delay-successor chain from the region of `values`; each chain
    element corresponds to one interval of delays, computed by intersecting
    per-clock constraints.  Canonical witness: the lower bound when attained,
    lo+1 for a final unbounded interval, else the midpoint.
    """
    return _solve_delay(tuple(values), target)


@lru_cache(maxsize=1 << 18)
def _solve_delay(values: tuple[Fraction, ...], target: Region) -> Optional[Fraction]:
    ceilings = target.ceilings
    start = region_of(values, ceilings)
    for candidate in delay_successors(start):
        lo, lo_strict = Fraction(0), False
        hi: Optional[Fraction] = None
        hi_strict = False
        empty = False
        for j, (kind, k) in enumerate(candidate.kinds):
            if kind == POINT:
                c_lo, c_lo_strict = Fraction(k) - values[j], False
                c_hi, c_hi_strict = c_lo, False
            elif kind == OPEN:
                c_lo, c_lo_strict = Fraction(k) - values[j], True
                c_hi, c_hi_strict = Fraction(k + 1) - values[j], True
            else:
                c_lo, c_lo_strict = Fraction(ceilings[j]) - values[j], True
                c_hi, c_hi_strict = None, False
            if c_lo > lo or (c_lo == lo and c_lo_strict):
                lo, lo_strict = c_lo, c_lo_strict
            if c_hi is not None and (
                hi is None or c_hi < hi or (c_hi == hi and c_hi_strict)
            ):
                hi, hi_strict = c_hi, c_hi_strict
        if hi is not None:
            if lo > hi or (lo == hi and (lo_strict or hi_strict)):
                empty = True
        if empty:
            continue
        if candidate == target:
            if not lo_strict:
                return lo
            if hi is None:
                return lo + 1
            return (lo + hi) / 2
    return None


class RegionSet(NamedTuple):
    """A guard as an explicit union of regions over fixed ceilings."""

    ceilings: Ceilings
    regions: frozenset[Region]

    @property
    def is_empty(self) -> bool:
        return not self.regions

    def contains(self, values: Sequence[Fraction]) -> bool:
        return region_of(values, self.ceilings) in self.regions

    def has(self, region: Region) -> bool:
        return region in self.regions

    def _check(self, other: "RegionSet") -> None:
        if self.ceilings != other.ceilings:
            raise ValueError("region sets over different ceilings")

    def union(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        return RegionSet(self.ceilings, self.regions | other.regions)

    def difference(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        return RegionSet(self.ceilings, self.regions - other.regions)

    def intersection(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        return RegionSet(self.ceilings, self.regions & other.regions)

    def complement(self) -> "RegionSet":
        every = frozenset(enumerate_regions(self.ceilings))
        return RegionSet(self.ceilings, every - self.regions)

    def refine(self, new_ceilings: Ceilings) -> "RegionSet":
        """Re-express over per-clock larger-or-equal ceilings."""
        if new_ceilings == self.ceilings:
            return self
        keep = tuple(range(len(self.ceilings)))
        members = frozenset(
            r
            for r in enumerate_regions(new_ceilings)
            if project(r, keep, self.ceilings) in self.regions
        )
        return RegionSet(new_ceilings, members)


def empty_region_set(ceilings: Ceilings) -> RegionSet:
    return RegionSet(ceilings, frozenset())


def full_region_set(ceilings: Ceilings) -> RegionSet:
    return RegionSet(ceilings, frozenset(enumerate_regions(ceilings)))


def region_set_of(regions: Iterable[Region], ceilings: Ceilings) -> RegionSet:
    return RegionSet(ceilings, frozenset(regions))


def region_set_from_intervals(
    atoms: Sequence[IntervalAtom], ceilings: Ceilings
) -> RegionSet:
    return RegionSet(
        ceilings,
        frozenset(
            r for r in enumerate_regions(ceilings) if region_in_intervals(r, atoms)
        ),
    )
