"""Hypothesis synthesis from a prepared observation table.

Two stages: first an abstract machine whose locations are the distinct rows
of the table's S section, then a concrete timed automaton whose guards come
from partitioning the observed firing valuations of each (location, action)
pair into disjoint clock constraints (unions of regions).
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil
from typing import NamedTuple, Optional

from . import regions as rg
from .automaton import TimedAutomaton, Transition
from .table import Table, intern_column, parent_of, word_of

Valuation = tuple[Fraction, ...]


class AbstractMove(NamedTuple):
    source: int
    action: str
    valuation: Valuation
    resets: tuple[bool, ...]
    target: int


class AbstractMachine(NamedTuple):
    n_locations: int
    initial: int
    accepting: frozenset[int]
    location_of: dict  # interned prefix id -> location index
    moves: tuple[AbstractMove, ...]


class TableNotPrepared(ValueError):
    pass


def build_dfa(table: Table) -> AbstractMachine:
    """Quotient the table by row equality.  Locations are the rows of S (in S
    order); every non-empty prefix contributes one abstract move."""
    if not table.is_prepared():
        raise TableNotPrepared("table is not reduced/closed/consistent")
    empty_column = intern_column(())
    location_by_row = {}
    accepting = set()
    for index, s in enumerate(table.S):
        location_by_row[table.row(s)] = index
        if table.cells[s, empty_column].accepted:
            accepting.add(index)
    location_of = {i: location_by_row[table.row(i)] for i in table.prefixes()}
    moves = []
    for i in table.prefixes():
        w = word_of(i)
        if not w:
            continue
        last = w[-1]
        moves.append(
            AbstractMove(
                location_of[parent_of(i)], last.action, last.values, last.resets,
                location_of[i],
            )
        )
    initial = table.S[0]
    assert not word_of(initial)
    return AbstractMachine(
        len(table.S), location_of[initial], frozenset(accepting), location_of,
        tuple(moves),
    )


class PartitionResult(NamedTuple):
    valuations: tuple[Valuation, ...]  # in ascending order
    constraints: tuple[rg.RegionSet, ...]  # aligned with valuations
    ceilings: tuple[int, ...]  # refined ceilings the constraints live over

    def block_index(self, values) -> Optional[int]:
        hits = [i for i, c in enumerate(self.constraints) if c.contains(values)]
        if len(hits) > 1:
            raise AssertionError("partition blocks overlap")
        return hits[0] if hits else None

    def constraint_of(self, valuation: Valuation) -> rg.RegionSet:
        return self.constraints[self.valuations.index(valuation)]


def partition(valuations, ceilings: tuple[int, ...]) -> PartitionResult:
    """Split the full valuation space into one constraint per valuation, with
    each valuation inside its own constraint.

    The input must contain the zero valuation and be pairwise distinct under
    region equivalence at the given ceilings.  Valuations beyond the ceilings
    claim their own (unbounded) region outright; the rest receive a backward
    difference of upward-closed boxes, refined to ceilings large enough for
    every observed magnitude.  A valuation whose box was swallowed entirely
    by later boxes falls back to exactly its region, carved out of whichever
    constraint absorbed it.
    """
    points = sorted(valuations)
    if not points:
        raise ValueError("cannot partition an empty valuation set")
    if points[0] != (Fraction(0),) * len(ceilings):
        raise ValueError("the zero valuation must be present")
    seen = {}
    for v in points:
        r = rg.region_of(v, ceilings)
        if r in seen:
            raise ValueError(
                "valuations %r and %r share a region" % (seen[r], v)
            )
        seen[r] = v

    refined = tuple(
        max(k, *(int(ceil(v[j])) for v in points)) for j, k in enumerate(ceilings)
    )
    n = len(points)

    def is_beyond(v: Valuation) -> bool:
        return any(v[j] > ceilings[j] for j in range(len(ceilings)))

    claimed = [
        rg.region_set_of((rg.region_of(v, ceilings),), ceilings).refine(refined)
        if is_beyond(v)
        else rg.empty_region_set(refined)
        for v in points
    ]
    claimed_union = rg.empty_region_set(refined)
    for a in claimed:
        claimed_union = claimed_union.union(a)

    boxes = []
    for v in points:
        atoms = tuple(
            (x.numerator, False, None, False)
            if x.denominator == 1
            else (int(x), True, None, False)
            for x in v
        )
        boxes.append(rg.region_set_from_intervals(atoms, refined))

    blocks: list[rg.RegionSet] = [rg.empty_region_set(refined)] * n
    absorbed = claimed_union
    for i in range(n - 1, -1, -1):
        blocks[i] = boxes[i].difference(absorbed)
        absorbed = absorbed.union(boxes[i])

    constraints = [blocks[i].union(claimed[i]) for i in range(n)]

    for i in range(n):
        if constraints[i].contains(points[i]):
            continue
        # the whole box was swallowed by later boxes; fall back to the region
        assert constraints[i].is_empty
        own = rg.region_of(points[i], refined)
        donors = [j for j in range(n) if constraints[j].has(own)]
        assert len(donors) == 1
        j = donors[0]
        constraints[j] = constraints[j].difference(
            rg.region_set_of((own,), refined)
        )
        constraints[i] = rg.region_set_of((own,), refined)

    total = len(rg.enumerate_regions(refined))
    assert sum(len(c.regions) for c in constraints) == total
    assert all(c.contains(v) for v, c in zip(points, constraints))
    return PartitionResult(tuple(points), tuple(constraints), refined)


def build_hypothesis(table: Table) -> TimedAutomaton:
    """Concretize the abstract machine: collect the firing valuations of each
    (location, action) pair, partition them, and attach region-set guards."""
    machine = build_dfa(table)
    ceilings = table.ceilings
    observed: dict[tuple[int, str], dict] = {}
    for move in machine.moves:
        slot = observed.setdefault((move.source, move.action), {})
        region = rg.region_of(move.valuation, ceilings)
        known = slot.get(region)
        if known is None:
            slot[region] = move
        elif (known.resets, known.target) != (move.resets, move.target):
            raise AssertionError(
                "region-equivalent observations disagree at location %d on %r"
                % (move.source, move.action)
            )
    transitions = []
    for (source, action), slot in sorted(observed.items()):
        moves = list(slot.values())
        result = partition([m.valuation for m in moves], ceilings)
        for move in moves:
            guard = result.constraint_of(move.valuation)
            resets = frozenset(
                j for j, bit in enumerate(move.resets) if bit
            )
            transitions.append(
                Transition(source, action, guard, resets, move.target)
            )
    return TimedAutomaton(
        table.alphabet,
        machine.n_locations,
        machine.initial,
        machine.accepting,
        table.n_clocks,
        tuple(transitions),
        ceilings,
    )
