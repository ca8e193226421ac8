"""Timed automata with diagonal-free interval guards and reset sets.

Locations are 0..n_locations-1; clocks are 0-based internally (1-based only
in JSON/CLI text).  Guards are per-clock interval conjunctions; synthesized
automata may instead carry region-set guards (`regions.RegionSet`), which
behave identically under `satisfied_by`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

from . import regions as rg
from .words import (
    DelayWord,
    ResetClockedLetter,
    ResetClockedWord,
    ResetDelayLetter,
    ResetDelayWord,
    delay_from_reset_clocked,
    zeros,
)

Box = tuple[rg.IntervalAtom, ...]


class Guard(NamedTuple):
    """Conjunction of one interval atom per clock."""

    atoms: Box

    def satisfied_by(self, values: Sequence[Fraction]) -> bool:
        for v, (lo, lo_strict, hi, hi_strict) in zip(values, self.atoms):
            if v < lo or (lo_strict and v == lo):
                return False
            if hi is not None and (v > hi or (hi_strict and v == hi)):
                return False
        return True

    def max_constants(self) -> tuple[int, ...]:
        return tuple(
            max(lo, hi if hi is not None else 0) for lo, _, hi, _ in self.atoms
        )

    def __str__(self) -> str:
        parts = []
        for j, (lo, lo_strict, hi, hi_strict) in enumerate(self.atoms):
            c = "c%d" % (j + 1)
            if hi is None:
                parts.append("%s%s%d" % (c, ">" if lo_strict else ">=", lo))
            elif lo == hi and not lo_strict and not hi_strict:
                parts.append("%s=%d" % (c, lo))
            else:
                parts.append(
                    "%d%s%s%s%d"
                    % (lo, "<" if lo_strict else "<=", c, "<" if hi_strict else "<=", hi)
                )
        return " & ".join(parts) if parts else "true"


def full_guard(n_clocks: int) -> Guard:
    return Guard((rg.FULL_ATOM,) * n_clocks)


GuardLike = Union[Guard, rg.RegionSet]


def guard_satisfied(guard: GuardLike, values: Sequence[Fraction]) -> bool:
    if isinstance(guard, Guard):
        return guard.satisfied_by(values)
    return guard.contains(values)


class Transition(NamedTuple):
    source: int
    action: str
    guard: GuardLike
    resets: frozenset[int]
    target: int


class RunResult(NamedTuple):
    accepted: bool
    locations: tuple[int, ...]  # visited locations, including the initial one
    reset_word: ResetDelayWord
    clocked: ResetClockedWord


class NondeterminismError(ValueError):
    """Raised when a run meets several enabled transitions at once."""


@dataclass(frozen=True)
class TimedAutomaton:
    alphabet: tuple[str, ...]
    n_locations: int
    initial: int
    accepting: frozenset[int]
    n_clocks: int
    transitions: tuple[Transition, ...]
    ceilings: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.ceilings:
            object.__setattr__(self, "ceilings", derive_ceilings(self))
        by_key: dict[tuple[int, str], list[Transition]] = {}
        for t in self.transitions:
            by_key.setdefault((t.source, t.action), []).append(t)
        object.__setattr__(self, "_by_key", by_key)

    def transitions_from(self, location: int, action: str) -> list[Transition]:
        return self._by_key.get((location, action), [])

    def enabled(
        self, location: int, action: str, values: Sequence[Fraction]
    ) -> Optional[Transition]:
        hits = [
            t
            for t in self.transitions_from(location, action)
            if guard_satisfied(t.guard, values)
        ]
        if not hits:
            return None
        if len(hits) > 1:
            raise NondeterminismError(
                "%d transitions enabled at location %d on %r"
                % (len(hits), location, action)
            )
        return hits[0]

    def run(self, word: DelayWord) -> Optional[RunResult]:
        """Unique run over a delay-timed word, or None when the word has none."""
        location = self.initial
        values = zeros(self.n_clocks)
        visited = [location]
        reset_word: list[ResetDelayLetter] = []
        clocked: list[ResetClockedLetter] = []
        for action, delay in word:
            fired = tuple(v + delay for v in values)
            transition = self.enabled(location, action, fired)
            if transition is None:
                return None
            resets = tuple(j in transition.resets for j in range(self.n_clocks))
            reset_word.append(ResetDelayLetter(action, delay, resets))
            clocked.append(ResetClockedLetter(action, fired, resets))
            values = tuple(
                Fraction(0) if resets[j] else fired[j] for j in range(self.n_clocks)
            )
            location = transition.target
            visited.append(location)
        return RunResult(
            location in self.accepting, tuple(visited), tuple(reset_word), tuple(clocked)
        )

    def accepts(self, word: DelayWord) -> bool:
        result = self.run(word)
        return result is not None and result.accepted

    def replay_clocked(self, word) -> Optional[tuple[tuple[bool, ...], ...]]:
        """Reset tuples along the run of a clocked word, or None when the word
        is not realizable on this automaton (inconsistent implied delays or no
        enabled transition)."""
        location = self.initial
        values = zeros(self.n_clocks)
        out = []
        for letter in word:
            implied = {
                letter.values[j] - values[j] for j in range(self.n_clocks)
            }
            if len(implied) != 1 or min(implied) < 0:
                return None
            transition = self.enabled(location, letter.action, letter.values)
            if transition is None:
                return None
            resets = tuple(j in transition.resets for j in range(self.n_clocks))
            out.append(resets)
            values = tuple(
                Fraction(0) if resets[j] else letter.values[j]
                for j in range(self.n_clocks)
            )
            location = transition.target
        return tuple(out)

    def accepts_reset_clocked(self, word: ResetClockedWord) -> bool:
        """Membership for reset-clocked words: the word must be non-doomed,
        its induced delay word must have an accepting run, and the run's
        resets must match the word's annotations."""
        reset_delay = delay_from_reset_clocked(word)
        if reset_delay is None:
            return False
        result = self.run(tuple((l.action, l.delay) for l in reset_delay))
        if result is None or not result.accepted:
            return False
        return tuple(l.resets for l in result.reset_word) == tuple(
            l.resets for l in word
        )


def derive_ceilings(automaton: TimedAutomaton) -> tuple[int, ...]:
    """Per-clock max guard constant, at least 1."""
    caps = [1] * automaton.n_clocks
    for t in automaton.transitions:
        if isinstance(t.guard, Guard):
            for j, c in enumerate(t.guard.max_constants()):
                caps[j] = max(caps[j], c)
        else:
            for j, c in enumerate(t.guard.ceilings):
                caps[j] = max(caps[j], c)
    return tuple(caps)


def _interval_intersect(
    a: rg.IntervalAtom, b: rg.IntervalAtom
) -> Optional[rg.IntervalAtom]:
    lo, lo_strict = a[0], a[1]
    if b[0] > lo or (b[0] == lo and b[1]):
        lo, lo_strict = b[0], b[1]
    if a[2] is None:
        hi, hi_strict = b[2], b[3]
    elif b[2] is None:
        hi, hi_strict = a[2], a[3]
    elif a[2] < b[2] or (a[2] == b[2] and a[3]):
        hi, hi_strict = a[2], a[3]
    else:
        hi, hi_strict = b[2], b[3]
    if hi is not None and (hi < lo or (hi == lo and (lo_strict or hi_strict))):
        return None
    return (lo, lo_strict, hi, hi_strict)


def _interval_below(atom: rg.IntervalAtom) -> Optional[rg.IntervalAtom]:
    lo, lo_strict = atom[0], atom[1]
    if lo == 0 and not lo_strict:
        return None
    return (0, False, lo, not lo_strict)


def _interval_above(atom: rg.IntervalAtom) -> Optional[rg.IntervalAtom]:
    if atom[2] is None:
        return None
    return (atom[2], not atom[3], None, False)


def _box_subtract(box: Box, guard: Box) -> list[Box]:
    """box minus guard as disjoint boxes, splitting clock by clock."""
    pieces: list[Box] = []
    current = list(box)
    for j, atom in enumerate(guard):
        for side in (_interval_below(atom), _interval_above(atom)):
            if side is None:
                continue
            cut = _interval_intersect(current[j], side)
            if cut is not None:
                piece = list(current)
                piece[j] = cut
                pieces.append(tuple(piece))
        mid = _interval_intersect(current[j], atom)
        if mid is None:
            return pieces
        current[j] = mid
    return pieces


class CompletionInfo(NamedTuple):
    sink: int
    added_transitions: int


def complete(automaton: TimedAutomaton) -> tuple[TimedAutomaton, CompletionInfo]:
    """Make the automaton complete by adding a non-accepting sink.

    For every (location, action) the uncovered part of the clock space is
    written as a union of disjoint boxes (per-clock interval subtraction in
    clock order); each box becomes an all-reset transition to the sink.
    """
    sink = automaton.n_locations
    every = frozenset(range(automaton.n_clocks))
    added: list[Transition] = []
    for location in range(automaton.n_locations):
        for action in automaton.alphabet:
            uncovered: list[Box] = [full_guard(automaton.n_clocks).atoms]
            for t in automaton.transitions_from(location, action):
                if not isinstance(t.guard, Guard):
                    raise TypeError("completion expects interval guards")
                uncovered = [
                    piece
                    for box in uncovered
                    for piece in _box_subtract(box, t.guard.atoms)
                ]
            for box in uncovered:
                added.append(Transition(location, action, Guard(box), every, sink))
    for action in automaton.alphabet:
        added.append(
            Transition(sink, action, full_guard(automaton.n_clocks), every, sink)
        )
    completed = TimedAutomaton(
        alphabet=automaton.alphabet,
        n_locations=automaton.n_locations + 1,
        initial=automaton.initial,
        accepting=automaton.accepting,
        n_clocks=automaton.n_clocks,
        transitions=automaton.transitions + tuple(added),
        ceilings=automaton.ceilings,
    )
    return completed, CompletionInfo(sink, len(added))


def guard_region_set(
    guard: GuardLike, ceilings: tuple[int, ...]
) -> rg.RegionSet:
    if isinstance(guard, Guard):
        return rg.region_set_from_intervals(guard.atoms, ceilings)
    return guard.refine(ceilings)


def check_complete_deterministic(automaton: TimedAutomaton) -> tuple[bool, bool]:
    """(complete?, deterministic?) by region decomposition per (location, action)."""
    caps = list(effective_ceilings(automaton))
    common = tuple(caps)
    complete_ok = True
    deterministic_ok = True
    for location in range(automaton.n_locations):
        for action in automaton.alphabet:
            covered = rg.empty_region_set(common)
            for t in automaton.transitions_from(location, action):
                guard = guard_region_set(t.guard, common)
                if not covered.intersection(guard).is_empty:
                    deterministic_ok = False
                covered = covered.union(guard)
            if len(covered.regions) != len(rg.enumerate_regions(common)):
                complete_ok = False
    return complete_ok, deterministic_ok


def effective_ceilings(automaton: TimedAutomaton) -> tuple[int, ...]:
    """Ceilings fine enough to evaluate every guard exactly."""
    caps = list(automaton.ceilings)
    for t in automaton.transitions:
        if isinstance(t.guard, Guard):
            for j, c in enumerate(t.guard.max_constants()):
                caps[j] = max(caps[j], c)
        else:
            for j, c in enumerate(t.guard.ceilings):
                caps[j] = max(caps[j], c)
    return tuple(caps)


def with_accepting(automaton: TimedAutomaton, accepting) -> TimedAutomaton:
    return replace(automaton, accepting=frozenset(accepting))
