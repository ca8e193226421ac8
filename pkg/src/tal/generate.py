"""Seeded random target generation.

Each (location, action) pair gets a random grid of per-clock integer
breakpoints; the grid boxes partition the valuation space, so the output is
complete and deterministic by construction.  The always-reset variant (one
clock, every transition resets it) mirrors the shape of real-time-automaton
benchmarks.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass

from .automaton import Guard, TimedAutomaton, Transition, check_complete_deterministic


@dataclass(frozen=True)
class CaseSpec:
    locations: int
    alphabet_size: int
    clocks: int
    max_constant: int
    seed: int
    accept_probability: float = 0.5
    always_reset: bool = False

    @property
    def name(self) -> str:
        return "%d_%d_%d_%d@%d" % (
            self.locations, self.alphabet_size, self.clocks,
            self.max_constant, self.seed,
        )


def _clock_intervals(rng: random.Random, kappa: int) -> list:
    """A random partition of [0, inf) into 1..3 intervals with integer
    breakpoints; adjacent strictness is complementary so the pieces tile."""
    n_cuts = rng.randint(0, min(2, kappa))
    cuts = sorted(rng.sample(range(1, kappa + 1), n_cuts))
    intervals = []
    lo, lo_strict = 0, False
    for cut in cuts:
        hi_strict = rng.random() < 0.5
        intervals.append((lo, lo_strict, cut, hi_strict))
        lo, lo_strict = cut, not hi_strict
    intervals.append((lo, lo_strict, None, False))
    return intervals


def generate(case: CaseSpec) -> TimedAutomaton:
    if case.locations < 1 or case.alphabet_size < 1 or case.clocks < 1:
        raise ValueError("need at least one location, action, and clock")
    if case.always_reset and case.clocks != 1:
        raise ValueError("always-reset targets use exactly one clock")
    rng = random.Random(case.seed)
    alphabet = tuple(string.ascii_lowercase[: case.alphabet_size])
    transitions = []
    for source in range(case.locations):
        for action in alphabet:
            grids = [_clock_intervals(rng, case.max_constant)
                     for _ in range(case.clocks)]
            boxes = [()]
            for axis in grids:
                boxes = [box + (piece,) for box in boxes for piece in axis]
            for box in boxes:
                target = rng.randrange(case.locations)
                if case.always_reset:
                    resets = frozenset({0})
                else:
                    resets = frozenset(
                        j for j in range(case.clocks) if rng.random() < 0.5
                    )
                transitions.append(
                    Transition(source, action, Guard(box), resets, target)
                )
    accepting = frozenset(
        i for i in range(case.locations)
        if rng.random() < case.accept_probability
    )
    automaton = TimedAutomaton(
        alphabet=alphabet,
        n_locations=case.locations,
        initial=0,
        accepting=accepting,
        n_clocks=case.clocks,
        transitions=tuple(transitions),
        ceilings=(max(case.max_constant, 1),) * case.clocks,
    )
    complete_ok, deterministic_ok = check_complete_deterministic(automaton)
    assert complete_ok and deterministic_ok
    return automaton
