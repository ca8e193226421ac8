"""Built-in target automata used by tests, the demo, and `tal bench`.

Numeric ids follow the public benchmark naming convention
locations_alphabet_clocks_maxconst.
"""

from __future__ import annotations

from .automaton import Guard, TimedAutomaton, Transition, complete
from .regions import FULL_ATOM


def _g(*atoms):
    return Guard(tuple(atoms))


def demo_dta() -> TimedAutomaton:
    """Two locations over {a,b} with two clocks; the running demo target.

    l0 --a, c1>1 & c2>1, reset {c2}--> l1 (accepting)
    l1 --a, c1<3 & c2>1, reset {c1,c2}--> l0
    l1 --b, c2<1, reset {c2}--> l1
    """
    transitions = (
        Transition(0, "a", _g((1, True, None, False), (1, True, None, False)),
                   frozenset({1}), 1),
        Transition(1, "a", _g((0, False, 3, True), (1, True, None, False)),
                   frozenset({0, 1}), 0),
        Transition(1, "b", _g(FULL_ATOM, (0, False, 1, True)),
                   frozenset({1}), 1),
    )
    return TimedAutomaton(
        alphabet=("a", "b"),
        n_locations=2,
        initial=0,
        accepting=frozenset({1}),
        n_clocks=2,
        transitions=transitions,
        ceilings=(3, 3),
    )


def demo_cta() -> TimedAutomaton:
    return complete(demo_dta())[0]


def unbalanced2() -> TimedAutomaton:
    """The unbalanced:2 benchmark: 5 locations, all accepting, one action,
    two clocks with interleaved reset discipline."""
    transitions = (
        Transition(0, "a", _g((1, True, 2, True), FULL_ATOM), frozenset({0}), 1),
        Transition(1, "a", _g((1, True, 2, True), (2, True, 4, True)),
                   frozenset({0, 1}), 2),
        Transition(2, "a", _g((1, True, 2, True), FULL_ATOM), frozenset({0}), 3),
        Transition(3, "a", _g((1, True, 2, True), (2, True, 4, True)),
                   frozenset({0, 1}), 4),
        Transition(4, "a", _g((1, True, 2, True), (1, True, None, False)),
                   frozenset({0}), 0),
    )
    return TimedAutomaton(
        alphabet=("a",),
        n_locations=5,
        initial=0,
        accepting=frozenset({0, 1, 2, 3, 4}),
        n_clocks=2,
        transitions=transitions,
        ceilings=(4, 4),
    )


def case_2_1_2_3() -> TimedAutomaton:
    """Single-action variant of the demo: 2 locations, 2 clocks, max const 3."""
    transitions = (
        Transition(0, "a", _g((1, True, None, False), FULL_ATOM), frozenset({1}), 1),
        Transition(1, "a", _g((0, False, 3, True), (1, True, None, False)),
                   frozenset({0, 1}), 0),
        Transition(1, "a", _g(FULL_ATOM, (0, False, 1, True)), frozenset({1}), 1),
    )
    return TimedAutomaton(
        alphabet=("a",),
        n_locations=2,
        initial=0,
        accepting=frozenset({1}),
        n_clocks=2,
        transitions=transitions,
        ceilings=(3, 3),
    )


def case_3_1_2_3() -> TimedAutomaton:
    """Three-location ring: 3 locations, 1 action, 2 clocks, max const 3."""
    transitions = (
        Transition(0, "a", _g((1, True, None, False), FULL_ATOM), frozenset({1}), 1),
        Transition(1, "a", _g(FULL_ATOM, (0, False, 1, True)), frozenset({1}), 2),
        Transition(2, "a", _g((0, False, 3, True), (1, True, None, False)),
                   frozenset({0, 1}), 0),
    )
    return TimedAutomaton(
        alphabet=("a",),
        n_locations=3,
        initial=0,
        accepting=frozenset({1}),
        n_clocks=2,
        transitions=transitions,
        ceilings=(3, 3),
    )


def _completed(builder):
    def build():
        return complete(builder())[0]

    return build


BUILTIN_DTAS = {
    "demo": demo_dta,
    "unbalanced:2": unbalanced2,
    "2_1_2_3": case_2_1_2_3,
    "3_1_2_3": case_3_1_2_3,
}

BUILTIN_TARGETS = {name: _completed(builder) for name, builder in BUILTIN_DTAS.items()}
