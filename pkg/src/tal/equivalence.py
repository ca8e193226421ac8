"""Language equivalence of complete deterministic timed automata.

Equivalence is decided through the classic recipe: complement one side (flip
accepting locations; sound because the automaton is complete and
deterministic), build the synchronous product over the disjoint union of the
clock sets, and search the region graph of the product for an accepting
symbolic path.  A found path is concretized step by step with the exact delay
solver, so the returned witness is a real delay-timed word on which the two
automata disagree.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional

from . import regions as rg
from .automaton import (
    TimedAutomaton,
    Transition,
    effective_ceilings,
    guard_satisfied,
    with_accepting,
)
from .words import DelayLetter, DelayWord, zeros


def complement(automaton: TimedAutomaton) -> TimedAutomaton:
    """Accept exactly the words the automaton rejects (automaton must be a
    complete deterministic one; checked by callers once, not per call)."""
    flipped = frozenset(range(automaton.n_locations)) - automaton.accepting
    return with_accepting(automaton, flipped)


class Product(NamedTuple):
    """Synchronous product over disjoint clock copies."""

    left: TimedAutomaton
    right: TimedAutomaton
    accepting_left: frozenset[int]
    accepting_right: frozenset[int]
    ceilings: tuple[int, ...]


def intersect(left: TimedAutomaton, right: TimedAutomaton) -> Product:
    if set(left.alphabet) != set(right.alphabet):
        raise ValueError("product requires identical alphabets")
    return Product(
        left,
        right,
        left.accepting,
        right.accepting,
        effective_ceilings(left) + effective_ceilings(right),
    )


class _SearchState(NamedTuple):
    left: int
    right: int
    region: rg.Region


@lru_cache(maxsize=65536)
def _representative(region: rg.Region) -> tuple[Fraction, ...]:
    return rg.representative(region)


def find_accepted_word(product: Product) -> Optional[DelayWord]:
    """Shortest (in actions) delay-timed word accepted by the product, or None.

    Breadth-first search over symbolic states (pair of locations plus a
    region of the combined clock space); guard tests use a representative
    valuation of the candidate region, which is exact because the combined
    ceilings dominate every guard constant of both sides.
    """
    if not product.accepting_left or not product.accepting_right:
        return None
    n_left = product.left.n_clocks
    start = _SearchState(
        product.left.initial,
        product.right.initial,
        rg.region_of(zeros(n_left + product.right.n_clocks), product.ceilings),
    )
    parents: dict[_SearchState, Optional[tuple]] = {start: None}
    queue = deque([start])
    goal: Optional[_SearchState] = None
    bound = (
        product.left.n_locations
        * product.right.n_locations
        * rg.region_count_bound(len(product.ceilings), product.ceilings)
    )

    def is_goal(state: _SearchState) -> bool:
        return (
            state.left in product.accepting_left
            and state.right in product.accepting_right
        )

    if is_goal(start):
        return ()
    while queue and goal is None:
        state = queue.popleft()
        for fired_region in rg.delay_successors(state.region):
            rep = _representative(fired_region)
            rep_left, rep_right = rep[:n_left], rep[n_left:]
            for action in product.left.alphabet:
                hits_left = [
                    t
                    for t in product.left.transitions_from(state.left, action)
                    if guard_satisfied(t.guard, rep_left)
                ]
                hits_right = [
                    t
                    for t in product.right.transitions_from(state.right, action)
                    if guard_satisfied(t.guard, rep_right)
                ]
                for t_left in hits_left:
                    for t_right in hits_right:
                        resets = set(t_left.resets) | {
                            n_left + j for j in t_right.resets
                        }
                        nxt = _SearchState(
                            t_left.target,
                            t_right.target,
                            rg.reset_region(fired_region, resets),
                        )
                        if nxt in parents:
                            continue
                        parents[nxt] = (state, fired_region, action, t_left, t_right)
                        if len(parents) > bound:
                            raise RuntimeError(
                                "symbolic search exceeded the region-graph bound"
                            )
                        if is_goal(nxt):
                            goal = nxt
                            queue.clear()
                            break
                        queue.append(nxt)
                    if goal is not None:
                        break
                if goal is not None:
                    break
            if goal is not None:
                break
    if goal is None:
        return None
    # unwind, then concretize with exact delays
    steps = []
    cursor: Optional[_SearchState] = goal
    while parents[cursor] is not None:
        state, fired_region, action, t_left, t_right = parents[cursor]
        steps.append((fired_region, action, t_left, t_right))
        cursor = state
    steps.reverse()
    word: list[DelayLetter] = []
    values = list(zeros(len(product.ceilings)))
    for fired_region, action, t_left, t_right in steps:
        delay = rg.solve_delay(tuple(values), fired_region)
        assert delay is not None, "symbolic path not concretizable"
        fired = [v + delay for v in values]
        word.append(DelayLetter(action, delay))
        resets = set(t_left.resets) | {n_left + j for j in t_right.resets}
        values = [
            Fraction(0) if j in resets else fired[j] for j in range(len(fired))
        ]
    return tuple(word)


class EquivalenceResult(NamedTuple):
    equivalent: bool
    word: Optional[DelayWord]
    # "+": target accepts, hypothesis rejects; "-": hypothesis accepts, target rejects
    sign: Optional[str]


def equivalent(target: TimedAutomaton, hypothesis: TimedAutomaton) -> EquivalenceResult:
    """Check L(hypothesis) = L(target); both must be complete deterministic."""
    witness = find_accepted_word(
        Product(
            hypothesis,
            target,
            hypothesis.accepting,
            frozenset(range(target.n_locations)) - target.accepting,
            effective_ceilings(hypothesis) + effective_ceilings(target),
        )
    )
    if witness is not None:
        return EquivalenceResult(False, witness, "-")
    witness = find_accepted_word(
        Product(
            target,
            hypothesis,
            target.accepting,
            frozenset(range(hypothesis.n_locations)) - hypothesis.accepting,
            effective_ceilings(target) + effective_ceilings(hypothesis),
        )
    )
    if witness is not None:
        return EquivalenceResult(False, witness, "+")
    return EquivalenceResult(True, None, None)
