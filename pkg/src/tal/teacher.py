"""Teachers: query oracles wrapped around a hidden target automaton.

One class serves both learner variants.  The powerful facet answers
membership over reset-clocked words plus reset queries; the normal facet
answers membership over plain delay-timed words only.  Equivalence queries
return the teacher-appropriate counterexample form.  All counters count
queries *asked*; internal caches only save wall-clock.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import regions as rg
from .automaton import Guard, TimedAutomaton, check_complete_deterministic
from .equivalence import EquivalenceResult, equivalent
from .words import (
    ClockedWord,
    DelayWord,
    ResetClockedWord,
    ResetDelayWord,
    delay_from_reset_clocked,
)


@dataclass
class QueryStats:
    mq: int = 0
    eq: int = 0
    rq: int = 0

    def as_dict(self) -> dict:
        return {"mq": self.mq, "eq": self.eq, "rq": self.rq}


class PowerfulCtx(NamedTuple):
    word: ResetDelayWord
    sign: str


class NormalCtx(NamedTuple):
    word: DelayWord
    sign: str


def _guard_key(guard) -> tuple:
    if isinstance(guard, Guard):
        return ("atoms", tuple(guard))
    assert isinstance(guard, rg.RegionSet)
    return ("regions", tuple(sorted(guard.regions)))


def _canonical_key(automaton: TimedAutomaton) -> tuple:
    """Language-determining key: locations renumbered breadth-first from the
    initial one with a fixed edge order, unreachable locations dropped.

    Hypotheses coming from different observation tables frequently describe
    the same machine up to location numbering; keying the equivalence cache
    on this form lets all of them share one verdict.
    """
    order = {automaton.initial: 0}
    queue = deque([automaton.initial])
    edges = []
    while queue:
        location = queue.popleft()
        for action in automaton.alphabet:
            hits = sorted(
                automaton.transitions_from(location, action),
                key=lambda t: _guard_key(t.guard),
            )
            for t in hits:
                if t.target not in order:
                    order[t.target] = len(order)
                    queue.append(t.target)
                edges.append(
                    (
                        order[location],
                        t.action,
                        _guard_key(t.guard),
                        tuple(sorted(t.resets)),
                        order[t.target],
                    )
                )
    accepting = frozenset(
        order[l] for l in automaton.accepting if l in order
    )
    return (
        automaton.alphabet,
        automaton.n_clocks,
        automaton.ceilings,
        len(order),
        accepting,
        tuple(edges),
    )


@dataclass
class Teacher:
    """Oracle over a complete deterministic target automaton.

    With ``trivial_resets`` (the always-resetting encoding of one-clock
    automata) reset queries are answered locally with the all-reset tuple;
    they are still counted.
    """

    target: TimedAutomaton
    trivial_resets: bool = False
    stats: QueryStats = field(default_factory=QueryStats)

    def __post_init__(self):
        complete_ok, deterministic_ok = check_complete_deterministic(self.target)
        if not (complete_ok and deterministic_ok):
            raise ValueError("teacher target must be complete and deterministic")
        self._mq_rc_cache: dict[ResetClockedWord, bool] = {}
        self._mq_delay_cache: dict[DelayWord, bool] = {}
        self._eq_cache: dict = {}
        # discrepancy words already handed out, with the target's verdict on
        # them; replayed against new hypotheses before the full product check
        self._ctx_pool: list[tuple[DelayWord, bool]] = []

    # -- membership ------------------------------------------------------

    def mq_reset_clocked(self, word: ResetClockedWord) -> bool:
        self.stats.mq += 1
        cached = self._mq_rc_cache.get(word)
        if cached is None:
            cached = self.target.accepts_reset_clocked(word)
            self._mq_rc_cache[word] = cached
        return cached

    def mq_delay(self, word: DelayWord) -> bool:
        self.stats.mq += 1
        cached = self._mq_delay_cache.get(word)
        if cached is None:
            cached = self.target.accepts(word)
            self._mq_delay_cache[word] = cached
        return cached

    # -- resets ----------------------------------------------------------

    def rq(self, word: ClockedWord) -> tuple[bool, ...]:
        """Reset tuple taken by the target after the last transition of a
        valid clocked word."""
        self.stats.rq += 1
        if self.trivial_resets:
            return (True,) * self.target.n_clocks
        if not word:
            return (True,) * self.target.n_clocks
        resets = self.target.replay_clocked(word)
        if resets is None:
            raise ValueError("reset query on an unrealizable clocked word")
        return resets[-1]

    # -- equivalence -----------------------------------------------------

    def _eq(self, hypothesis: TimedAutomaton):
        self.stats.eq += 1
        key = _canonical_key(hypothesis)
        hit = self._eq_cache.get(key)
        if hit is not None:
            return hit
        result = None
        # shortest pooled witness first: the learner pays for a counterexample
        # in guesses exponential in its unmatched length, so handing the
        # shortest known discrepancy keeps instances small (stable sort, so
        # equal lengths stay in discovery order)
        for word, target_accepts in sorted(self._ctx_pool, key=lambda p: len(p[0])):
            if hypothesis.accepts(word) != target_accepts:
                result = EquivalenceResult(
                    False, word, "+" if target_accepts else "-"
                )
                break
        if result is None:
            result = equivalent(self.target, hypothesis)
            if not result.equivalent:
                self._ctx_pool.append((result.word, result.sign == "+"))
        self._eq_cache[key] = result
        return result

    def eq_powerful(self, hypothesis: TimedAutomaton) -> Optional[PowerfulCtx]:
        result = self._eq(hypothesis)
        if result.equivalent:
            return None
        run = self.target.run(result.word)
        assert run is not None, "target is complete; every word has a run"
        return PowerfulCtx(run.reset_word, result.sign)

    def eq_normal(self, hypothesis: TimedAutomaton) -> Optional[NormalCtx]:
        result = self._eq(hypothesis)
        if result.equivalent:
            return None
        return NormalCtx(result.word, result.sign)
