"""Query oracles: counting, caching, canonical hypothesis keys."""

from fractions import Fraction

import pytest

from tal.automaton import TimedAutomaton, Transition, full_guard, with_accepting
from tal.benchmarks import demo_cta, demo_dta
from tal.teacher import Teacher, _canonical_key
from tal.words import ClockedLetter, DelayLetter, ResetClockedLetter

Q = Fraction


def test_rejects_incomplete_targets():
    with pytest.raises(ValueError):
        Teacher(demo_dta())


def test_membership_counts_every_call_even_cached():
    teacher = Teacher(demo_cta())
    word = (DelayLetter("a", Q(3, 2)),)
    assert teacher.mq_delay(word) is True
    assert teacher.mq_delay(word) is True
    assert teacher.stats.mq == 2

    rc = (ResetClockedLetter("a", (Q(3, 2), Q(3, 2)), (False, True)),)
    assert teacher.mq_reset_clocked(rc) is True
    wrong = (ResetClockedLetter("a", (Q(3, 2), Q(3, 2)), (True, True)),)
    assert teacher.mq_reset_clocked(wrong) is False
    assert teacher.stats.mq == 4


def test_reset_queries_replay_the_target():
    teacher = Teacher(demo_cta())
    resets = teacher.rq((ClockedLetter("a", (Q(3, 2), Q(3, 2))),))
    assert resets == (False, True)
    assert teacher.rq(()) == (True, True)
    with pytest.raises(ValueError):
        teacher.rq((ClockedLetter("a", (Q(1), Q(2))),))
    assert teacher.stats.rq == 3


def test_trivial_resets_answer_locally():
    tick = TimedAutomaton(
        alphabet=("a",),
        n_locations=1,
        initial=0,
        accepting=frozenset({0}),
        n_clocks=1,
        transitions=(Transition(0, "a", full_guard(1), frozenset({0}), 0),),
    )
    teacher = Teacher(tick, trivial_resets=True)
    assert teacher.rq((ClockedLetter("a", (Q(99),)),)) == (True,)
    assert teacher.stats.rq == 1


def test_equivalence_counts_and_caches_by_canonical_form():
    target = demo_cta()
    teacher = Teacher(target)
    assert teacher.eq_powerful(target) is None
    assert teacher.stats.eq == 1

    renumbered = relabel(target, (2, 0, 1))
    assert teacher.eq_normal(renumbered) is None
    assert teacher.stats.eq == 2
    # same canonical key, so the cached verdict answered the second call
    assert len(teacher._eq_cache) == 1


def test_counterexamples_come_from_the_pool_before_the_product():
    target = demo_cta()
    teacher = Teacher(target)
    empty = with_accepting(target, frozenset())
    first = teacher.eq_normal(empty)
    assert first is not None
    assert target.accepts(first.word) != empty.accepts(first.word)
    assert first.sign == "+"
    assert len(teacher._ctx_pool) == 1

    # a different wrong hypothesis that fails on the pooled word is answered
    # without growing the pool
    flipped = with_accepting(target, frozenset({0, 2}))
    second = teacher.eq_normal(flipped)
    assert second is not None
    assert target.accepts(second.word) != flipped.accepts(second.word)
    assert len(teacher._ctx_pool) == 1


def test_powerful_counterexamples_carry_target_resets():
    target = demo_cta()
    teacher = Teacher(target)
    ctx = teacher.eq_powerful(with_accepting(target, frozenset()))
    assert ctx is not None and ctx.sign == "+"
    replay = target.run(tuple((l.action, l.delay) for l in ctx.word))
    assert replay.accepted
    assert tuple(l.resets for l in replay.reset_word) == tuple(
        l.resets for l in ctx.word
    )


def relabel(automaton: TimedAutomaton, order) -> TimedAutomaton:
    mapping = {old: new for old, new in enumerate(order)}
    return TimedAutomaton(
        alphabet=automaton.alphabet,
        n_locations=automaton.n_locations,
        initial=mapping[automaton.initial],
        accepting=frozenset(mapping[l] for l in automaton.accepting),
        n_clocks=automaton.n_clocks,
        transitions=tuple(
            Transition(
                mapping[t.source], t.action, t.guard, t.resets, mapping[t.target]
            )
            for t in automaton.transitions
        ),
        ceilings=automaton.ceilings,
    )


def test_canonical_key_is_invariant_under_renumbering():
    target = demo_cta()
    assert _canonical_key(target) == _canonical_key(relabel(target, (1, 2, 0)))
    other = with_accepting(target, frozenset({0}))
    assert _canonical_key(target) != _canonical_key(other)


def test_canonical_key_drops_unreachable_locations():
    target = demo_cta()
    padded = TimedAutomaton(
        alphabet=target.alphabet,
        n_locations=target.n_locations + 1,
        initial=target.initial,
        accepting=target.accepting | {target.n_locations},
        n_clocks=target.n_clocks,
        transitions=target.transitions,
        ceilings=target.ceilings,
    )
    assert _canonical_key(padded) == _canonical_key(target)
