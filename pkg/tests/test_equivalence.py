"""Language equivalence checking over random and handmade automata."""

import random
from fractions import Fraction

from tal.automaton import with_accepting
from tal.benchmarks import demo_cta
from tal.equivalence import (
    Product,
    complement,
    equivalent,
    find_accepted_word,
    intersect,
)
from conftest import check_equivalence_verdict, random_automaton_pair


def test_random_pairs_verdicts_hold_up():
    rng = random.Random(17)
    n_equivalent = 0
    for i in range(40):
        a, b = random_automaton_pair(rng, i)
        if check_equivalence_verdict(a, b, rng, 1500):
            n_equivalent += 1
    assert n_equivalent >= 4  # at least the self-pairs


def test_identical_builders_are_equivalent():
    result = equivalent(demo_cta(), demo_cta())
    assert result == (True, None, None)


def test_flipped_acceptance_yields_a_replaying_witness():
    automaton = demo_cta()
    flipped = with_accepting(
        automaton, frozenset(range(automaton.n_locations)) - automaton.accepting
    )
    result = equivalent(automaton, flipped)
    assert not result.equivalent
    assert automaton.accepts(result.word) != flipped.accepts(result.word)
    # the empty word already separates them: the initial location flips
    assert result.word == ()
    assert result.sign == "-"


def test_sign_tracks_which_side_accepts():
    automaton = demo_cta()
    none_accepting = with_accepting(automaton, frozenset())
    # target accepts something the empty hypothesis cannot
    result = equivalent(automaton, none_accepting)
    assert not result.equivalent and result.sign == "+"
    assert automaton.accepts(result.word)
    result = equivalent(none_accepting, automaton)
    assert not result.equivalent and result.sign == "-"


def test_complement_flips_every_verdict():
    rng = random.Random(3)
    automaton, _ = random_automaton_pair(rng, 1)
    flipped = complement(automaton)
    from conftest import random_delay_word

    for _ in range(300):
        w = random_delay_word(rng, automaton.alphabet)
        assert automaton.accepts(w) != flipped.accepts(w)


def test_empty_accepting_side_short_circuits():
    automaton = demo_cta()
    empty = with_accepting(automaton, frozenset())
    assert find_accepted_word(intersect(empty, automaton)) is None
    assert find_accepted_word(intersect(automaton, empty)) is None


def test_product_search_finds_a_joint_word():
    automaton = demo_cta()
    word = find_accepted_word(intersect(automaton, automaton))
    assert word is not None
    assert automaton.accepts(word)


def test_intersect_rejects_mismatched_alphabets():
    import pytest

    automaton = demo_cta()
    other = with_accepting(automaton, automaton.accepting)
    object.__setattr__(other, "alphabet", ("x", "y"))
    with pytest.raises(ValueError):
        intersect(automaton, other)
