"""Guard partitioning and hypothesis synthesis."""

import random
from fractions import Fraction

import pytest

import tal.regions as rg
from tal.automaton import check_complete_deterministic
from tal.benchmarks import demo_cta
from tal.synthesis import (
    AbstractMove,
    TableNotPrepared,
    build_dfa,
    build_hypothesis,
    partition,
)
from tal.table import Cell, Table, initial_table, intern_word, word_of, delay_of
from tal.teacher import Teacher
from tal.words import ResetClockedLetter, delay_only
from conftest import check_partition, random_partition_case

Q = Fraction


def test_random_partitions_are_true_partitions():
    rng = random.Random(41)
    for _ in range(150):
        valuations, ceilings = random_partition_case(rng)
        check_partition(valuations, ceilings, rng)


def test_two_point_partition_splits_at_the_larger_point():
    result = partition([(Q(0),), (Q(3, 2),)], (2,))
    low = result.constraint_of((Q(0),))
    high = result.constraint_of((Q(3, 2),))
    assert low.contains((Q(1, 2),)) and low.contains((Q(1),))
    assert not low.contains((Q(3, 2),))
    assert high.contains((Q(2),)) and high.contains((Q(5),))
    assert result.block_index((Q(1),)) == 0
    assert result.block_index((Q(17, 8),)) == 1


def test_swallowed_box_falls_back_to_its_own_region():
    # the middle point's box coincides with the later one's; it keeps
    # exactly its region, carved out of the block that absorbed it
    points = [
        (Q(0), Q(0)),
        (Q(1, 2), Q(1, 2)),
        (Q(1, 2), Q(3, 4)),
    ]
    result = partition(points, (1, 1))
    mid = result.constraint_of((Q(1, 2), Q(1, 2)))
    assert mid.contains((Q(1, 4), Q(1, 4)))  # same region, equal fractions
    assert not mid.contains((Q(1, 4), Q(1, 2)))
    assert result.block_index((Q(1, 2), Q(3, 4))) == 2
    rng = random.Random(7)
    check_partition(points, (1, 1), rng)


def test_points_beyond_the_ceiling_claim_their_region():
    result = partition([(Q(0),), (Q(9, 2),)], (2,))
    assert result.ceilings == (5,)
    assert result.block_index((Q(5, 2),)) == 1
    assert result.block_index((Q(2),)) == 0
    rng = random.Random(8)
    check_partition([(Q(0),), (Q(9, 2),)], (2,), rng)


def test_partition_rejects_bad_inputs():
    with pytest.raises(ValueError):
        partition([], (1,))
    with pytest.raises(ValueError):
        partition([(Q(1),)], (1,))  # zero valuation missing
    with pytest.raises(ValueError):
        partition([(Q(0),), (Q(1, 4),), (Q(1, 2),)], (1,))  # shared region


TT = (True, True)
FT = (False, True)
A_MID = ResetClockedLetter("a", (Q(21, 20), Q(21, 20)), FT)
A_MID_TT = ResetClockedLetter("a", (Q(21, 20), Q(21, 20)), TT)
A_ZERO = ResetClockedLetter("a", (Q(0), Q(0)), TT)
B_ZERO = ResetClockedLetter("b", (Q(0), Q(0)), TT)
B_MID = ResetClockedLetter("b", (Q(21, 20), Q(0)), FT)
B_LATE = ResetClockedLetter("b", (Q(41, 20), Q(1)), TT)


def prepared_demo_table(teacher):
    table = Table.build(
        "powerful",
        ("a", "b"),
        2,
        (3, 3),
        S=[(), (A_MID,), (A_ZERO,)],
        R=[
            (B_ZERO,),
            (A_MID, A_ZERO),
            (A_MID, B_ZERO),
            (A_MID, B_MID),
            (A_MID, B_LATE),
            (A_ZERO, A_MID_TT),
            (A_ZERO, A_ZERO),
            (A_ZERO, B_ZERO),
        ],
        E=[(), (rg.RegionLetter("a", rg.region_of((Q(21, 20), Q(21, 20)), (3, 3))),)],
    )
    (table,) = table.fill(teacher)
    assert table.is_prepared()
    return table


def test_build_dfa_quotients_the_table_rows():
    teacher = Teacher(demo_cta())
    table = prepared_demo_table(teacher)
    machine = build_dfa(table)
    assert machine.n_locations == 3
    assert machine.initial == 0
    assert machine.accepting == frozenset({1})
    assert len(machine.moves) == 10
    assert AbstractMove(0, "a", (Q(21, 20), Q(21, 20)), FT, 1) in machine.moves
    assert machine.location_of[intern_word((B_ZERO,))] == 2
    assert machine.location_of[intern_word((A_MID, B_MID))] == 1


def test_build_dfa_requires_a_prepared_table():
    table = Table.build(
        "powerful",
        ("a",),
        1,
        (1,),
        S=[()],
        R=[(ResetClockedLetter("a", (Q(0),), (True,)),)],
        E=[()],
    )
    eps = table.E[0]
    table.cells[table.S[0], eps] = Cell(True, (), intern_word(()))
    table.cells[table.R[0], eps] = Cell(False, (), intern_word(()))
    with pytest.raises(TableNotPrepared):
        build_dfa(table)


def test_hypothesis_agrees_with_the_table_and_is_well_formed():
    teacher = Teacher(demo_cta())
    table = prepared_demo_table(teacher)
    hypothesis = build_hypothesis(table)
    assert hypothesis.n_locations == 3
    assert hypothesis.accepting == frozenset({1})
    assert check_complete_deterministic(hypothesis) == (True, True)
    eps = table.E[0]
    for wid in table.prefixes():
        reset_delay = delay_of(wid)
        if reset_delay is None:
            continue
        expected = table.cells[wid, eps].accepted
        assert hypothesis.accepts(delay_only(reset_delay)) == expected
    assert hypothesis.accepts(((("a"), Q(3, 2)),))
    assert not hypothesis.accepts(((("a"), Q(1, 2)),))
    assert hypothesis.accepts((("a", Q(21, 20)), ("b", Q(0))))
    assert not hypothesis.accepts((("a", Q(21, 20)), ("b", Q(1))))
