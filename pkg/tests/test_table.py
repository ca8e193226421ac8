"""Observation tables: cell computation, repairs, packing, interning.

The first half walks the demo target through a full prepare cycle and pins
every cell value; the walkthrough doubles as the reference for what the
valid-successor construction must produce.
"""

from fractions import Fraction

import pytest

import tal.regions as rg
from tal.automaton import Guard, TimedAutomaton, Transition, complete
from tal.benchmarks import demo_cta
from tal.table import (
    Cell,
    ConsistencyWitness,
    Table,
    UnfixableInstance,
    _all_reset_tuples,
    _cell_outcomes_normal,
    _cell_powerful,
    column_of,
    delay_of,
    initial_table,
    intern_column,
    intern_word,
    parent_of,
    word_of,
)
from tal.teacher import Teacher
from tal.words import DelayLetter, ResetClockedLetter, ResetDelayLetter

Q = Fraction
TT = (True, True)
FT = (False, True)
CEILINGS = (3, 3)


def rc(action, v1, v2, resets):
    return ResetClockedLetter(action, (Q(v1), Q(v2)), resets)


A_MID = rc("a", Q(21, 20), Q(21, 20), FT)
A_MID_TT = rc("a", Q(21, 20), Q(21, 20), TT)
A_ZERO = rc("a", 0, 0, TT)
B_ZERO = rc("b", 0, 0, TT)
B_MID = rc("b", Q(21, 20), 0, FT)
B_LATE = rc("b", Q(41, 20), 1, TT)

MID_REGION = rg.region_of((Q(21, 20), Q(21, 20)), CEILINGS)
E_COL = (rg.RegionLetter("a", MID_REGION),)

# every prefix the walkthrough ever holds, with its two cell values:
# (empty-column verdict, region-column verdict, region-column resets)
EXPECTED = {
    (): (False, True, FT),
    (A_MID,): (True, False, TT),
    (A_ZERO,): (False, False, TT),
    (B_ZERO,): (False, False, TT),
    (A_MID, A_ZERO): (False, False, TT),
    (A_MID, B_ZERO): (False, False, TT),
    (A_MID, B_MID): (True, False, TT),
    (A_MID, B_LATE): (False, False, TT),
    (A_ZERO, A_MID_TT): (False, False, TT),
    (A_ZERO, A_ZERO): (False, False, TT),
    (A_ZERO, B_ZERO): (False, False, TT),
}


def check_cells(table):
    eps_id, col_id = table.E
    assert column_of(eps_id) == () and column_of(col_id) == E_COL
    for wid in table.prefixes():
        f_eps, f_col, resets = EXPECTED[word_of(wid)]
        assert table.cells[wid, eps_id].accepted == f_eps
        cell = table.cells[wid, col_id]
        assert cell.accepted == f_col
        assert cell.resets == (resets,)


def build_t1(teacher):
    table = Table.build(
        "powerful",
        ("a", "b"),
        2,
        CEILINGS,
        S=[(), (A_MID,)],
        R=[
            (A_ZERO,),
            (B_ZERO,),
            (A_MID, A_ZERO),
            (A_MID, B_ZERO),
            (A_MID, B_MID),
            (A_MID, B_LATE),
            (A_ZERO, A_MID_TT),
        ],
        E=[()],
    )
    (table,) = table.fill(teacher)
    return table


def test_walkthrough_inconsistency_repair_and_closing():
    teacher = Teacher(demo_cta())
    t1 = build_t1(teacher)
    assert t1.is_reduced() and t1.find_unclosed() is None

    # the two extensions of look-alike rows disagree on resets; the repair
    # suffix is exactly the one-letter region word of the clashing letter
    witness = t1.find_inconsistency()
    assert witness == ConsistencyWitness((), (A_ZERO,), A_MID, A_MID_TT, E_COL)

    (t2,) = t1.make_consistent(witness, teacher)
    assert t2.E == [intern_column(()), intern_column(E_COL)]
    check_cells(t2)
    assert t2.find_inconsistency() is None

    unclosed = t2.find_unclosed()
    assert unclosed == intern_word((A_ZERO,))
    (t3,) = t2.make_closed(unclosed, teacher)
    assert [word_of(i) for i in t3.S] == [(), (A_MID,), (A_ZERO,)]
    assert [word_of(i) for i in t3.R] == [
        (B_ZERO,),
        (A_MID, A_ZERO),
        (A_MID, B_ZERO),
        (A_MID, B_MID),
        (A_MID, B_LATE),
        (A_ZERO, A_MID_TT),
        (A_ZERO, A_ZERO),
        (A_ZERO, B_ZERO),
    ]
    check_cells(t3)
    assert t3.is_prepared()


def test_valid_successor_query_returns_canonical_witness():
    teacher = Teacher(demo_cta())
    table = Table.build(
        "powerful", ("a", "b"), 2, CEILINGS, S=[()], R=[(A_ZERO,)], E=[(), E_COL]
    )
    cell = _cell_powerful(table, intern_word((A_ZERO,)), intern_column(E_COL), teacher)
    assert cell.accepted is False
    assert cell.resets == (TT,)
    successor = word_of(cell.successor)
    assert len(successor) == 1 and successor[0].action == "a"
    assert rg.region_of(successor[0].values, CEILINGS) == MID_REGION
    assert successor[0].values == (Q(3, 2), Q(3, 2))

    cell0 = _cell_powerful(table, intern_word(()), intern_column(E_COL), teacher)
    assert cell0.accepted is True and cell0.resets == (FT,)
    assert word_of(cell0.successor)[0].values == (Q(3, 2), Q(3, 2))


def test_pack_unpack_round_trip():
    teacher = Teacher(demo_cta())
    t1 = build_t1(teacher)
    again = Table.unpack(t1.pack(), t1.mode, t1.alphabet, t1.n_clocks, t1.ceilings)
    assert (again.S, again.R, again.E) == (t1.S, t1.R, t1.E)
    assert again.cells == t1.cells
    assert again.guessed_bits == t1.guessed_bits

    holey = t1.copy()
    del holey.cells[holey.prefixes()[3], holey.E[0]]
    back = Table.unpack(holey.pack(), t1.mode, t1.alphabet, t1.n_clocks, t1.ceilings)
    assert back.missing_cells() == holey.missing_cells()
    assert back.cells == holey.cells


def test_digest_ignores_row_and_column_order():
    teacher = Teacher(demo_cta())
    t1 = build_t1(teacher)
    shuffled = Table(
        t1.mode,
        t1.alphabet,
        t1.n_clocks,
        t1.ceilings,
        list(t1.S),
        list(reversed(t1.R)),
        list(t1.E),
        dict(t1.cells),
        t1.guessed_bits,
    )
    assert shuffled.digest() == t1.digest()

    eps = t1.E[0]
    poked = t1.copy()
    old = poked.cells[poked.S[0], eps]
    poked.cells[poked.S[0], eps] = Cell(not old.accepted, old.resets, old.successor)
    assert poked.digest() != t1.digest()


def one_clock_target():
    return complete(
        TimedAutomaton(
            alphabet=("a",),
            n_locations=2,
            initial=0,
            accepting=frozenset({1}),
            n_clocks=1,
            transitions=(
                Transition(0, "a", Guard(((1, True, None, False),)), frozenset({0}), 1),
                Transition(1, "a", Guard(((0, False, 1, False),)), frozenset(), 0),
            ),
            ceilings=(2,),
        )
    )[0]


def test_normal_fill_enumerates_exactly_the_guess_combinations():
    teacher = Teacher(one_clock_target())
    col = (rg.RegionLetter("a", rg.region_of((Q(3, 2),), (2,))),)
    table = Table.build(
        "normal",
        ("a",),
        1,
        (2,),
        S=[()],
        R=[(ResetClockedLetter("a", (Q(0),), (True,)),)],
        E=[(), col],
    )
    missing = table.missing_cells()
    assert len(missing) == 4
    outcomes = table.fill_outcomes(missing, teacher)
    assert sorted(len(o) for o in outcomes) == [1, 1, 2, 2]
    branches = table.fill(teacher)
    assert len(branches) == 4
    assert all(b.guessed_bits == 2 for b in branches)
    combos = {table.fill_combo(missing, outcomes, i).digest() for i in range(4)}
    assert {b.digest() for b in branches} == combos


def test_unreachable_column_collapses_to_one_failure_outcome():
    teacher = Teacher(one_clock_target())
    low = (rg.RegionLetter("a", rg.region_of((Q(1, 2),), (2,))),)
    word = (ResetClockedLetter("a", (Q(2),), (False,)),)
    table = Table.build("normal", ("a",), 1, (2,), S=[()], R=[word], E=[low])
    outcomes = _cell_outcomes_normal(
        table, intern_word(word), intern_column(low), teacher
    )
    assert outcomes == [(Cell(False, ((True,),), None), 0)]


def test_initial_tables():
    teacher = Teacher(demo_cta())
    (t0,) = initial_table("powerful", ("a", "b"), 2, CEILINGS, teacher)
    assert [word_of(i) for i in t0.S] == [()]
    assert [word_of(i) for i in t0.R] == [(A_ZERO,), (B_ZERO,)]
    assert not t0.missing_cells()
    assert t0.guessed_bits == 0

    guessed = initial_table("normal", ("a", "b"), 2, CEILINGS, teacher)
    assert len(guessed) == 16
    assert all(t.guessed_bits == 4 for t in guessed)
    assert len({t.digest() for t in guessed}) == 16


def test_counterexample_extension_powerful():
    target = one_clock_target()
    teacher = Teacher(target)
    (table,) = initial_table("powerful", ("a",), 1, (2,), teacher)
    run = target.run((DelayLetter("a", Q(3, 2)), DelayLetter("a", Q(1, 2))))
    (out,) = table.add_counterexample_powerful(run.reset_word, teacher)
    assert len(out.R) == len(table.R) + 2
    assert not out.missing_cells()
    assert out.guessed_bits == 0


def test_counterexample_extension_normal_branches_over_tail_guesses():
    teacher = Teacher(one_clock_target())
    tables = initial_table("normal", ("a",), 1, (2,), teacher)
    assert len(tables) == 2 and all(t.guessed_bits == 1 for t in tables)
    base = tables[0]
    ctx = (DelayLetter("a", Q(3, 2)), DelayLetter("a", Q(1, 2)))
    branches = base.add_counterexample_normal(ctx, teacher)
    assert len(branches) == 4
    assert all(b.guessed_bits == base.guessed_bits + 2 for b in branches)
    assert all(len(b.R) == len(base.R) + 2 for b in branches)
    assert len({b.digest() for b in branches}) == 4


def test_make_consistent_rejects_duplicate_suffix():
    teacher = Teacher(one_clock_target())
    col = (rg.RegionLetter("a", rg.region_of((Q(1, 2),), (2,))),)
    letter = ResetClockedLetter("a", (Q(1, 2),), (True,))
    witness = ConsistencyWitness((), (), letter, letter, col)
    normal = Table.build("normal", ("a",), 1, (2,), S=[()], R=[], E=[(), col])
    with pytest.raises(UnfixableInstance):
        normal.make_consistent(witness, teacher)
    powerful = Table.build("powerful", ("a",), 1, (2,), S=[()], R=[], E=[(), col])
    with pytest.raises(AssertionError):
        powerful.make_consistent(witness, teacher)


def test_interning_round_trips():
    w = (A_MID, B_MID)
    wid = intern_word(w)
    assert word_of(wid) == w
    assert intern_word(w) == wid
    assert parent_of(wid) == intern_word((A_MID,))
    assert delay_of(wid) == (
        ResetDelayLetter("a", Q(21, 20), FT),
        ResetDelayLetter("b", Q(0), FT),
    )
    assert delay_of(intern_word((A_MID, A_ZERO))) is None
    cid = intern_column(E_COL)
    assert column_of(cid) == E_COL
    assert len(_all_reset_tuples(2)) == 4


def test_dump_renders_strings():
    teacher = Teacher(demo_cta())
    t1 = build_t1(teacher)
    d = t1.dump()
    assert set(d) == {"S", "R", "E", "cells", "guessed_bits"}
    assert d["S"][0] == "eps"
    assert d["E"] == ["eps"]
    assert any("(a," in key for key in d["cells"])
