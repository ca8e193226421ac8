"""Timed observation tables.

Rows are reset-clocked words (prefixes S and boundary R, prefix-closed);
columns are region words E.  A cell holds the membership sign f, the reset
tuples g observed along the valid successor realizing the column's region
word from the row, and the successor itself.  Doomed rows (reset-clocked
words no automaton realizes) get all-minus/all-reset cells by convention.

The same structure serves both learner variants.  In powerful mode reset
tuples come from teacher reset queries and every operation returns a single
table.  In normal mode resets are guessed: filling and repairs branch, one
table instance per distinct combination of materialized guesses, and
``guessed_bits`` counts the guessed reset bits for frontier ordering.

Words and columns are interned to small integers.  The reset-guess search
copies, hashes and fingerprints tables by the hundred thousand, and rational
valuations make the raw tuples expensive to hash; interning pays that cost
once per distinct word.
"""

from __future__ import annotations

import pickle
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from hashlib import blake2b
from itertools import product as iter_product
from typing import NamedTuple, Optional

from . import regions as rg
from .teacher import Teacher
from .words import (
    ClockedLetter,
    DelayLetter,
    ResetClockedLetter,
    ResetClockedWord,
    ResetDelayLetter,
    ResetDelayWord,
    clocked_from_reset_delay,
    delay_from_reset_clocked,
    delay_only,
    format_word,
    strip_resets,
    valuation_after,
    zeros,
)

RCWord = ResetClockedWord
RegionWord = rg.RegionWord


# -- interning -------------------------------------------------------------

_word_ids: dict[RCWord, int] = {}
_words: list[RCWord] = []
_word_delay: list[Optional[ResetDelayWord]] = []
_col_ids: dict[RegionWord, int] = {}
_cols: list[RegionWord] = []
_parents: dict[int, int] = {}


def intern_word(word: RCWord) -> int:
    wid = _word_ids.get(word)
    if wid is None:
        wid = len(_words)
        _word_ids[word] = wid
        _words.append(word)
        _word_delay.append(delay_from_reset_clocked(word))
    return wid


def word_of(wid: int) -> RCWord:
    return _words[wid]


def delay_of(wid: int) -> Optional[ResetDelayWord]:
    """Reset-delay form of an interned word; None when the word is doomed."""
    return _word_delay[wid]


def intern_column(column: RegionWord) -> int:
    cid = _col_ids.get(column)
    if cid is None:
        cid = len(_cols)
        _col_ids[column] = cid
        _cols.append(column)
    return cid


def column_of(cid: int) -> RegionWord:
    return _cols[cid]


def parent_of(wid: int) -> int:
    """Id of the word minus its last letter (the word must be non-empty)."""
    pid = _parents.get(wid)
    if pid is None:
        pid = intern_word(word_of(wid)[:-1])
        _parents[wid] = pid
    return pid


class Cell(NamedTuple):
    accepted: bool
    resets: tuple[tuple[bool, ...], ...]  # one tuple per suffix letter
    successor: Optional[int]  # interned realization of the column


RowValue = tuple[tuple[bool, tuple[tuple[bool, ...], ...]], ...]


class ConsistencyWitness(NamedTuple):
    prefix_a: RCWord
    prefix_b: RCWord
    letter_a: ResetClockedLetter
    letter_b: ResetClockedLetter
    suffix: RegionWord  # the column to append to E


class UnfixableInstance(Exception):
    """A repair cannot make progress (wrong reset guesses); drop the table."""


def _all_reset_tuples(n_clocks: int) -> list[tuple[bool, ...]]:
    return [tuple(bits) for bits in iter_product((True, False), repeat=n_clocks)]


@dataclass
class Table:
    mode: str  # "powerful" | "normal"
    alphabet: tuple[str, ...]
    n_clocks: int
    ceilings: tuple[int, ...]
    S: list[int] = field(default_factory=list)  # interned word ids
    R: list[int] = field(default_factory=list)
    E: list[int] = field(default_factory=list)  # interned column ids
    cells: dict[tuple[int, int], Cell] = field(default_factory=dict)
    guessed_bits: int = 0
    _fingerprint: Optional[bytes] = None

    @classmethod
    def build(
        cls,
        mode: str,
        alphabet: tuple[str, ...],
        n_clocks: int,
        ceilings: tuple[int, ...],
        S: list[RCWord],
        R: list[RCWord],
        E: list[RegionWord],
    ) -> "Table":
        return cls(
            mode,
            alphabet,
            n_clocks,
            ceilings,
            [intern_word(w) for w in S],
            [intern_word(w) for w in R],
            [intern_column(e) for e in E],
        )

    def copy(self) -> "Table":
        return Table(
            self.mode,
            self.alphabet,
            self.n_clocks,
            self.ceilings,
            list(self.S),
            list(self.R),
            list(self.E),
            dict(self.cells),
            self.guessed_bits,
        )

    def prefixes(self) -> list[int]:
        return self.S + self.R

    def prefix_words(self) -> list[RCWord]:
        return [word_of(i) for i in self.prefixes()]

    def column_words(self) -> list[RegionWord]:
        return [column_of(i) for i in self.E]

    def row(self, wid: int) -> RowValue:
        return tuple(
            (cell.accepted, cell.resets)
            for cell in (self.cells[wid, e] for e in self.E)
        )

    def pack(self) -> bytes:
        """Compact deterministic serialization.  The search frontier holds
        hundreds of thousands of instances; packed blobs cost a fraction of
        live objects.  Cells not yet filled pack as None."""
        flat = []
        for p in self.prefixes():
            for e in self.E:
                cell = self.cells.get((p, e))
                if cell is None:
                    flat.append(None)
                    continue
                mask = 0
                for resets in cell.resets:
                    for bit in resets:
                        mask = mask << 1 | bit
                succ = -1 if cell.successor is None else cell.successor
                flat.append((cell.accepted, mask, succ))
        blob = pickle.dumps(
            (tuple(self.S), tuple(self.R), tuple(self.E), tuple(flat),
             self.guessed_bits),
            protocol=pickle.HIGHEST_PROTOCOL,
        )
        # level 1 halves the blob for a few microseconds; the frontier is
        # memory-bound long before it is CPU-bound
        return zlib.compress(blob, 1)

    @classmethod
    def unpack(
        cls,
        blob: bytes,
        mode: str,
        alphabet: tuple[str, ...],
        n_clocks: int,
        ceilings: tuple[int, ...],
    ) -> "Table":
        S, R, E, flat, bits = pickle.loads(zlib.decompress(blob))
        lengths = [len(column_of(e)) for e in E]
        cells = {}
        it = iter(flat)
        for p in list(S) + list(R):
            for e, width in zip(E, lengths):
                entry = next(it)
                if entry is None:
                    continue
                accepted, mask, succ = entry
                resets = []
                shift = width * n_clocks
                for _ in range(width):
                    shift -= n_clocks
                    chunk = mask >> shift
                    resets.append(
                        tuple(bool(chunk >> (n_clocks - 1 - j) & 1) for j in range(n_clocks))
                    )
                cells[p, e] = Cell(accepted, tuple(resets), None if succ < 0 else succ)
        return cls(mode, alphabet, n_clocks, ceilings, list(S), list(R), list(E),
                   cells, bits)

    def digest(self) -> bytes:
        """Stable 128-bit fingerprint of the table's content, for instance
        de-duplication across the search frontier.  Row and column order is
        an implementation artifact (a table is a set of rows plus a set of
        suffixes), so the fingerprint sorts them: branch interleavings that
        assemble the same table in different orders collapse to one instance."""
        if self._fingerprint is None:
            s, r, e = sorted(self.S), sorted(self.R), sorted(self.E)
            flat = tuple(self.cells.get((p, c)) for p in s + r for c in e)
            blob = pickle.dumps(
                (tuple(s), tuple(r), tuple(e), flat),
                protocol=pickle.HIGHEST_PROTOCOL,
            )
            self._fingerprint = blake2b(blob, digest_size=16).digest()
        return self._fingerprint

    # -- filling ---------------------------------------------------------

    def missing_cells(self) -> list[tuple[int, int]]:
        return [
            (p, e)
            for p in self.prefixes()
            for e in self.E
            if (p, e) not in self.cells
        ]

    def fill(self, teacher: Teacher) -> list["Table"]:
        """Compute all missing cells.  Powerful mode fills in place and
        returns [self]; normal mode returns one instance per distinct
        combination of materialized reset guesses.  The reset-guess search
        does not call this (a single repair can imply millions of guess
        combinations); it enumerates combinations one at a time through
        fill_outcomes/fill_combo instead of materializing the product."""
        missing = self.missing_cells()
        if not missing:
            return [self]
        if self.mode == "powerful":
            for p, e in missing:
                self.cells[p, e] = _cell_powerful(self, p, e, teacher)
            return [self]
        outcomes = self.fill_outcomes(missing, teacher)
        branches: list[Table] = []
        for combo in iter_product(*outcomes):
            out = self.copy()
            for (p, e), (cell, bits) in zip(missing, combo):
                out.cells[p, e] = cell
                out.guessed_bits += bits
            branches.append(out)
        return branches

    def fill_outcomes(
        self, missing: list[tuple[int, int]], teacher: Teacher
    ) -> list[list[tuple["Cell", int]]]:
        """Per missing cell, the possible (cell value, guessed bits) pairs;
        deterministic, so recomputing on a revisit yields the same lists."""
        return [_cell_outcomes_normal(self, p, e, teacher) for p, e in missing]

    def fill_combo(
        self,
        missing: list[tuple[int, int]],
        outcomes: list[list[tuple["Cell", int]]],
        index: int,
    ) -> "Table":
        """The filled table for one combination, indexed in mixed radix over
        the outcome lists (cell 0 is the least significant digit)."""
        out = self.copy()
        for (p, e), options in zip(missing, outcomes):
            cell, bits = options[index % len(options)]
            index //= len(options)
            out.cells[p, e] = cell
            out.guessed_bits += bits
        return out

    # -- the four conditions --------------------------------------------

    def is_reduced(self) -> bool:
        rows = [self.row(s) for s in self.S]
        return len(rows) == len(set(rows))

    def find_unclosed(self) -> Optional[int]:
        s_rows = {self.row(s) for s in self.S}
        for r in self.R:
            if self.row(r) not in s_rows:
                return r
        return None

    def find_inconsistency(self) -> Optional[ConsistencyWitness]:
        ids = self.prefixes()
        rows = {i: self.row(i) for i in ids}
        parent = {}
        keyed = []
        for i in ids:
            w = word_of(i)
            if not w:
                continue
            parent[i] = parent_of(i)
            keyed.append((i, w, w[-1], rg.region_of(w[-1].values, self.ceilings)))
        n = len(keyed)
        for x in range(n):
            i1, w1, a, region_a = keyed[x]
            for y in range(x + 1, n):
                i2, w2, b, region_b = keyed[y]
                if a.action != b.action or region_a != region_b:
                    continue
                if rows[parent[i1]] != rows[parent[i2]]:
                    continue
                letter_region = rg.RegionLetter(a.action, region_a)
                if a.resets != b.resets:
                    return ConsistencyWitness(
                        w1[:-1], w2[:-1], a, b, (letter_region,)
                    )
                if rows[i1] != rows[i2]:
                    for e in self.E:
                        if self.cells[i1, e][:2] != self.cells[i2, e][:2]:
                            return ConsistencyWitness(
                                w1[:-1],
                                w2[:-1],
                                a,
                                b,
                                (letter_region,) + column_of(e),
                            )
        return None

    def find_evidence_violation(self) -> Optional[tuple[int, int]]:
        present = set(self.prefixes())
        for s in self.S:
            for e in self.E:
                successor = self.cells[s, e].successor
                if successor is None or not word_of(successor):
                    continue
                joined = word_of(s) + word_of(successor)
                if intern_word(joined) not in present:
                    return s, e
        return None

    def is_prepared(self, evidence_closed: bool = False) -> bool:
        return (
            self.is_reduced()
            and self.find_unclosed() is None
            and self.find_inconsistency() is None
            and (not evidence_closed or self.find_evidence_violation() is None)
        )

    # -- repairs (each returns filled tables) ----------------------------

    def make_closed(self, r: int, teacher: Teacher) -> list["Table"]:
        base = self.copy()
        base.R.remove(r)
        base.S.append(r)
        word = word_of(r)
        existing_zero_letters = {
            w[-1].action: w[-1]
            for i in base.prefixes()
            for w in [word_of(i)]
            if len(w) == len(word) + 1
            and w[: len(word)] == word
            and not any(w[-1].values)
        }
        zero = zeros(self.n_clocks)
        realizable = (
            delay_of(r) is not None
            and valuation_after(word, self.n_clocks) == zero
        )
        tables = [base]
        for action in self.alphabet:
            if action in existing_zero_letters:
                continue
            if not realizable:
                forced = intern_word(
                    word + (ResetClockedLetter(action, zero, (True,) * self.n_clocks),)
                )
                for t in tables:
                    t.R.append(forced)
            elif self.mode == "powerful":
                resets = teacher.rq(strip_resets(word) + (ClockedLetter(action, zero),))
                wid = intern_word(word + (ResetClockedLetter(action, zero, resets),))
                for t in tables:
                    t.R.append(wid)
            else:
                grown = []
                for t in tables:
                    for resets in _all_reset_tuples(self.n_clocks):
                        out = t.copy()
                        out.R.append(
                            intern_word(
                                word + (ResetClockedLetter(action, zero, resets),)
                            )
                        )
                        out.guessed_bits += self.n_clocks
                        grown.append(out)
                tables = grown
        if self.mode == "powerful":
            return [filled for t in tables for filled in t.fill(teacher)]
        return tables

    def make_consistent(
        self, witness: ConsistencyWitness, teacher: Teacher
    ) -> list["Table"]:
        cid = intern_column(witness.suffix)
        if cid in self.E:
            if self.mode == "powerful":
                raise AssertionError(
                    "consistency repair suffix already present in a powerful table"
                )
            raise UnfixableInstance
        out = self.copy()
        out.E.append(cid)
        if self.mode == "powerful":
            return out.fill(teacher)
        return [out]

    def make_evidence_closed(
        self, violation: tuple[int, int], teacher: Teacher
    ) -> list["Table"]:
        s, e = violation
        successor = word_of(self.cells[s, e].successor)
        stem = word_of(s)
        out = self.copy()
        present = set(out.prefixes())
        for k in range(1, len(successor) + 1):
            candidate = intern_word(stem + successor[:k])
            if candidate not in present:
                out.R.append(candidate)
                present.add(candidate)
        if self.mode == "powerful":
            return out.fill(teacher)
        return [out]

    # -- counterexamples -------------------------------------------------

    def add_counterexample_powerful(
        self, ctx: ResetDelayWord, teacher: Teacher
    ) -> list["Table"]:
        clocked = clocked_from_reset_delay(ctx, self.n_clocks)
        out = self.copy()
        present = set(out.prefixes())
        for k in range(1, len(clocked) + 1):
            prefix = intern_word(clocked[:k])
            if prefix not in present:
                out.R.append(prefix)
                present.add(prefix)
        return out.fill(teacher)

    def add_counterexample_normal(self, ctx, teacher: Teacher) -> list["Table"]:
        """Branch over reset guesses for the unmatched tail of the
        counterexample; the matched prefix keeps its recorded resets."""
        best: Optional[int] = None
        best_len = -1
        for p in self.prefixes():
            w = word_of(p)
            if len(w) > len(ctx) or len(w) <= best_len:
                continue
            reset_delay = delay_of(p)
            if reset_delay is None:
                continue
            if delay_only(reset_delay) == ctx[: len(w)]:
                best, best_len = p, len(w)
        matched_rd = delay_of(best) if best is not None else ()
        tail = ctx[best_len:] if best_len > 0 else ctx
        assert tail, "counterexample fully matched by the table"
        tables = []
        for guesses in iter_product(_all_reset_tuples(self.n_clocks), repeat=len(tail)):
            reset_delay = tuple(matched_rd) + tuple(
                ResetDelayLetter(letter.action, letter.delay, resets)
                for letter, resets in zip(tail, guesses)
            )
            clocked = clocked_from_reset_delay(reset_delay, self.n_clocks)
            out = self.copy()
            out.guessed_bits += self.n_clocks * len(tail)
            present = set(out.prefixes())
            for k in range(1, len(clocked) + 1):
                prefix = intern_word(clocked[:k])
                if prefix not in present:
                    out.R.append(prefix)
                    present.add(prefix)
            tables.append(out)
        return tables

    # -- debugging -------------------------------------------------------

    def dump(self) -> dict:
        return {
            "S": [format_word(word_of(i)) for i in self.S],
            "R": [format_word(word_of(i)) for i in self.R],
            "E": [_format_region_word(column_of(i)) for i in self.E],
            "cells": {
                "%s | %s"
                % (format_word(word_of(p)), _format_region_word(column_of(e))): {
                    "f": "+" if cell.accepted else "-",
                    "g": ["".join("T" if b else "_" for b in t) for t in cell.resets],
                    "successor": format_word(word_of(cell.successor))
                    if cell.successor is not None
                    else None,
                }
                for p in self.prefixes()
                for e in self.E
                for cell in [self.cells[p, e]]
            },
            "guessed_bits": self.guessed_bits,
        }


def _format_region_word(e: RegionWord) -> str:
    if not e:
        return "eps"
    return "".join("(%s, %s)" % (l.action, l.region) for l in e)


def initial_table(
    mode: str,
    alphabet: tuple[str, ...],
    n_clocks: int,
    ceilings: tuple[int, ...],
    teacher: Teacher,
) -> list[Table]:
    """S = {empty word}, E = {empty column}, R = one all-zero one-letter word
    per action (resets queried in powerful mode, guessed in normal mode)."""
    table = Table(mode, alphabet, n_clocks, ceilings)
    table.S.append(intern_word(()))
    table.E.append(intern_column(()))
    zero = zeros(n_clocks)
    if mode == "powerful":
        for action in alphabet:
            resets = teacher.rq((ClockedLetter(action, zero),))
            table.R.append(intern_word((ResetClockedLetter(action, zero, resets),)))
        return table.fill(teacher)
    tables = [table]
    for action in alphabet:
        grown = []
        for t in tables:
            for resets in _all_reset_tuples(n_clocks):
                out = t.copy()
                out.R.append(intern_word((ResetClockedLetter(action, zero, resets),)))
                out.guessed_bits += n_clocks
                grown.append(out)
        tables = grown
    return tables


# -- cell computation (the valid-successor construction) -----------------


def _cell_powerful(table: Table, prefix: int, e: int, teacher: Teacher) -> Cell:
    column = column_of(e)
    if delay_of(prefix) is None:
        return Cell(False, ((True,) * table.n_clocks,) * len(column), None)
    word = word_of(prefix)
    if not column:
        return Cell(teacher.mq_reset_clocked(word), (), intern_word(()))
    values = valuation_after(word, table.n_clocks)
    clocked_prefix = list(strip_resets(word))
    letters: list[ResetClockedLetter] = []
    for letter in column:
        delay = rg.solve_delay(values, letter.region)
        if delay is None:
            return Cell(False, ((True,) * table.n_clocks,) * len(column), None)
        fired = tuple(v + delay for v in values)
        resets = teacher.rq(tuple(clocked_prefix) + (ClockedLetter(letter.action, fired),))
        letters.append(ResetClockedLetter(letter.action, fired, resets))
        clocked_prefix.append(ClockedLetter(letter.action, fired))
        values = tuple(
            Fraction(0) if resets[j] else fired[j] for j in range(table.n_clocks)
        )
    successor = tuple(letters)
    accepted = teacher.mq_reset_clocked(word + successor)
    return Cell(accepted, tuple(l.resets for l in letters), intern_word(successor))


def _cell_outcomes_normal(
    table: Table, prefix: int, e: int, teacher: Teacher
) -> list[tuple[Cell, int]]:
    """All cells reachable under per-letter reset guesses, with the number of
    guessed bits each one records.  Guessing is lazy: letters past a failed
    delay solve never branch, and paths that dead-end collapse into a single
    failure outcome (their guesses are not recorded anywhere, so distinct
    dead paths would only duplicate instances)."""
    n = table.n_clocks
    column = column_of(e)
    word = word_of(prefix)
    reset_delay = delay_of(prefix)
    if reset_delay is None:
        return [(Cell(False, ((True,) * n,) * len(column), None), 0)]
    if not column:
        return [(Cell(teacher.mq_delay(delay_only(reset_delay)), (), intern_word(())), 0)]
    failure = Cell(False, ((True,) * n,) * len(column), None)
    outcomes: list[tuple[Cell, int]] = []
    failed = False
    prefix_delays = delay_only(reset_delay)
    stack = [(0, valuation_after(word, n), (), prefix_delays)]
    while stack:
        index, values, letters, delays = stack.pop()
        if index == len(column):
            accepted = teacher.mq_delay(delays)
            outcomes.append(
                (
                    Cell(accepted, tuple(l.resets for l in letters), intern_word(letters)),
                    n * len(column),
                )
            )
            continue
        letter = column[index]
        delay = rg.solve_delay(values, letter.region)
        if delay is None:
            failed = True
            continue
        fired = tuple(v + delay for v in values)
        delays = delays + (DelayLetter(letter.action, delay),)
        for resets in _all_reset_tuples(n):
            nxt = tuple(
                Fraction(0) if resets[j] else fired[j] for j in range(n)
            )
            stack.append(
                (
                    index + 1,
                    nxt,
                    letters + (ResetClockedLetter(letter.action, fired, resets),),
                    delays,
                )
            )
    if failed:
        outcomes.append((failure, 0))
    return outcomes
