"""Learning loops: table maintenance, hypothesis rounds, reset-guess search.

Three modes share the observation-table machinery:

- ``powerful``: the teacher answers reset queries, so a single table evolves
  through repair / hypothesis / counterexample rounds.
- ``normal``: resets are guessed; a priority frontier explores table
  instances ordered by how many reset bits they committed to, fewest first.
- ``rta``: the powerful loop against a teacher whose reset answers are
  trivially all-true (the right answers when every transition resets the
  only clock), so reset queries cost nothing but are still counted.
"""

from __future__ import annotations

import heapq
import itertools
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import regions as rg
from .automaton import TimedAutomaton, effective_ceilings
from .synthesis import build_hypothesis
from .table import Table, UnfixableInstance, initial_table
from .teacher import QueryStats, Teacher


@dataclass
class LearnConfig:
    mode: str = "powerful"  # powerful | normal | rta
    ceilings: Optional[tuple[int, ...]] = None  # default: target's ceilings
    evidence_closed: bool = False
    max_rounds: int = 10**6
    max_instances: int = 10**6
    max_seconds: Optional[float] = None
    # frontier priority for the normal mode: "bits" pops the instance with
    # the fewest committed reset guesses first, "rows" the one with the
    # fewest prefixes; both are complete, transcripts differ
    order: str = "bits"
    progress_every: int = 0  # print a frontier progress line per N instances
    dump_dir: Optional[str] = None


class BudgetExhausted(RuntimeError):
    pass


class RoundBudgetExhausted(BudgetExhausted):
    pass


class InstanceBudgetExhausted(BudgetExhausted):
    pass


class TimeBudgetExhausted(BudgetExhausted):
    pass


@dataclass
class LearnOutcome:
    automaton: TimedAutomaton
    stats: QueryStats
    mode: str
    ceilings: tuple[int, ...]
    rounds: int  # hypotheses submitted, including the accepted one
    tables_explored: int
    final_table: Table
    max_ctx_len: int = 0
    time_ms: int = 0

    @property
    def learned_locations(self) -> int:
        return self.automaton.n_locations


def learn(target: TimedAutomaton, config: LearnConfig = LearnConfig()) -> LearnOutcome:
    if config.mode in ("powerful", "rta"):
        return _learn_powerful(target, config)
    if config.mode == "normal":
        return _learn_normal(target, config)
    raise ValueError("unknown learning mode %r" % config.mode)


def _resolve_ceilings(target: TimedAutomaton, config: LearnConfig) -> tuple[int, ...]:
    return config.ceilings if config.ceilings else effective_ceilings(target)


class _Dumper:
    def __init__(self, directory: Optional[str]):
        self.directory = Path(directory) if directory else None
        self.counter = itertools.count()
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)

    def dump(self, table: Table, note: str) -> None:
        if not self.directory:
            return
        payload = table.dump()
        payload["note"] = note
        path = self.directory / ("table_%05d.json" % next(self.counter))
        path.write_text(json.dumps(payload, indent=2))


def _prepare(table: Table, teacher: Teacher, evidence_closed: bool) -> Table:
    """Repair a powerful-mode table until it is ready for synthesis.  Every
    repair returns exactly one successor here since nothing is guessed."""
    while True:
        r = table.find_unclosed()
        if r is not None:
            (table,) = table.make_closed(r, teacher)
            continue
        witness = table.find_inconsistency()
        if witness is not None:
            (table,) = table.make_consistent(witness, teacher)
            continue
        if evidence_closed:
            violation = table.find_evidence_violation()
            if violation is not None:
                (table,) = table.make_evidence_closed(violation, teacher)
                continue
        return table


def _learn_powerful(target: TimedAutomaton, config: LearnConfig) -> LearnOutcome:
    start = time.monotonic()
    teacher = Teacher(target, trivial_resets=(config.mode == "rta"))
    ceilings = _resolve_ceilings(target, config)
    dumper = _Dumper(config.dump_dir)
    (table,) = initial_table(
        "powerful", target.alphabet, target.n_clocks, ceilings, teacher
    )
    rounds = 0
    max_ctx = 0
    while True:
        table = _prepare(table, teacher, config.evidence_closed)
        dumper.dump(table, "round %d" % rounds)
        if rounds >= config.max_rounds:
            raise RoundBudgetExhausted("no hypothesis after %d rounds" % rounds)
        if (
            config.max_seconds is not None
            and time.monotonic() - start > config.max_seconds
        ):
            raise TimeBudgetExhausted(
                "no hypothesis within %.0f s" % config.max_seconds
            )
        rounds += 1
        hypothesis = build_hypothesis(table)
        ctx = teacher.eq_powerful(hypothesis)
        if ctx is None:
            return LearnOutcome(
                hypothesis,
                teacher.stats,
                config.mode,
                ceilings,
                rounds,
                tables_explored=1,
                final_table=table,
                max_ctx_len=max_ctx,
                time_ms=int((time.monotonic() - start) * 1000),
            )
        max_ctx = max(max_ctx, len(ctx.word))
        (table,) = table.add_counterexample_powerful(ctx.word, teacher)


def _learn_normal(target: TimedAutomaton, config: LearnConfig) -> LearnOutcome:
    start = time.monotonic()
    teacher = Teacher(target)
    ceilings = _resolve_ceilings(target, config)
    dumper = _Dumper(config.dump_dir)
    # heap entries: (priority, tick, cursor, blob).  cursor -1 marks a fully
    # filled instance ready for handling; cursor >= 0 marks a stem, a table
    # with structural guesses committed but cells still missing.  A stem is
    # expanded one fill combination per pop: one repair can imply millions of
    # guess combinations, and materializing them eagerly dominates memory;
    # expanding lazily keeps the heap at the size of the de-duplicated
    # reachable set.  A stem re-enters the heap with its cursor advanced, at
    # its own priority, which lower-bounds all its children, so the pop order
    # is the same as with eager expansion.
    frontier: list = []
    tick = itertools.count()
    seen: set[bytes] = set()
    if config.order == "bits":
        priority = lambda t: t.guessed_bits
    elif config.order == "rows":
        priority = lambda t: len(t.S) + len(t.R)
    else:
        raise ValueError("unknown frontier order %r" % config.order)

    def push(tables) -> None:
        # dedup on content: branches regularly reproduce an instance that is
        # already queued or was already explored.  Queue packed blobs, since
        # live tables would dominate memory at large frontier sizes.
        for t in tables:
            mark = t.digest()
            if mark in seen:
                continue
            seen.add(mark)
            cursor = 0 if t.missing_cells() else -1
            heapq.heappush(frontier, (priority(t), next(tick), cursor, t.pack()))

    push(initial_table("normal", target.alphabet, target.n_clocks, ceilings, teacher))
    explored = 0
    rounds = 0
    max_ctx = 0
    while frontier:
        prio, _, cursor, blob = heapq.heappop(frontier)
        if (
            config.max_seconds is not None
            and time.monotonic() - start > config.max_seconds
        ):
            raise TimeBudgetExhausted(
                "no hypothesis within %.0f s" % config.max_seconds
            )
        table = Table.unpack(
            blob, "normal", target.alphabet, target.n_clocks, ceilings
        )
        if cursor >= 0:
            missing = table.missing_cells()
            outcomes = table.fill_outcomes(missing, teacher)
            total = 1
            for options in outcomes:
                total *= len(options)
            # a batch per visit amortizes recomputing the outcome lists,
            # which otherwise dominates the run
            end = min(cursor + 64, total)
            if end < total:
                heapq.heappush(frontier, (prio, next(tick), end, blob))
            for index in range(cursor, end):
                push([table.fill_combo(missing, outcomes, index)])
            continue
        explored += 1
        if explored > config.max_instances:
            raise InstanceBudgetExhausted(
                "gave up after exploring %d table instances" % (explored - 1)
            )
        if config.progress_every and explored % config.progress_every == 0:
            print(
                "instances=%d priority=%d frontier=%d seen=%d eq=%d t=%.0fs"
                % (
                    explored,
                    prio,
                    len(frontier),
                    len(seen),
                    teacher.stats.eq,
                    time.monotonic() - start,
                ),
                file=sys.stderr,
                flush=True,
            )
        r = table.find_unclosed()
        if r is not None:
            push(table.make_closed(r, teacher))
            continue
        witness = table.find_inconsistency()
        if witness is not None:
            try:
                push(table.make_consistent(witness, teacher))
            except UnfixableInstance:
                pass  # contradictory guesses; nothing to salvage
            continue
        if config.evidence_closed:
            violation = table.find_evidence_violation()
            if violation is not None:
                push(table.make_evidence_closed(violation, teacher))
                continue
        dumper.dump(table, "hypothesis %d (instance %d)" % (rounds, explored))
        rounds += 1
        hypothesis = build_hypothesis(table)
        ctx = teacher.eq_normal(hypothesis)
        if ctx is None:
            return LearnOutcome(
                hypothesis,
                teacher.stats,
                config.mode,
                ceilings,
                rounds,
                tables_explored=explored,
                final_table=table,
                max_ctx_len=max_ctx,
                time_ms=int((time.monotonic() - start) * 1000),
            )
        max_ctx = max(max_ctx, len(ctx.word))
        push(table.add_counterexample_normal(ctx.word, teacher))
    raise RuntimeError("table frontier ran dry before an equivalent hypothesis")


# -- query-count bounds ----------------------------------------------------


def query_bound_report(outcome: LearnOutcome, target: TimedAutomaton) -> dict:
    """Worst-case query counts implied by the target's size, next to what the
    run actually used.  Every entry maps name -> (actual, bound, ok)."""
    n = target.n_locations
    m = len(target.alphabet)
    lam = rg.region_count_bound(target.n_clocks, outcome.ceilings)
    table = outcome.final_table
    s_size, r_size, e_size = len(table.S), len(table.R), len(table.E)
    h = max(outcome.max_ctx_len, 1)
    report: dict[str, tuple[int, int, bool]] = {}

    def entry(name: str, actual: int, bound: int) -> None:
        report[name] = (actual, bound, actual <= bound)

    if outcome.mode in ("powerful", "rta"):
        nl = n * lam
        entry("eq", outcome.stats.eq, m * n * lam * lam)
        entry("mq", outcome.stats.mq, (nl + h * m * n * lam * lam + m * nl + nl * nl) * nl)
        entry(
            "rq",
            outcome.stats.rq,
            (e_size - 1) * (s_size + r_size) * e_size + m * s_size,
        )
        entry("locations", s_size, nl)
        entry("suffixes", e_size, nl)
    else:
        suffix_mass = sum(len(e) for e in table.column_words() if e)
        entry(
            "tables",
            outcome.tables_explored,
            2 ** ((s_size + r_size) * target.n_clocks**2 * max(suffix_mass, 1)),
        )
        entry("locations", s_size, n * lam)
        entry("eq", outcome.stats.eq, outcome.tables_explored)
    return report
