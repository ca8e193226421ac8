"""Command-line front end.

Subcommands: learn, equiv, run, complete, generate, bench.  Exit codes:
0 success / equivalent / accepted, 1 counterexample / rejected, 2 bad input.
Targets are JSON files; a few built-in benchmark names are accepted wherever
a target path is expected (see `tal bench --list`).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from .automaton import TimedAutomaton, complete
from .benchmarks import BUILTIN_TARGETS
from .equivalence import equivalent
from .generate import CaseSpec, generate
from .jsonio import FormatError, load_automaton, save_automaton
from .learner import BudgetExhausted, LearnConfig, learn, query_bound_report
from .teacher import Teacher
from .words import format_resets, parse_delay_word, rat_str

STATS_HEADER = ["case_id", "mode", "mq", "eq", "rq", "tables_explored", "n", "time_ms"]


def _load_target(spec: str) -> tuple[str, TimedAutomaton]:
    """Resolve a CLI target argument to (case id, automaton)."""
    path = Path(spec)
    if path.exists():
        return path.stem, load_automaton(str(path))
    if spec in BUILTIN_TARGETS:
        return spec, BUILTIN_TARGETS[spec]()
    raise FormatError("%s: no such file or built-in target" % spec)


def _parse_ceilings(text: str, n_clocks: int) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise FormatError("--ceilings: expected comma-separated integers, got %r" % text)
    if len(values) != n_clocks:
        raise FormatError(
            "--ceilings: %d values for %d clocks" % (len(values), n_clocks)
        )
    if any(v < 1 for v in values):
        raise FormatError("--ceilings: every ceiling must be >= 1")
    return values


def _write_stats(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=STATS_HEADER)
        writer.writeheader()
        writer.writerows(rows)


def _stats_row(case_id: str, mode: str, outcome) -> dict:
    return {
        "case_id": case_id,
        "mode": mode,
        "mq": outcome.stats.mq,
        "eq": outcome.stats.eq,
        "rq": outcome.stats.rq,
        "tables_explored": outcome.tables_explored,
        "n": outcome.learned_locations,
        "time_ms": outcome.time_ms,
    }


def _timeout_row(case_id: str, mode: str, elapsed_ms: int) -> dict:
    row = {name: "-" for name in STATS_HEADER}
    row.update({"case_id": case_id, "mode": mode, "time_ms": elapsed_ms})
    return row


def cmd_learn(args) -> int:
    case_id, target = _load_target(args.target)
    ceilings = (
        _parse_ceilings(args.ceilings, target.n_clocks) if args.ceilings else None
    )
    config = LearnConfig(
        mode=args.mode,
        ceilings=ceilings,
        evidence_closed=args.evidence_closed,
        max_instances=args.max_instances,
        max_seconds=args.timeout,
        order=args.order,
        dump_dir=args.dump_tables,
    )
    try:
        outcome = learn(target, config)
    except BudgetExhausted as exc:
        print("budget exhausted: %s" % exc, file=sys.stderr)
        return 1
    check = equivalent(target, outcome.automaton)
    assert check.equivalent, "accepted hypothesis failed the independent re-check"
    print(
        "learned %d locations in %d ms (mq=%d eq=%d rq=%d tables=%d)"
        % (
            outcome.learned_locations,
            outcome.time_ms,
            outcome.stats.mq,
            outcome.stats.eq,
            outcome.stats.rq,
            outcome.tables_explored,
        )
    )
    report = query_bound_report(outcome, target)
    bad = [name for name, (_, _, ok) in report.items() if not ok]
    print("query bounds: %s" % ("ok" if not bad else "EXCEEDED " + ",".join(bad)))
    if args.output:
        save_automaton(outcome.automaton, args.output)
        print("wrote %s" % args.output)
    if args.stats:
        _write_stats(args.stats, [_stats_row(case_id, args.mode, outcome)])
    return 0


def cmd_equiv(args) -> int:
    _, left = _load_target(args.left)
    _, right = _load_target(args.right)
    result = equivalent(left, right)
    if result.equivalent:
        print("equivalent")
        return 0
    payload = {
        "word": [[letter.action, rat_str(letter.delay)] for letter in result.word],
        "sign": result.sign,
    }
    print(json.dumps(payload))
    return 1


def cmd_run(args) -> int:
    _, automaton = _load_target(args.automaton)
    try:
        word = parse_delay_word(args.word)
    except ValueError as exc:
        raise FormatError("--word: %s" % exc)
    result = automaton.run(word)
    if result is None:
        print("rejected")
        print("(no run)")
        return 1
    print("accepted" if result.accepted else "rejected")
    print(";".join(format_resets(letter.resets) for letter in result.reset_word))
    return 0 if result.accepted else 1


def cmd_complete(args) -> int:
    _, automaton = _load_target(args.automaton)
    completed, info = complete(automaton)
    print(
        "+%d locations, +%d transitions"
        % (completed.n_locations - automaton.n_locations, info.added_transitions)
    )
    if args.output:
        save_automaton(completed, args.output)
        print("wrote %s" % args.output)
    return 0


def cmd_generate(args) -> int:
    case = CaseSpec(
        locations=args.locations,
        alphabet_size=args.alphabet_size,
        clocks=args.clocks,
        max_constant=args.max_constant,
        seed=args.seed,
        accept_probability=args.accept_probability,
        always_reset=args.always_reset,
    )
    automaton = generate(case)
    save_automaton(automaton, args.output)
    print(
        "%s: %d locations, %d transitions -> %s"
        % (case.name, automaton.n_locations, len(automaton.transitions), args.output)
    )
    return 0


def cmd_bench(args) -> int:
    if args.list:
        for name in BUILTIN_TARGETS:
            print(name)
        return 0
    cases = args.cases.split(",") if args.cases else list(BUILTIN_TARGETS)
    modes = args.modes.split(",")
    rows = []
    for case_id in cases:
        _, target = _load_target(case_id)
        for mode in modes:
            config = LearnConfig(
                mode=mode,
                max_instances=args.max_instances,
                max_seconds=args.timeout,
            )
            begin = time.monotonic()
            try:
                outcome = learn(target, config)
            except BudgetExhausted:
                elapsed = int((time.monotonic() - begin) * 1000)
                rows.append(_timeout_row(case_id, mode, elapsed))
                print("%s %s: timeout after %d ms" % (case_id, mode, elapsed))
                continue
            check = equivalent(target, outcome.automaton)
            assert check.equivalent, "bench row failed the equivalence re-check"
            rows.append(_stats_row(case_id, mode, outcome))
            print(
                "%s %s: n=%d mq=%d eq=%d rq=%d tables=%d time=%dms"
                % (
                    case_id,
                    mode,
                    outcome.learned_locations,
                    outcome.stats.mq,
                    outcome.stats.eq,
                    outcome.stats.rq,
                    outcome.tables_explored,
                    outcome.time_ms,
                )
            )
    if args.stats:
        _write_stats(args.stats, rows)
        print("wrote %s" % args.stats)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tal", description="learn deterministic timed automata from queries"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    learn_p = sub.add_parser("learn", help="learn a target automaton")
    learn_p.add_argument("--mode", choices=("powerful", "normal", "rta"), default="powerful")
    learn_p.add_argument("--target", required=True, help="target JSON file or built-in name")
    learn_p.add_argument("--ceilings", help="comma-separated clock ceilings, e.g. 3,3")
    learn_p.add_argument("--evidence-closed", action="store_true")
    learn_p.add_argument("--dump-tables", metavar="DIR")
    learn_p.add_argument("--max-instances", type=int, default=10**6)
    learn_p.add_argument("--timeout", type=float, default=None, metavar="SECONDS")
    learn_p.add_argument("--order", choices=("bits", "rows"), default="bits")
    learn_p.add_argument("--stats", metavar="CSV")
    learn_p.add_argument("-o", "--output", metavar="JSON")
    learn_p.set_defaults(func=cmd_learn)

    equiv_p = sub.add_parser("equiv", help="decide language equivalence")
    equiv_p.add_argument("left")
    equiv_p.add_argument("right")
    equiv_p.set_defaults(func=cmd_equiv)

    run_p = sub.add_parser("run", help="run a delay-timed word")
    run_p.add_argument("automaton")
    run_p.add_argument("--word", required=True, help='e.g. "a:11/10;b:0"')
    run_p.set_defaults(func=cmd_run)

    complete_p = sub.add_parser("complete", help="add the rejecting sink")
    complete_p.add_argument("automaton")
    complete_p.add_argument("-o", "--output", metavar="JSON")
    complete_p.set_defaults(func=cmd_complete)

    generate_p = sub.add_parser("generate", help="generate a random target")
    generate_p.add_argument("--locations", type=int, required=True)
    generate_p.add_argument("--alphabet-size", type=int, required=True)
    generate_p.add_argument("--clocks", type=int, required=True)
    generate_p.add_argument("--max-constant", type=int, required=True)
    generate_p.add_argument("--seed", type=int, required=True)
    generate_p.add_argument("--accept-probability", type=float, default=0.5)
    generate_p.add_argument("--always-reset", action="store_true")
    generate_p.add_argument("-o", "--output", required=True, metavar="JSON")
    generate_p.set_defaults(func=cmd_generate)

    bench_p = sub.add_parser("bench", help="run benchmark cases")
    bench_p.add_argument("--cases", help="comma-separated case names or files")
    bench_p.add_argument("--modes", default="powerful")
    bench_p.add_argument("--timeout", type=float, default=300.0, metavar="SECONDS")
    bench_p.add_argument("--max-instances", type=int, default=10**7)
    bench_p.add_argument("--stats", metavar="CSV")
    bench_p.add_argument("--list", action="store_true", help="list built-in cases")
    bench_p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
