"""Timed word forms and the transforms between them.

Four word forms appear throughout:

- delay-timed words: sequences of (action, delay);
- reset-delay-timed words: delay words annotated with the reset tuple taken
  after each transition;
- clocked words: sequences of (action, clock valuation at firing time);
- reset-clocked words: clocked words annotated with reset tuples.

All numeric data is exact (`fractions.Fraction`); floats never enter the core.
Clock indices are 1-based in user-facing text and JSON, 0-based in tuples.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

Rat = Fraction

RatLike = Union[Fraction, int, str]


def rat(x: RatLike) -> Fraction:
    """Parse an exact rational from an int, Fraction or 'p/q' / decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; use Fraction or 'p/q' strings")
    return Fraction(str(x).strip())


def rat_str(x: Fraction) -> str:
    """Render a rational as 'p/q', or 'p' when integral."""
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


class DelayLetter(NamedTuple):
    action: str
    delay: Fraction


class ResetDelayLetter(NamedTuple):
    action: str
    delay: Fraction
    resets: tuple[bool, ...]


class ClockedLetter(NamedTuple):
    action: str
    values: tuple[Fraction, ...]


class ResetClockedLetter(NamedTuple):
    action: str
    values: tuple[Fraction, ...]
    resets: tuple[bool, ...]


DelayWord = tuple[DelayLetter, ...]
ResetDelayWord = tuple[ResetDelayLetter, ...]
ClockedWord = tuple[ClockedLetter, ...]
ResetClockedWord = tuple[ResetClockedLetter, ...]


def delay_word(*pairs: tuple[str, RatLike]) -> DelayWord:
    return tuple(DelayLetter(a, rat(t)) for a, t in pairs)


def zeros(n_clocks: int) -> tuple[Fraction, ...]:
    return (Fraction(0),) * n_clocks


def strip_resets(word: ResetClockedWord) -> ClockedWord:
    return tuple(ClockedLetter(l.action, l.values) for l in word)


def resets_of(word: ResetClockedWord) -> tuple[tuple[bool, ...], ...]:
    return tuple(l.resets for l in word)


def last_resets(word: ResetClockedWord, n_clocks: int) -> tuple[bool, ...]:
    """Reset tuple of the final letter; all-true for the empty word (all
    clocks start at zero, which behaves like a reset)."""
    if not word:
        return (True,) * n_clocks
    return word[-1].resets


def valuation_after(word: ResetClockedWord, n_clocks: int) -> tuple[Fraction, ...]:
    """Clock valuation immediately after the last transition of the word."""
    if not word:
        return zeros(n_clocks)
    last = word[-1]
    return tuple(
        Fraction(0) if last.resets[j] else last.values[j] for j in range(n_clocks)
    )


def clocked_from_reset_delay(word: ResetDelayWord, n_clocks: int) -> ResetClockedWord:
    """Forward transform: each clock value is the previous value plus the
    delay, except clocks reset at the previous step restart from the delay."""
    out: list[ResetClockedLetter] = []
    prev_values = zeros(n_clocks)
    prev_resets = (True,) * n_clocks
    for letter in word:
        values = tuple(
            letter.delay if prev_resets[j] else prev_values[j] + letter.delay
            for j in range(n_clocks)
        )
        out.append(ResetClockedLetter(letter.action, values, letter.resets))
        prev_values = values
        prev_resets = letter.resets
    return tuple(out)


def delay_from_reset_clocked(word: ResetClockedWord) -> Optional[ResetDelayWord]:
    """Invert the clocked transform, or return None when the word is doomed.

    A reset-clocked word is doomed when no timed automaton can realize it:
    the per-clock implied delays disagree, or some implied delay is negative.
    """
    out: list[ResetDelayLetter] = []
    prev: Optional[ResetClockedLetter] = None
    for letter in word:
        candidates = set()
        for j, v in enumerate(letter.values):
            if prev is None or prev.resets[j]:
                candidates.add(v)
            else:
                candidates.add(v - prev.values[j])
        if len(candidates) != 1:
            return None
        (delay,) = candidates
        if delay < 0:
            return None
        out.append(ResetDelayLetter(letter.action, delay, letter.resets))
        prev = letter
    return tuple(out)


def is_doomed(word: ResetClockedWord) -> bool:
    return delay_from_reset_clocked(word) is None


def delay_only(word: ResetDelayWord) -> DelayWord:
    return tuple(DelayLetter(l.action, l.delay) for l in word)


def lex_leq(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    """Lexicographic order on clock valuations (total)."""
    for x, y in zip(a, b):
        if x != y:
            return x < y
    return len(a) <= len(b)


def format_word(word) -> str:
    """Render any word form compactly, e.g. (a,3/2,bot-top)."""
    parts = []
    for letter in word:
        if isinstance(letter, DelayLetter):
            parts.append("(%s,%s)" % (letter.action, rat_str(letter.delay)))
        elif isinstance(letter, ResetDelayLetter):
            parts.append(
                "(%s,%s,%s)"
                % (letter.action, rat_str(letter.delay), format_resets(letter.resets))
            )
        elif isinstance(letter, ClockedLetter):
            parts.append(
                "(%s,{%s})"
                % (letter.action, ",".join(rat_str(v) for v in letter.values))
            )
        else:
            parts.append(
                "(%s,{%s},%s)"
                % (
                    letter.action,
                    ",".join(rat_str(v) for v in letter.values),
                    format_resets(letter.resets),
                )
            )
    return "".join(parts) if parts else "eps"


def format_resets(resets: tuple[bool, ...]) -> str:
    return "".join("⊤" if b else "⊥" for b in resets)


def parse_delay_word(text: str) -> DelayWord:
    """Parse the CLI word syntax 'a:11/10;b:0' into a delay-timed word."""
    text = text.strip()
    if not text:
        return ()
    letters = []
    for piece in text.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        if ":" not in piece:
            raise ValueError("bad word segment %r (expected action:delay)" % piece)
        action, _, d = piece.partition(":")
        letters.append(DelayLetter(action.strip(), rat(d)))
    return tuple(letters)
