"""Shared helpers for the test suite."""

import random
from fractions import Fraction

import tal.regions as rg
from tal.equivalence import equivalent
from tal.generate import CaseSpec, generate
from tal.synthesis import partition
from tal.words import DelayLetter


def random_valuation(rng: random.Random, n_clocks, top=5, denominator=4):
    """A random non-negative valuation with small exact fractions."""
    return tuple(
        Fraction(rng.randrange(0, top * denominator + 1), denominator)
        for _ in range(n_clocks)
    )


def random_delay_word(rng: random.Random, alphabet, max_len=6, top=4, denominator=4):
    length = rng.randrange(0, max_len + 1)
    return tuple(
        DelayLetter(
            rng.choice(alphabet),
            Fraction(rng.randrange(0, top * denominator + 1), denominator),
        )
        for _ in range(length)
    )


def random_partition_case(rng: random.Random):
    """A random guard-partition input: region-distinct valuations (zero
    included) over random per-clock ceilings.  Three-clock grids keep their
    ceilings modest; a full partition walks every region of the grid."""
    n_clocks = rng.randrange(1, 4)
    max_k = 4 if n_clocks <= 2 else rng.choice((1, 2, 2, 3, 4))
    ceilings = tuple(rng.randrange(1, max_k + 1) for _ in range(n_clocks))
    size = rng.randrange(1, 7)
    points = {(Fraction(0),) * n_clocks}
    regions = {rg.region_of(next(iter(points)), ceilings)}
    for _ in range(40):
        if len(points) >= size:
            break
        v = tuple(
            Fraction(rng.randrange(0, 4 * (k + 2) + 1), 4) for k in ceilings
        )
        r = rg.region_of(v, ceilings)
        if r not in regions:
            regions.add(r)
            points.add(v)
    return sorted(points), ceilings


def check_partition(valuations, ceilings, rng: random.Random, samples=2):
    """Partition the valuations and verify the result is a true partition:
    pairwise disjoint, jointly complete, each valuation inside its own block,
    and a few sampled valuations land in exactly one block."""
    result = partition(valuations, ceilings)
    refined = result.ceilings
    assert all(a >= b for a, b in zip(refined, ceilings))
    assert list(result.valuations) == sorted(valuations)
    union = rg.empty_region_set(refined)
    for v, block in zip(result.valuations, result.constraints):
        assert block.contains(v)
        assert union.intersection(block).is_empty
        union = union.union(block)
    assert union == rg.full_region_set(refined)
    for _ in range(samples):
        v = tuple(
            Fraction(rng.randrange(0, 4 * (k + 2) + 1), 4) for k in refined
        )
        hits = [i for i, c in enumerate(result.constraints) if c.contains(v)]
        assert len(hits) == 1
        assert result.block_index(v) == hits[0]
    return result


def random_automaton_pair(rng: random.Random, i: int):
    """A pair of small random complete targets over a shared alphabet; every
    tenth pair is one automaton against itself."""
    alphabet_size = rng.randrange(1, 3)

    def spec(seed):
        return CaseSpec(
            locations=rng.randrange(1, 5),
            alphabet_size=alphabet_size,
            clocks=rng.randrange(1, 3),
            max_constant=rng.randrange(1, 4),
            seed=seed,
        )

    a = generate(spec(7000 + 2 * i))
    if i % 10 == 0:
        return a, a
    return a, generate(spec(7001 + 2 * i))


def check_equivalence_verdict(a, b, rng: random.Random, n_words: int) -> bool:
    """An Equivalent verdict must survive a random-word barrage; an
    inequivalence witness must replay to differing acceptance."""
    result = equivalent(a, b)
    if result.equivalent:
        for _ in range(n_words):
            w = random_delay_word(rng, a.alphabet)
            assert a.accepts(w) == b.accepts(w)
    else:
        w = result.word
        if result.sign == "+":
            assert a.accepts(w) and not b.accepts(w)
        else:
            assert result.sign == "-"
            assert b.accepts(w) and not a.accepts(w)
    return result.equivalent
