"""JSON serialization of timed automata.

Targets carry per-clock interval guards ("guard"); learned hypotheses carry
unions of regions ("guardRegions") since the partition step produces
non-convex sets.  Region guards serialize as a list of convex conjuncts:
maximal boxes where the set allows it, single regions (with clock-difference
atoms pinning the fractional order) for the rest.  Clock indices are 1-based
on the wire, rationals are integers or "p/q" strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Optional, Union

from . import regions as rg
from .automaton import Guard, TimedAutomaton, Transition, effective_ceilings
from .words import rat, rat_str


class FormatError(ValueError):
    pass


def _num(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise FormatError("%s: expected an integer or 'p/q' string, got %r"
                          % (where, value))
    try:
        return rat(value)
    except (ValueError, ZeroDivisionError):
        raise FormatError("%s: bad rational %r" % (where, value)) from None


def _int(value, where: str) -> int:
    x = _num(value, where)
    if x.denominator != 1:
        raise FormatError("%s: expected an integer, got %r" % (where, value))
    return x.numerator


def _emit_rat(x) -> Union[int, str]:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else rat_str(x)


# -- interval guards -------------------------------------------------------


def _guard_to_json(guard: Guard) -> list:
    atoms = []
    for j, (lo, lo_strict, hi, hi_strict) in enumerate(guard.atoms):
        if (lo, lo_strict, hi) == (0, False, None):
            continue
        atom: dict = {"clock": j + 1}
        if lo != 0 or lo_strict:
            atom["min"] = _emit_rat(lo)
            atom["minStrict"] = lo_strict
        if hi is not None:
            atom["max"] = _emit_rat(hi)
            atom["maxStrict"] = hi_strict
        atoms.append(atom)
    return atoms


def _guard_from_json(data, n_clocks: int, where: str) -> Guard:
    atoms = [rg.FULL_ATOM] * n_clocks
    for k, entry in enumerate(data):
        spot = "%s.guard[%d]" % (where, k)
        if not isinstance(entry, dict) or "clock" not in entry:
            raise FormatError("%s: expected an object with a 'clock' field" % spot)
        clock = _int(entry["clock"], spot)
        if not 1 <= clock <= n_clocks:
            raise FormatError("%s: clock %d out of range 1..%d"
                              % (spot, clock, n_clocks))
        lo = _int(entry.get("min", 0), spot)
        hi = entry.get("max")
        atoms[clock - 1] = (
            lo,
            bool(entry.get("minStrict", False)),
            None if hi is None else _int(hi, spot),
            bool(entry.get("maxStrict", False)),
        )
    return Guard(tuple(atoms))


# -- region guards ---------------------------------------------------------


@lru_cache(maxsize=None)
def _by_kinds(ceilings: tuple[int, ...]):
    index: dict = {}
    for region in rg.enumerate_regions(ceilings):
        index.setdefault(region.kinds, []).append(region)
    return index


def _component_index(kind_k: tuple[int, int], ceiling: int) -> int:
    kind, k = kind_k
    if kind == rg.POINT:
        return 2 * k
    if kind == rg.OPEN:
        return 2 * k + 1
    return 2 * ceiling + 1


def _component_of_index(index: int, ceiling: int) -> tuple[int, int]:
    if index == 2 * ceiling + 1:
        return (rg.UNBOUNDED, 0)
    return (rg.POINT, index // 2) if index % 2 == 0 else (rg.OPEN, index // 2)


def _box_regions(spans, ceilings):
    """All regions whose per-clock component falls inside the given spans."""
    out = []
    by_kinds = _by_kinds(ceilings)
    choices = [
        [_component_of_index(i, ceilings[j]) for i in range(lo, hi + 1)]
        for j, (lo, hi) in enumerate(spans)
    ]
    for kinds in product(*choices):
        out.extend(by_kinds.get(tuple(kinds), ()))
    return out


def _grow_box(region: rg.Region, allowed: frozenset) -> Optional[list]:
    """Maximal per-clock component spans around the region whose whole box
    stays inside `allowed`; None when even the smallest box leaks."""
    ceilings = region.ceilings
    spans = [
        [_component_index(kk, ceilings[j]), _component_index(kk, ceilings[j])]
        for j, kk in enumerate(region.kinds)
    ]
    if not all(r in allowed for r in _box_regions(spans, ceilings)):
        return None
    for j in range(len(ceilings)):
        top = 2 * ceilings[j] + 1
        while spans[j][1] < top:
            trial = [list(s) for s in spans]
            trial[j][1] += 1
            if all(r in allowed for r in _box_regions(trial, ceilings)):
                spans = trial
            else:
                break
        while spans[j][0] > 0:
            trial = [list(s) for s in spans]
            trial[j][0] -= 1
            if all(r in allowed for r in _box_regions(trial, ceilings)):
                spans = trial
            else:
                break
    return spans


def _box_atoms(spans, ceilings) -> list:
    atoms = []
    for j, (lo, hi) in enumerate(spans):
        kind_lo = _component_of_index(lo, ceilings[j])
        kind_hi = _component_of_index(hi, ceilings[j])
        atom: dict = {"clock": j + 1}
        if kind_lo[0] == rg.UNBOUNDED:
            atom["min"], atom["minStrict"] = ceilings[j], True
        elif kind_lo != (rg.POINT, 0):
            atom["min"] = kind_lo[1]
            atom["minStrict"] = kind_lo[0] == rg.OPEN
        if kind_hi[0] == rg.POINT:
            atom["max"], atom["maxStrict"] = kind_hi[1], False
        elif kind_hi[0] == rg.OPEN:
            atom["max"], atom["maxStrict"] = kind_hi[1] + 1, True
        if len(atom) > 1:
            atoms.append(atom)
    return atoms


def _region_atoms(region: rg.Region) -> list:
    atoms = []
    for j, (kind, k) in enumerate(region.kinds):
        atom: dict = {"clock": j + 1}
        if kind == rg.POINT:
            atom["min"] = atom["max"] = k
        elif kind == rg.OPEN:
            atom.update(min=k, minStrict=True, max=k + 1, maxStrict=True)
        else:
            atom.update(min=region.ceilings[j], minStrict=True)
        atoms.append(atom)
    floor = {j: k for j, (kind, k) in enumerate(region.kinds)}
    for block in region.blocks:
        for x, y in zip(block, block[1:]):
            diff = floor[x] - floor[y]
            atoms.append({"clock": x + 1, "minusClock": y + 1,
                          "min": diff, "max": diff})
    for left, right in zip(region.blocks, region.blocks[1:]):
        x, y = left[0], right[0]
        atoms.append({"clock": x + 1, "minusClock": y + 1,
                      "max": floor[x] - floor[y], "maxStrict": True})
    return atoms


def _region_set_to_json(rs: rg.RegionSet) -> list:
    remaining = set(rs.regions)
    allowed = frozenset(rs.regions)
    conjuncts = []
    for region in sorted(rs.regions, key=lambda r: (r.kinds, r.blocks)):
        if region not in remaining:
            continue
        spans = _grow_box(region, allowed)
        if spans is not None:
            covered = _box_regions(spans, rs.ceilings)
            remaining.difference_update(covered)
            conjuncts.append(_box_atoms(spans, rs.ceilings))
        else:
            remaining.discard(region)
            conjuncts.append(_region_atoms(region))
    return conjuncts


def _atom_holds(atom: dict, values, where: str) -> bool:
    clock = _int(atom["clock"], where)
    value = values[clock - 1]
    if "minusClock" in atom:
        value = value - values[_int(atom["minusClock"], where) - 1]
    if "min" in atom:
        lo = _num(atom["min"], where)
        if value < lo or (value == lo and atom.get("minStrict", False)):
            return False
    if "max" in atom:
        hi = _num(atom["max"], where)
        if value > hi or (value == hi and atom.get("maxStrict", False)):
            return False
    return True


def _region_set_from_json(data, ceilings, where: str) -> rg.RegionSet:
    hit = []
    for region in rg.enumerate_regions(ceilings):
        values = rg.representative(region)
        for conjunct in data:
            if all(_atom_holds(a, values, where) for a in conjunct):
                hit.append(region)
                break
    return rg.region_set_of(hit, ceilings)


def _max_constant(data, clock: int) -> int:
    best = 0
    for conjunct in data:
        for atom in conjunct:
            if atom.get("clock") == clock and "minusClock" not in atom:
                for key in ("min", "max"):
                    if key in atom:
                        best = max(best, int(rat(atom[key])))
    return best


# -- whole automata --------------------------------------------------------


def automaton_to_json(automaton: TimedAutomaton) -> dict:
    locations = [
        {
            "id": i,
            "initial": i == automaton.initial,
            "accepting": i in automaton.accepting,
        }
        for i in range(automaton.n_locations)
    ]
    transitions = []
    for t in automaton.transitions:
        entry = {
            "from": t.source,
            "to": t.target,
            "action": t.action,
            "resets": sorted(j + 1 for j in t.resets),
        }
        if isinstance(t.guard, rg.RegionSet):
            entry["guardRegions"] = _region_set_to_json(t.guard)
        else:
            entry["guard"] = _guard_to_json(t.guard)
        transitions.append(entry)
    return {
        "alphabet": list(automaton.alphabet),
        "clocks": automaton.n_clocks,
        "locations": locations,
        "transitions": transitions,
        "ceilings": list(effective_ceilings(automaton)),
    }


def automaton_from_json(data, where: str = "automaton") -> TimedAutomaton:
    if not isinstance(data, dict):
        raise FormatError("%s: expected a JSON object" % where)
    for key in ("alphabet", "clocks", "locations", "transitions"):
        if key not in data:
            raise FormatError("%s: missing field %r" % (where, key))
    alphabet = tuple(data["alphabet"])
    if not alphabet or not all(isinstance(a, str) for a in alphabet):
        raise FormatError("%s.alphabet: expected non-empty list of strings" % where)
    n_clocks = _int(data["clocks"], where + ".clocks")
    if n_clocks < 1:
        raise FormatError("%s.clocks: need at least one clock" % where)

    locations = data["locations"]
    ids = sorted(_int(l["id"], "%s.locations[%d]" % (where, k))
                 for k, l in enumerate(locations))
    if ids != list(range(len(locations))):
        raise FormatError("%s.locations: ids must cover 0..%d"
                          % (where, len(locations) - 1))
    initial = [l["id"] for l in locations if l.get("initial")]
    if len(initial) != 1:
        raise FormatError("%s.locations: exactly one location must be initial"
                          % where)
    accepting = frozenset(l["id"] for l in locations if l.get("accepting"))

    raw_ceilings = data.get("ceilings")
    transitions: list[Transition] = []
    region_guards: list[tuple[int, list, int]] = []  # (index, data, slot)
    for k, entry in enumerate(data["transitions"]):
        spot = "%s.transitions[%d]" % (where, k)
        source = _int(entry.get("from", -1), spot)
        target = _int(entry.get("to", -1), spot)
        if not (0 <= source < len(locations) and 0 <= target < len(locations)):
            raise FormatError("%s: from/to out of range" % spot)
        action = entry.get("action")
        if action not in alphabet:
            raise FormatError("%s: action %r not in alphabet" % (spot, action))
        resets = frozenset(
            _int(c, spot + ".resets") - 1 for c in entry.get("resets", ())
        )
        if resets and not resets <= set(range(n_clocks)):
            raise FormatError("%s: reset clock out of range" % spot)
        if "guardRegions" in entry:
            region_guards.append((len(transitions), entry["guardRegions"], k))
            guard: object = None  # patched below once ceilings are known
        else:
            guard = _guard_from_json(entry.get("guard", ()), n_clocks, spot)
        transitions.append(Transition(source, action, guard, resets, target))

    if raw_ceilings is not None:
        ceilings = tuple(
            _int(c, where + ".ceilings") for c in raw_ceilings
        )
        if len(ceilings) != n_clocks:
            raise FormatError("%s.ceilings: expected %d entries" % (where, n_clocks))
    else:
        ceilings = _derived_ceilings(transitions, region_guards, n_clocks)
    for index, guard_data, k in region_guards:
        spot = "%s.transitions[%d].guardRegions" % (where, k)
        guard_ceilings = tuple(
            max(ceilings[j], _max_constant(guard_data, j + 1))
            for j in range(n_clocks)
        )
        rs = _region_set_from_json(guard_data, guard_ceilings, spot)
        transitions[index] = transitions[index]._replace(guard=rs)

    return TimedAutomaton(
        alphabet=alphabet,
        n_locations=len(locations),
        initial=initial[0],
        accepting=accepting,
        n_clocks=n_clocks,
        transitions=tuple(transitions),
        ceilings=ceilings,
    )


def _derived_ceilings(transitions, region_guards, n_clocks) -> tuple[int, ...]:
    best = [1] * n_clocks
    pending = {index for index, _, _ in region_guards}
    for i, t in enumerate(transitions):
        if i in pending:
            continue
        for j, (lo, _, hi, _) in enumerate(t.guard.atoms):
            best[j] = max(best[j], lo, hi or 0)
    for _, guard_data, _ in region_guards:
        for j in range(n_clocks):
            best[j] = max(best[j], _max_constant(guard_data, j + 1))
    return tuple(best)


def load_automaton(path) -> TimedAutomaton:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as err:
        raise FormatError("%s: %s" % (path, err)) from None
    except json.JSONDecodeError as err:
        raise FormatError("%s: invalid JSON (%s)" % (path, err)) from None
    return automaton_from_json(data, where=str(path))


def save_automaton(automaton: TimedAutomaton, path) -> None:
    Path(path).write_text(json.dumps(automaton_to_json(automaton), indent=2) + "\n")
