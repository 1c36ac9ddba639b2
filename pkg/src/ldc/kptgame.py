"""Interactive witnessing game over explicit witness tables.

A desk-scale simulation of counter-example driven witness computation:
a relation instance lists, per item, which numbers witness it; tuples
of items and witnesses travel as single numbers in a fixed-width field
coding; the teacher refutes non-maximal candidates by exhaustive search
over the canonical witness tuples; helping sets and staged advice are
built by greedy selection with the counting bound checked per round.

Tuple coding: field width is n + 1 for item length n; field 0 holds the
element count and field i the i-th element.  Bits above the last counted
field are ignored on decode, so a junk-extended coding denotes the same
tuple as its canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import comb
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ParseError
from .naturals import iter_len

Strategy = Callable[[Sequence[int], Sequence[int]], int]


def encode_tuple(items: Sequence[int], n: int) -> int:
    width = n + 1
    cap = 1 << width
    if len(items) >= cap:
        raise ValueError(f"{len(items)} fields do not fit a width-{width} count")
    enc = len(items)
    for i, v in enumerate(items, start=1):
        if not 0 <= v < cap:
            raise ValueError(f"field value {v} out of range for width {width}")
        enc |= v << (width * i)
    return enc


def tuple_count(enc: int, n: int) -> int:
    return enc & ((1 << (n + 1)) - 1)


def tuple_field(enc: int, n: int, i: int) -> int:
    width = n + 1
    return (enc >> (width * i)) & ((1 << width) - 1)


def decode_tuple(enc: int, n: int) -> list[int]:
    return [tuple_field(enc, n, i) for i in range(1, tuple_count(enc, n) + 1)]


@dataclass(frozen=True)
class RelationInstance:
    """Explicit witness table: item -> set of numbers witnessing it."""

    n: int
    witnesses: Mapping[int, frozenset[int]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("item length must be positive")
        for x, ws in self.witnesses.items():
            if x < 0:
                raise ValueError(f"negative item {x}")
            for w in ws:
                if not 0 <= w <= x:
                    raise ValueError(f"witness {w} out of range for item {x}")


def canonical_witness(inst: RelationInstance, x: int) -> int | None:
    """Longest witness, ties resolved downward.

    Length-maximal choices make the cooperative candidate tuple pass the
    maximality predicate against every other witness tuple.
    """
    ws = inst.witnesses.get(x)
    if not ws:
        return None
    top = max(w.bit_length() for w in ws)
    return min(w for w in ws if w.bit_length() == top)


def relation_holds(inst: RelationInstance, x: int, y: int) -> bool:
    """Aggregated relation: every coded item of x is witnessed by the
    matching field of y, and y has at least as many fields."""
    m = tuple_count(x, inst.n)
    if m > tuple_count(y, inst.n):
        return False
    for i in range(1, m + 1):
        item = tuple_field(x, inst.n, i)
        if tuple_field(y, inst.n, i) not in inst.witnesses.get(item, frozenset()):
            return False
    return True


def eval_ri(inst: RelationInstance, level: int, x: int, y: int, z: int) -> bool:
    """y is a witness tuple for x of maximal level-iterated length,
    tested against the single challenge z."""
    lx = iter_len(level, x)
    ly = iter_len(level, y)
    if ly > lx:
        return False
    if y > 0 and not relation_holds(inst, x, y):
        return False
    if ly < iter_len(level, z) <= lx and relation_holds(inst, x, z):
        return False
    return True


def teacher_counter(inst: RelationInstance, level: int, x: int, y: int) -> int | None:
    """Exhaustive counter-example search against the candidate y.

    A candidate that already fails a z-free conjunct is refuted by 0;
    otherwise canonical witness tuples are scanned in field-lexicographic
    order for one whose iterated length beats y within x's budget.  None
    means y is maximal over the canonical range.
    """
    lx = iter_len(level, x)
    ly = iter_len(level, y)
    if ly > lx:
        return 0
    if y > 0 and not relation_holds(inst, x, y):
        return 0
    pools = [sorted(inst.witnesses.get(a, ())) for a in decode_tuple(x, inst.n)]
    if any(not p for p in pools):
        return None
    for combo in product(*pools):
        z = encode_tuple(combo, inst.n)
        if ly < iter_len(level, z) <= lx:
            return z
    return None


@dataclass(frozen=True)
class GameConfig:
    level: int
    l: int
    strategies: tuple[Strategy, ...]

    def __post_init__(self):
        if self.l < 2:
            raise ValueError("group size must be at least 2")
        if not self.strategies:
            raise ValueError("at least one strategy is required")

    @property
    def k(self) -> int:
        return len(self.strategies)


@dataclass(frozen=True)
class GameRound:
    candidate: int
    counter: int | None


@dataclass(frozen=True)
class GameTranscript:
    rounds: tuple[GameRound, ...]
    accepted_round: int | None
    witness: int | None


def run_interactive(
    cfg: GameConfig, inst: RelationInstance, a: Sequence[int]
) -> GameTranscript:
    """Play the strategy list against the exhaustive teacher.

    Round j accepts when the candidate has at least j fields and is a
    full witness tuple; the j-th field is then the extracted witness.
    A malformed strategy move plays as 0.  The game ends early when the
    teacher has no counter-example left to show.
    """
    if len(a) != cfg.l:
        raise ValueError(f"expected {cfg.l} items, got {len(a)}")
    for x in a:
        if x.bit_length() != inst.n:
            raise ValueError(f"item {x} does not have length {inst.n}")
    x_enc = encode_tuple(a, inst.n)
    rounds: list[GameRound] = []
    history: list[int] = []
    for j, strategy in enumerate(cfg.strategies, start=1):
        try:
            y = strategy(tuple(a), tuple(history))
        except Exception:
            y = 0
        if not isinstance(y, int) or y < 0:
            y = 0
        if tuple_count(y, inst.n) >= j and relation_holds(inst, x_enc, y):
            rounds.append(GameRound(y, None))
            return GameTranscript(tuple(rounds), j, tuple_field(y, inst.n, j))
        b = teacher_counter(inst, cfg.level, x_enc, y)
        rounds.append(GameRound(y, b))
        if b is None:
            break
        history.append(b)
    return GameTranscript(tuple(rounds), None, None)


def cooperative_strategies(
    inst: RelationInstance, l: int, k: int = 1
) -> tuple[Strategy, ...]:
    """k copies of the table player: the full canonical witness tuple
    when every item has one, else 0."""

    def play(a: Sequence[int], history: Sequence[int]) -> int:
        ws = [canonical_witness(inst, x) for x in a]
        if any(w is None for w in ws):
            return 0
        return encode_tuple(ws, inst.n)

    return (play,) * k


def helps(
    q: Iterable[int],
    v: int,
    inst: RelationInstance,
    cfg: GameConfig,
    permute_orderings: bool = False,
) -> int | None:
    """Witness for v extracted from some arrangement of q around it.

    v is accepted only when the winning round index equals its position.
    By default q stays in sorted order and only v's slot varies; the
    flag tries every permutation of q as well.
    """
    base = sorted(q)
    if len(base) != cfg.l - 1:
        raise ValueError(f"helper set must have {cfg.l - 1} items")
    if v in base:
        raise ValueError("candidate item sits inside the helper set")
    orders = permutations(base) if permute_orderings else (tuple(base),)
    for rest in orders:
        for pos in range(1, cfg.l + 1):
            arranged = list(rest)
            arranged.insert(pos - 1, v)
            t = run_interactive(cfg, inst, arranged)
            if t.accepted_round == pos:
                return t.witness
    return None


@dataclass(frozen=True)
class AdvicePack:
    """Staged item/witness tables plus the helper sets between them."""

    n: int
    l: int
    stages: tuple[tuple[tuple[int, int], ...], ...]
    helpers: tuple[tuple[int, ...], ...]
    degraded: bool = False

    @property
    def total_bits(self) -> int:
        pairs = sum(len(s) for s in self.stages)
        return pairs * 2 * (self.n + 1)


@dataclass(frozen=True)
class ShrinkageLog:
    """Per-stage rows (stage, universe size, items helped)."""

    rows: tuple[tuple[int, int, int], ...]

    def to_tsv(self) -> str:
        lines = ["stage\tsize\thelped"]
        lines += ["\t".join(str(c) for c in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def _candidate_sets(
    v: list[int], size: int, budget: int, samples: int, rng
) -> list[tuple[int, ...]]:
    if comb(len(v), size) <= budget:
        return list(combinations(v, size))
    if rng is None:
        import random

        rng = random.Random(0)
    picked = {tuple(sorted(rng.sample(v, size))) for _ in range(samples)}
    return sorted(picked)


def build_advice(
    universe: Iterable[int],
    cfg: GameConfig,
    inst: RelationInstance,
    *,
    subset_budget: int = 50000,
    samples: int = 64,
    rng=None,
    permute_orderings: bool = False,
) -> tuple[AdvicePack, ShrinkageLog]:
    """Greedy staged construction of helper sets and witness tables.

    Each stage keeps the helper set whose game helps the most remaining
    items (first in subset order on ties) and drops the helped ones; the
    helper's own members stay until the remainder fits one group.  When
    no candidate helps anybody the construction degrades to listing the
    whole remainder in the final table, which stays sound but large.
    """
    items = sorted(set(universe))
    if len(items) < cfg.l:
        raise ValueError("universe smaller than one game group")
    for x in items:
        if not inst.witnesses.get(x):
            raise ValueError(f"universe item {x} has no witnesses")
    stages: list[tuple[tuple[int, int], ...]] = []
    helpers: list[tuple[int, ...]] = []
    rows: list[tuple[int, int, int]] = []
    v = items
    degraded = False
    while len(v) > cfg.l:
        best_q: tuple[int, ...] | None = None
        best_helped: list[int] = []
        for q in _candidate_sets(v, cfg.l - 1, subset_budget, samples, rng):
            members = set(q)
            helped = [
                u
                for u in v
                if u not in members
                and helps(q, u, inst, cfg, permute_orderings) is not None
            ]
            if best_q is None or len(helped) > len(best_helped):
                best_q, best_helped = q, helped
        rows.append((len(rows) + 1, len(v), len(best_helped)))
        if not best_helped:
            degraded = True
            break
        helpers.append(best_q)
        stages.append(tuple((x, canonical_witness(inst, x)) for x in best_q))
        dropped = set(best_helped)
        v = [u for u in v if u not in dropped]
    else:
        rows.append((len(rows) + 1, len(v), 0))
    stages.append(tuple((x, canonical_witness(inst, x)) for x in v))
    pack = AdvicePack(inst.n, cfg.l, tuple(stages), tuple(helpers), degraded)
    return pack, ShrinkageLog(tuple(rows))


def advice_witness(
    x: int,
    pack: AdvicePack,
    inst: RelationInstance,
    cfg: GameConfig,
    permute_orderings: bool = False,
) -> int | None:
    """Stored witness if x sits in a stage table, else the witness from
    the lowest-index helper set that helps x, else None."""
    for stage in pack.stages:
        for item, w in stage:
            if item == x:
                return w
    for q in pack.helpers:
        if x in q:
            continue
        got = helps(q, x, inst, cfg, permute_orderings)
        if got is not None:
            return got
    return None


def asymptotic_group_size(k: int) -> int:
    """The doubly exponential group size tied to k strategy levels; only
    meaningful asymptotically, desk runs pick small sizes directly."""
    if k < 0:
        raise ValueError("negative strategy level")
    return 1 << (1 << k)


def random_instance(
    n: int, count: int, rng, max_witnesses: int = 4
) -> RelationInstance:
    """Uniform instance over length-n items, each with at least one
    witness drawn from [1, x]."""
    lo, hi = 1 << (n - 1), (1 << n) - 1
    if count > hi - lo + 1:
        raise ValueError(f"only {hi - lo + 1} items of length {n} exist")
    items = sorted(rng.sample(range(lo, hi + 1), count))
    table = {}
    for x in items:
        k = rng.randint(1, max_witnesses)
        table[x] = frozenset(rng.randint(1, x) for _ in range(k))
    return RelationInstance(n, table)


# ----------------------------------------------------------------------
# file formats

_INST_HEADER = re.compile(r"^KPT1 n=(\d+) items=(\d+) level=(\d+)$")
_PACK_HEADER = re.compile(r"^PACK1 n=(\d+) l=(\d+) stages=(\d+) degraded=([01])$")
_HEX = re.compile(r"^[0-9a-f]+$")


def _hex_value(tok: str, lineno: int) -> int:
    if not _HEX.fullmatch(tok):
        raise ParseError(f"bad hex value {tok!r}", line=lineno)
    return int(tok, 16)


def emit_instance(inst: RelationInstance, level: int) -> str:
    lines = [f"KPT1 n={inst.n} items={len(inst.witnesses)} level={level}"]
    for x in sorted(inst.witnesses):
        ws = " ".join(format(w, "x") for w in sorted(inst.witnesses[x]))
        lines.append(f"{x:x}: {ws}" if ws else f"{x:x}:")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> tuple[RelationInstance, int]:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty instance file", line=1)
    m = _INST_HEADER.fullmatch(lines[0])
    if m is None:
        raise ParseError(f"bad instance header {lines[0]!r}", line=1)
    n, count, level = (int(g) for g in m.groups())
    table: dict[int, frozenset[int]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ParseError("expected 'item: witnesses'", line=lineno)
        x = _hex_value(head.strip(), lineno)
        ws = frozenset(_hex_value(tok, lineno) for tok in rest.split())
        if x in table:
            raise ParseError(f"duplicate item {head.strip()!r}", line=lineno)
        table[x] = ws
    if len(table) != count:
        raise ParseError(f"header promises {count} items, found {len(table)}")
    try:
        return RelationInstance(n, table), level
    except ValueError as e:
        raise ParseError(str(e)) from e


def emit_advice(pack: AdvicePack) -> str:
    lines = [
        f"PACK1 n={pack.n} l={pack.l} stages={len(pack.stages)}"
        f" degraded={int(pack.degraded)}"
    ]
    for i, stage in enumerate(pack.stages, start=1):
        if i <= len(pack.helpers):
            lines.append(f"Q{i}: " + " ".join(format(x, "x") for x in pack.helpers[i - 1]))
        body = " ".join(f"{x:x}={w:x}" for x, w in stage)
        lines.append(f"S{i}: {body}" if body else f"S{i}:")
    return "\n".join(lines) + "\n"


def parse_advice(text: str) -> AdvicePack:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty advice file", line=1)
    m = _PACK_HEADER.fullmatch(lines[0])
    if m is None:
        raise ParseError(f"bad advice header {lines[0]!r}", line=1)
    n, l, nstages, degraded = (int(g) for g in m.groups())
    stages: dict[int, tuple[tuple[int, int], ...]] = {}
    helpers: dict[int, tuple[int, ...]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        head, sep, rest = line.partition(":")
        m2 = re.fullmatch(r"([QS])(\d+)", head.strip())
        if not sep or m2 is None:
            raise ParseError("expected 'Q<i>: ...' or 'S<i>: ...'", line=lineno)
        idx = int(m2.group(2))
        if m2.group(1) == "Q":
            helpers[idx] = tuple(_hex_value(tok, lineno) for tok in rest.split())
        else:
            pairs = []
            for tok in rest.split():
                left, sep2, right = tok.partition("=")
                if not sep2:
                    raise ParseError(f"bad pair {tok!r}", line=lineno)
                pairs.append((_hex_value(left, lineno), _hex_value(right, lineno)))
            stages[idx] = tuple(pairs)
    if sorted(stages) != list(range(1, nstages + 1)):
        raise ParseError(f"expected stage tables 1..{nstages}")
    if sorted(helpers) != list(range(1, len(helpers) + 1)) or len(helpers) >= nstages + 1:
        raise ParseError("helper sets must be numbered 1..t-1")
    return AdvicePack(
        n,
        l,
        tuple(stages[i] for i in range(1, nstages + 1)),
        tuple(helpers[i] for i in range(1, len(helpers) + 1)),
        bool(degraded),
    )
