"""Reference big-number semantics for terms.

Evaluation follows the recursion equations directly and enforces the two
side conditions at run time: append steps must stay one bit wide, and
bounded recursion values must stay under their bound term.  A per-call
memo table keyed by each node and the argument positions it actually
depends on keeps nested recursions from going superlinear.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BoundExceeded, ConstraintViolation, TermError
from .naturals import DEFAULT_GUARD_BITS, check_natural, iter_len, smash
from .terms import (
    AppendRec,
    Compose,
    CountRec,
    Init,
    IterLenRec,
    LeastSearch,
    Proj,
    Term,
    arity,
    used_positions,
)


@dataclass(frozen=True)
class StageRecord:
    """One recursion activation: scheme kind, level and unrolled stages."""

    kind: str
    level: int | None
    stages: int


@dataclass(frozen=True)
class EvalTrace:
    value: int
    records: tuple[StageRecord, ...]
    peak_bits: int


def eval_term(t: Term, args: list[int], guard_bits: int = DEFAULT_GUARD_BITS) -> int:
    """Value of the term at the given arguments."""
    return _Eval(guard_bits, None).run(t, args)


def trace_term(t: Term, args: list[int], guard_bits: int = DEFAULT_GUARD_BITS) -> EvalTrace:
    """Evaluate and report stage counts (first activation per distinct
    call) plus the widest value seen anywhere during the run."""
    records: list[StageRecord] = []
    ev = _Eval(guard_bits, records)
    value = ev.run(t, args)
    return EvalTrace(value, tuple(records), ev.peak)


class _Eval:
    def __init__(self, guard_bits: int, records: list[StageRecord] | None):
        self.guard = guard_bits
        self.records = records
        self.peak = 0
        self.memo: dict[tuple, int] = {}
        self.deps: dict = {}

    def run(self, t: Term, args: list[int]) -> int:
        if len(args) != arity(t):
            raise TermError(f"term has arity {arity(t)}, got {len(args)} arguments")
        for a in args:
            check_natural(a)
            self._note(a)
        return self.ev(t, tuple(args))

    def _note(self, v: int) -> int:
        b = v.bit_length()
        if b > self.guard:
            raise BoundExceeded(f"value of {b} bits exceeds the {self.guard}-bit guard")
        if b > self.peak:
            self.peak = b
        return v

    def _record(self, kind: str, level: int | None, stages: int) -> None:
        if self.records is not None:
            self.records.append(StageRecord(kind, level, stages))

    def ev(self, t: Term, args: tuple[int, ...]) -> int:
        ups = used_positions(t, self.deps)
        key = (id(t), tuple(args[k - 1] for k in ups))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        v = self._note(self._ev(t, args))
        self.memo[key] = v
        return v

    def _ev(self, t: Term, args: tuple[int, ...]) -> int:
        if isinstance(t, Init):
            return self._initial(t.name, args)
        if isinstance(t, Proj):
            return args[t.k - 1]
        if isinstance(t, Compose):
            vals = tuple(self.ev(i, args) for i in t.inners)
            return self.ev(t.outer, vals)
        if isinstance(t, AppendRec):
            return self._append(t, args)
        if isinstance(t, IterLenRec):
            return self._iter_rec(t, args)
        if isinstance(t, CountRec):
            return self._count_rec(t, args)
        if isinstance(t, LeastSearch):
            return self._search(t, args)
        raise TermError(f"not a term: {t!r}")

    def _initial(self, name: str, a: tuple[int, ...]) -> int:
        if name == "z" or name == "const0":
            return 0
        if name == "const1":
            return 1
        if name == "s0":
            return a[0] << 1
        if name == "s1":
            return (a[0] << 1) | 1
        if name == "len":
            return a[0].bit_length()
        if name == "bit":
            return (a[0] >> a[1]) & 1 if a[1] < a[0].bit_length() else 0
        if name == "smash":
            return smash(a[0], a[1], self.guard)
        if name == "msp":
            return a[0] >> a[1] if a[1] < a[0].bit_length() else 0
        if name == "half":
            return a[0] >> 1
        if name == "mult":
            return a[0] * a[1]
        raise TermError(f"unknown initial operation {name!r}")

    def _append(self, t: AppendRec, args: tuple[int, ...]) -> int:
        x, sides = args[0], args[1:]
        width = x.bit_length()
        self._record("crn", None, width)
        v = self.ev(t.g, sides)
        for j in range(width - 1, -1, -1):
            hb = t.h1 if (x >> j) & 1 else t.h0
            step = self.ev(hb, (x >> (j + 1),) + sides)
            if step > 1:
                raise ConstraintViolation(f"append step produced {step}, wider than one bit")
            v = self._note((v << 1) | step)
        return v

    def _iter_rec(self, t: IterLenRec, args: tuple[int, ...]) -> int:
        x, sides = args[0], args[1:]
        ystar = iter_len(t.level, x)
        stages = ystar.bit_length()
        self._record("wbrn", t.level, stages)
        w = self.ev(t.g, sides)
        self._check_cap(t.bound, (0,) + sides, w)
        for k in range(1, stages + 1):
            prefix = ystar >> (stages - k + 1)
            hb = t.h1 if (ystar >> (stages - k)) & 1 else t.h0
            w = self.ev(hb, (prefix,) + sides + (w,))
            self._check_cap(t.bound, (ystar >> (stages - k),) + sides, w)
        return w

    def _count_rec(self, t: CountRec, args: tuple[int, ...]) -> int:
        x, sides = args[0], args[1:]
        stages = iter_len(t.level + 1, x)
        self._record("succrec", t.level, stages)
        w = self.ev(t.g, sides)
        self._check_cap(t.bound, (0,) + sides, w)
        for m in range(stages):
            w = self.ev(t.h, (m,) + sides + (w,))
            self._check_cap(t.bound, (m + 1,) + sides, w)
        return w

    def _search(self, t: LeastSearch, args: tuple[int, ...]) -> int:
        space = iter_len(t.level + 1, self.ev(t.bound, args))
        self._record("musearch", t.level, space + 1)
        for w in range(space + 1):
            if self.ev(t.body, (w,) + args) != 0:
                return w
        return 0

    def _check_cap(self, bound: Term, bargs: tuple[int, ...], w: int) -> None:
        cap = self.ev(bound, bargs)
        if w > cap:
            raise ConstraintViolation(
                f"recursion value of {w.bit_length()} bits exceeds its bound "
                f"of {cap.bit_length()} bits"
            )
