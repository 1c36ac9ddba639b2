"""Boolean circuit DAGs with unbounded fan-in.

Gates live in one flat table in topological order: a kind byte per gate
plus an offset/pool pair holding either operand gate ids or, for input
gates, the (argument, bit) pair.  Evaluation is batched: each gate value
is a Python int whose bit b is the gate's value on input set b, so wide
test sweeps cost one pass over the table.
"""

from __future__ import annotations

import re
from array import array
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError

KIND_IN = 0
KIND_C0 = 1
KIND_C1 = 2
KIND_NOT = 3
KIND_AND = 4
KIND_OR = 5
KIND_MAJ = 6

_KIND_NAMES = {
    KIND_IN: "IN",
    KIND_C0: "C0",
    KIND_C1: "C1",
    KIND_NOT: "NOT",
    KIND_AND: "AND",
    KIND_OR: "OR",
    KIND_MAJ: "MAJ",
}


@dataclass
class Circuit:
    widths: tuple[int, ...]
    kinds: bytearray
    offs: array
    pool: array
    outputs: array

    @property
    def n_gates(self) -> int:
        return len(self.kinds)


@dataclass(frozen=True)
class Metrics:
    size: int
    depth: int
    max_fan_in: int


class CircuitBuilder:
    """Appends gates in topological order; optional interning returns an
    existing id for a structurally repeated gate."""

    def __init__(self, widths: Sequence[int], intern: bool = True):
        self.widths = tuple(int(w) for w in widths)
        self.kinds = bytearray()
        self.offs = [0]
        self.pool: list[int] = []
        self._seen: dict[tuple, int] | None = {} if intern else None
        self._inputs: dict[tuple[int, int], int] = {}
        for a, w in enumerate(self.widths):
            for i in range(w):
                self._inputs[(a, i)] = self._push(KIND_IN, (a, i))

    def _push(self, kind: int, payload: tuple[int, ...]) -> int:
        if self._seen is not None:
            key = (kind, payload)
            hit = self._seen.get(key)
            if hit is not None:
                return hit
        gid = len(self.kinds)
        self.kinds.append(kind)
        self.pool.extend(payload)
        self.offs.append(len(self.pool))
        if self._seen is not None:
            self._seen[(kind, payload)] = gid
        return gid

    def _check(self, ops: Iterable[int]) -> tuple[int, ...]:
        ops = tuple(ops)
        n = len(self.kinds)
        for g in ops:
            if not 0 <= g < n:
                raise ValueError(f"gate reference {g} out of range")
        return ops

    def input(self, arg: int, bitpos: int) -> int:
        got = self._inputs.get((arg, bitpos))
        if got is None:
            raise ValueError(f"no input bit {arg}:{bitpos}")
        return got

    def const(self, bitv: int) -> int:
        return self._push(KIND_C1 if bitv else KIND_C0, ())

    def not_(self, a: int) -> int:
        (a,) = self._check([a])
        k = self.kinds[a]
        if k == KIND_NOT:
            return self.pool[self.offs[a]]
        if k == KIND_C0:
            return self.const(1)
        if k == KIND_C1:
            return self.const(0)
        return self._push(KIND_NOT, (a,))

    def and_(self, ops: Iterable[int]) -> int:
        ops = self._check(ops)
        kept = []
        for g in ops:
            k = self.kinds[g]
            if k == KIND_C0:
                return self.const(0)
            if k != KIND_C1:
                kept.append(g)
        if not kept:
            return self.const(1)
        if len(kept) == 1:
            return kept[0]
        return self._push(KIND_AND, tuple(kept))

    def or_(self, ops: Iterable[int]) -> int:
        ops = self._check(ops)
        kept = []
        for g in ops:
            k = self.kinds[g]
            if k == KIND_C1:
                return self.const(1)
            if k != KIND_C0:
                kept.append(g)
        if not kept:
            return self.const(0)
        if len(kept) == 1:
            return kept[0]
        return self._push(KIND_OR, tuple(kept))

    def maj(self, ops: Iterable[int]) -> int:
        ops = self._check(ops)
        if not ops:
            raise ValueError("majority gate needs operands")
        if len(ops) == 1:
            return ops[0]
        return self._push(KIND_MAJ, tuple(ops))

    def build(self, outputs: Sequence[int]) -> Circuit:
        # an empty output list is legal: it is the circuit of a value whose
        # static width is zero
        outs = self._check(outputs)
        return Circuit(
            self.widths,
            bytearray(self.kinds),
            array("I", self.offs),
            array("I", self.pool),
            array("I", outs),
        )


def _check_args(c: Circuit, args: Sequence[int]) -> None:
    if len(args) != len(c.widths):
        raise ValueError(f"{len(c.widths)} arguments expected, got {len(args)}")
    for a, w in zip(args, c.widths):
        if a < 0 or a.bit_length() > w:
            raise ValueError(f"argument {a} does not fit in {w} bits")


def _ge_const(planes: list[int], t: int, mask: int) -> int:
    """Lanes where the plane-encoded counter is at least the constant t."""
    m = max(len(planes), t.bit_length())
    borrow = 0
    for i in range(m):
        ci = planes[i] if i < len(planes) else 0
        if (t >> i) & 1:
            borrow = (mask ^ ci) | borrow
        else:
            borrow = (mask ^ ci) & borrow
    return mask ^ borrow


def batch_eval(c: Circuit, argsets: Sequence[Sequence[int]]) -> list[int]:
    """Evaluate on many input tuples at once, one bit lane per tuple."""
    lanes = len(argsets)
    if lanes == 0:
        return []
    for a in argsets:
        _check_args(c, a)
    mask = (1 << lanes) - 1
    kinds, offs, pool = c.kinds, c.offs, c.pool
    vals = [0] * len(kinds)
    for i in range(len(kinds)):
        kind = kinds[i]
        lo, hi = offs[i], offs[i + 1]
        if kind == KIND_IN:
            arg, bitpos = pool[lo], pool[lo + 1]
            v = 0
            for la in range(lanes):
                v |= ((argsets[la][arg] >> bitpos) & 1) << la
        elif kind == KIND_C0:
            v = 0
        elif kind == KIND_C1:
            v = mask
        elif kind == KIND_NOT:
            v = mask ^ vals[pool[lo]]
        elif kind == KIND_AND:
            v = mask
            for j in pool[lo:hi]:
                v &= vals[j]
        elif kind == KIND_OR:
            v = 0
            for j in pool[lo:hi]:
                v |= vals[j]
        elif kind == KIND_MAJ:
            planes: list[int] = []
            for j in pool[lo:hi]:
                carry = vals[j]
                for pi in range(len(planes)):
                    if not carry:
                        break
                    planes[pi], carry = planes[pi] ^ carry, planes[pi] & carry
                if carry:
                    planes.append(carry)
            v = _ge_const(planes, (hi - lo) // 2 + 1, mask)
        else:
            raise ValueError(f"bad gate kind {kind}")
        vals[i] = v
    results = []
    for la in range(lanes):
        v = 0
        for j, g in enumerate(c.outputs):
            v |= ((vals[g] >> la) & 1) << j
        results.append(v)
    return results


def eval_circuit(c: Circuit, args: Sequence[int]) -> int:
    return batch_eval(c, [args])[0]


def metrics(c: Circuit) -> Metrics:
    depth = [0] * len(c.kinds)
    deepest = 0
    fan = 0
    size = 0
    for i in range(len(c.kinds)):
        kind = c.kinds[i]
        if kind == KIND_IN:
            continue
        size += 1
        lo, hi = c.offs[i], c.offs[i + 1]
        if hi > lo:
            fan = max(fan, hi - lo)
            d = 1 + max(depth[j] for j in c.pool[lo:hi])
        else:
            d = 1
        depth[i] = d
        deepest = max(deepest, d)
    return Metrics(size, deepest, fan)


def _reachable(c: Circuit) -> set[int]:
    seen: set[int] = set()
    stack = list(c.outputs)
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        if c.kinds[i] != KIND_IN:
            stack.extend(c.pool[c.offs[i]:c.offs[i + 1]])
    return seen


def dedup(c: Circuit) -> Circuit:
    """Merge structurally identical gates (and drop internal gates not
    feeding any output); input gates are always kept in place."""
    kinds = bytearray()
    offs = [0]
    pool: list[int] = []
    seen: dict[tuple, int] = {}
    remap: dict[int, int] = {}
    needed = _reachable(c)
    for i in range(len(c.kinds)):
        kind = c.kinds[i]
        if kind != KIND_IN and i not in needed:
            continue
        lo, hi = c.offs[i], c.offs[i + 1]
        if kind == KIND_IN:
            payload = (c.pool[lo], c.pool[lo + 1])
        else:
            payload = tuple(remap[j] for j in c.pool[lo:hi])
        key = (kind, payload)
        gid = seen.get(key)
        if gid is None:
            gid = len(kinds)
            kinds.append(kind)
            pool.extend(payload)
            offs.append(len(pool))
            seen[key] = gid
        remap[i] = gid
    return Circuit(
        c.widths,
        kinds,
        array("I", offs),
        array("I", pool),
        array("I", [remap[g] for g in c.outputs]),
    )


def push_negations(c: Circuit) -> Circuit:
    """De Morgan pass: negations end up directly over input gates only.
    Majority gates must have odd fan-in, where complementing all inputs
    complements the output."""
    kinds = bytearray()
    offs = [0]
    pool: list[int] = []
    seen: dict[tuple, int] = {}

    def emit(kind: int, payload: tuple[int, ...]) -> int:
        key = (kind, payload)
        hit = seen.get(key)
        if hit is not None:
            return hit
        gid = len(kinds)
        kinds.append(kind)
        pool.extend(payload)
        offs.append(len(pool))
        seen[key] = gid
        return gid

    memo: dict[tuple[int, bool], int] = {}
    _DUAL = {KIND_AND: KIND_OR, KIND_OR: KIND_AND, KIND_MAJ: KIND_MAJ}

    def resolve(top: int, top_neg: bool) -> int:
        stack: list[tuple[int, bool, bool]] = [(top, top_neg, False)]
        while stack:
            i, neg, expanded = stack.pop()
            if (i, neg) in memo:
                continue
            kind = c.kinds[i]
            lo, hi = c.offs[i], c.offs[i + 1]
            if kind == KIND_IN:
                gid = emit(KIND_IN, (c.pool[lo], c.pool[lo + 1]))
                memo[(i, neg)] = emit(KIND_NOT, (gid,)) if neg else gid
            elif kind == KIND_C0:
                memo[(i, neg)] = emit(KIND_C1 if neg else KIND_C0, ())
            elif kind == KIND_C1:
                memo[(i, neg)] = emit(KIND_C0 if neg else KIND_C1, ())
            elif kind == KIND_NOT:
                child = c.pool[lo]
                if (child, not neg) in memo:
                    memo[(i, neg)] = memo[(child, not neg)]
                else:
                    stack.append((i, neg, False))
                    stack.append((child, not neg, False))
            else:
                if kind == KIND_MAJ and neg and (hi - lo) % 2 == 0:
                    raise ValueError("even-fan-in majority has no negation dual")
                ops = list(c.pool[lo:hi])
                if expanded:
                    memo[(i, neg)] = emit(
                        _DUAL[kind] if neg else kind,
                        tuple(memo[(j, neg)] for j in ops),
                    )
                else:
                    stack.append((i, neg, True))
                    stack.extend((j, neg, False) for j in ops if (j, neg) not in memo)
        return memo[(top, top_neg)]

    outputs = [resolve(g, False) for g in c.outputs]
    return Circuit(
        c.widths,
        kinds,
        array("I", offs),
        array("I", pool),
        array("I", outputs),
    )


def emit_netlist(c: Circuit) -> str:
    lines = [
        f"LDC1 ninputs={len(c.widths)} widths={','.join(str(w) for w in c.widths)}"
    ]
    for i in range(len(c.kinds)):
        kind = c.kinds[i]
        lo, hi = c.offs[i], c.offs[i + 1]
        if kind == KIND_IN:
            lines.append(f"g{i} = IN {c.pool[lo]}:{c.pool[lo + 1]}")
        elif kind in (KIND_C0, KIND_C1):
            lines.append(f"g{i} = {_KIND_NAMES[kind]}")
        else:
            refs = " ".join(f"g{j}" for j in c.pool[lo:hi])
            lines.append(f"g{i} = {_KIND_NAMES[kind]} {refs}")
    lines.append(("OUT " + " ".join(f"g{j}" for j in c.outputs)) if len(c.outputs) else "OUT")
    return "\n".join(lines) + "\n"


_HEADER_RE = re.compile(r"^LDC1 ninputs=(\d+) widths=([0-9,]*)$")
_GATE_RE = re.compile(r"^g(\d+) = ([A-Z0-9]+)(.*)$")
_IN_RE = re.compile(r"^(\d+):(\d+)$")


def _parse_ref(tok: str, limit: int, lineno: int) -> int:
    if not tok.startswith("g") or not tok[1:].isdigit():
        raise ParseError(f"bad gate reference {tok!r}", line=lineno)
    gid = int(tok[1:])
    if gid >= limit:
        raise ParseError(f"reference to later gate g{gid}", line=lineno)
    return gid


def parse_netlist(text: str) -> Circuit:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty netlist")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ParseError("bad header, expected 'LDC1 ninputs=.. widths=..'", line=1)
    ninputs = int(m.group(1))
    widths = tuple(int(w) for w in m.group(2).split(",") if w != "")
    if len(widths) != ninputs:
        raise ParseError(f"ninputs={ninputs} but {len(widths)} widths", line=1)
    kinds = bytearray()
    offs = [0]
    pool: list[int] = []
    outputs: array | None = None
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if outputs is not None:
            raise ParseError("content after OUT line", line=lineno)
        if line == "OUT" or line.startswith("OUT "):
            toks = line.split()
            outputs = array(
                "I", [_parse_ref(t, len(kinds), lineno) for t in toks[1:]]
            )
            continue
        m = _GATE_RE.match(line)
        if not m:
            raise ParseError(f"bad gate line {line!r}", line=lineno)
        gid = int(m.group(1))
        if gid != len(kinds):
            raise ParseError(f"expected id g{len(kinds)}, found g{gid}", line=lineno)
        name = m.group(2)
        rest = m.group(3).split()
        if name == "IN":
            if len(rest) != 1 or not _IN_RE.match(rest[0]):
                raise ParseError("IN wants one arg:bit pair", line=lineno)
            arg, bitpos = (int(p) for p in rest[0].split(":"))
            if arg >= ninputs or bitpos >= widths[arg]:
                raise ParseError(f"input bit {arg}:{bitpos} out of range", line=lineno)
            payload = (arg, bitpos)
            kind = KIND_IN
        elif name in ("C0", "C1"):
            if rest:
                raise ParseError(f"{name} takes no operands", line=lineno)
            payload = ()
            kind = KIND_C0 if name == "C0" else KIND_C1
        elif name in ("NOT", "AND", "OR", "MAJ"):
            kind = {"NOT": KIND_NOT, "AND": KIND_AND, "OR": KIND_OR, "MAJ": KIND_MAJ}[name]
            if not rest or (name == "NOT" and len(rest) != 1):
                raise ParseError(f"{name} wants operands", line=lineno)
            payload = tuple(_parse_ref(t, gid, lineno) for t in rest)
        else:
            raise ParseError(f"unknown gate kind {name!r}", line=lineno)
        kinds.append(kind)
        pool.extend(payload)
        offs.append(len(pool))
    if outputs is None:
        raise ParseError("missing OUT line", line=len(lines))
    return Circuit(widths, kinds, array("I", offs), array("I", pool), outputs)
