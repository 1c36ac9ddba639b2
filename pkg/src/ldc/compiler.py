"""Term-to-circuit lowering.

The compiler unrolls every recursion against the worst case its argument
widths allow: an append recursion becomes one step circuit per bit
position, a bounded recursion becomes one stage per notation digit of
the iterated length, and dead positions or stages are masked off with
liveness wires.  Output width always equals the static length bound of
the term, with unused high bits forced to zero.

Lowering works on bundles, not raw wire lists.  A bundle pairs the
wires of a value with what is statically known about it: an exact
constant, an exact run-time length, a length expressed relative to the
driver of the enclosing recursion, or nothing.  The folds over these
facts are what keep the standard position-indexed idioms (reconstructing
the position from a prefix length, taking the top bits of the driver)
free of gates, so compiled size stays polynomial.

Run-time side conditions are not re-checked inside circuits; the
evaluator owns dynamic enforcement.  Step functions of append
recursions must be statically one bit wide or compilation fails with
UncertifiedWidth.

Gadgets with data-dependent internal structure (the length detector,
dynamic shifts) pad their outputs to a fixed layer count, so circuit
depth does not drift as argument widths grow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuits import (
    KIND_C0,
    KIND_C1,
    KIND_IN,
    Circuit,
    CircuitBuilder,
    metrics,
)
from .errors import CompileError, TermError, UncertifiedWidth
from .naturals import DEFAULT_GUARD_BITS, iter_len_max
from .terms import (
    AppendRec,
    ClassTag,
    Compose,
    Init,
    IterLenRec,
    Proj,
    Term,
    arity,
    desugar,
    ensure_valid,
    length_bound,
    used_positions,
)

# fixed layer budgets; gadget outputs are padded up to these so depth is a
# function of the term alone, not of the argument widths
D_LEN = 12
C0_STAGE = 24


class Bundle:
    """Wires plus static knowledge for one intermediate value.

    length is one of
        ("const", c)       run-time length is exactly c
        ("rel", bid, d)    length of bundle bid minus d, valid under the
                           liveness assumption of the enclosing position
        ("dyn",)           nothing known beyond the wire count
    value is one of
        ("const", v)       the value itself
        ("rellen", bid, d) the number  len(bundle bid) - d
        ("top", bid, c)    the top c bits of bundle bid
        ("wires",)         materialized, see .wires
    """

    __slots__ = ("bid", "width", "length", "value", "wires", "onehot")

    def __init__(self, bid, width, length, value, wires=None, onehot=None):
        self.bid = bid
        self.width = width
        self.length = length
        self.value = value
        self.wires = wires
        self.onehot = onehot


@dataclass(frozen=True)
class CompileResult:
    circuit: Circuit
    output_width: int
    stages: int
    stage_levels: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ProfileRow:
    n: int
    size: int
    depth: int
    stages: int


@dataclass(frozen=True)
class FamilyResult:
    profile: tuple[ProfileRow, ...]
    circuits: tuple[Circuit, ...]


@dataclass(frozen=True)
class CheckRow:
    n: int
    size: int
    depth: int
    stages: int
    size_cap: float
    depth_cap: float
    ok: bool
    why: str = ""


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    rows: tuple[CheckRow, ...]

    @property
    def first_failure(self) -> CheckRow | None:
        for r in self.rows:
            if not r.ok:
                return r
        return None


def compile_term(
    t: Term,
    arg_lens: list[int],
    guard_bits: int = DEFAULT_GUARD_BITS,
    allow_wide_steps: bool = False,
) -> CompileResult:
    """Lower a term to a circuit for the given argument widths.

    The circuit has one input block per argument and exactly
    length_bound(t, arg_lens) output wires, high bits zero.  Sugar
    constructors are expanded first, so the result only ever contains
    the core schemata.
    """
    ensure_valid(t)
    lens = [int(n) for n in arg_lens]
    if len(lens) != arity(t):
        raise TermError(f"term has arity {arity(t)}, got {len(lens)} argument widths")
    if any(n < 0 for n in lens):
        raise TermError("argument widths must be nonnegative")
    out_width = length_bound(t, lens, guard_bits)
    core = desugar(t)
    builder = CircuitBuilder(lens)
    low = _Lower(builder, guard_bits, allow_wide_steps)
    env = tuple(low.input_bundle(a, n) for a, n in enumerate(lens))
    top = low.lower(core, env)
    circuit = builder.build(low.fit(top, out_width))
    levels = tuple(low.stage_records)
    stages = max((s for _, s in levels), default=0)
    return CompileResult(circuit, out_width, stages, levels)


def compile_family(
    t: Term, ns: list[int], guard_bits: int = DEFAULT_GUARD_BITS
) -> FamilyResult:
    """Compile one circuit per width, every argument n bits wide, and
    collect the (n, size, depth, stages) profile sorted by n."""
    rows = []
    circuits = []
    for n in sorted(set(int(n) for n in ns)):
        res = compile_term(t, [n] * arity(t), guard_bits)
        m = metrics(res.circuit)
        rows.append(ProfileRow(n, m.size, m.depth, res.stages))
        circuits.append(res.circuit)
    return FamilyResult(tuple(rows), tuple(circuits))


def check_bounds(
    profile: tuple[ProfileRow, ...],
    tag: ClassTag,
    size_deg: int,
    depth_deg: int,
    size_c: float,
    depth_c: float,
) -> BoundReport:
    """Check a profile against the resource shape its class tag claims.

    Size must stay under size_c * n**size_deg everywhere.  Depth must be
    identical across rows for AC0 and under
    depth_c * iter_len_max(level, n)**depth_deg for the leveled classes.
    """
    if not profile:
        raise ValueError("profile is empty")
    rows = []
    depth_ref = profile[0].depth
    for r in profile:
        size_cap = size_c * r.n**size_deg
        why = []
        if tag.kind == "UNC":
            why.append("term is unclassified")
            depth_cap = 0.0
        elif tag.kind == "AC0":
            depth_cap = float(depth_ref)
            if r.depth != depth_ref:
                why.append(f"depth {r.depth} differs from reference {depth_ref}")
        else:
            depth_cap = depth_c * iter_len_max(tag.level, r.n) ** depth_deg
            if r.depth > depth_cap:
                why.append(f"depth {r.depth} over cap {depth_cap:g}")
        if r.size > size_cap:
            why.append(f"size {r.size} over cap {size_cap:g}")
        rows.append(
            CheckRow(r.n, r.size, r.depth, r.stages, size_cap, depth_cap, not why, "; ".join(why))
        )
    return BoundReport(all(r.ok for r in rows), tuple(rows))


class _Lower:
    def __init__(self, builder: CircuitBuilder, guard: int, allow_wide_steps: bool):
        self.b = builder
        self.guard = guard
        self.allow_wide = allow_wide_steps
        self.memo: dict[tuple, Bundle] = {}
        self.deps: dict = {}
        self.bundles: dict[int, Bundle] = {}
        self.consts: dict[int, Bundle] = {}
        self.len_cache: dict[int, Bundle] = {}
        self.same_steps: dict[tuple[int, int], tuple] = {}
        self.stage_records: list[tuple[int, int]] = []
        self.gdepth: list[int] = []
        self.nbid = 0

    # ------------------------------------------------------------------
    # bundles

    def bundle(self, width, length, value, wires=None, onehot=None) -> Bundle:
        b = Bundle(self.nbid, width, length, value, wires, onehot)
        self.nbid += 1
        self.bundles[b.bid] = b
        return b

    def const_bundle(self, v: int) -> Bundle:
        got = self.consts.get(v)
        if got is None:
            w = v.bit_length()
            got = self.bundle(w, ("const", w), ("const", v))
            self.consts[v] = got
        return got

    def input_bundle(self, argpos: int, width: int) -> Bundle:
        if width == 0:
            return self.const_bundle(0)
        wires = [self.b.input(argpos, i) for i in range(width)]
        return self.bundle(width, ("dyn",), ("wires",), wires)

    def wires_of(self, b: Bundle) -> list[int]:
        if b.wires is None:
            kind = b.value[0]
            if kind == "const":
                v = b.value[1]
                b.wires = [self.b.const((v >> i) & 1) for i in range(b.width)]
            elif kind == "rellen":
                ctx = self.bundles[b.value[1]]
                b.wires = self._sub_const(self.wires_of(self.len_value(ctx)), b.value[2], b.width)
            elif kind == "top":
                ctx, cnt = self.bundles[b.value[1]], b.value[2]
                lv = self.len_value(ctx)
                amt = self.bundle(
                    lv.width, ("dyn",), ("wires",), self._sub_const(self.wires_of(lv), cnt, lv.width)
                )
                b.wires = self._dyn_shift_right(self.wires_of(ctx), amt)[: b.width]
            elif kind == "shiftin":
                src = self.bundles[b.value[1]]
                b.wires = [self.b.const(b.value[2])] + self.wires_of(src)
            else:
                raise CompileError("bundle has no wires and no recipe")
        return b.wires

    def fit(self, b: Bundle, width: int) -> list[int]:
        w = self.wires_of(b)
        if len(w) < width:
            return w + [self.b.const(0)] * (width - len(w))
        return w[:width]

    # ------------------------------------------------------------------
    # gate depth tracking and fixed-layer padding

    def _gd(self, gid: int) -> int:
        d = self.gdepth
        while len(d) <= gid:
            i = len(d)
            k = self.b.kinds[i]
            if k == KIND_IN:
                d.append(0)
            elif k in (KIND_C0, KIND_C1):
                d.append(1)
            else:
                lo, hi = self.b.offs[i], self.b.offs[i + 1]
                d.append(1 + max(d[c] for c in self.b.pool[lo:hi]))
        return d[gid]

    def _pad(self, gid: int, target: int) -> int:
        if self.b.kinds[gid] in (KIND_C0, KIND_C1):
            return gid
        if self._gd(gid) > target:
            raise CompileError("gadget exceeded its fixed layer budget")
        while self._gd(gid) < target:
            gid = self.b.and_([gid, gid])
        return gid

    # ------------------------------------------------------------------
    # lowering proper

    def lower(self, t: Term, env: tuple[Bundle, ...]) -> Bundle:
        ups = used_positions(t, self.deps)
        key = (id(t), tuple(env[k - 1].bid for k in ups))
        hit = self.memo.get(key)
        if hit is None:
            hit = self._lower(t, env)
            self.memo[key] = hit
        return hit

    def _one_step(self, h0: Term, h1: Term) -> bool:
        """Whether both step terms compute the same function bit, so the
        per-position mux on the driver bit can be dropped."""
        if h1 is h0:
            return True
        key = (id(h0), id(h1))
        got = self.same_steps.get(key)
        if got is None:
            got = (h0, h1, h0 == h1)
            self.same_steps[key] = got
        return got[2]

    def _lower(self, t: Term, env: tuple[Bundle, ...]) -> Bundle:
        if isinstance(t, Init):
            return self._apply_init(t.name, env)
        if isinstance(t, Proj):
            return env[t.k - 1]
        if isinstance(t, Compose):
            outer_used = used_positions(t.outer, self.deps)
            inner_env = tuple(
                self.lower(inner, env) if i in outer_used else self.const_bundle(0)
                for i, inner in enumerate(t.inners, start=1)
            )
            return self.lower(t.outer, inner_env)
        if isinstance(t, AppendRec):
            return self._lower_append(t, env)
        if isinstance(t, IterLenRec):
            return self._lower_iter(t, env)
        raise CompileError(f"cannot lower {type(t).__name__} (expected desugared core)")

    def _apply_init(self, name: str, env: tuple[Bundle, ...]) -> Bundle:
        if name in ("z", "const0"):
            return self.const_bundle(0)
        if name == "const1":
            return self.const_bundle(1)
        if name == "s0":
            return self._op_shift_in(env[0], 0)
        if name == "s1":
            return self._op_shift_in(env[0], 1)
        if name == "len":
            return self.len_value(env[0])
        if name == "half":
            return self._op_half(env[0])
        if name == "bit":
            return self._op_bit(env[0], env[1])
        if name == "msp":
            return self._op_msp(env[0], env[1])
        if name == "smash":
            return self._op_smash(env[0], env[1])
        if name == "mult":
            return self._op_mult(env[0], env[1])
        raise CompileError(f"unknown initial operation {name!r}")

    def _op_shift_in(self, b: Bundle, bitv: int) -> Bundle:
        if b.value[0] == "const":
            return self.const_bundle((b.value[1] << 1) | bitv)
        if bitv == 1:
            if b.length[0] == "const":
                length = ("const", b.length[1] + 1)
            elif b.length[0] == "rel":
                length = ("rel", b.length[1], b.length[2] - 1)
            else:
                length = ("dyn",)
        else:
            # appending 0 only lengthens nonzero values
            if b.length[0] == "const" and b.length[1] > 0:
                length = ("const", b.length[1] + 1)
            else:
                length = ("dyn",)
        if b.wires is not None:
            wires = [self.b.const(bitv)] + b.wires
            return self.bundle(b.width + 1, length, ("wires",), wires)
        # operand not materialized; common when only the length is consumed
        return self.bundle(b.width + 1, length, ("shiftin", b.bid, bitv))

    def _op_half(self, b: Bundle) -> Bundle:
        if b.value[0] == "const":
            return self.const_bundle(b.value[1] >> 1)
        if b.width == 0:
            return self.const_bundle(0)
        if b.length[0] == "const":
            length = ("const", max(b.length[1] - 1, 0))
        elif b.length[0] == "rel":
            length = ("rel", b.length[1], b.length[2] + 1)
        else:
            length = ("dyn",)
        return self.bundle(b.width - 1, length, ("wires",), self.wires_of(b)[1:])

    def len_value(self, b: Bundle) -> Bundle:
        if b.value[0] == "const":
            return self.const_bundle(b.value[1].bit_length())
        if b.length[0] == "const":
            return self.const_bundle(b.length[1])
        if b.length[0] == "rel":
            ctx, d = b.length[1], b.length[2]
            w = max(self.bundles[ctx].width - d, 0).bit_length()
            return self.bundle(w, ("dyn",), ("rellen", ctx, d))
        got = self.len_cache.get(b.bid)
        if got is None:
            got = self._len_gadget(b)
            self.len_cache[b.bid] = got
        return got

    def _len_gadget(self, b: Bundle) -> Bundle:
        """Leading-one position in two sqrt-sized tiers; emits the value
        wires plus a one-hot sideband reused by dynamic bit selects."""
        xs = self.wires_of(b)
        w = len(xs)
        if w == 0:
            return self.const_bundle(0)
        base = max(self._gd(g) for g in xs)
        target = base + D_LEN
        k = math.isqrt(w)
        if k * k < w:
            k += 1
        nblk = (w + k - 1) // k
        blor = [self.b.or_(xs[i * k : (i + 1) * k]) for i in range(nblk)]
        sfx = [self.b.or_(blor[i:]) for i in range(nblk)]
        hb = [
            self.b.and_([blor[i], self.b.not_(sfx[i + 1]) if i + 1 < nblk else self.b.const(1)])
            for i in range(nblk)
        ]
        sel = [
            self.b.or_([self.b.and_([hb[i], xs[i * k + j]]) for i in range(nblk) if i * k + j < w])
            for j in range(k)
        ]
        lead = [
            self.b.and_([sel[j], self.b.not_(self.b.or_(sel[j + 1 :])) if j + 1 < k else self.b.const(1)])
            for j in range(k)
        ]
        onehot = [self.b.not_(sfx[0])]
        for pos in range(w):
            onehot.append(self.b.and_([hb[pos // k], lead[pos % k]]))
        width = w.bit_length()
        vals = [
            self.b.or_([onehot[v] for v in range(w + 1) if (v >> t) & 1])
            for t in range(width)
        ]
        onehot = [self._pad(g, target) for g in onehot]
        vals = [self._pad(g, target) for g in vals]
        return self.bundle(width, ("dyn",), ("wires",), vals, onehot)

    def _onehots_upto(self, idx: Bundle, limit: int) -> list[int]:
        """Selector wires sel[s] = [idx == s] for s below limit."""
        if idx.value[0] == "const":
            v = idx.value[1]
            return [self.b.const(1 if s == v else 0) for s in range(limit)]
        if idx.onehot is not None:
            oh = idx.onehot[:limit]
            return oh + [self.b.const(0)] * (limit - len(oh))
        iw = self.wires_of(idx)
        lits = [(self.b.not_(g), g) for g in iw]
        out = []
        for s in range(limit):
            if s >> len(iw):
                out.append(self.b.const(0))
            else:
                out.append(self.b.and_([lits[i][(s >> i) & 1] for i in range(len(iw))]))
        return out

    def _dyn_shift_right(self, xs: list[int], idx: Bundle) -> list[int]:
        w = len(xs)
        sels = self._onehots_upto(idx, w)
        return [
            self.b.or_([self.b.and_([sels[s], xs[j + s]]) for s in range(w - j)])
            for j in range(w)
        ]

    def _op_bit(self, b: Bundle, idx: Bundle) -> Bundle:
        if idx.value[0] == "const":
            c = idx.value[1]
            if b.value[0] == "const":
                return self.const_bundle((b.value[1] >> c) & 1)
            if c >= b.width:
                return self.const_bundle(0)
            wire = self.wires_of(b)[c]
        else:
            xs = self.fit(b, b.width)
            sels = self._onehots_upto(idx, b.width)
            wire = self.b.or_([self.b.and_([sels[s], xs[s]]) for s in range(b.width)])
        return self.bundle(1, ("dyn",), ("wires",), [wire])

    def _op_msp(self, b: Bundle, idx: Bundle) -> Bundle:
        if idx.value[0] == "const":
            c = idx.value[1]
            if b.value[0] == "const":
                v = b.value[1]
                return self.const_bundle(v >> c if c < v.bit_length() else 0)
            if b.value[0] == "top":
                return self._top_bundle(b.value[1], max(b.value[2] - c, 0))
            if c >= b.width:
                return self.const_bundle(0)
            if b.length[0] == "const":
                length = ("const", max(b.length[1] - c, 0))
            elif b.length[0] == "rel":
                length = ("rel", b.length[1], b.length[2] + c)
            else:
                length = ("dyn",)
            return self.bundle(b.width - c, length, ("wires",), self.wires_of(b)[c:])
        if idx.value[0] == "rellen" and idx.value[1] == b.bid:
            return self._top_bundle(b.bid, idx.value[2])
        wires = self._dyn_shift_right(self.fit(b, b.width), idx)
        return self.bundle(b.width, ("dyn",), ("wires",), wires)

    def _top_bundle(self, ctx_bid: int, count: int) -> Bundle:
        if count == 0:
            return self.const_bundle(0)
        count = min(count, self.bundles[ctx_bid].width)
        return self.bundle(count, ("const", count), ("top", ctx_bid, count))

    def _op_smash(self, a: Bundle, c: Bundle) -> Bundle:
        la, lc = self.len_value(a), self.len_value(c)
        if la.value[0] == "const" and lc.value[0] == "const":
            return self.const_bundle(1 << (la.value[1] * lc.value[1]))
        width = a.width * c.width + 1
        oha = self._onehots_upto(la, a.width + 1)
        ohc = self._onehots_upto(lc, c.width + 1)
        rows: list[list[int]] = [[] for _ in range(width)]
        for i in range(a.width + 1):
            for j in range(c.width + 1):
                rows[i * j].append(self.b.and_([oha[i], ohc[j]]))
        wires = [self.b.or_(r) for r in rows]
        return self.bundle(width, ("dyn",), ("wires",), wires)

    def _op_mult(self, a: Bundle, c: Bundle) -> Bundle:
        if a.value[0] == "const" and c.value[0] == "const":
            return self.const_bundle(a.value[1] * c.value[1])
        width = a.width + c.width
        if width == 0 or a.width == 0 or c.width == 0:
            return self.const_bundle(0)
        aw, cw = self.wires_of(a), self.wires_of(c)
        cols: list[list[int]] = [[] for _ in range(width)]
        for j, cj in enumerate(cw):
            for i, ai in enumerate(aw):
                cols[i + j].append(self.b.and_([ai, cj]))
        # carry-save until two rows remain, majority gates produce carries
        pending = True
        while pending:
            pending = False
            nxt: list[list[int]] = [[] for _ in range(width + 1)]
            for p, col in enumerate(cols):
                while len(col) >= 3:
                    x, y, zz = col.pop(), col.pop(), col.pop()
                    nxt[p].append(self._xor3(x, y, zz))
                    nxt[p + 1].append(self.b.maj([x, y, zz]))
                    pending = True
                nxt[p].extend(col)
            cols = [c2 for c2 in nxt[:width]]
        out = []
        carry = self.b.const(0)
        for p in range(width):
            col = cols[p] + [carry]
            while len(col) < 3:
                col.append(self.b.const(0))
            out.append(self._xor3(col[0], col[1], col[2]))
            carry = self.b.maj([col[0], col[1], col[2]])
        return self.bundle(width, ("dyn",), ("wires",), out)

    def _xor2(self, x: int, y: int) -> int:
        return self.b.or_([
            self.b.and_([x, self.b.not_(y)]),
            self.b.and_([self.b.not_(x), y]),
        ])

    def _xor3(self, x: int, y: int, z: int) -> int:
        return self._xor2(self._xor2(x, y), z)

    # ------------------------------------------------------------------
    # append recursion

    def _lower_append(self, t: AppendRec, env: tuple[Bundle, ...]) -> Bundle:
        r, sides = env[0], env[1:]
        g_b = self.lower(t.g, sides)
        w = r.width
        side_widths = [s.width for s in sides]
        for h in (t.h0, t.h1):
            if length_bound(h, [w] + side_widths, self.guard) > 1 and not self.allow_wide:
                raise UncertifiedWidth(
                    "append step is not statically one bit wide at these argument widths"
                )
        known = r.length[1] if r.length[0] == "const" else None
        live = None
        rw: list[int] | None = None
        if known is None and w > 0:
            rw = self.wires_of(r)
            live = [self.b.or_(rw[j:]) for j in range(w)]
        out: list[int] = []
        for j in range(w):
            if known is not None and j >= known:
                out.append(self.b.const(0))
                continue
            p = self._prefix_bundle(r, j)
            h0b = self.lower(t.h0, (p,) + sides)
            if self._one_step(t.h0, t.h1):
                step = self._step_wire(h0b)
            else:
                if rw is None:
                    rw = self.wires_of(r)
                bj = rw[j]
                w1, w0 = self._step_wire(self.lower(t.h1, (p,) + sides)), self._step_wire(h0b)
                step = self.b.or_([self.b.and_([bj, w1]), self.b.and_([self.b.not_(bj), w0])])
            out.append(step if live is None else self.b.and_([step, live[j]]))
        # the base value sits above the driver's run-time length
        if g_b.width == 0:
            return self.bundle(w, ("dyn",), ("wires",), out)
        gw = self.wires_of(g_b)
        total = w + g_b.width
        if known is not None:
            merged = list(out)
            merged += [self.b.const(0)] * (total - len(merged))
            for i, gwire in enumerate(gw):
                pos = known + i
                merged[pos] = self.b.or_([merged[pos], gwire]) if pos < w else gwire
            length = ("dyn",)
            if g_b.length[0] == "const" and g_b.length[1] > 0:
                length = ("const", g_b.length[1] + known)
            return self.bundle(total, length, ("wires",), merged)
        sels = self._onehots_upto(self.len_value(r), w + 1)
        merged = []
        for pos in range(total):
            parts = [out[pos]] if pos < w else []
            for s in range(max(pos - g_b.width + 1, 0), min(pos, w) + 1):
                parts.append(self.b.and_([sels[s], gw[pos - s]]))
            merged.append(self.b.or_(parts))
        return self.bundle(total, ("dyn",), ("wires",), merged)

    def _prefix_bundle(self, r: Bundle, j: int) -> Bundle:
        if r.value[0] == "top":
            return self._top_bundle(r.value[1], max(r.value[2] - j - 1, 0))
        pref_w = r.width - j - 1
        if r.length[0] == "const":
            length = ("const", max(r.length[1] - j - 1, 0))
        elif r.length[0] == "rel":
            length = ("rel", r.length[1], r.length[2] + j + 1)
        else:
            length = ("rel", r.bid, j + 1)
        if length[0] == "const" and length[1] == 0:
            return self.const_bundle(0)
        return self.bundle(pref_w, length, ("wires",), self.wires_of(r)[j + 1 :])

    def _step_wire(self, hb: Bundle) -> int:
        if hb.value[0] == "const":
            return self.b.const(hb.value[1] & 1)
        if hb.width == 0:
            return self.b.const(0)
        return self.wires_of(hb)[0]

    # ------------------------------------------------------------------
    # bounded recursion on iterated length

    def _lower_iter(self, t: IterLenRec, env: tuple[Bundle, ...]) -> Bundle:
        x, sides = env[0], env[1:]
        y = x
        for _ in range(t.level):
            y = self.len_value(y)
        if y.value[0] == "const":
            stages = y.value[1].bit_length()
        else:
            stages = iter_len_max(t.level + 1, x.width)
        self.stage_records.append((t.level, stages))
        state_w = length_bound(t.bound, [stages] + [s.width for s in sides], self.guard)
        cur = self.fit(self.lower(t.g, sides), state_w)
        yw = self.fit(y, stages)
        for s in range(1, stages + 1):
            u_wires = yw[stages - s + 1 :]
            u = (
                self.const_bundle(0)
                if not u_wires
                else self.bundle(len(u_wires), ("dyn",), ("wires",), u_wires)
            )
            w_b = self.bundle(state_w, ("dyn",), ("wires",), cur)
            henv = (u,) + sides + (w_b,)
            h0w = self.fit(self.lower(t.h0, henv), state_w)
            if self._one_step(t.h0, t.h1):
                step = h0w
            else:
                h1w = self.fit(self.lower(t.h1, henv), state_w)
                bj = yw[stages - s]
                nbj = self.b.not_(bj)
                step = [
                    self.b.or_([self.b.and_([bj, a]), self.b.and_([nbj, c])])
                    for a, c in zip(h1w, h0w)
                ]
            lv = self.b.or_(yw[stages - s :])
            nlv = self.b.not_(lv)
            cur = [
                self.b.or_([self.b.and_([lv, a]), self.b.and_([nlv, c])])
                for a, c in zip(step, cur)
            ]
        return self.bundle(state_w, ("dyn",), ("wires",), cur)

    # ------------------------------------------------------------------

    def _sub_const(self, xs: list[int], d: int, out_width: int) -> list[int]:
        """max(value(xs) - d, 0) as wires, ripple borrow."""
        if d == 0:
            return (xs + [self.b.const(0)] * out_width)[:out_width]
        borrow = self.b.const(0)
        out = []
        for i in range(max(len(xs), out_width)):
            xi = xs[i] if i < len(xs) else self.b.const(0)
            di = self.b.const((d >> i) & 1)
            out.append(self._xor3(xi, di, borrow))
            # borrow out: x < d + borrow at this bit
            nxi = self.b.not_(xi)
            borrow = self.b.or_([
                self.b.and_([nxi, di]),
                self.b.and_([nxi, borrow]),
                self.b.and_([di, borrow]),
            ])
        ok = self.b.not_(borrow)
        return [self.b.and_([w, ok]) for w in out[:out_width]]
