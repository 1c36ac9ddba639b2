"""Term IR for the recursion algebra.

A term denotes a function from tuples of naturals to naturals.  The core
constructors are initial operations, projection, composition, recursion on
notation that appends one bit per step (AppendRec), and length-bounded
recursion graded by a level (IterLenRec).  CountRec and LeastSearch are
sugar; desugar rewrites them into the core.

Each term has a definite arity.  Constants at positive arity are spelled
with successor chains over Z applied to a projection, so no constructor is
arity-polymorphic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import BoundExceeded, ParseError, TermError
from .naturals import DEFAULT_GUARD_BITS, iter_len_max


@dataclass(frozen=True)
class Init:
    name: str


@dataclass(frozen=True)
class Proj:
    n: int
    k: int  # 1-based


@dataclass(frozen=True)
class Compose:
    outer: "Term"
    inners: tuple["Term", ...]


@dataclass(frozen=True)
class AppendRec:
    """f(0, ys) = g(ys); f(2x+b, ys) appends the bit h_b(x, ys) to f(x, ys)."""

    g: "Term"
    h0: "Term"
    h1: "Term"


@dataclass(frozen=True)
class IterLenRec:
    """Notation recursion on the level-fold length of the first argument.

    f(x, ys) unrolls h along the notation of iter_len(level, x); every
    intermediate value must stay within the bound term.
    """

    level: int
    g: "Term"
    h0: "Term"
    h1: "Term"
    bound: "Term"


@dataclass(frozen=True)
class CountRec:
    """Successor recursion for iter_len(level + 1, x) steps; h sees the
    step index as its first argument."""

    level: int
    g: "Term"
    h: "Term"
    bound: "Term"


@dataclass(frozen=True)
class LeastSearch:
    """Least w up to iter_len(level + 1, bound value) with body(w, ys) = 1,
    and 0 if no such w exists."""

    level: int
    body: "Term"
    bound: "Term"


Term = Union[Init, Proj, Compose, AppendRec, IterLenRec, CountRec, LeastSearch]

INIT_ARITY = {
    "z": 1,
    "s0": 1,
    "s1": 1,
    "len": 1,
    "bit": 2,
    "smash": 2,
    "msp": 2,
    "half": 1,
    "const0": 0,
    "const1": 0,
    "mult": 2,
}

BOUND_FRAGMENT_INITS = {"z", "s0", "s1", "len", "smash", "msp", "half", "const0", "const1"}


def z() -> Init:
    return Init("z")


def s0() -> Init:
    return Init("s0")


def s1() -> Init:
    return Init("s1")


def length() -> Init:
    return Init("len")


def bit() -> Init:
    return Init("bit")


def smash_op() -> Init:
    return Init("smash")


def msp() -> Init:
    return Init("msp")


def half() -> Init:
    return Init("half")


def const0() -> Init:
    return Init("const0")


def const1() -> Init:
    return Init("const1")


def mult() -> Init:
    return Init("mult")


def proj(n: int, k: int) -> Proj:
    return Proj(n, k)


def compose(outer: Term, *inners: Term) -> Compose:
    return Compose(outer, tuple(inners))


def nat_term(value: int, at_arity: int) -> Term:
    """The constant function with the given value at the given arity."""
    if value < 0 or at_arity < 0:
        raise TermError("nat_term wants naturals")
    if at_arity == 0:
        base: Term = const0()
        if value == 0:
            return base
        if value == 1:
            return const1()
    else:
        base = compose(z(), proj(at_arity, 1))
        if value == 0:
            return base
    t = base
    for ch in format(value, "b"):
        t = compose(s1() if ch == "1" else s0(), t)
    return t


def arity(t: Term) -> int:
    if isinstance(t, Init):
        return INIT_ARITY.get(t.name, 0)
    if isinstance(t, Proj):
        return t.n
    if isinstance(t, Compose):
        return arity(t.inners[0]) if t.inners else 0
    if isinstance(t, AppendRec):
        return arity(t.g) + 1
    if isinstance(t, (IterLenRec, CountRec)):
        return arity(t.g) + 1
    if isinstance(t, LeastSearch):
        return arity(t.bound)
    raise TermError(f"not a term: {t!r}")


@dataclass(frozen=True)
class Violation:
    path: str
    kind: str
    message: str


def in_bound_fragment(t: Term) -> bool:
    """Bound positions only admit length-monotone initial operations."""
    if isinstance(t, Init):
        return t.name in BOUND_FRAGMENT_INITS
    if isinstance(t, Proj):
        return True
    if isinstance(t, Compose):
        return in_bound_fragment(t.outer) and all(in_bound_fragment(i) for i in t.inners)
    return False


def validate(t: Term) -> list[Violation]:
    """Structural checks; an empty list means well-formed."""
    out: list[Violation] = []
    _validate(t, "", out)
    return out


def _validate(t: Term, path: str, out: list[Violation]) -> None:
    here = path or "root"
    if isinstance(t, Init):
        if t.name not in INIT_ARITY:
            out.append(Violation(here, "init", f"unknown initial operation {t.name!r}"))
    elif isinstance(t, Proj):
        if t.n < 1 or not (1 <= t.k <= t.n):
            out.append(Violation(here, "proj", f"projection {t.k} of {t.n} out of range"))
    elif isinstance(t, Compose):
        if not t.inners:
            out.append(Violation(here, "arity", "composition needs at least one inner term"))
        else:
            if arity(t.outer) != len(t.inners):
                out.append(Violation(
                    here, "arity",
                    f"outer arity {arity(t.outer)} but {len(t.inners)} inner terms"))
            r = arity(t.inners[0])
            for i, inner in enumerate(t.inners):
                if arity(inner) != r:
                    out.append(Violation(
                        f"{here}.inner[{i}]", "arity",
                        f"inner arity {arity(inner)} differs from {r}"))
        _validate(t.outer, f"{here}.outer", out)
        for i, inner in enumerate(t.inners):
            _validate(inner, f"{here}.inner[{i}]", out)
    elif isinstance(t, AppendRec):
        r = arity(t.g)
        for nm, sub in (("h0", t.h0), ("h1", t.h1)):
            if arity(sub) != r + 1:
                out.append(Violation(
                    f"{here}.{nm}", "arity",
                    f"step arity {arity(sub)}, wanted {r + 1}"))
        _validate(t.g, f"{here}.g", out)
        _validate(t.h0, f"{here}.h0", out)
        _validate(t.h1, f"{here}.h1", out)
    elif isinstance(t, IterLenRec):
        if t.level < 1:
            out.append(Violation(here, "level", "level must be at least 1"))
        r = arity(t.g)
        for nm, sub in (("h0", t.h0), ("h1", t.h1)):
            if arity(sub) != r + 2:
                out.append(Violation(
                    f"{here}.{nm}", "arity",
                    f"step arity {arity(sub)}, wanted {r + 2}"))
        if arity(t.bound) != r + 1:
            out.append(Violation(
                f"{here}.bound", "arity",
                f"bound arity {arity(t.bound)}, wanted {r + 1}"))
        if not in_bound_fragment(t.bound):
            out.append(Violation(f"{here}.bound", "bound", "bound term outside the bounding fragment"))
        _validate(t.g, f"{here}.g", out)
        _validate(t.h0, f"{here}.h0", out)
        _validate(t.h1, f"{here}.h1", out)
        _validate(t.bound, f"{here}.bound", out)
    elif isinstance(t, CountRec):
        if t.level < 1:
            out.append(Violation(here, "level", "level must be at least 1"))
        r = arity(t.g)
        if arity(t.h) != r + 2:
            out.append(Violation(
                f"{here}.h", "arity", f"step arity {arity(t.h)}, wanted {r + 2}"))
        if arity(t.bound) != r + 1:
            out.append(Violation(
                f"{here}.bound", "arity",
                f"bound arity {arity(t.bound)}, wanted {r + 1}"))
        if not in_bound_fragment(t.bound):
            out.append(Violation(f"{here}.bound", "bound", "bound term outside the bounding fragment"))
        _validate(t.g, f"{here}.g", out)
        _validate(t.h, f"{here}.h", out)
        _validate(t.bound, f"{here}.bound", out)
    elif isinstance(t, LeastSearch):
        if t.level < 1:
            out.append(Violation(here, "level", "level must be at least 1"))
        if arity(t.body) != arity(t.bound) + 1:
            out.append(Violation(
                f"{here}.body", "arity",
                f"body arity {arity(t.body)}, wanted {arity(t.bound) + 1}"))
        if not in_bound_fragment(t.bound):
            out.append(Violation(f"{here}.bound", "bound", "bound term outside the bounding fragment"))
        _validate(t.body, f"{here}.body", out)
        _validate(t.bound, f"{here}.bound", out)
    else:
        out.append(Violation(here, "node", f"not a term: {t!r}"))


def ensure_valid(t: Term) -> Term:
    problems = validate(t)
    if problems:
        first = problems[0]
        raise TermError(f"{first.path}: {first.message} ({len(problems)} problem(s))")
    return t


def length_bound(t: Term, arg_lens: list[int], guard_bits: int = DEFAULT_GUARD_BITS) -> int:
    """Static bound on the output bit length given argument bit lengths.

    Sound: for arguments within the given lengths, the value of the term
    never has more bits than the returned number.
    """
    if len(arg_lens) != arity(t):
        raise TermError(f"{arity(t)} argument lengths expected, got {len(arg_lens)}")
    return _length_bound(t, [int(n) for n in arg_lens], guard_bits)


def _length_bound(t: Term, lens: list[int], guard: int) -> int:
    if isinstance(t, Init):
        name = t.name
        if name == "z" or name == "const0":
            return 0
        if name == "const1":
            return 1
        if name in ("s0", "s1"):
            return _guard_len(lens[0] + 1, guard)
        if name == "len":
            return lens[0].bit_length()
        if name == "bit":
            return 1
        if name == "smash":
            return _guard_len(lens[0] * lens[1] + 1, guard)
        if name == "msp":
            return lens[0]
        if name == "half":
            return max(lens[0] - 1, 0)
        if name == "mult":
            return _guard_len(lens[0] + lens[1], guard)
        raise TermError(f"unknown initial operation {name!r}")
    if isinstance(t, Proj):
        return lens[t.k - 1]
    if isinstance(t, Compose):
        inner_lens = [_length_bound(i, lens, guard) for i in t.inners]
        return _length_bound(t.outer, inner_lens, guard)
    if isinstance(t, AppendRec):
        return _guard_len(_length_bound(t.g, lens[1:], guard) + lens[0], guard)
    if isinstance(t, IterLenRec):
        # the bound sees the notation prefix, whose length is the stage count
        prefix_max = iter_len_max(t.level + 1, lens[0])
        return _length_bound(t.bound, [prefix_max] + lens[1:], guard)
    if isinstance(t, CountRec):
        step_max = iter_len_max(t.level + 1, lens[0])
        return _length_bound(t.bound, [step_max.bit_length()] + lens[1:], guard)
    if isinstance(t, LeastSearch):
        space = search_space(t.level, _length_bound(t.bound, lens, guard))
        return space.bit_length()
    raise TermError(f"not a term: {t!r}")


def search_space(level: int, bound_len: int) -> int:
    """Largest candidate a LeastSearch at this level can return, given the
    bit length of its bound term's value."""
    if bound_len == 0:
        return 0
    return iter_len_max(level + 1, bound_len)


def _guard_len(n: int, guard: int) -> int:
    if n > guard:
        raise BoundExceeded(f"length bound {n} exceeds the guard of {guard} bits")
    return n


@dataclass(frozen=True)
class ClassTag:
    kind: str  # AC0, LD, MD or UNC
    level: int | None


def classify(t: Term) -> ClassTag:
    """Tightest certified circuit class for the term.

    Append-only terms sit in the constant-depth class.  Recursion nodes pull
    the tag down to the smallest level that occurs; mult switches to the
    majority-gate family.
    """
    if validate(t):
        return ClassTag("UNC", None)
    has_mult = False
    levels: list[int] = []
    stack: list[Term] = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Init):
            has_mult = has_mult or node.name == "mult"
        elif isinstance(node, Compose):
            stack.append(node.outer)
            stack.extend(node.inners)
        elif isinstance(node, AppendRec):
            stack.extend((node.g, node.h0, node.h1))
        elif isinstance(node, IterLenRec):
            levels.append(node.level)
            stack.extend((node.g, node.h0, node.h1, node.bound))
        elif isinstance(node, CountRec):
            levels.append(node.level)
            stack.extend((node.g, node.h, node.bound))
        elif isinstance(node, LeastSearch):
            levels.append(node.level)
            stack.extend((node.body, node.bound))
    if has_mult:
        return ClassTag("MD", min(levels) if levels else 1)
    if levels:
        return ClassTag("LD", min(levels))
    return ClassTag("AC0", None)


def class_rank(tag: ClassTag) -> tuple[int, int]:
    """Total order on tags; smaller is a stronger claim."""
    order = {"AC0": 0, "LD": 1, "MD": 2, "UNC": 3}
    return (order[tag.kind], -(tag.level or 0))


def desugar(t: Term) -> Term:
    """Rewrite CountRec and LeastSearch into the core constructors."""
    return _desugar(t, {})


def _desugar(t: Term, seen: dict) -> Term:
    # sharing matters: a node reached twice must desugar to one object,
    # or downstream memo tables keyed on identity split needlessly
    got = seen.get(id(t))
    if got is not None:
        return got[1]
    out = _desugar_node(t, seen)
    seen[id(t)] = (t, out)
    return out


def _desugar_node(t: Term, seen: dict) -> Term:
    if isinstance(t, (Init, Proj)):
        return t
    if isinstance(t, Compose):
        outer = _desugar(t.outer, seen)
        inners = tuple(_desugar(i, seen) for i in t.inners)
        if outer is t.outer and all(a is b for a, b in zip(inners, t.inners)):
            return t
        return Compose(outer, inners)
    if isinstance(t, AppendRec):
        g, h0, h1 = _desugar(t.g, seen), _desugar(t.h0, seen), _desugar(t.h1, seen)
        if g is t.g and h0 is t.h0 and h1 is t.h1:
            return t
        return AppendRec(g, h0, h1)
    if isinstance(t, IterLenRec):
        g, h0, h1 = _desugar(t.g, seen), _desugar(t.h0, seen), _desugar(t.h1, seen)
        bound = _desugar(t.bound, seen)
        if g is t.g and h0 is t.h0 and h1 is t.h1 and bound is t.bound:
            return t
        return IterLenRec(t.level, g, h0, h1, bound)
    if isinstance(t, CountRec):
        lowered = CountRec(t.level, _desugar(t.g, seen), _desugar(t.h, seen), _desugar(t.bound, seen))
        return _desugar(_desugar_count(lowered), seen)
    if isinstance(t, LeastSearch):
        lowered = LeastSearch(t.level, _desugar(t.body, seen), _desugar(t.bound, seen))
        return _desugar(_desugar_search(lowered), seen)
    raise TermError(f"not a term: {t!r}")


def _desugar_count(t: CountRec) -> IterLenRec:
    # the notation prefix has length equal to the step index, so the step
    # function recovers its counter through len of the prefix
    r = arity(t.g)
    ar = r + 2
    lifted_h = compose(
        t.h,
        compose(length(), proj(ar, 1)),
        *[proj(ar, k) for k in range(2, ar + 1)],
    )
    br = r + 1
    lifted_bound = compose(
        t.bound,
        compose(length(), proj(br, 1)),
        *[proj(br, k) for k in range(2, br + 1)],
    )
    return IterLenRec(t.level, t.g, lifted_h, lifted_h, lifted_bound)


def _desugar_search(t: LeastSearch) -> Term:
    from .builders import least_search_core

    return least_search_core(t.level, t.body, t.bound)


def used_positions(t: Term, cache: dict | None = None) -> tuple[int, ...]:
    """Argument positions (1-based) that can influence the term's value.

    Evaluation and compilation key their memo tables on these positions
    only, which is what keeps nested position-indexed recursions from
    going quadratic.  The cache maps id(node) to (node, positions); pass
    the same dict across calls to share work, and keep it alive for as
    long as the ids are used.
    """
    if cache is None:
        cache = {}
    got = cache.get(id(t))
    if got is not None:
        return got[1]
    ups = _used_positions(t, cache)
    cache[id(t)] = (t, ups)
    return ups


def _used_positions(t: Term, cache: dict) -> tuple[int, ...]:
    if isinstance(t, Init):
        if t.name in ("z", "const0", "const1"):
            return ()
        if t.name in ("s0", "s1", "len", "half"):
            return (1,)
        return (1, 2)
    if isinstance(t, Proj):
        return (t.k,)
    if isinstance(t, Compose):
        outer_used = used_positions(t.outer, cache)
        got: set[int] = set()
        for i, inner in enumerate(t.inners, start=1):
            if i in outer_used:
                got.update(used_positions(inner, cache))
        return tuple(sorted(got))
    if isinstance(t, AppendRec):
        got = {1}
        for h in (t.h0, t.h1):
            got.update(p for p in used_positions(h, cache) if p >= 2)
        got.update(p + 1 for p in used_positions(t.g, cache))
        return tuple(sorted(got))
    if isinstance(t, (IterLenRec, CountRec)):
        r = arity(t.g)
        steps = (t.h0, t.h1) if isinstance(t, IterLenRec) else (t.h,)
        got = {1}
        for h in steps:
            got.update(p for p in used_positions(h, cache) if 2 <= p <= r + 1)
        got.update(p + 1 for p in used_positions(t.g, cache))
        got.update(p for p in used_positions(t.bound, cache) if p >= 2)
        return tuple(sorted(got))
    if isinstance(t, LeastSearch):
        got = set(used_positions(t.bound, cache))
        got.update(p - 1 for p in used_positions(t.body, cache) if p >= 2)
        return tuple(sorted(got))
    raise TermError(f"not a term: {t!r}")


_HEADS = {
    "z": ("init", "z"),
    "s0": ("init", "s0"),
    "s1": ("init", "s1"),
    "len": ("init", "len"),
    "bit": ("init", "bit"),
    "smash": ("init", "smash"),
    "msp": ("init", "msp"),
    "half": ("init", "half"),
    "const0": ("init", "const0"),
    "const1": ("init", "const1"),
    "mult": ("init", "mult"),
}


def emit_term(t: Term) -> str:
    if isinstance(t, Init):
        return f"({t.name})"
    if isinstance(t, Proj):
        return f"(proj {t.n} {t.k})"
    if isinstance(t, Compose):
        parts = " ".join(emit_term(x) for x in (t.outer, *t.inners))
        return f"(compose {parts})"
    if isinstance(t, AppendRec):
        return f"(crn {emit_term(t.g)} {emit_term(t.h0)} {emit_term(t.h1)})"
    if isinstance(t, IterLenRec):
        return (f"(wbrn {t.level} {emit_term(t.g)} {emit_term(t.h0)} "
                f"{emit_term(t.h1)} {emit_term(t.bound)})")
    if isinstance(t, CountRec):
        return f"(succrec {t.level} {emit_term(t.g)} {emit_term(t.h)} {emit_term(t.bound)})"
    if isinstance(t, LeastSearch):
        return f"(musearch {t.level} {emit_term(t.body)} {emit_term(t.bound)})"
    raise TermError(f"not a term: {t!r}")


def _tokenize(text: str):
    tokens = []
    line = 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in " \t\r":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            tokens.append((c, line))
            i += 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            tokens.append((text[i:j], line))
            i = j
    return tokens


def parse_term(text: str) -> Term:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input")
    term, rest = _parse(tokens, 0)
    if rest != len(tokens):
        raise ParseError("trailing content after term", line=tokens[rest][1])
    return term


def _parse(tokens, pos: int):
    if pos >= len(tokens):
        raise ParseError("unexpected end of input", line=tokens[-1][1])
    tok, line = tokens[pos]
    if tok != "(":
        raise ParseError(f"expected '(' but found {tok!r}", line=line)
    pos += 1
    if pos >= len(tokens):
        raise ParseError("unterminated term", line=line)
    head, head_line = tokens[pos]
    pos += 1
    if head in _HEADS:
        term: Term = Init(_HEADS[head][1])
        return term, _expect_close(tokens, pos, head_line)
    if head == "proj":
        n, pos = _parse_int(tokens, pos, head_line)
        k, pos = _parse_int(tokens, pos, head_line)
        return Proj(n, k), _expect_close(tokens, pos, head_line)
    if head == "compose":
        parts = []
        while pos < len(tokens) and tokens[pos][0] == "(":
            sub, pos = _parse(tokens, pos)
            parts.append(sub)
        if len(parts) < 2:
            raise ParseError("compose needs an outer and at least one inner term", line=head_line)
        return Compose(parts[0], tuple(parts[1:])), _expect_close(tokens, pos, head_line)
    if head == "crn":
        g, pos = _parse(tokens, pos)
        h0, pos = _parse(tokens, pos)
        h1, pos = _parse(tokens, pos)
        return AppendRec(g, h0, h1), _expect_close(tokens, pos, head_line)
    if head == "wbrn":
        level, pos = _parse_int(tokens, pos, head_line)
        g, pos = _parse(tokens, pos)
        h0, pos = _parse(tokens, pos)
        h1, pos = _parse(tokens, pos)
        bound, pos = _parse(tokens, pos)
        return IterLenRec(level, g, h0, h1, bound), _expect_close(tokens, pos, head_line)
    if head == "succrec":
        level, pos = _parse_int(tokens, pos, head_line)
        g, pos = _parse(tokens, pos)
        h, pos = _parse(tokens, pos)
        bound, pos = _parse(tokens, pos)
        return CountRec(level, g, h, bound), _expect_close(tokens, pos, head_line)
    if head == "musearch":
        level, pos = _parse_int(tokens, pos, head_line)
        body, pos = _parse(tokens, pos)
        bound, pos = _parse(tokens, pos)
        return LeastSearch(level, body, bound), _expect_close(tokens, pos, head_line)
    raise ParseError(f"unknown term head {head!r}", line=head_line)


def _parse_int(tokens, pos: int, line: int):
    if pos >= len(tokens):
        raise ParseError("expected a number", line=line)
    tok, tok_line = tokens[pos]
    if not tok.isdigit():
        raise ParseError(f"expected a number, found {tok!r}", line=tok_line)
    return int(tok), pos + 1


def _expect_close(tokens, pos: int, line: int) -> int:
    if pos >= len(tokens) or tokens[pos][0] != ")":
        raise ParseError("expected ')'", line=tokens[pos][1] if pos < len(tokens) else line)
    return pos + 1
