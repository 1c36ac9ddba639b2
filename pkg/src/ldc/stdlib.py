"""A small library of named terms.

Bit positions are always recovered from notation prefixes, so every
definition here is a closed term over the core constructors; nothing
depends on evaluator internals.  The catalogue carries, per term, the
measured size fit (size stays under size_c * n**size_deg when compiled
with all arguments n bits wide) and the class its syntax certifies.

The same terms ship as text files under data/terms/<version>/ in the
canonical emitted format, one term per file, named after their
catalogue key.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .builders import (
    and01,
    bit_at,
    is_pos,
    not01,
    or01,
    search_state,
    select,
    shift_by,
    tab_apply,
    xor01,
)
from .errors import TermError
from .terms import (
    AppendRec,
    CountRec,
    IterLenRec,
    LeastSearch,
    Term,
    arity,
    classify,
    compose,
    const0,
    ensure_valid,
    length,
    nat_term,
    proj,
    s0,
    s1,
)

TERMS_VERSION = "v1"


def complement() -> Term:
    """Flip every bit below the argument's length."""
    return AppendRec(g=const0(), h0=nat_term(1, 1), h1=nat_term(0, 1))


def _pair_driver() -> Term:
    # length is len(x) + len(y) + 1, enough positions for any bitwise
    # combination of the two arguments and a carry
    return shift_by(shift_by(nat_term(1, 2), proj(2, 1)), proj(2, 2))


def _bitwise(connective) -> Term:
    j, x, y = proj(4, 1), proj(4, 3), proj(4, 4)
    body = connective(bit_at(x, j), bit_at(y, j))
    return tab_apply(body, _pair_driver(), proj(2, 1), proj(2, 2))


def bitand() -> Term:
    # the first argument's own positions suffice here
    j, x, y = proj(4, 1), proj(4, 3), proj(4, 4)
    body = and01(bit_at(x, j), bit_at(y, j))
    return tab_apply(body, proj(2, 1), proj(2, 1), proj(2, 2))


def bitor() -> Term:
    return _bitwise(or01)


def bitxor() -> Term:
    return _bitwise(xor01)


def leq() -> Term:
    """1 if x <= y else 0: compare the top differing bit."""
    d = bitxor()
    ybit = bit_at(compose(s0(), proj(2, 2)), compose(length(), d))
    return select(is_pos(d), ybit, nat_term(1, 2))


def eq() -> Term:
    return not01(is_pos(bitxor()))


def cond() -> Term:
    """Second argument if the first is positive, else the third."""
    return select(is_pos(proj(3, 1)), proj(3, 2), proj(3, 3))


def minimum() -> Term:
    return select(leq(), proj(2, 1), proj(2, 2))


def add() -> Term:
    """Carry-lookahead addition.

    The carry into position j is the generate bit at the highest
    carry-deciding position below j, found as the length of the mask of
    non-propagating positions; the mask is itself tabulated from a
    prefix of the driver, so each output bit is a constant-depth
    formula.
    """
    j, q, x, y = proj(4, 1), proj(4, 2), proj(4, 3), proj(4, 4)
    ii, xx, yy = proj(4, 1), proj(4, 3), proj(4, 4)
    deciders = not01(xor01(bit_at(xx, ii), bit_at(yy, ii)))
    mask = tab_apply(deciders, q, x, y)
    gen = compose(bitand(), x, y)
    carry = bit_at(compose(s0(), gen), compose(length(), mask))
    body = xor01(xor01(bit_at(x, j), bit_at(y, j)), carry)
    return tab_apply(body, _pair_driver(), proj(2, 1), proj(2, 2))


def pad() -> Term:
    """x shifted up by the length of y."""
    return shift_by(proj(2, 1), proj(2, 2))


def concat() -> Term:
    """x followed by the notation of y."""
    return compose(bitor(), pad(), proj(2, 2))


def stage_counter(level: int) -> Term:
    """All-ones value with one bit per recursion stage; its length is
    the (level+1)-iterated length of the argument."""
    h = compose(s1(), proj(2, 2))
    return IterLenRec(
        level=level,
        g=const0(),
        h0=h,
        h1=h,
        bound=compose(s1(), compose(s0(), proj(1, 1))),
    )


def mu_search_term(level: int, body: Term, bound: Term) -> Term:
    """Least w up to the iterated length of the bound's value with
    body(w, args) positive, 0 when none exists."""
    t = LeastSearch(level=level, body=body, bound=bound)
    ensure_valid(t)
    return t


def mu_found_term(level: int, body: Term, bound: Term) -> Term:
    """Companion existence flag for mu_search_term, 1 when some
    candidate in the search space satisfies the body."""
    ensure_valid(LeastSearch(level=level, body=body, bound=bound))
    state, mterm = search_state(level, body, bound)
    r = arity(bound)
    sides = [proj(r, k) for k in range(1, r + 1)]
    return or01(is_pos(state), is_pos(compose(body, mterm, *sides)))


def witness_loop_term(level: int, step: Term, start_bound: Term, driver_bound: Term) -> Term:
    """Clamped iteration: start at min(c, start_bound(a)), then apply
    step for as many stages as the iterated length of driver_bound(a, c),
    taking min with c after every stage.

    The result maps (a, c); step sees (stage, a, previous value).
    """
    if arity(step) != 3:
        raise TermError(f"step arity {arity(step)}, wanted 3")
    if arity(start_bound) != 1:
        raise TermError(f"start bound arity {arity(start_bound)}, wanted 1")
    if arity(driver_bound) != 2:
        raise TermError(f"driver bound arity {arity(driver_bound)}, wanted 2")
    base = compose(minimum(), proj(2, 2), compose(start_bound, proj(2, 1)))
    clamped = compose(
        minimum(), proj(4, 3), compose(step, proj(4, 1), proj(4, 2), proj(4, 4))
    )
    cap = compose(s1(), compose(s0(), proj(3, 3)))
    loop = CountRec(level, base, clamped, cap)
    t = compose(loop, driver_bound, proj(2, 1), proj(2, 2))
    ensure_valid(t)
    return t


@dataclass(frozen=True)
class CatalogueEntry:
    name: str
    term: Term
    kind: str
    level: int | None
    size_c: float
    size_deg: int


_FITS = {
    # measured over n in 8..512, frozen with headroom
    "complement": (4.0, 1),
    "bitand": (2.0, 2),
    "bitor": (8.0, 2),
    "bitxor": (10.0, 2),
    "leq": (12.0, 2),
    "eq": (11.0, 2),
    "cond": (10.0, 2),
    "minimum": (16.0, 2),
    "add": (40.0, 2),
    "concat": (12.0, 2),
    "pad": (4.0, 2),
    "counter1": (40.0, 1),
    "counter2": (40.0, 1),
    "counter3": (40.0, 1),
    "musearch_bit": (200.0, 1),
    "witness_double": (80.0, 2),
}

_CAT: dict[str, CatalogueEntry] | None = None


def catalogue() -> dict[str, CatalogueEntry]:
    global _CAT
    if _CAT is None:
        terms = {
            "complement": complement(),
            "bitand": bitand(),
            "bitor": bitor(),
            "bitxor": bitxor(),
            "leq": leq(),
            "eq": eq(),
            "cond": cond(),
            "minimum": minimum(),
            "add": add(),
            "concat": concat(),
            "pad": pad(),
            "counter1": stage_counter(1),
            "counter2": stage_counter(2),
            "counter3": stage_counter(3),
            "musearch_bit": mu_search_term(1, bit_at(proj(2, 2), proj(2, 1)), proj(1, 1)),
            "witness_double": witness_loop_term(
                1,
                step=compose(s0(), proj(3, 3)),
                start_bound=compose(s1(), proj(1, 1)),
                driver_bound=nat_term(2**16, 2),
            ),
        }
        cat = {}
        for name, t in terms.items():
            tag = classify(t)
            c, d = _FITS[name]
            cat[name] = CatalogueEntry(name, t, tag.kind, tag.level, c, d)
        _CAT = cat
    return _CAT


def term_data_dir() -> Path:
    return Path(__file__).resolve().parent / "data" / "terms" / TERMS_VERSION
