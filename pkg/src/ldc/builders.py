"""Generic combinators over the core term constructors.

Everything here expands into plain terms; no new evaluation rules are
introduced.  The key building blocks are a small boolean kit (0/1 values
encoded as one-bit naturals, connectives via shifts) and ``tabulate``,
which turns a per-position bit formula into an append recursion whose
step recovers its own position index from the notation prefix.
"""

from __future__ import annotations

from .errors import TermError
from .terms import (
    AppendRec,
    CountRec,
    Term,
    arity,
    bit,
    compose,
    half,
    length,
    msp,
    nat_term,
    proj,
    s1,
    s0,
)


def _common_arity(*terms: Term) -> int:
    if not terms:
        raise TermError("no terms given")
    r = arity(terms[0])
    for t in terms[1:]:
        if arity(t) != r:
            raise TermError(f"mixed arities {r} and {arity(t)}")
    return r


def not01(a: Term) -> Term:
    """1 - a for a one-bit value, as a right shift of 1 by a."""
    return compose(msp(), nat_term(1, arity(a)), a)


def and01(a: Term, b: Term) -> Term:
    _common_arity(a, b)
    return compose(msp(), b, not01(a))


def or01(a: Term, b: Term) -> Term:
    return not01(and01(not01(a), not01(b)))


def xor01(a: Term, b: Term) -> Term:
    return and01(or01(a, b), not01(and01(a, b)))


def is_zero(v: Term) -> Term:
    return compose(msp(), nat_term(1, arity(v)), compose(length(), v))


def is_pos(v: Term) -> Term:
    return not01(is_zero(v))


def bit_at(x: Term, i: Term) -> Term:
    _common_arity(x, i)
    return compose(bit(), x, i)


def len_chain(m: int) -> Term:
    """Unary m-fold iterated length."""
    if m < 0:
        raise TermError("negative fold count")
    t: Term = proj(1, 1)
    for _ in range(m):
        t = compose(length(), t)
    return t


def tabulate(bit_body: Term) -> Term:
    """Lay out one output bit per driver position.

    ``bit_body`` has arity 2 + s; the result has arity 1 + s and maps
    ``(r, ys)`` to the number whose bit j is ``bit_body(j, q, ys)`` for
    every j below the length of r, where q holds the top j bits of r.
    The step recomputes j as the length of the driver slice above the
    processed prefix, so no counter is threaded through the recursion.
    """
    s = arity(bit_body) - 2
    if s < 0:
        raise TermError("bit body needs arity at least 2")
    ar = s + 2
    p = proj(ar, 1)
    rr = proj(ar, 2)
    q = compose(msp(), rr, compose(length(), compose(s1(), p)))
    h = compose(
        bit_body,
        compose(length(), q),
        q,
        *[proj(ar, k) for k in range(3, ar + 1)],
    )
    raw = AppendRec(nat_term(0, s + 1), h, h)
    out = s + 1
    return compose(
        raw,
        proj(out, 1),
        proj(out, 1),
        *[proj(out, k) for k in range(2, out + 1)],
    )


def tab_apply(bit_body: Term, driver: Term, *sides: Term) -> Term:
    _common_arity(driver, *sides)
    if arity(bit_body) != 2 + len(sides):
        raise TermError(f"bit body arity {arity(bit_body)}, wanted {2 + len(sides)}")
    return compose(tabulate(bit_body), driver, *sides)


_SHIFT2 = AppendRec(proj(1, 1), nat_term(0, 2), nat_term(0, 2))


def shift_by(value: Term, by: Term) -> Term:
    """value * 2^len(by)."""
    _common_arity(value, by)
    return compose(_SHIFT2, by, value)


def select(c: Term, a: Term, b: Term) -> Term:
    """a if the one-bit value c is 1, else b; a and b are arbitrary."""
    r = _common_arity(c, a, b)
    driver = shift_by(shift_by(nat_term(1, r), a), b)
    j, cc, aa, bb = proj(5, 1), proj(5, 3), proj(5, 4), proj(5, 5)
    body = or01(and01(cc, bit_at(aa, j)), and01(not01(cc), bit_at(bb, j)))
    return tab_apply(body, driver, c, a, b)


def search_state(level: int, body: Term, bound: Term) -> tuple[Term, Term]:
    """Loop state of a least-witness search plus the final candidate.

    The state is 0 while nothing matched and 2w+1 after w matched first;
    candidates run from 0 up to but not including the iterated length of
    the bound's value, which is returned as the second term so callers
    can test it separately."""
    r = arity(bound)
    if arity(body) != r + 1:
        raise TermError(f"body arity {arity(body)}, wanted {r + 1}")
    mterm = compose(len_chain(level + 1), bound)

    ar = r + 2
    m_a = proj(ar, 1)
    w_a = proj(ar, ar)
    sides_a = [proj(ar, k) for k in range(2, r + 2)]
    hit = is_pos(compose(body, m_a, *sides_a))
    step = select(is_pos(w_a), w_a, select(hit, compose(s1(), m_a), nat_term(0, ar)))

    br = r + 1
    cap = compose(
        s1(), compose(s0(), compose(mterm, *[proj(br, k) for k in range(2, br + 1)]))
    )
    loop = _count_to_core(CountRec(level, nat_term(0, r), step, cap))
    sides = [proj(r, k) for k in range(1, r + 1)]
    return compose(loop, bound, *sides), mterm


def least_search_core(level: int, body: Term, bound: Term) -> Term:
    """Expand a least-witness search into counted recursion over the
    bound's iterated length, keeping the first hit in the state.

    The final candidate never enters the loop, so it is checked
    separately once the loop settles.
    """
    state, mterm = search_state(level, body, bound)
    r = arity(bound)
    sides = [proj(r, k) for k in range(1, r + 1)]
    found = is_pos(state)
    val = compose(half(), state)
    last = is_pos(compose(body, mterm, *sides))
    return select(found, val, select(last, mterm, nat_term(0, r)))


def _count_to_core(t: CountRec) -> Term:
    from .terms import _desugar_count

    return _desugar_count(t)
