"""Structural tests for the term IR: arity, validation, bounds, classes,
desugaring and the s-expression surface syntax."""

from __future__ import annotations

import pytest

from ldc.errors import BoundExceeded, ParseError
from ldc.terms import (
    AppendRec,
    ClassTag,
    Compose,
    CountRec,
    Init,
    IterLenRec,
    LeastSearch,
    Proj,
    arity,
    bit,
    classify,
    class_rank,
    compose,
    const0,
    const1,
    desugar,
    emit_term,
    half,
    in_bound_fragment,
    length,
    length_bound,
    msp,
    mult,
    nat_term,
    parse_term,
    proj,
    s0,
    s1,
    smash_op,
    validate,
    z,
)

# the one-argument bit flipper, used in several tests; its base case takes
# no side parameters, so g has arity zero
FLIP = AppendRec(g=const0(), h0=nat_term(1, 1), h1=nat_term(0, 1))


def test_initial_arities():
    assert arity(z()) == 1
    assert arity(s0()) == 1
    assert arity(length()) == 1
    assert arity(half()) == 1
    assert arity(bit()) == 2
    assert arity(smash_op()) == 2
    assert arity(msp()) == 2
    assert arity(mult()) == 2
    assert arity(const0()) == 0
    assert arity(const1()) == 0
    assert arity(proj(3, 2)) == 3


def test_schema_arities():
    assert arity(FLIP) == 1
    rec = IterLenRec(
        level=2,
        g=compose(z(), proj(1, 1)),
        h0=proj(3, 3),
        h1=proj(3, 3),
        bound=compose(smash_op(), proj(2, 1), proj(2, 2)),
    )
    assert arity(rec) == 2
    cnt = CountRec(level=1, g=compose(z(), proj(1, 1)), h=proj(3, 3), bound=proj(2, 2))
    assert arity(cnt) == 2
    srch = LeastSearch(level=1, body=compose(bit(), proj(2, 2), proj(2, 1)), bound=proj(1, 1))
    assert arity(srch) == 1


def test_compose_arity_must_line_up():
    bad = Compose(outer=bit(), inners=(proj(1, 1),))  # bit wants two inners
    assert any(v.kind == "arity" for v in validate(bad))


def test_inners_must_share_arity():
    bad = Compose(outer=bit(), inners=(proj(1, 1), proj(2, 1)))
    assert any(v.kind == "arity" for v in validate(bad))


def test_proj_index_range():
    assert any(v.kind == "proj" for v in validate(Proj(2, 3)))
    assert any(v.kind == "proj" for v in validate(Proj(2, 0)))
    assert validate(proj(2, 2)) == []


def test_level_must_be_positive():
    rec = CountRec(level=0, g=const0(), h=proj(2, 2), bound=nat_term(7, 1))
    assert any(v.kind == "level" for v in validate(rec))


def test_bound_position_restricted_to_bounding_fragment():
    assert in_bound_fragment(compose(smash_op(), s1(), s0()))
    assert not in_bound_fragment(bit())
    assert not in_bound_fragment(FLIP)
    rec = IterLenRec(level=1, g=const0(), h0=proj(2, 2), h1=proj(2, 2), bound=compose(bit(), proj(1, 1), proj(1, 1)))
    assert any(v.kind == "bound" for v in validate(rec))


def test_validate_accepts_flip():
    assert validate(FLIP) == []


def test_length_bound_initials():
    assert length_bound(length(), [255]) == 8
    assert length_bound(smash_op(), [8, 8]) == 65
    assert length_bound(s1(), [4]) == 5
    assert length_bound(compose(s1(), s0()), [4]) == 6
    assert length_bound(bit(), [64, 8]) == 1
    assert length_bound(msp(), [64, 8]) == 64
    assert length_bound(half(), [64]) == 63
    assert length_bound(half(), [0]) == 0
    assert length_bound(z(), [999]) == 0
    assert length_bound(mult(), [8, 8]) == 16


def test_length_bound_append_rec_adds_driver_length():
    # one appended bit per driver notation position on top of the base
    assert length_bound(FLIP, [10]) == 10
    wide = AppendRec(g=proj(1, 1), h0=nat_term(0, 2), h1=nat_term(0, 2))
    assert length_bound(wide, [6, 9]) == 15


def test_length_bound_iter_len_rec_is_bound_of_bound():
    rec = IterLenRec(
        level=1,
        g=compose(z(), proj(1, 1)),
        h0=proj(3, 3),
        h1=proj(3, 3),
        bound=compose(smash_op(), proj(2, 1), proj(2, 2)),
    )
    # prefix argument of the bound has length at most iter_len(2, 2^16-1) = 5
    assert length_bound(rec, [16, 8]) == 5 * 8 + 1


def test_length_bound_guard():
    with pytest.raises(BoundExceeded):
        length_bound(compose(smash_op(), smash_op(), smash_op()),
                     [2048, 2048], guard_bits=4096)


def test_classify_append_only_is_constant_depth():
    assert classify(FLIP) == ClassTag("AC0", None)


def test_classify_picks_min_level():
    inner = IterLenRec(level=3, g=const0(), h0=proj(2, 2), h1=proj(2, 2), bound=nat_term(3, 1))
    outer = IterLenRec(level=2, g=const0(), h0=compose(inner, proj(2, 1)), h1=proj(2, 2), bound=nat_term(3, 1))
    assert classify(outer) == ClassTag("LD", 2)


def test_classify_mult_forces_majority_tag():
    t = compose(mult(), proj(2, 1), proj(2, 2))
    assert classify(t) == ClassTag("MD", 1)
    rec = IterLenRec(level=3, g=t, h0=proj(4, 4), h1=proj(4, 4), bound=nat_term(3, 3))
    assert classify(rec) == ClassTag("MD", 3)


def test_class_rank_replacement_monotone():
    # swapping a recursive subterm for an append-only one never raises the rank
    inner = CountRec(level=2, g=const0(), h=proj(2, 2), bound=nat_term(3, 1))
    host = compose(s0(), compose(inner, proj(1, 1)))
    swapped = compose(s0(), compose(length(), proj(1, 1)))
    assert class_rank(classify(swapped)) <= class_rank(classify(host))


def test_desugar_count_rec_produces_iter_len_rec_only():
    cnt = CountRec(level=1, g=compose(z(), proj(1, 1)), h=proj(3, 3), bound=proj(2, 2))
    des = desugar(cnt)
    kinds = collect_kinds(des)
    assert CountRec not in kinds and LeastSearch not in kinds
    assert IterLenRec in kinds


def test_desugar_least_search_produces_core_only():
    srch = LeastSearch(level=1, body=compose(bit(), proj(2, 2), proj(2, 1)), bound=proj(1, 1))
    des = desugar(srch)
    kinds = collect_kinds(des)
    assert LeastSearch not in kinds and CountRec not in kinds


def test_desugar_idempotent():
    srch = LeastSearch(level=2, body=compose(bit(), proj(2, 2), proj(2, 1)), bound=proj(1, 1))
    once = desugar(srch)
    assert desugar(once) == once


def collect_kinds(t):
    seen = set()
    stack = [t]
    while stack:
        node = stack.pop()
        seen.add(type(node))
        if isinstance(node, Compose):
            stack.append(node.outer)
            stack.extend(node.inners)
        elif isinstance(node, AppendRec):
            stack.extend([node.g, node.h0, node.h1])
        elif isinstance(node, IterLenRec):
            stack.extend([node.g, node.h0, node.h1, node.bound])
        elif isinstance(node, CountRec):
            stack.extend([node.g, node.h, node.bound])
        elif isinstance(node, LeastSearch):
            stack.extend([node.body, node.bound])
    return seen


def test_emit_matches_expected_surface():
    assert emit_term(z()) == "(z)"
    assert emit_term(proj(3, 1)) == "(proj 3 1)"
    assert emit_term(FLIP) == "(crn (const0) (compose (s1) (compose (z) (proj 1 1))) (compose (z) (proj 1 1)))"


def test_parse_emit_round_trip_handwritten():
    for t in [
        z(), s1(), bit(), proj(4, 2), FLIP,
        IterLenRec(level=2, g=const0(), h0=proj(2, 2), h1=proj(2, 2), bound=nat_term(3, 1)),
        CountRec(level=1, g=const0(), h=proj(2, 2), bound=nat_term(3, 1)),
        LeastSearch(level=1, body=compose(bit(), proj(2, 2), proj(2, 1)), bound=proj(1, 1)),
        compose(smash_op(), s0(), s1()),
    ]:
        assert parse_term(emit_term(t)) == t


def test_parse_allows_whitespace_and_comments():
    text = """
    ; bit flipper
    (crn (const0)
         (compose (s1) (compose (z) (proj 1 1)))  ; one branch
         (compose (z) (proj 1 1)))
    """
    assert parse_term(text) == FLIP


def test_parse_errors_mention_line():
    with pytest.raises(ParseError) as e:
        parse_term("(crn (z)")
    assert "line" in str(e.value)
    with pytest.raises(ParseError):
        parse_term("(frobnicate)")
    with pytest.raises(ParseError):
        parse_term("(proj 1)")
    with pytest.raises(ParseError):
        parse_term("(z) (z)")
