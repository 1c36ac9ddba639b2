"""Oracle tests for the numeric core.

Expected values below were computed by the reference helpers in this file,
which deliberately avoid int.bit_length so they stay independent of the
implementation.
"""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldc.errors import BoundExceeded
from ldc.naturals import (
    DEFAULT_GUARD_BITS,
    bit_access,
    bit_len,
    from_hex,
    guarded_pow2,
    iter_len,
    smash,
    to_hex,
)


def ref_len(x: int) -> int:
    """Binary length via string formatting, not bit_length."""
    if x == 0:
        return 0
    return len(format(x, "b"))


def ref_iter_len(m: int, x: int) -> int:
    v = x
    for _ in range(m):
        v = ref_len(v)
    return v


def test_len_small_values():
    assert bit_len(0) == 0
    assert bit_len(1) == 1
    assert bit_len(7) == 3
    assert bit_len(8) == 4


def test_len_matches_reference_on_range():
    for x in range(0, 5000):
        assert bit_len(x) == ref_len(x)


def test_iter_len_frozen_examples():
    # frozen from ref_iter_len
    assert iter_len(1, 255) == 8
    assert iter_len(2, 255) == 4
    assert iter_len(3, 0) == 0
    assert iter_len(2, 2**16) == 5
    assert iter_len(3, 2**65536 - 1) == 5
    assert iter_len(4, 2**65536 - 1) == 3


def test_iter_len_zero_applications_is_identity():
    assert iter_len(0, 123456) == 123456


@given(st.integers(min_value=0, max_value=2**256), st.integers(min_value=1, max_value=6))
def test_iter_len_matches_reference(x, m):
    assert iter_len(m, x) == ref_iter_len(m, x)


@given(st.integers(min_value=3, max_value=2**128), st.integers(min_value=2, max_value=8))
def test_iter_len_strictly_shrinks_above_two(x, m):
    # len has fixed points at 1 and 2; anything above strictly shrinks
    assert bit_len(x) < x
    assert iter_len(m, x) <= iter_len(m - 1, x)


def test_bit_access_frozen_examples():
    assert bit_access(13, 2) == (3, 1, 6)  # msp, bit, half
    assert bit_access(5, 1) == (2, 0, 2)
    assert bit_access(0, 0) == (0, 0, 0)
    assert bit_access(1, 0) == (1, 1, 0)


def test_bit_access_reconstruction_exhaustive_small():
    for x in range(512):
        for i in range(11):
            msp, bit, _half = bit_access(x, i)
            low = x % (1 << i)
            assert x == msp * (1 << i) + low
            assert bit == (x >> i) % 2


@settings(max_examples=200)
@given(st.integers(min_value=0, max_value=2**4096 - 1), st.integers(min_value=0, max_value=4200))
def test_bit_reconstruction_up_to_4096_bits(x, i):
    msp, bit, half = bit_access(x, i)
    assert x == msp * 2**i + (x % 2**i)
    assert bit in (0, 1)
    assert half == x // 2
    # reassemble from all bits
    if x < 2**128:
        rebuilt = 0
        for j in range(bit_len(x)):
            rebuilt |= bit_access(x, j)[1] << j
        assert rebuilt == x


def test_smash_frozen_examples():
    assert smash(2, 2) == 16  # 2^(2*2)
    assert smash(255, 255) == 2**64
    assert smash(0, 5) == 1  # 2^(0*3)
    assert smash(1, 1) == 2


@given(st.integers(min_value=0, max_value=2**64), st.integers(min_value=0, max_value=2**64))
def test_smash_commutes(x, y):
    assert smash(x, y) == smash(y, x)


@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=0, max_value=2**32))
def test_smash_length(x, y):
    assert bit_len(smash(x, y)) == bit_len(x) * bit_len(y) + 1


def test_guard_default_is_one_megabit():
    assert DEFAULT_GUARD_BITS == 2**20


def test_smash_guard_trips():
    big = 2**4096 - 1
    with pytest.raises(BoundExceeded):
        smash(big, big, guard_bits=4096)
    # same value passes with a roomier guard
    assert smash(3, 3, guard_bits=64) == 16


def test_guarded_pow2():
    assert guarded_pow2(10) == 1024
    with pytest.raises(BoundExceeded):
        guarded_pow2(2**30)


def test_hex_round_trip():
    rng = random.Random(7)
    for _ in range(200):
        x = rng.getrandbits(rng.randrange(1, 300))
        assert from_hex(to_hex(x)) == x
    assert to_hex(0) == "0"
    assert to_hex(255) == "ff"
    assert from_hex("ff") == 255
    assert from_hex("0") == 0


def test_hex_is_lowercase():
    assert to_hex(0xDEADBEEF) == "deadbeef"


def test_from_hex_rejects_garbage():
    with pytest.raises(ValueError):
        from_hex("xyz")
    with pytest.raises(ValueError):
        from_hex("")
