"""Numeric core: bit lengths, iterated lengths, bit access and smash.

Values are plain Python ints restricted to naturals.  Every operation that
can blow up in size takes a guard expressed in bits; the default allows a
megabit, which is far beyond anything the analysis paths need but small
enough to fail fast on runaway recursion.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import BoundExceeded

DEFAULT_GUARD_BITS = 2**20


def check_natural(x: int) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise ValueError(f"expected a natural number, got {x!r}")
    return x


def check_guard(x: int, guard_bits: int = DEFAULT_GUARD_BITS) -> int:
    if x.bit_length() > guard_bits:
        raise BoundExceeded(
            f"value needs {x.bit_length()} bits, guard allows {guard_bits}"
        )
    return x


def bit_len(x: int) -> int:
    """Binary notation length; zero has the empty notation."""
    return check_natural(x).bit_length()


def iter_len(m: int, x: int) -> int:
    """Apply bit_len m times."""
    check_natural(x)
    v = x
    for _ in range(m):
        v = v.bit_length()
    return v


class BitAccess(NamedTuple):
    msp: int
    bit: int
    half: int


def bit_access(x: int, i: int) -> BitAccess:
    """Most significant part past position i, the bit at i, and the half."""
    check_natural(x)
    check_natural(i)
    shifted = x >> i
    return BitAccess(shifted, shifted & 1, x >> 1)


def smash(x: int, y: int, guard_bits: int = DEFAULT_GUARD_BITS) -> int:
    """2 to the product of the two notation lengths."""
    exponent = bit_len(x) * bit_len(y)
    if exponent + 1 > guard_bits:
        raise BoundExceeded(
            f"smash result needs {exponent + 1} bits, guard allows {guard_bits}"
        )
    return 1 << exponent


def iter_len_max(m: int, n: int) -> int:
    """iter_len(m, 2**n - 1) without building the big value.

    The first application of bit_len sends 2**n - 1 to n, so the rest is
    m - 1 ordinary iterations on n itself.
    """
    check_natural(m)
    check_natural(n)
    if m == 0:
        raise ValueError("need at least one length application")
    if n == 0:
        return 0
    return iter_len(m - 1, n)


def guarded_pow2(e: int, guard_bits: int = DEFAULT_GUARD_BITS) -> int:
    check_natural(e)
    if e + 1 > guard_bits:
        raise BoundExceeded(f"2^{e} needs {e + 1} bits, guard allows {guard_bits}")
    return 1 << e


def to_hex(x: int) -> str:
    return format(check_natural(x), "x")


def from_hex(s: str) -> int:
    if not s or not all(c in "0123456789abcdef" for c in s):
        raise ValueError(f"not a lowercase hex numeral: {s!r}")
    return int(s, 16)
