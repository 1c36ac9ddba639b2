"""Toolkit for circuit families with slowly growing depth.

The package is organized around a small function algebra: initial
operations on naturals, composition, concatenation recursion on notation,
and length-bounded recursion graded by a level.  Terms in the algebra can
be evaluated directly, compiled to unbounded fan-in circuit families, and
analyzed against size and depth budgets.  A separate module implements the
finite witnessing game used to turn interactive strategies into short
advice strings.
"""

from .errors import (
    BoundExceeded,
    CompileError,
    ConstraintViolation,
    LdcError,
    ParseError,
    TermError,
    UncertifiedWidth,
)
from .naturals import DEFAULT_GUARD_BITS, bit_access, bit_len, from_hex, iter_len, smash, to_hex

__version__ = "0.1.0"

__all__ = [
    "BoundExceeded",
    "CompileError",
    "ConstraintViolation",
    "LdcError",
    "ParseError",
    "TermError",
    "UncertifiedWidth",
    "DEFAULT_GUARD_BITS",
    "bit_access",
    "bit_len",
    "from_hex",
    "iter_len",
    "smash",
    "to_hex",
    "__version__",
]
