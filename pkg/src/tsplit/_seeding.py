"""Deterministic 64-bit seed derivation.

Per-replication seeds are a splitmix64-style mix of (base seed, replication
index), so parallel workers never share or correlate streams and results do
not depend on scheduling. All public entry points validate that seeds fit in
an unsigned 64-bit word.
"""

import operator

from .errors import ParameterError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def as_seed(seed) -> int:
    """Validate and return ``seed`` as an unsigned 64-bit integer."""
    try:
        value = operator.index(seed)
    except TypeError:
        raise ParameterError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= value < (1 << 64):
        raise ParameterError(f"seed must fit in an unsigned 64-bit word, got {value}")
    return value


def splitmix64(x: int) -> int:
    """One splitmix64 output for state ``x`` (Steele et al. finalizer)."""
    z = (x + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def replication_seed(base_seed: int, rep: int) -> int:
    """Seed for replication ``rep``: ``base_seed XOR splitmix64(rep)``."""
    return (as_seed(base_seed) ^ splitmix64(operator.index(rep))) & _MASK64


def substream_seed(seed: int, tag: int) -> int:
    """Derive an independent sub-seed for a tagged consumer of ``seed``."""
    return splitmix64((as_seed(seed) ^ splitmix64(operator.index(tag))) & _MASK64)
