"""Signed unit directions on Z^d.

Direction index convention used everywhere in this package: index ``2*a``
encodes ``+e_{a+1}`` and index ``2*a + 1`` encodes ``-e_{a+1}``, so the
opposite of direction ``j`` is ``j ^ 1``.  JSON files store steps in the
signed-axis form ``+(a+1)`` / ``-(a+1)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ConfigError

MAX_DIM = 4


def check_dim(d: int) -> int:
    if not isinstance(d, int) or not 1 <= d <= MAX_DIM:
        raise ConfigError(f"dimension must be an integer in 1..{MAX_DIM}, got {d!r}")
    return d


@lru_cache(maxsize=None)
def step_table(d: int) -> np.ndarray:
    """(2d, d) table mapping direction index to its lattice step vector."""
    check_dim(d)
    table = np.zeros((2 * d, d), dtype=np.int64)
    for a in range(d):
        table[2 * a, a] = 1
        table[2 * a + 1, a] = -1
    table.setflags(write=False)
    return table


def direction_index(axis: int, sign: int) -> int:
    return 2 * axis + (0 if sign > 0 else 1)


def encode_signed_axis(j: int) -> int:
    axis = j // 2 + 1
    return axis if j % 2 == 0 else -axis


def decode_signed_axis(s: int, d: int) -> int:
    axis = abs(int(s))
    if s == 0 or axis > d:
        raise ConfigError(f"signed axis {s!r} out of range for dimension {d}")
    return direction_index(axis - 1, 1 if s > 0 else -1)


def check_site(x, d: int) -> np.ndarray:
    """Validate a lattice site and return it as an int64 vector."""
    arr = np.asarray(x, dtype=np.int64)
    if arr.shape != (d,):
        raise ConfigError(f"site {x!r} does not match dimension {d}")
    return arr
