"""SplitMix64 generator with vectorised block draws.

SplitMix64 is counter based: the k-th output is ``mix64(seed + k * GAMMA)``,
so a block of outputs can be produced with numpy uint64 arithmetic and still
match the scalar recurrence bit for bit.

Uniform variates take the top 53 bits and map them to ``(0, 1]``::

    u = ((x >> 11) + 1) * 2**-53

so ``-log(u)`` is always finite and ``u == 1`` yields a zero gap.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_NEG_53 = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int (taken mod 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed for sub-run ``index`` of a master seed.

    ``derive_seed(m, i) = mix64((m ^ mix64(i)) + GAMMA)``. Used for replicate
    and sweep-cell streams so that each cell is reproducible on its own.
    """
    if index < 0:
        raise ValueError("index must be nonnegative")
    return mix64(((master & MASK64) ^ mix64(index)) + GAMMA)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Seedable 64-bit generator; the only randomness source in the package."""

    def __init__(self, seed: int):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise TypeError("seed must be an integer")
        if not 0 <= int(seed) <= MASK64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self.seed = int(seed)
        self._state = int(seed)

    @property
    def state(self) -> int:
        return self._state

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return mix64(self._state)

    def u64_block(self, n: int) -> np.ndarray:
        """Next ``n`` outputs as a uint64 array; advances the state by ``n``."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        k = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self._state) + k * np.uint64(GAMMA)
            out = _mix64_array(z)
        self._state = (self._state + n * GAMMA) & MASK64
        return out

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in (0, 1]."""
        x = self.u64_block(n)
        return ((x >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_NEG_53

    def uniform_one(self) -> float:
        return ((self.next_u64() >> 11) + 1) * _TWO_NEG_53

    def exponential(self, rate: float, n: int) -> np.ndarray:
        return -np.log(self.uniform(n)) / rate

    def spawn(self) -> SplitMix64:
        """Child generator seeded from the next output of this one."""
        return SplitMix64(self.next_u64())

    def __repr__(self) -> str:
        return f"SplitMix64(seed={self.seed}, state={self._state})"
