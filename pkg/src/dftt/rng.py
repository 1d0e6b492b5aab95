"""MT19937 Mersenne Twister and per-task seed derivation.

Two engines share one definition of the generator:

* :class:`Mt19937State` steps a single 32-bit stream in pure Python.
* :func:`words_for_seeds` runs one independent stream per seed, vectorized over
  the seeds with numpy.  Experiments reseed every sequence this way
  (``seed_i = master + i``), so results never depend on how work is split.

Bits are taken from each 32-bit output MSB first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dftt.bitseq import BitSequence
from dftt.errors import InputError

N = 624
M = 397
MATRIX_A = 0x9908B0DF
UPPER_MASK = 0x80000000
LOWER_MASK = 0x7FFFFFFF
MASK32 = 0xFFFFFFFF
INIT_MULT = 1812433253


class Mt19937State:
    """Scalar MT19937 stream, initialized by the reference init_genrand recurrence."""

    __slots__ = ("mt", "index")

    def __init__(self, s: int):
        s &= MASK32
        mt = [0] * N
        mt[0] = s
        for i in range(1, N):
            prev = mt[i - 1]
            mt[i] = (INIT_MULT * (prev ^ (prev >> 30)) + i) & MASK32
        self.mt = mt
        self.index = N

    def _regenerate(self) -> None:
        mt = self.mt
        for i in range(N):
            y = (mt[i] & UPPER_MASK) | (mt[(i + 1) % N] & LOWER_MASK)
            v = mt[(i + M) % N] ^ (y >> 1)
            if y & 1:
                v ^= MATRIX_A
            mt[i] = v
        self.index = 0

    def next_u32(self) -> int:
        if self.index >= N:
            self._regenerate()
        y = self.mt[self.index]
        self.index += 1
        y ^= y >> 11
        y ^= (y << 7) & 0x9D2C5680
        y ^= (y << 15) & 0xEFC60000
        y ^= y >> 18
        return y

    def words(self, count: int) -> list[int]:
        return [self.next_u32() for _ in range(count)]


def seed(s: int) -> Mt19937State:
    return Mt19937State(s)


def next_u32(state: Mt19937State) -> int:
    return state.next_u32()


def random_bitsequence(state: Mt19937State, n: int) -> BitSequence:
    """Draw n bits, 32 per output word, MSB first; the last word may be partial."""
    if n < 2:
        raise InputError(f"n must be >= 2, got {n}")
    words = np.array(state.words(-(-n // 32)), dtype=">u4")
    return BitSequence(np.unpackbits(words.view(np.uint8))[:n])


@dataclass(frozen=True)
class SeedPlan:
    master_seed: int
    task_index: int

    @property
    def seed(self) -> int:
        return (self.master_seed + self.task_index) & MASK32


def task_seeds(master_seed: int, start: int, count: int) -> np.ndarray:
    """Seeds for tasks ``start .. start+count-1`` as uint32."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    return ((np.uint64(master_seed & MASK32) + idx) & np.uint64(MASK32)).astype(np.uint32)


# ---------------------------------------------------------------------------
# Vectorized engine: one row of state per seed.
# ---------------------------------------------------------------------------

def _init_states(seeds: np.ndarray) -> np.ndarray:
    seeds = np.asarray(seeds, dtype=np.uint64) & np.uint64(MASK32)
    mt = np.empty((seeds.size, N), dtype=np.uint32)
    prev = seeds.copy()
    mt[:, 0] = prev
    mult = np.uint64(INIT_MULT)
    mask = np.uint64(MASK32)
    shift = np.uint64(30)
    for i in range(1, N):
        prev = (mult * (prev ^ (prev >> shift)) + np.uint64(i)) & mask
        mt[:, i] = prev
    return mt


def _twist(mt: np.ndarray) -> None:
    # Blocks of width N - M only read entries already updated in this pass
    # (partner index i + M - N) or not yet touched (i + 1), as the scalar loop does.
    upper = np.uint32(UPPER_MASK)
    lower = np.uint32(LOWER_MASK)
    mat = np.uint32(MATRIX_A)
    one = np.uint32(1)
    for lo, hi in ((0, N - M), (N - M, 2 * (N - M)), (2 * (N - M), N - 1)):
        y = (mt[:, lo:hi] & upper) | (mt[:, lo + 1:hi + 1] & lower)
        plo = (lo + M) % N
        partner = mt[:, plo:plo + (hi - lo)]
        mt[:, lo:hi] = partner ^ (y >> one) ^ ((y & one) * mat)
    y = (mt[:, N - 1] & upper) | (mt[:, 0] & lower)
    mt[:, N - 1] = mt[:, M - 1] ^ (y >> one) ^ ((y & one) * mat)


def _temper(y: np.ndarray) -> np.ndarray:
    y = y ^ (y >> np.uint32(11))
    y = y ^ ((y << np.uint32(7)) & np.uint32(0x9D2C5680))
    y = y ^ ((y << np.uint32(15)) & np.uint32(0xEFC60000))
    return y ^ (y >> np.uint32(18))


def words_for_seeds(seeds: np.ndarray, count: int) -> np.ndarray:
    """First ``count`` outputs of an MT19937 stream per seed, shape (len(seeds), count)."""
    mt = _init_states(seeds)
    out = np.empty((mt.shape[0], count), dtype=np.uint32)
    for start in range(0, count, N):
        _twist(mt)
        take = min(N, count - start)
        out[:, start:start + take] = _temper(mt[:, :take])
    return out


def bits_for_seeds(seeds: np.ndarray, n: int) -> np.ndarray:
    """Per-seed bit rows (uint8, shape (len(seeds), n)), MSB first within words."""
    words = words_for_seeds(seeds, -(-n // 32))
    return np.unpackbits(words.astype(">u4").view(np.uint8), axis=1)[:, :n]


def signs_for_seeds(seeds: np.ndarray, n: int) -> np.ndarray:
    """Per-seed +/-1 rows (float64), i.e. the signed view of :func:`bits_for_seeds`."""
    return bits_for_seeds(seeds, n).astype(np.float64) * 2.0 - 1.0


def uniforms_for_seeds(seeds: np.ndarray, count: int) -> np.ndarray:
    """53-bit uniforms on [0, 1) from consecutive word pairs (genrand_res53)."""
    words = words_for_seeds(seeds, 2 * count)
    a = (words[:, 0::2] >> np.uint32(5)).astype(np.float64)
    b = (words[:, 1::2] >> np.uint32(6)).astype(np.float64)
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0)
