"""Fourier magnitudes of +/-1 sequences.

``dft_naive`` sums the defining series directly and serves as the oracle;
``dft_fast`` uses numpy's pocketfft, which handles arbitrary n (prime lengths
via Bluestein) without zero padding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from dftt.errors import InputError

# Trig tables for the direct sum are cached up to this length (two n/2 x n float64 tables).
_TABLE_CACHE_MAX_N = 2048


@dataclass(frozen=True, eq=False)
class SpectrumMagnitudes:
    """Half spectrum |f_0| .. |f_{floor(n/2)-1}| plus the edge line |f_{floor(n/2)}|.

    For even n the edge line is the Nyquist term.  For odd n it is the last
    line of the non-redundant half, which Parseval bookkeeping still needs.
    """

    n: int
    half: np.ndarray
    edge: float

    @property
    def dc(self) -> float:
        return float(self.half[0])

    @property
    def nyquist(self) -> float | None:
        return self.edge if self.n % 2 == 0 else None

    def full_index(self) -> np.ndarray:
        """Magnitudes for j = 0 .. floor(n/2), edge line included."""
        return np.append(self.half, self.edge)


def _as_signed(signed) -> np.ndarray:
    x = np.asarray(signed, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise InputError("expected a one-dimensional sequence of length >= 2")
    return x


@lru_cache(maxsize=8)
def _trig_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(n, dtype=np.int64)
    j = np.arange(n // 2 + 1, dtype=np.int64)
    # Reduce k*j mod n in integers so every angle is exact to one rounding.
    angle = (2.0 * np.pi / n) * (np.outer(j, k) % n)
    return np.cos(angle), np.sin(angle)


def _direct_sums(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = x.size
    if n <= _TABLE_CACHE_MAX_N:
        cos_t, sin_t = _trig_tables(n)
        # numpy reduces the contiguous axis pairwise
        return (cos_t * x).sum(axis=1), (sin_t * x).sum(axis=1)
    k = np.arange(n, dtype=np.int64)
    re = np.empty(n // 2 + 1)
    im = np.empty(n // 2 + 1)
    for j in range(n // 2 + 1):
        angle = (2.0 * np.pi / n) * ((j * k) % n)
        re[j] = np.sum(np.cos(angle) * x)
        im[j] = np.sum(np.sin(angle) * x)
    return re, im


def _pack(n: int, mags: np.ndarray) -> SpectrumMagnitudes:
    half = mags[: n // 2].copy()
    half.flags.writeable = False
    return SpectrumMagnitudes(n=n, half=half, edge=float(mags[n // 2]))


def dft_naive(signed) -> SpectrumMagnitudes:
    x = _as_signed(signed)
    re, im = _direct_sums(x)
    return _pack(x.size, np.hypot(re, im))


def fast_magnitudes(rows: np.ndarray) -> np.ndarray:
    """Magnitudes |f_0| .. |f_{floor(n/2)}| for each row of a 2-D +/-1 array."""
    return np.abs(np.fft.rfft(rows, axis=-1))


def naive_magnitudes(rows: np.ndarray) -> np.ndarray:
    """Row-wise direct-sum counterpart of :func:`fast_magnitudes`."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    return np.array([np.hypot(*_direct_sums(r)) for r in rows])


def dft_fast(signed) -> SpectrumMagnitudes:
    x = _as_signed(signed)
    return _pack(x.size, fast_magnitudes(x))


def parseval_energy(spec: SpectrumMagnitudes) -> float:
    """Full-spectrum energy sum_{j<n} |f_j|^2 rebuilt from the half via |f_{n-j}| = |f_j|."""
    sq = np.square(spec.half)
    edge_weight = 1.0 if spec.n % 2 == 0 else 2.0
    return float(sq[0] + 2.0 * np.sum(sq[1:]) + edge_weight * spec.edge**2)


def half_energy(spec: SpectrumMagnitudes) -> float:
    """sum_{j=0}^{floor(n/2)-1} |f_j|^2."""
    return float(np.sum(np.square(spec.half)))


def half_energy_identity(spec: SpectrumMagnitudes) -> float:
    """Right-hand side that :func:`half_energy` must equal for +/-1 input.

    Even n: n^2/2 + |f_0|^2/2 - |f_{n/2}|^2/2.  Odd n: n^2/2 + |f_0|^2/2 - |f_{(n-1)/2}|^2,
    since the sum stops one line short of the non-redundant half.
    """
    n = spec.n
    base = n * n / 2.0 + spec.dc**2 / 2.0
    if n % 2 == 0:
        return base - spec.edge**2 / 2.0
    return base - spec.edge**2
