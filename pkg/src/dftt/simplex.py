"""Sampling squared magnitudes uniformly on the simplex {u_j >= 0, sum u_j = 2m^2}.

Normalized standard exponentials are uniform on the simplex (Dirichlet(1, ..., 1)).
The exponentials come from MT19937 53-bit uniforms by inverse CDF, one MT
stream per sample seeded ``master + sample_index``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dftt import rng
from dftt._parallel import chunk_ranges, run_chunks
from dftt.errors import InputError

# Samples per task: bounded by output size and by the 624-word MT state kept per sample.
_CHUNK_ELEMENTS = 2**21
_CHUNK_MAX_ROWS = 4096


@dataclass(frozen=True, eq=False)
class SimplexSample:
    energies: np.ndarray

    @property
    def m(self) -> int:
        return int(self.energies.size)


def _normalize(expo: np.ndarray, m: int) -> np.ndarray:
    return expo * (2.0 * m * m / expo.sum(axis=-1, keepdims=True))


def sample(m: int, state: rng.Mt19937State) -> SimplexSample:
    """One point of the scaled simplex, drawn from an existing MT stream."""
    if m < 2:
        raise InputError(f"m must be >= 2, got {m}")
    words = np.array(state.words(2 * m), dtype=np.uint32)
    a = (words[0::2] >> 5).astype(np.float64)
    b = (words[1::2] >> 6).astype(np.float64)
    u = (a * 67108864.0 + b) * (1.0 / 9007199254740992.0)
    return SimplexSample(_normalize(-np.log1p(-u), m))


def sample_for_seeds(m: int, seeds: np.ndarray) -> np.ndarray:
    """Rows of squared magnitudes, one per seed; row i equals ``sample(m, seed(seeds[i]))``."""
    u = rng.uniforms_for_seeds(seeds, m)
    return _normalize(-np.log1p(-u), m)


def _chunk_indicators(start: int, count: int, m: int, t2: float, master_seed: int):
    energies = sample_for_seeds(m, rng.task_seeds(master_seed, start, count))
    f = energies <= t2
    return f.sum(axis=0, dtype=np.int64), f.sum(axis=1, dtype=np.int64)


def _chunk_size(m: int) -> int:
    return max(1, min(_CHUNK_MAX_ROWS, _CHUNK_ELEMENTS // m))


def _batch_edges(total: int, batches: int) -> list[int]:
    return [int(e) for e in np.linspace(0, total, batches + 1).round().astype(int)]


def indicator_counts(m: int, t2: float, n_samples: int, master_seed: int, workers: int = 1):
    """Per-sample N = sum_j 1{u_j <= t2} for samples ``0 .. n_samples-1``."""
    pieces = chunk_ranges(n_samples, _chunk_size(m))
    parts = run_chunks(_chunk_indicators, pieces, (m, t2, master_seed), workers)
    return np.concatenate([p[1] for p in parts])


@dataclass(frozen=True)
class Estimate:
    estimate: float
    stderr: float
    per_batch: list[float]

    @classmethod
    def from_batches(cls, values) -> Estimate:
        v = np.asarray(values, dtype=np.float64)
        v = v[np.isfinite(v)]
        if v.size == 0:
            return cls(math.nan, math.nan, [])
        se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan
        return cls(float(v.mean()), se, [float(x) for x in v])


@dataclass(frozen=True)
class IndicatorStats:
    """Batch-mean estimates of E[F], V[F], pooled pairwise C[F_i, F_j] and V[N]."""

    m: int
    t2: float
    n_samples: int
    batches: int
    mean: Estimate
    variance: Estimate
    correlation: Estimate
    var_n: Estimate


def _batch_stats(coord_sums: np.ndarray, counts: np.ndarray, m: int):
    b = counts.size
    p = coord_sums / b
    # F^2 = F, so each coordinate's unbiased variance follows from its sum alone.
    var_j = (coord_sums - coord_sums * p) / (b - 1)
    var_n = float(np.var(counts, ddof=1))
    mean_var = float(var_j.mean())
    # Sample covariances satisfy V[N] = sum_j V[F_j] + sum_{i != j} C_ij exactly.
    mean_cov = (var_n - float(var_j.sum())) / (m * (m - 1))
    corr = mean_cov / mean_var if mean_var > 0 else math.nan
    return float(p.mean()), mean_var, corr, var_n


def indicator_stats(
    m: int,
    t2: float,
    n_samples: int,
    master_seed: int,
    batches: int = 20,
    workers: int = 1,
) -> IndicatorStats:
    """Empirical indicator statistics under the simplex law.

    The pairwise correlation is pooled: mean off-diagonal covariance over mean
    variance, which under exchangeability estimates the common correlation.
    """
    if n_samples < 1000:
        raise InputError(f"need at least 1000 samples, got {n_samples}")
    if m < 2:
        raise InputError(f"m must be >= 2, got {m}")
    if batches < 2 or n_samples // batches < 2:
        raise InputError(f"cannot split {n_samples} samples into {batches} batches")
    edges = _batch_edges(n_samples, batches)
    pieces = chunk_ranges(n_samples, _chunk_size(m), edges)
    parts = run_chunks(_chunk_indicators, pieces, (m, t2, master_seed), workers)

    rows = []
    it = iter(zip(pieces, parts))
    for lo, hi in zip(edges[:-1], edges[1:]):
        coord = np.zeros(m, dtype=np.int64)
        counts = []
        pos = lo
        while pos < hi:
            (start, count), (cs, ns) = next(it)
            coord += cs
            counts.append(ns)
            pos = start + count
        rows.append(_batch_stats(coord, np.concatenate(counts), m))
    cols = list(zip(*rows))
    return IndicatorStats(
        m=m,
        t2=t2,
        n_samples=n_samples,
        batches=batches,
        mean=Estimate.from_batches(cols[0]),
        variance=Estimate.from_batches(cols[1]),
        correlation=Estimate.from_batches(cols[2]),
        var_n=Estimate.from_batches(cols[3]),
    )
