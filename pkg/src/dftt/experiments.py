"""Monte Carlo and exhaustive checks of the variance theory against real spectra.

Every sequence i is generated from its own MT19937 stream seeded
``master_seed + i``; per-sequence results are collected in index order and
split into contiguous batches.  Estimates are batch means with standard error
``sd(per_batch) / sqrt(batches)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from dftt import rng, simplex, theory
from dftt._parallel import chunk_ranges, run_chunks
from dftt.dfttest import LOG_005
from dftt.errors import DomainError, InputError
from dftt.spectrum import fast_magnitudes, naive_magnitudes

# Sequences per task: about 4M samples, and never more than 4096 MT states.
_CHUNK_ELEMENTS = 2**22
_CHUNK_MAX_ROWS = 4096
EXHAUSTIVE_MAX_N = 16
VAR_PRODUCT = 0.95 * 0.05


@dataclass(frozen=True)
class McConfig:
    n: int = 2**13
    n_sequences: int = 200_000
    master_seed: int = 0
    batches: int = 10

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise InputError(f"n must be even and >= 2, got {self.n}")
        if self.batches < 2:
            raise InputError(f"need at least 2 batches, got {self.batches}")
        if self.n_sequences < 10 * self.batches:
            raise InputError(
                f"n_sequences={self.n_sequences} must be >= 10 * batches={10 * self.batches}"
            )
        if not 0 <= self.master_seed <= rng.MASK32:
            raise InputError(f"master seed must be an unsigned 32-bit value, got {self.master_seed}")

    @property
    def m(self) -> int:
        return self.n // 2

    def batch_slices(self) -> list[slice]:
        edges = np.linspace(0, self.n_sequences, self.batches + 1).round().astype(int)
        return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


@dataclass
class McReport:
    estimate: float
    stderr: float
    per_batch: list[float]
    config: McConfig
    quantity: str = ""
    reference: float | None = None
    warnings: list[str] = field(default_factory=list)

    @classmethod
    def from_batches(cls, per_batch, config: McConfig, **kw) -> McReport:
        v = np.asarray(per_batch, dtype=np.float64)
        if v.size < 2:
            raise DomainError(f"only {v.size} usable batch(es); cannot estimate a standard error")
        return cls(
            estimate=float(v.mean()),
            stderr=float(v.std(ddof=1) / math.sqrt(v.size)),
            per_batch=[float(x) for x in v],
            config=config,
            **kw,
        )

    @property
    def z_score(self) -> float | None:
        if self.reference is None or self.stderr == 0:
            return None
        return (self.estimate - self.reference) / self.stderr

    def to_dict(self) -> dict:
        out = asdict(self)
        out["z_score"] = self.z_score
        return out


# ---------------------------------------------------------------------------
# Per-chunk workers (module level so they pickle)
# ---------------------------------------------------------------------------

def _chunk_len(n: int) -> int:
    return max(1, min(_CHUNK_MAX_ROWS, _CHUNK_ELEMENTS // n))


def _half_magnitudes(start: int, count: int, n: int, master_seed: int) -> np.ndarray:
    x = rng.signs_for_seeds(rng.task_seeds(master_seed, start, count), n)
    return fast_magnitudes(x)[:, : n // 2]


def _n1_chunk(start: int, count: int, n: int, master_seed: int) -> np.ndarray:
    mags = _half_magnitudes(start, count, n, master_seed)
    return np.count_nonzero(mags < LOG_005.value(n), axis=1)


def _pair_chunk(start: int, count: int, n: int, master_seed: int, i: int, j: int) -> np.ndarray:
    mags = _half_magnitudes(start, count, n, master_seed)
    return mags[:, [i, j]] < LOG_005.value(n)


def _coef_chunk(start: int, count: int, n: int, master_seed: int, r: int) -> np.ndarray:
    x = rng.signs_for_seeds(rng.task_seeds(master_seed, start, count), n)
    spec = np.fft.rfft(x, axis=1)[:, 1 : r + 1]
    scale = math.sqrt(2.0 / n)
    out = np.empty((count, 2 * r))
    # sum x_k e^{-i theta} = sum x_k cos theta - i sum x_k sin theta
    out[:, 0::2] = -scale * spec.imag
    out[:, 1::2] = scale * spec.real
    return out


def n1_counts(config: McConfig, source: str = "dft", workers: int = 1) -> np.ndarray:
    """N_1 for every sequence (``dft``) or for simplex draws of m lines (``simplex``)."""
    if source == "dft":
        pieces = chunk_ranges(config.n_sequences, _chunk_len(config.n))
        parts = run_chunks(_n1_chunk, pieces, (config.n, config.master_seed), workers)
        return np.concatenate(parts)
    if source == "simplex":
        t2 = theory.TheoryParams.log005(config.m).t2
        return simplex.indicator_counts(config.m, t2, config.n_sequences, config.master_seed, workers)
    raise InputError(f"unknown source {source!r}; expected 'dft' or 'simplex'")


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def variance_report(counts: np.ndarray, config: McConfig) -> McReport:
    """Divisor estimate a = 0.0475 n / V[N_1] per batch, aggregated over batches."""
    counts = np.asarray(counts)
    if counts.size != config.n_sequences:
        raise InputError(f"expected {config.n_sequences} counts, got {counts.size}")
    per_batch = []
    for k, sl in enumerate(config.batch_slices()):
        v = float(np.var(counts[sl], ddof=1))
        if v == 0.0:
            raise DomainError(f"batch {k} has zero sample variance of N1")
        per_batch.append(VAR_PRODUCT * config.n / v)
    ref = None
    if config.m >= 6:
        ref = theory.divisor_a(theory.TheoryParams.log005(config.m))
    return McReport.from_batches(per_batch, config, quantity="a", reference=ref)


def experiment_variance(config: McConfig, source: str = "dft", workers: int = 1) -> McReport:
    return variance_report(n1_counts(config, source, workers), config)


def correlation_report(flags: np.ndarray, config: McConfig, i: int = 1, j: int = 2) -> McReport:
    """Pearson correlation of two indicator columns per batch; constant batches are dropped."""
    per_batch, warnings = [], []
    for k, sl in enumerate(config.batch_slices()):
        a = flags[sl, 0].astype(np.float64)
        b = flags[sl, 1].astype(np.float64)
        if a.std() == 0.0 or b.std() == 0.0:
            warnings.append(f"batch {k}: indicator constant over batch, excluded")
            continue
        per_batch.append(float(np.corrcoef(a, b)[0, 1]))
    ref = None
    if config.m >= 6:
        ref = theory.indicator_correlation(theory.TheoryParams.log005(config.m))
    return McReport.from_batches(
        per_batch, config, quantity=f"corr(F_{i},F_{j})", reference=ref, warnings=warnings
    )


def experiment_correlation(config: McConfig, i: int = 1, j: int = 2, workers: int = 1) -> McReport:
    if not 1 <= i < j <= config.m - 1:
        raise InputError(f"need 1 <= i < j <= n/2 - 1, got i={i}, j={j}")
    pieces = chunk_ranges(config.n_sequences, _chunk_len(config.n))
    parts = run_chunks(_pair_chunk, pieces, (config.n, config.master_seed, i, j), workers)
    return correlation_report(np.concatenate(parts), config, i, j)


@dataclass
class NormalityReport:
    """Moments and KS distances of the normalized coefficients s_r, c_r, r = 1..R."""

    coefficients: list[tuple[str, int]]
    means: list[float]
    variances: list[float]
    excess_kurtoses: list[float]
    correlations: list[list[float]]
    ks_statistics: list[float]
    config: McConfig

    def max_abs_offdiag_correlation(self) -> float:
        c = np.array(self.correlations)
        return float(np.max(np.abs(c[~np.eye(len(c), dtype=bool)]))) if len(c) > 1 else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def normality_check(config: McConfig, R: int = 3, workers: int = 1) -> NormalityReport:
    if R < 1 or 2 * R > config.m - 1:
        raise InputError(f"need 1 <= R and 2R <= n/2 - 1, got R={R}")
    pieces = chunk_ranges(config.n_sequences, _chunk_len(config.n))
    parts = run_chunks(_coef_chunk, pieces, (config.n, config.master_seed, R), workers)
    coef = np.concatenate(parts)
    labels = [(kind, r) for r in range(1, R + 1) for kind in ("s", "c")]
    return NormalityReport(
        coefficients=labels,
        means=[float(v) for v in coef.mean(axis=0)],
        variances=[float(v) for v in coef.var(axis=0, ddof=1)],
        excess_kurtoses=[float(v) for v in stats.kurtosis(coef, axis=0, fisher=True)],
        correlations=np.corrcoef(coef, rowvar=False).tolist(),
        ks_statistics=[float(stats.kstest(coef[:, k], "norm").statistic) for k in range(coef.shape[1])],
        config=config,
    )


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------

@dataclass
class ExhaustiveMoments:
    """Exact (population) moments over all 2^n sequences; index j runs 0 .. floor(n/2)."""

    n: int
    sequences: int
    mean_energy: list[float]
    var_energy: list[float]
    mean_n1: float
    var_n1: float
    mean_half_energy: float
    var_half_energy: float
    restriction_max_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def all_sign_sequences(n: int) -> np.ndarray:
    codes = np.arange(2**n, dtype=np.uint32)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1, dtype=np.uint32)) & 1
    return bits.astype(np.float64) * 2.0 - 1.0


def exhaustive_moments(n: int) -> ExhaustiveMoments:
    if not 2 <= n <= EXHAUSTIVE_MAX_N:
        raise InputError(
            f"exhaustive enumeration needs 2 <= n <= {EXHAUSTIVE_MAX_N} (2^n sequences), got {n}"
        )
    x = all_sign_sequences(n)
    mags = naive_magnitudes(x)
    energy = mags**2
    half = energy[:, : n // 2].sum(axis=1)
    edge = energy[:, n // 2]
    rhs = n * n / 2.0 + energy[:, 0] / 2.0 - (edge / 2.0 if n % 2 == 0 else edge)
    n1 = np.count_nonzero(mags[:, : n // 2] < LOG_005.value(n), axis=1)
    return ExhaustiveMoments(
        n=n,
        sequences=int(x.shape[0]),
        mean_energy=[float(v) for v in energy.mean(axis=0)],
        var_energy=[float(v) for v in energy.var(axis=0)],
        mean_n1=float(n1.mean()),
        var_n1=float(n1.var()),
        mean_half_energy=float(half.mean()),
        var_half_energy=float(half.var()),
        restriction_max_error=float(np.max(np.abs(half - rhs))),
    )


# ---------------------------------------------------------------------------
# log cos x = -x^2/2 + eps(x) with |eps(x)| < C x^4 near 0
# ---------------------------------------------------------------------------

@dataclass
class LemmaReport:
    passed: bool
    max_ratio: float
    argmax: float
    min_ratio: float
    x_max: float
    c: float
    grid: int

    def to_dict(self) -> dict:
        return asdict(self)


def quartic_remainder_ratio(x) -> np.ndarray:
    """|log cos x + x^2/2| / x^4, using log cos x = log1p(-2 sin^2(x/2))."""
    x = np.asarray(x, dtype=np.float64)
    log_cos = np.log1p(-2.0 * np.sin(x / 2.0) ** 2)
    return np.abs(log_cos + x * x / 2.0) / x**4


def lemma_a1_check(x_max: float, c: float, grid: int) -> LemmaReport:
    if not 0.0 < x_max < math.pi / 2:
        raise InputError(f"x_max must lie in (0, pi/2), got {x_max}")
    if grid < 1:
        raise InputError(f"grid must be positive, got {grid}")
    x = np.linspace(x_max / grid, x_max, grid)
    ratio = quartic_remainder_ratio(x)
    k = int(np.argmax(ratio))
    return LemmaReport(
        passed=bool(np.all(ratio < c)),
        max_ratio=float(ratio[k]),
        argmax=float(x[k]),
        min_ratio=float(ratio.min()),
        x_max=x_max,
        c=c,
        grid=grid,
    )
