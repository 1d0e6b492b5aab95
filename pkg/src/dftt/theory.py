"""Closed forms for the count statistic when the squared magnitudes are uniform on a simplex.

With m = n/2 lines whose squared magnitudes are uniform on
{u_j >= 0, sum u_j = 2 m^2}, each u_j has survival (1 - t / 2m^2)^(m-1) and any
pair has joint survival (1 - (s + t) / 2m^2)^(m-1).  Everything below follows
from those two facts with the indicator F_j = 1{u_j <= T^2}.

Powers are evaluated as exp(k * log1p(-x)); the covariance uses the exact
rewrite (1 - 2y) / (1 - y)^2 = 1 - (y / (1 - y))^2 so it does not cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dftt.errors import DomainError, InputError

LN_005 = math.log(0.05)
PASS_PROB = 0.95
LIMIT_M = 2**24


@dataclass(frozen=True)
class TheoryParams:
    m: int
    t2: float

    def __post_init__(self):
        if self.m < 3:
            raise DomainError(f"m must be >= 3, got {self.m}")
        if not self.t2 >= 0.0:
            raise DomainError(f"squared threshold must be >= 0, got {self.t2}")

    @classmethod
    def log005(cls, m: int) -> TheoryParams:
        """Threshold T^2 = -n ln 0.05 = -2 m ln 0.05."""
        return cls(m=m, t2=-2.0 * m * LN_005)

    @classmethod
    def from_n(cls, n: int) -> TheoryParams:
        if n % 2:
            raise DomainError(f"closed forms need even n, got {n}")
        return cls.log005(n // 2)

    @property
    def energy(self) -> float:
        return 2.0 * self.m * self.m

    @property
    def y(self) -> float:
        return self.t2 / self.energy


@dataclass(frozen=True)
class TheoreticalQuantities:
    m: int
    t2: float
    vF: float
    corrFF: float
    varN1: float
    a: float

    @property
    def covFF(self) -> float:
        return self.corrFF * self.vF


def marginal_pdf(u, m: int):
    """Density of one squared magnitude: (m-1)/(2m^2) (1 - u/2m^2)^(m-2) on [0, 2m^2]."""
    if m < 2:
        raise DomainError(f"m must be >= 2, got {m}")
    u = np.asarray(u, dtype=np.float64)
    e = 2.0 * m * m
    inside = (u >= 0.0) & (u <= e)
    base = np.clip(1.0 - u / e, 0.0, 1.0)
    val = np.where(inside, (m - 1) / e * base ** (m - 2), 0.0)
    return float(val) if val.ndim == 0 else val


def joint_pdf(u, v, m: int):
    """Density of a pair of squared magnitudes on the triangle u, v >= 0, u + v <= 2m^2."""
    if m < 3:
        raise DomainError(f"m must be >= 3, got {m}")
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    e = 2.0 * m * m
    s = u + v
    inside = (u >= 0.0) & (v >= 0.0) & (s <= e)
    base = np.clip(1.0 - s / e, 0.0, 1.0)
    val = np.where(inside, (m - 1) * (m - 2) / (e * e) * base ** (m - 3), 0.0)
    return float(val) if val.ndim == 0 else val


def survival(t: float, m: int) -> float:
    """P(u_j > t) = (1 - t/2m^2)^(m-1), clipped to [0, 1]."""
    e = 2.0 * m * m
    if t <= 0.0:
        return 1.0
    if t >= e:
        return 0.0
    return math.exp((m - 1) * math.log1p(-t / e))


def joint_survival(s: float, t: float, m: int) -> float:
    return survival(s + t, m)


def _log_q(params: TheoryParams) -> float:
    if params.y > 1.0:
        raise DomainError(
            f"T^2 = {params.t2:g} exceeds the total energy 2m^2 = {params.energy:g}"
        )
    if params.y == 1.0:
        return -math.inf
    return (params.m - 1) * math.log1p(-params.y)


def indicator_variance(params: TheoryParams) -> float:
    """V[F] = q - q^2 with q = (1 - T^2/2m^2)^(m-1)."""
    lq = _log_q(params)
    q = math.exp(lq)
    return q * -math.expm1(lq)


def indicator_covariance(params: TheoryParams) -> float:
    """(1 - T^2/m^2)^(m-1) - (1 - T^2/2m^2)^(2m-2)."""
    y = params.y
    if 2.0 * y > 1.0:
        raise DomainError(
            f"T^2 = {params.t2:g} > m^2 = {params.m**2}: joint term has a negative base"
        )
    lq = _log_q(params)
    if 2.0 * y == 1.0:
        return -math.exp(2.0 * lq)
    r = y / (1.0 - y)
    return math.exp(2.0 * lq) * math.expm1((params.m - 1) * math.log1p(-r * r))


def indicator_correlation(params: TheoryParams) -> float:
    var = indicator_variance(params)
    if var == 0.0:
        raise DomainError("indicator variance is zero; correlation undefined")
    return indicator_covariance(params) / var


def var_n1(params: TheoryParams) -> float:
    m = params.m
    return m * indicator_variance(params) + m * (m - 1) * indicator_covariance(params)


def divisor_a(params: TheoryParams) -> float:
    """a such that V[N_1] = 0.95 * 0.05 * n / a, with n = 2m."""
    v = var_n1(params)
    if v <= 0.0:
        raise DomainError(f"V[N1] = {v:g} is not positive")
    return 2.0 * 0.05 * 0.95 * params.m / v


def limit_a() -> float:
    """Divisor evaluated at m = 2^24; agrees with the m -> infinity limit to ~1e-6."""
    return divisor_a(TheoryParams.log005(LIMIT_M))


def quantities(params: TheoryParams) -> TheoreticalQuantities:
    vF = indicator_variance(params)
    corr = indicator_correlation(params)
    v = var_n1(params)
    return TheoreticalQuantities(
        m=params.m, t2=params.t2, vF=vF, corrFF=corr, varN1=v, a=divisor_a(params)
    )


def m_grid(start: int, stop: int, kind: str = "log", points: int | None = None) -> list[int]:
    """Integer grid for curve output.  ``log`` defaults to 10 points per decade."""
    if start < 3 or stop < start:
        raise InputError(f"invalid m range {start}:{stop}")
    if kind == "log":
        if points is None:
            points = max(2, int(round(10 * math.log10(stop / start))) + 1)
        raw = np.geomspace(start, stop, points)
    elif kind == "lin":
        raw = np.linspace(start, stop, points or 50)
    else:
        raise InputError(f"unknown grid kind {kind!r}")
    return sorted({int(round(v)) for v in raw})
