"""The spectral test: count low-magnitude lines, normalize, report a p-value.

N_1 counts j in {0, ..., floor(n/2) - 1} with |f_j| strictly below T.  The
statistic is d = (N_1 - 0.95 floor(n/2)) / sqrt(0.95 * 0.05 * n / a), where
the divisor a selects one of the published variance corrections.

The DC line j = 0 is counted.  Some SP800-22 implementations drop it; this
one does not.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from dftt import theory
from dftt.bitseq import BitSequence, signed
from dftt.errors import DomainError, InputError
from dftt.spectrum import SpectrumMagnitudes, dft_fast


class ThresholdRule(enum.Enum):
    SQRT_3N = "sqrt3n"
    LOG_005 = "log005"

    @property
    def code(self) -> str:
        return self._value_

    def value(self, n: int) -> float:
        if self is ThresholdRule.SQRT_3N:
            return math.sqrt(3.0 * n)
        return math.sqrt(-n * math.log(0.05))

    def pass_probability(self) -> float:
        """P(|Z|^2 < T^2) when 2|Z|^2/n is chi-square with two degrees of freedom."""
        if self is ThresholdRule.SQRT_3N:
            return -math.expm1(-1.5 * 2.0)
        return -math.expm1(math.log(0.05))


SQRT_3N = ThresholdRule.SQRT_3N
LOG_005 = ThresholdRule.LOG_005


class VarianceModel(enum.Enum):
    ORIGINAL = "original"
    KIM = "kim"
    HAMANO = "hamano"
    PARESCHI = "pareschi"
    THEORETICAL = "theoretical"
    LIMIT = "limit"

    def divisor(self, n: int) -> float:
        if self is VarianceModel.THEORETICAL:
            return theory.divisor_a(theory.TheoryParams.from_n(n))
        return _FIXED_DIVISORS[self]


_FIXED_DIVISORS = {
    VarianceModel.ORIGINAL: 2.0,
    VarianceModel.KIM: 4.0,
    VarianceModel.HAMANO: 3.7879,
    VarianceModel.PARESCHI: 3.8,
    VarianceModel.LIMIT: 3.7903,
}


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # keep pytest from collecting this

    n: int
    n1: int
    d: float
    p: float
    threshold: ThresholdRule
    model: VarianceModel
    a: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "n1": self.n1,
            "d": self.d,
            "p": self.p,
            "threshold": self.threshold.code,
            "model": self.model.value,
            "a": self.a,
        }


def count_n1(spec: SpectrumMagnitudes, rule: ThresholdRule) -> int:
    return int(np.count_nonzero(spec.half < rule.value(spec.n)))


def d_statistic(n1: int, n: int, model: VarianceModel | float) -> float:
    a = model if isinstance(model, (int, float)) else model.divisor(n)
    if a <= 0:
        raise DomainError(f"variance divisor must be positive, got {a}")
    return (n1 - 0.95 * (n // 2)) / math.sqrt(0.95 * 0.05 * n / a)


def p_value(d: float) -> float:
    if not math.isfinite(d):
        if math.isnan(d):
            raise InputError("d must be finite")
        return 0.0
    return math.erfc(abs(d) / math.sqrt(2.0))


def run_test(
    seq: BitSequence,
    rule: ThresholdRule = LOG_005,
    model: VarianceModel = VarianceModel.LIMIT,
) -> TestOutcome:
    spec = dft_fast(signed(seq))
    n1 = count_n1(spec, rule)
    a = model.divisor(seq.n)
    d = d_statistic(n1, seq.n, a)
    return TestOutcome(n=seq.n, n1=n1, d=d, p=p_value(d), threshold=rule, model=model, a=a)
