import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dftt import experiments, rng, theory
from dftt.bitseq import BitSequence, from_ascii
from dftt.dfttest import (
    LOG_005,
    SQRT_3N,
    VarianceModel,
    count_n1,
    d_statistic,
    p_value,
    run_test,
)
from dftt.errors import DomainError
from dftt.spectrum import SpectrumMagnitudes, dft_naive


def test_thresholds():
    assert SQRT_3N.value(16) == pytest.approx(math.sqrt(48))
    assert LOG_005.value(16) == pytest.approx(math.sqrt(16 * math.log(20)))
    assert LOG_005.value(16) == pytest.approx(6.9233, abs=1e-4)
    assert LOG_005.value(4) == pytest.approx(3.4617, abs=1e-4)


def test_pass_probabilities():
    assert LOG_005.pass_probability() == pytest.approx(0.95, abs=1e-15)
    assert SQRT_3N.pass_probability() == pytest.approx(1 - math.exp(-3))
    assert SQRT_3N.pass_probability() == pytest.approx(0.950213, abs=1e-6)


def test_pass_probability_by_chi2_sampling():
    # 2|Z|^2/n ~ chi2_2, i.e. |Z|^2 = n/2 * (sum of two squared normals)
    g = np.random.default_rng(0)
    n = 1000
    z2 = n / 2 * (g.standard_normal(10**6) ** 2 + g.standard_normal(10**6) ** 2)
    se = math.sqrt(0.95 * 0.05 / 10**6)
    assert abs(np.mean(z2 < LOG_005.value(n) ** 2) - 0.95) < 4 * se
    assert abs(np.mean(z2 < SQRT_3N.value(n) ** 2) - (1 - math.exp(-3))) < 4 * se


def test_divisors():
    assert VarianceModel.ORIGINAL.divisor(100) == 2
    assert VarianceModel.KIM.divisor(100) == 4
    assert VarianceModel.HAMANO.divisor(100) == 3.7879
    assert VarianceModel.PARESCHI.divisor(100) == 3.8
    assert VarianceModel.LIMIT.divisor(100) == 3.7903
    assert VarianceModel.THEORETICAL.divisor(8192) == pytest.approx(
        theory.divisor_a(theory.TheoryParams.log005(4096))
    )
    with pytest.raises(DomainError):
        VarianceModel.THEORETICAL.divisor(17)


def test_count_examples():
    assert count_n1(dft_naive(np.ones(16)), LOG_005) == 7
    assert count_n1(dft_naive(np.array([1.0, -1.0] * 4)), LOG_005) == 4
    assert count_n1(dft_naive(np.array([1.0, 1.0, -1.0, -1.0])), LOG_005) == 2


def test_count_is_strict():
    t = LOG_005.value(8)
    spec = SpectrumMagnitudes(n=8, half=np.array([t, t - 1e-12, t + 1, 0.0]), edge=0.0)
    assert count_n1(spec, LOG_005) == 2


def test_monotone_in_threshold():
    spec = dft_naive(rng.signs_for_seeds(np.array([9]), 256)[0])
    assert count_n1(spec, SQRT_3N) >= count_n1(spec, LOG_005)  # sqrt(3n) > sqrt(-n ln .05)


def test_d_examples():
    for model in VarianceModel:
        assert d_statistic(475, 1000, model) == 0.0
    assert d_statistic(480, 1000, VarianceModel.ORIGINAL) == pytest.approx(5 / math.sqrt(23.75))
    assert d_statistic(480, 1000, VarianceModel.ORIGINAL) == pytest.approx(1.02598, abs=1e-5)


def test_p_value_examples():
    assert p_value(0.0) == 1.0
    assert p_value(1.959964) == pytest.approx(float(mpmath.erfc(1.959964 / mpmath.sqrt(2))), rel=1e-12)
    assert p_value(1.959964) == pytest.approx(0.05, abs=1e-6)
    assert p_value(math.inf) == 0.0
    ds = np.linspace(0, 40, 400)
    ps = [p_value(d) for d in ds]
    assert all(a >= b for a, b in zip(ps, ps[1:]))
    assert p_value(-2.0) == p_value(2.0)


def test_erfc_accuracy():
    mpmath.mp.dps = 40
    for x in np.linspace(0, 6, 601):
        exact = mpmath.erfc(mpmath.mpf(float(x)))
        assert abs(math.erfc(x) - exact) / exact < 1e-10
    # p_value routes through erfc(|d|/sqrt 2)
    for d in (0.3, 2.5, 8.0):
        exact = mpmath.erfc(mpmath.mpf(d) / mpmath.sqrt(2))
        assert abs(p_value(d) - exact) / exact < 1e-10


def test_run_test_all_ones():
    out = run_test(from_ascii("1" * 16), LOG_005, VarianceModel.LIMIT)
    assert out.n1 == 7
    assert out.d == pytest.approx((7 - 7.6) / math.sqrt(0.0475 * 16 / 3.7903))
    assert out.p == pytest.approx(math.erfc(abs(out.d) / math.sqrt(2)))
    assert out.to_dict()["threshold"] == "log005"


def test_run_test_deterministic():
    seq = rng.random_bitsequence(rng.seed(5489), 1024)
    ps = {run_test(seq).p for _ in range(100)}
    assert len(ps) == 1


@given(st.integers(0, 2**32 - 1))
def test_models_share_n1_and_sign(s):
    seq = BitSequence(rng.bits_for_seeds(np.array([s]), 64)[0])
    outs = [run_test(seq, LOG_005, m) for m in VarianceModel]
    assert len({o.n1 for o in outs}) == 1
    assert len({np.sign(o.d) for o in outs}) == 1
    assert all(0 <= o.n1 <= 32 and 0 < o.p <= 1 for o in outs)


def test_odd_length_centre():
    seq = from_ascii("1101001")
    out = run_test(seq, LOG_005, VarianceModel.KIM)
    assert out.d == pytest.approx((out.n1 - 0.95 * 3) / math.sqrt(0.0475 * 7 / 4))


@pytest.mark.slow
def test_rejection_rate_calibrated():
    cfg = experiments.McConfig(n=2**13, n_sequences=10**4, master_seed=2024, batches=10)
    counts = experiments.n1_counts(cfg)
    d = (counts - 0.95 * 4096) / math.sqrt(0.0475 * 8192 / 3.7903)
    rate = np.mean([p_value(v) < 0.01 for v in d])
    # 3 sigma of a binomial proportion at 0.01 over 1e4 draws is 0.003
    assert abs(rate - 0.01) < 0.003
