import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from dftt import rng, simplex, theory
from dftt.errors import InputError


@settings(max_examples=40)
@given(st.integers(2, 300), st.integers(0, 2**32 - 1))
def test_sample_on_surface(m, s):
    e = simplex.sample(m, rng.seed(s)).energies
    assert e.size == m
    assert np.all(e >= 0)
    assert e.sum() == pytest.approx(2 * m * m, rel=1e-12)


def test_scalar_and_batch_agree():
    rows = simplex.sample_for_seeds(7, np.array([3, 4]))
    assert np.array_equal(rows[0], simplex.sample(7, rng.seed(3)).energies)
    assert np.array_equal(rows[1], simplex.sample(7, rng.seed(4)).energies)


def test_coordinate_mean():
    m, n = 50, 100_000
    e = simplex.sample_for_seeds(m, rng.task_seeds(1, 0, n))
    col = e[:, 0]
    se = col.std(ddof=1) / math.sqrt(n)
    assert abs(col.mean() - 2 * m) < 3 * se
    # exchangeability: every coordinate has the same mean
    assert np.all(np.abs(e.mean(axis=0) - 2 * m) < 5 * se)


def test_survival_matches_closed_form():
    m, n = 50, 100_000
    t2 = theory.TheoryParams.log005(m).t2
    e = simplex.sample_for_seeds(m, rng.task_seeds(2, 0, n))
    q = theory.survival(t2, m)
    emp = np.mean(e[:, 3] > t2)
    assert abs(emp - q) < 3 * math.sqrt(q * (1 - q) / n)


def test_full_threshold_degenerate():
    m = 20
    s = simplex.indicator_stats(m, 2.0 * m * m, 2000, master_seed=5, batches=4)
    assert s.mean.estimate == 1.0
    assert s.variance.estimate == 0.0


def test_uniform_on_triangle():
    # m = 3: (u0, u1) / 2m^2 is uniform on the unit triangle; bin into K^2 equal-area cells
    k, n = 10, 10**6
    pts = np.concatenate(
        [simplex.sample_for_seeds(3, rng.task_seeds(11, s, 4096))[:, :2] / 18.0 for s in range(0, n, 4096)]
    )[:n]
    a, b = pts[:, 0] * k, pts[:, 1] * k
    i, j = np.floor(a).astype(int), np.floor(b).astype(int)
    upper = (a - i) + (b - j) >= 1.0
    cell = (i * k + j) * 2 + upper
    valid = [(ii * k + jj) * 2 + up for ii in range(k) for jj in range(k - ii) for up in (0, 1) if not (up and ii + jj == k - 1)]
    counts = np.bincount(cell, minlength=2 * k * k)[valid]
    assert counts.sum() == n
    assert len(valid) == k * k
    assert stats.chisquare(counts).pvalue > 0.001


def test_negative_association():
    for m in (10, 40):
        s = simplex.indicator_stats(m, theory.TheoryParams.log005(m).t2, 20_000, master_seed=8, batches=10)
        assert s.correlation.estimate < 0


def test_var_n_small_m_matches_theory():
    p = theory.TheoryParams.log005(10)
    s = simplex.indicator_stats(10, p.t2, 50_000, master_seed=21, batches=20)
    assert abs(s.var_n.estimate - theory.var_n1(p)) < 3 * s.var_n.stderr
    assert abs(s.mean.estimate - (1 - theory.survival(p.t2, 10))) < 3 * s.mean.stderr


def test_worker_invariance():
    t2 = theory.TheoryParams.log005(30).t2
    a = simplex.indicator_stats(30, t2, 3000, master_seed=4, batches=3, workers=1)
    b = simplex.indicator_stats(30, t2, 3000, master_seed=4, batches=3, workers=2)
    assert a == b


def test_validation():
    with pytest.raises(InputError):
        simplex.indicator_stats(10, 1.0, 999, master_seed=1)
    with pytest.raises(InputError):
        simplex.sample(1, rng.seed(1))
