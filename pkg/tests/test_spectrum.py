import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dftt import rng
from dftt.spectrum import (
    dft_fast,
    dft_naive,
    half_energy,
    half_energy_identity,
    naive_magnitudes,
    fast_magnitudes,
    parseval_energy,
)
from oracles import dft_magnitudes_exact

signs = st.lists(st.sampled_from([-1.0, 1.0]), min_size=2, max_size=64)


def mt_signs(seed, n):
    return rng.signs_for_seeds(np.array([seed]), n)[0]


def test_dc_only():
    spec = dft_naive(np.ones(16))
    assert spec.dc == 16
    assert np.allclose(spec.half[1:], 0, atol=1e-12)
    assert spec.nyquist == pytest.approx(0, abs=1e-12)


def test_nyquist_only():
    spec = dft_naive(np.array([1, -1] * 4, dtype=float))
    assert np.allclose(spec.half, 0, atol=1e-12)
    assert spec.nyquist == pytest.approx(8)


def test_four_term_hand_sum():
    # f_1 = 1 + i*(-1)... : sum x_k e^{-i pi k/2} = 1 - i - (-1) ... = 2 - 2i
    spec = dft_naive(np.array([1, 1, -1, -1], dtype=float))
    assert spec.half[0] == pytest.approx(0, abs=1e-12)
    assert spec.half[1] == pytest.approx(2 * math.sqrt(2), rel=1e-12)


def test_odd_length_layout():
    spec = dft_naive(np.array([1, 1, -1, 1, -1], dtype=float))
    assert spec.half.size == 2
    assert spec.nyquist is None
    assert parseval_energy(spec) == pytest.approx(25)


@given(signs)
def test_naive_matches_fsum_oracle(x):
    spec = dft_naive(np.array(x))
    exact = dft_magnitudes_exact(x)
    assert np.allclose(spec.full_index(), exact, atol=1e-10 * len(x))


@given(signs)
def test_fast_matches_naive(x):
    x = np.array(x)
    assert np.allclose(dft_fast(x).full_index(), dft_naive(x).full_index(), atol=1e-8 * len(x))


@pytest.mark.parametrize("n", [1000, 1024, 1031])
def test_fast_matches_naive_long(n):
    x = mt_signs(5489, n)
    assert np.max(np.abs(dft_fast(x).full_index() - dft_naive(x).full_index())) < 1e-6 * n


def test_fast_dc_exact():
    assert dft_fast(np.ones(1024)).dc == pytest.approx(1024, abs=1e-6)


def test_batch_helpers_agree():
    x = rng.signs_for_seeds(rng.task_seeds(3, 0, 4), 96)
    assert np.allclose(fast_magnitudes(x), naive_magnitudes(x), atol=1e-9)


def test_parseval_examples():
    assert parseval_energy(dft_naive(np.ones(16))) == pytest.approx(256, rel=1e-12)
    assert parseval_energy(dft_naive(np.array([1.0, -1.0] * 4))) == pytest.approx(64, rel=1e-12)
    assert parseval_energy(dft_fast(mt_signs(1, 1024))) == pytest.approx(1048576, abs=1e-3)


@given(signs)
def test_parseval_property(x):
    n = len(x)
    assert abs(parseval_energy(dft_naive(np.array(x))) / n**2 - 1) < 1e-9
    assert abs(parseval_energy(dft_fast(np.array(x))) / n**2 - 1) < 1e-7


@given(signs)
def test_half_energy_identity(x):
    spec = dft_naive(np.array(x))
    assert half_energy(spec) == pytest.approx(half_energy_identity(spec), abs=1e-8 * len(x) ** 2)


@settings(max_examples=30)
@given(signs)
def test_magnitude_bounds(x):
    mags = dft_naive(np.array(x)).full_index()
    assert np.all(mags >= 0)
    assert np.all(mags <= len(x) + 1e-9)


def test_mirror_symmetry_direct():
    n = 200
    x = mt_signs(11, n)
    spec = dft_naive(x)
    k = np.arange(n)
    for j in (1, 7, 50, 99):
        mirror = n - j
        direct = abs(np.sum(x * np.exp(-2j * np.pi * ((k * mirror) % n) / n)))
        assert direct == pytest.approx(spec.half[j], abs=1e-8 * n)


def test_rejects_short_input():
    with pytest.raises(ValueError):
        dft_naive(np.array([1.0]))
