"""Discrete Fourier transform (spectral) randomness test and the variance of its count statistic."""

from dftt.bitseq import BitSequence, from_ascii, from_bytes_msb_first, signed
from dftt.dfttest import (
    LOG_005,
    SQRT_3N,
    TestOutcome,
    ThresholdRule,
    VarianceModel,
    count_n1,
    d_statistic,
    p_value,
    run_test,
)
from dftt.errors import DftError, DomainError, InputError, InputTooShortError, ParseError
from dftt.spectrum import SpectrumMagnitudes, dft_fast, dft_naive, parseval_energy

__version__ = "0.1.0"

__all__ = [
    "BitSequence",
    "DftError",
    "DomainError",
    "InputError",
    "InputTooShortError",
    "LOG_005",
    "ParseError",
    "SQRT_3N",
    "SpectrumMagnitudes",
    "TestOutcome",
    "ThresholdRule",
    "VarianceModel",
    "count_n1",
    "d_statistic",
    "dft_fast",
    "dft_naive",
    "from_ascii",
    "from_bytes_msb_first",
    "p_value",
    "parseval_energy",
    "run_test",
    "signed",
]
