"""Tests for the scalar special functions: gamma, Mittag-Leffler, binomial series."""

import math

import numpy as np
import pytest

from fracstep import MittagLefflerError, binom_series, gamma_real, mittag_leffler

# Reference values computed with 40-digit arithmetic from the defining series.
MLF_REFERENCE = [
    (0.5, 1.0, -0.8, 0.48910058922311471 + 0.0j),
    (0.3, 0.7, 0.5 + 0.5j, 0.68866084263808147 + 1.1116896971554704j),
    (1.0, 2.0, -1.0, 0.63212055882855768 + 0.0j),
    (0.9, 1.0, -2.5, 0.11469986754557785 + 0.0j),
    (1.5, 1.0, 2.0, 3.3487008963183954 + 0.0j),
    (2.0, 1.0, -4.0, -0.41614683654714239 + 0.0j),
    (0.1, 1.0, -0.5, 0.65432446028800193 + 0.0j),
]


def test_gamma_real_matches_math_gamma():
    for x in (0.1, 0.5, 1.0, 1.5, 3.7, 12.0, 50.0):
        assert gamma_real(x) == math.gamma(x)


@pytest.mark.parametrize("x", [0.0, -1.0, 50.0001, math.nan, math.inf])
def test_gamma_real_rejects_out_of_domain(x):
    with pytest.raises(ValueError):
        gamma_real(x)


def test_mittag_leffler_reference_values():
    for alpha, beta, z, ref in MLF_REFERENCE:
        got = mittag_leffler(alpha, beta, z)
        assert abs(got - ref) <= 1e-13 * abs(ref), (alpha, beta, z)


def test_mittag_leffler_classical_special_cases():
    # E_{1,1}(z) = exp(z), E_{2,1}(-x^2) = cos(x), E_{1,2}(z) = (e^z - 1)/z
    assert abs(mittag_leffler(1.0, 1.0, 0.7) - math.exp(0.7)) < 1e-14
    assert abs(mittag_leffler(2.0, 1.0, -4.0) - math.cos(2.0)) < 1e-14
    assert abs(mittag_leffler(1.0, 2.0, -1.0) - (1.0 - math.exp(-1.0))) < 1e-15
    z = 0.3 + 0.4j
    assert abs(mittag_leffler(1.0, 1.0, z) - np.exp(z)) < 1e-14


def test_mittag_leffler_at_zero_is_inverse_gamma():
    for beta in (0.6, 1.0, 2.0, 3.5):
        assert mittag_leffler(0.7, beta, 0.0) == complex(1.0 / math.gamma(beta))


def test_mittag_leffler_domain_errors():
    with pytest.raises(ValueError):
        mittag_leffler(0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        mittag_leffler(2.5, 1.0, 0.1)
    with pytest.raises(ValueError):
        mittag_leffler(0.5, 0.0, 0.1)
    with pytest.raises(ValueError):
        mittag_leffler(0.5, -1.0, 0.1)
    with pytest.raises(ValueError):
        mittag_leffler(0.5, 1.0, 11.0)
    with pytest.raises(ValueError):
        mittag_leffler(0.5, 1.0, complex(math.nan, 0.0))


def test_mittag_leffler_term_cap_raises():
    # alpha = 0.1 with |z| = 10 needs ~1e10 terms before gamma growth wins.
    with pytest.raises(MittagLefflerError):
        mittag_leffler(0.1, 1.0, 10.0)


def test_binom_series_integer_exponent():
    g = binom_series(1.0, 6)
    assert np.allclose(g, [1.0, -1.0, 0, 0, 0, 0, 0], atol=1e-15)
    g = binom_series(-1.0, 6)  # 1/(1-x) has all-ones coefficients
    assert np.allclose(g, np.ones(7), atol=1e-15)


def test_binom_series_partial_sum_matches_power():
    # sum_n g_n x^n ~ (1-x)^beta with a geometric tail at |x| < 1
    for beta in (0.5, -0.5, 1.3, -1.9):
        g = binom_series(beta, 200)
        x = 0.3
        val = float(np.polyval(g[::-1], x))
        assert abs(val - (1.0 - x) ** beta) < 1e-12, beta


def test_binom_series_matches_scipy_binom():
    from scipy.special import binom as sp_binom

    for beta in (0.4, -0.7, 1.5):
        g = binom_series(beta, 30)
        ref = np.array([(-1.0) ** n * sp_binom(beta, n) for n in range(31)])
        assert np.allclose(g, ref, rtol=1e-13, atol=1e-16), beta


def test_binom_series_domain_errors():
    with pytest.raises(ValueError):
        binom_series(2.0, 4)
    with pytest.raises(ValueError):
        binom_series(math.nan, 4)
    with pytest.raises(ValueError):
        binom_series(0.5, -1)
