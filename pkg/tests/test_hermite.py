import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pointspec.hermite import (a0_squared, a_squared_expansion, amplitude_row, hermite_asymptotic,
                               hermite_eval, hermite_row, hermite_table)

PI_M14 = math.pi ** -0.25

# h_n(x) from mpmath at 40 digits: hermite(n, x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))
MPMATH_VALUES = [
    (0, 0.0, 0.75112554446494248286),
    (1, 0.5, 0.46871701988925172646),
    (5, 1.0, -0.058815211851795811821),
    (37, -2.25, -0.11136032699074834368),
    (100, 3.0, -0.04225863866458535268),
    (1000, 40.0, 0.17225052073279226983),
    (2000, 10.0, -0.000040130142778946473851),
]


@pytest.mark.parametrize("n,x,expected", MPMATH_VALUES)
def test_against_high_precision(n, x, expected):
    assert hermite_eval(n, x) == pytest.approx(expected, rel=1e-12)


def test_closed_forms():
    assert hermite_eval(0, 0.0) == pytest.approx(PI_M14, rel=1e-15)
    assert hermite_eval(1, 0.0) == 0.0
    assert hermite_eval(2, 0.0) == pytest.approx(-PI_M14 / math.sqrt(2), rel=1e-15)
    np.testing.assert_allclose(hermite_row(2, 0.0), [PI_M14, 0.0, -PI_M14 / math.sqrt(2)], rtol=1e-15)
    assert hermite_row(0, 1.0)[0] == pytest.approx(PI_M14 * math.exp(-0.5), rel=1e-15)


def test_row_matches_pointwise_exactly():
    row = hermite_row(300, 1.3)
    assert all(row[k] == hermite_eval(k, 1.3) for k in range(301))
    assert np.array_equal(amplitude_row(300, 1.3), row)


def test_small_n_against_exact_polynomials():
    # physicists' H_n by integer recurrence, normalized in exact arithmetic via math.fsum
    x = 0.7
    H = [1, 2 * x]
    for k in range(1, 30):
        H.append(2 * x * H[k] - 2 * k * H[k - 1])
    for n in range(30):
        ref = H[n] * math.exp(-x * x / 2) / math.sqrt(2.0 ** n * math.factorial(n) * math.sqrt(math.pi))
        assert hermite_eval(n, x) == pytest.approx(ref, rel=1e-11, abs=1e-15)


def test_orthonormality_by_gauss_hermite():
    nodes, weights = np.polynomial.hermite.hermgauss(120)
    table = hermite_table(60, nodes)
    gram = table.T @ (table * (weights * np.exp(nodes ** 2))[:, None])
    np.testing.assert_allclose(gram, np.eye(61), atol=1e-8)


@given(st.integers(0, 3000), st.floats(-60, 60, allow_nan=False))
def test_uniform_bound(n, x):
    assert abs(hermite_eval(n, x)) <= 0.8


@given(st.integers(0, 2000), st.floats(0, 30, allow_nan=False))
def test_parity_is_exact(n, x):
    assert hermite_eval(n, -x) == (-1) ** n * hermite_eval(n, x)


@given(st.integers(0, 500).map(lambda k: 2 * k + 1))
def test_odd_vanish_at_origin(n):
    assert hermite_eval(n, 0.0) == 0.0


def test_far_tail_underflows_cleanly():
    row = hermite_row(50, 1e3)
    assert np.all(np.isfinite(row)) and np.all(row == 0.0)
    assert np.all(np.isfinite(hermite_row(10000, 150.0)))


def test_decay_in_index():
    # |h_k(b)| <= C k^{-1/12} uniformly on a b-grid; at fixed b the decay is k^{-1/4}
    bs = np.linspace(-8, 8, 33)
    table = np.abs(hermite_table(10000, bs))
    k = np.arange(1, 10001)
    assert np.max(table[:, 1:] * k ** (1 / 12)) < 1.5
    tail = np.abs(hermite_row(10000, 1.0))[1000:] * np.arange(1000, 10001) ** 0.25
    assert tail.max() < 1.0


def test_asymptotic_error_scales():
    bs = np.linspace(-2, 2, 9)
    scaled = []
    for m in (100, 300, 1000, 3000, 10000):
        err = max(abs(hermite_eval(m, b) - hermite_asymptotic(m, b)) for b in bs)
        scaled.append(err * m ** 1.25)
    assert max(scaled) <= 3 * scaled[0]


def test_asymptotic_at_origin():
    for m in (4, 10, 101):
        expected = 2 ** 0.25 / math.sqrt(math.pi) * m ** -0.25 * (0 if m % 2 else (-1) ** (m // 2))
        assert hermite_asymptotic(m, 0.0) == pytest.approx(expected, abs=1e-15)


def test_squared_amplitude_expansion():
    c = abs(hermite_eval(50, 1.0) ** 2 - a_squared_expansion(50, 1.0).total) * 50 ** 1.5
    for k in (100, 400, 1600):
        e = a_squared_expansion(k, 1.0)
        assert abs(hermite_eval(k, 1.0) ** 2 - e.total) * k ** 1.5 <= 3 * max(c, 0.05)
    e = a_squared_expansion(7, 0.0)
    assert e.leading == 0.0 and e.correction == 0.0
    e = a_squared_expansion(8, 0.0)
    assert e.leading == pytest.approx(2 / (math.pi * 4.0))


@given(st.integers(1, 10 ** 6), st.floats(-20, 20, allow_nan=False))
def test_leading_amplitude_nonnegative(k, b):
    assert a_squared_expansion(k, b).leading >= 0.0


def test_a0_squared_matches_definition():
    for b in (0.0, 0.5, 2.0):
        assert a0_squared(b) == pytest.approx(hermite_eval(0, b) ** 2, rel=1e-14)


@pytest.mark.parametrize("args", [(-1, 0.0), (2, math.nan), (2, math.inf), (1.5, 0.0)])
def test_rejects_bad_input(args):
    with pytest.raises((ValueError, TypeError)):
        hermite_eval(*args)


def test_asymptotic_rejects_zero_index():
    with pytest.raises(ValueError):
        hermite_asymptotic(0, 1.0)
    with pytest.raises(ValueError):
        a_squared_expansion(0, 1.0)
