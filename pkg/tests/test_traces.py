import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pointspec import asymptotics as asy
from pointspec.eigensolve import solve_ladder
from pointspec.hermite import hermite_eval
from pointspec.operator import PointPotential, decay_constant, delta, even_pair, odd_pair
from pointspec.traces import (ContourSpec, contour_nodes, default_kmax, lambda_series, remainder_bound,
                              t1, t2, t2_bilinear, t3, tj_contour)

# delta(x - 1) sums to k = 4096, accumulated in mpmath at 30 digits
T2_DELTA1 = {5: 3.9057570482825343238e-05, 20: 7.8789099692361096393e-05}
T3_DELTA1_N5 = -9.7662467073820111634e-07


def test_frozen_high_precision_sums():
    for n, v in T2_DELTA1.items():
        assert t2(n, delta(1.0), 4096).value.real == pytest.approx(v, rel=1e-12)
    assert t3(5, delta(1.0), 4096).value.real == pytest.approx(T3_DELTA1_N5, rel=1e-11)


def test_first_order():
    assert t1(3, even_pair(1.0)) == pytest.approx(2 * hermite_eval(3, 1.0) ** 2, rel=1e-15)
    assert all(t1(n, odd_pair(0.7)) == 0 for n in range(40))
    assert all(t1(n, delta(0.0, 2.0)) == 0 for n in range(1, 40, 2))


def test_odd_potential_odd_orders_vanish():
    for n in (1, 10, 33):
        assert t3(n, odd_pair(1.3)).value == 0
        assert abs(tj_contour(10, odd_pair(1.0), 3).value) <= 1e-9


@pytest.mark.parametrize("j,w", [(1, even_pair(1.0)), (2, odd_pair(1.0)), (3, even_pair(1.0)),
                                 (3, delta(1.0))])
def test_contour_matches_residues(j, w):
    res = [t1(10, w), t2(10, w).value, t3(10, w).value][j - 1]
    c = tj_contour(10, w, j)
    assert c.converged and abs(c.value - res) <= 1e-9


def test_trapezoid_rule_agrees_on_small_truncation():
    w = PointPotential(((0.8, 0.6), (-0.3j, -1.4)))
    spec = ContourSpec(5, truncation=64, rule="trapezoid", tol=1e-7, max_points=1 << 14)
    c = tj_contour(5, w, 2, spec)
    assert abs(c.value - t2(5, w, 63).value) <= 1e-6
    z, dz = contour_nodes(5, 16, "trapezoid")
    assert np.all(np.abs(z.imag) > 0) or np.all(np.abs(z.real - np.rint(z.real)) > 0)
    assert abs(dz.sum()) <= 1e-12


def test_mixed_second_order_splits():
    t, s = 0.6, -0.35
    for n in (7, 40, 81):
        mixed = t2(n, even_pair(1.0, t) + odd_pair(1.0, s)).value
        parts = t * t * t2(n, even_pair(1.0)).value + s * s * t2(n, odd_pair(1.0)).value
        assert abs(mixed - parts) <= 1e-14
        cross = t2_bilinear(n, even_pair(1.0), odd_pair(1.0)).value
        assert cross == 0


@given(st.floats(-4, 4, allow_nan=False).filter(lambda v: abs(v) > 1e-3), st.integers(1, 60))
def test_coupling_scaling(scale, n):
    w = PointPotential(((0.7, 0.4), (0.2, -1.1)))
    ws = w.scaled(scale)
    assert t1(n, ws) == pytest.approx(scale * t1(n, w), rel=1e-12, abs=1e-300)
    assert t2(n, ws).value == pytest.approx(scale ** 2 * t2(n, w).value, rel=1e-12)
    assert t3(n, ws).value == pytest.approx(scale ** 3 * t3(n, w).value, rel=1e-11)


def test_imaginary_odd_even_orders_real():
    w = odd_pair(1.0, 1j)
    for n in (10, 37, 100):
        v = t2(n, w).value
        assert abs(v.imag) <= 1e-10 * abs(v)
    for j in (2, 4):
        c = tj_contour(10, w, j).value
        assert abs(c.imag) <= 1e-10 * max(abs(c), 1e-300)


def test_t2_equals_weighted_sigma_tilde():
    for n in (20, 75, 300):
        K = default_kmax(n)
        a2 = hermite_eval(n, 1.0) ** 2
        s = asy.aux_sum("sigma_tilde", n, 1.0, k_max=K).partial
        assert t2(n, odd_pair(1.0), K).value.real == pytest.approx(2 * a2 * s, rel=1e-12)


def test_t3_even_pair_closed_form():
    # t3 = 2 a_n^2 (sigma'^2 - a_n^2 tau'); the diagonal-weighted term enters with a minus sign
    n, K = 40, default_kmax(40)
    a2 = hermite_eval(n, 1.0) ** 2
    sp = asy.aux_sum("sigma_prime", n, 1.0, k_max=K).partial
    tp = asy.aux_sum("tau_prime", n, 1.0, k_max=K).partial
    assert t3(n, even_pair(1.0), K).value.real == pytest.approx(2 * a2 * (sp * sp - a2 * tp), abs=1e-10)
    assert abs(t3(n, even_pair(1.0), K).value.real - 2 * a2 * (sp * sp + a2 * tp)) > 1e-6


def test_tail_bounds_cover_cutoff_change():
    for w in (delta(1.0), even_pair(1.0), odd_pair(2.0)):
        for n in (5, 40):
            lo, hi = t2(n, w, 4096), t2(n, w, 1 << 16)
            assert abs(lo.value - hi.value) <= lo.tail_bound
            lo3, hi3 = t3(n, w, 4096), t3(n, w, 1 << 16)
            assert abs(lo3.value - hi3.value) <= lo3.tail_bound


def test_cutoff_and_order_validation():
    with pytest.raises(ValueError):
        t2(100, delta(1.0), 300)
    with pytest.raises(ValueError):
        tj_contour(5, delta(1.0), 5)
    with pytest.raises(ValueError):
        ContourSpec(50, truncation=100)
    with pytest.raises(ValueError):
        tj_contour(5, delta(1.0), 2, ContourSpec(6))


def test_series_zero_potential():
    s = lambda_series(10, PointPotential.zero())
    assert s.lambda_estimate == 21 and s.remainder_bound == 0.0


def test_series_warns_below_threshold():
    with pytest.warns(UserWarning, match="threshold"):
        s = lambda_series(30, odd_pair(1.0, 0.5))
    assert s.below_threshold
    assert s.lambda_estimate == 61 + s.t1 + s.t2 + s.t3
    C0 = decay_constant(odd_pair(1.0, 0.5))
    assert s.remainder_bound == pytest.approx(remainder_bound(30, 3, 0.25, C0))


def test_series_against_exact_eigenvalues():
    w = odd_pair(1.0, 0.5)
    lad = solve_ladder(w, 30, 200, N=1024, refine=True)
    errs, bare = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n in range(30, 201, 10):
            s = lambda_series(n, w)
            err = abs(s.lambda_estimate - lad[n].lam)
            assert err <= s.remainder_bound
            errs.append(err)
            bare.append(abs(lad[n].lam - (2 * n + 1)))
            model = asy.AsymptoticModel("odd_pair", s=0.5, b=1.0)
            assert abs(s.lambda_estimate - asy.lambda_asymptotic(model, n)[0]) <= 10 * np.log(n) / n ** 1.5
    assert max(errs) <= 3e-4 and sum(errs) < sum(bare)
