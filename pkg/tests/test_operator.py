import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pointspec.hermite import hermite_eval
from pointspec.operator import (PointPotential, TwoPointForm, build_truncated, decay_constant, delta,
                                even_pair, matrix_element, odd_pair, perturbation_matrix)

locs = st.floats(0.05, 4.0, allow_nan=False)
coups = st.floats(-3.0, 3.0, allow_nan=False)


def test_two_point_form_conversion():
    w = TwoPointForm(0.3, 0.7, 1.5).to_potential()
    assert dict((b, c) for c, b in w.terms) == {1.5: 1.0, -1.5: pytest.approx(-0.4)}
    with pytest.raises(ValueError):
        TwoPointForm(1.0, 0.0, 0.0)


def test_potential_validation():
    with pytest.raises(ValueError):
        PointPotential(())
    with pytest.raises(ValueError):
        PointPotential(((1.0, math.inf),))
    with pytest.raises(ValueError):
        PointPotential(((math.nan, 0.0),))
    assert delta(1.0, 2.0).nu == 2.0 and odd_pair(1.0, 0.5).nu == 1.0


def test_matrix_elements():
    h0, h1 = hermite_eval(0, 1.0), hermite_eval(1, 1.0)
    assert matrix_element(odd_pair(1.0), 0, 2) == 0
    assert matrix_element(odd_pair(1.0), 0, 1) == pytest.approx(2 * h0 * h1, rel=1e-15)
    assert matrix_element(delta(0.0), 1, 1) == 0


def test_assembly_small():
    op = build_truncated(PointPotential.zero(), 4)
    assert np.array_equal(op.entries, np.diag([1, 3, 5, 7]).astype(complex))
    j, k = np.indices((4, 4))
    assert not np.any(build_truncated(odd_pair(1.0), 4).perturbation[(j + k) % 2 == 0])
    assert not np.any(build_truncated(even_pair(1.0), 4).perturbation[(j + k) % 2 == 1])


def test_assembly_matches_elementwise():
    w = PointPotential(((0.4 + 0.2j, 0.3), (-1.1, -1.7), (0.5j, 2.2)))
    mat = perturbation_matrix(w, 40)
    for j in range(0, 40, 7):
        for k in range(0, 40, 5):
            assert mat[j, k] == pytest.approx(matrix_element(w, j, k), rel=1e-13, abs=1e-16)
    op = build_truncated(w, 40)
    np.testing.assert_array_equal(np.diag(op.entries) - np.diag(mat), 2 * np.arange(40) + 1)


def test_build_rejects_bad_sizes():
    for N in (0, -3, 2.5, True):
        with pytest.raises(ValueError):
            build_truncated(delta(1.0), N)
    assert not build_truncated(delta(1.0), 8).entries.flags.writeable


@given(locs, coups, coups)
def test_parity_structure_exact(b, t, s):
    j, k = np.indices((64, 64))
    W = perturbation_matrix(odd_pair(b, s), 64)
    assert not np.any(W[(j + k) % 2 == 0])
    W = perturbation_matrix(even_pair(b, t), 64)
    assert not np.any(W[(j + k) % 2 == 1])
    W = perturbation_matrix(odd_pair(b, 1j * s), 64)
    assert not np.any(W[(j + k) % 2 == 0])


@given(locs, coups, coups)
def test_symmetry(b, t, s):
    W = perturbation_matrix(TwoPointForm(t, s, b).to_potential(), 48)
    assert np.array_equal(W, W.T) and W.dtype == float
    W = perturbation_matrix(odd_pair(b, 1j * s), 48)
    assert np.array_equal(W, W.T) and not np.any(W.real)


def test_decay_constant():
    assert decay_constant(PointPotential.zero()) == 0.0
    c = decay_constant(odd_pair(1.0))
    assert decay_constant(odd_pair(1.0, 2.0)) == pytest.approx(2 * c, rel=1e-14)
    assert abs(decay_constant(odd_pair(1.0), 1024) - c) <= 0.05 * c
    # |w_jk| <= 2 sup|h|^2 for the pair, and the weighted decay stays bounded
    assert c <= 2 * 2 * 0.8 ** 2 * (1 + 512) ** 0.5
    W = np.abs(perturbation_matrix(odd_pair(1.0), 1001))
    wt = (1.0 + np.arange(1001)) ** 0.25
    assert np.max(W * np.outer(wt, wt)) <= 1.1 * decay_constant(odd_pair(1.0), 1000)


def test_potential_algebra():
    w = delta(1.0, 2.0) + delta(-1.0, -2.0)
    assert w.terms == odd_pair(1.0, 2.0).terms
    assert w.scaled(0.5).terms == odd_pair(1.0).terms
    assert odd_pair(1.0, 1j).is_real is False and PointPotential.zero().is_zero
