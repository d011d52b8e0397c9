import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from antsel.exceptions import DimensionMismatch
from antsel.receiver import bpsk_detect, bpsk_modulate, combine_mrc, combine_selection, receive
from antsel.selection import SelectionVector, build_problem, omp_select

from helpers import random_cn


@pytest.mark.parametrize("bit, power, expected", [(0, 1, 1.0), (1, 1, -1.0), (0, 4, 2.0)])
def test_modulate(bit, power, expected):
    assert bpsk_modulate(bit, power) == expected


def test_modulate_array():
    np.testing.assert_array_equal(bpsk_modulate(np.array([0, 1, 1]), 1.0), [1, -1, -1])


def test_receive():
    np.testing.assert_array_equal(receive([1, 1j], 1.0, [0, 0]), [1, 1j])
    np.testing.assert_array_equal(receive([0, 0], -3.0, [2, 3]), [2, 3])
    np.testing.assert_allclose(receive([1, 0], -1.0, [0.1, 0]), [-0.9, 0])
    with pytest.raises(DimensionMismatch):
        receive([1, 2], 1.0, [1, 2, 3])


def test_mrc():
    assert combine_mrc([1, 1j], [1, 1j]) == 2
    assert combine_mrc([1, 1j], [1j, -1]) == pytest.approx(2j)
    assert combine_mrc([1, 1], [1, -1]) == 0
    with pytest.raises(DimensionMismatch):
        combine_mrc([1, 2], [1])


def test_mrc_matched_filter(rng):
    h = random_cn(rng, 8)
    assert combine_mrc(h, h * -1.0) == pytest.approx(-np.vdot(h, h).real)


def test_selection_combining():
    sel = SelectionVector(np.array([1.0, 0.0]), (0,), 1)
    assert combine_selection(sel, np.array([3 - 1j, 7.0])) == 3 - 1j
    assert combine_selection(np.zeros(2), np.array([3.0, 4.0])) == 0
    assert combine_selection(np.array([1 / 3, 1 / 6]), np.array([2.0, 1.0])) == pytest.approx(5 / 6)


def test_selection_ignores_off_support(rng):
    sel = omp_select(build_problem(random_cn(rng, 10), 1.0, 1.0), 3)
    y = random_cn(rng, 10)
    masked = np.zeros_like(y)
    masked[list(sel.support)] = y[list(sel.support)]
    assert combine_selection(sel, y) == pytest.approx(combine_selection(sel, masked), abs=1e-15)


@pytest.mark.parametrize("z, bit", [(2.5 + 0.1j, 0), (-0.3, 1), (0.0, 0), (-0.0, 0), (1e-300, 0)])
def test_detect(z, bit):
    assert bpsk_detect(z) == bit


def test_noiseless_perfect_csi_recovers_bits(rng):
    for _ in range(1000):
        h = random_cn(rng, int(rng.integers(1, 9)))
        bit = int(rng.integers(0, 2))
        y = receive(h, bpsk_modulate(bit), np.zeros_like(h))
        assert bpsk_detect(combine_mrc(h, y)) == bit


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.complex_numbers(max_magnitude=100, allow_nan=False))
def test_combiners_linear(seed, alpha):
    rng = np.random.default_rng(seed)
    w, y1, y2 = random_cn(rng, 6), random_cn(rng, 6), random_cn(rng, 6)
    scale = 1 + abs(alpha)
    for comb in (combine_mrc, combine_selection):
        lhs = comb(w, alpha * y1 + y2)
        rhs = alpha * comb(w, y1) + comb(w, y2)
        assert abs(lhs - rhs) <= 1e-12 * scale * 10


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(1e-6, 1e6))
def test_positive_weight_scaling_keeps_decision(seed, c):
    rng = np.random.default_rng(seed)
    w, y = random_cn(rng, 5), random_cn(rng, 5)
    z = combine_selection(w, y)
    if abs(z.real) > 1e-9 * np.linalg.norm(w) * np.linalg.norm(y):
        assert bpsk_detect(combine_selection(c * w, y)) == bpsk_detect(z)
