import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracdim2d import (
    Box,
    CallableSource,
    GridSpec,
    NumericError,
    ParameterError,
    SizeError,
    VariationResult,
    arzela_variation,
    arzela_variation_bruteforce,
    make_source,
    sample,
    variation_trend,
)


# ---------------------------------------------------------------------------
# hand-checked values


def test_constant_grid_has_zero_variation():
    res = arzela_variation(np.full((4, 5), 3.25))
    assert res.value == 0.0
    assert len(res.argpath) == 1


def test_checkerboard_2x2():
    # best chain visits all three jumps of size 1 twice? no: monotone chains
    # can collect at most 2 unit jumps here; brute force confirms
    mat = np.array([[0.0, 1.0], [1.0, 0.0]])
    res = arzela_variation(mat)
    assert res.value == 2.0
    assert res.value == arzela_variation_bruteforce(mat)


def test_single_step_matrix():
    mat = np.array([[0.0, 0.0], [0.0, 5.0]])
    assert arzela_variation(mat).value == 5.0


def test_monotone_grid_variation_is_corner_difference():
    # for coordinatewise nondecreasing data every chain telescopes
    spec = GridSpec(Box(0, 1, 0, 1), 6, 6)
    gs = sample(CallableSource(lambda x, y: x + 2 * y, name="mono"), spec)
    res = arzela_variation(gs)
    assert res.value == pytest.approx(3.0, abs=1e-14)


def test_univariate_rows_reduce_to_1d_variation():
    mat = np.array([[0.0, 2.0, -1.0, 3.0]])
    assert arzela_variation(mat).value == pytest.approx(2 + 3 + 4, abs=0)


def test_path_is_reported_and_consistent():
    rng = np.random.default_rng(7)
    mat = rng.standard_normal((6, 7))
    res = arzela_variation(mat)
    # re-summing the reported path in order reproduces the value bit for bit
    total = 0.0
    for (i0, j0), (i1, j1) in zip(res.argpath, res.argpath[1:]):
        total += abs(mat[i1, j1] - mat[i0, j0])
    assert total == res.value


def test_pinned_path_hits_both_corners_same_value():
    rng = np.random.default_rng(11)
    mat = rng.standard_normal((5, 5))
    free = arzela_variation(mat)
    pinned = arzela_variation(mat, pinned=True)
    assert pinned.value == free.value
    assert pinned.argpath[0] == (0, 0)
    assert pinned.argpath[-1] == (4, 4)


# ---------------------------------------------------------------------------
# oracle equivalence


def _dyadic_matrix(rng, m, n):
    # sixteenths keep every partial sum exact in float64, so the saturated
    # dynamic program and the unrestricted brute force agree to the bit
    return rng.integers(-128, 129, size=(m, n)).astype(np.float64) / 16.0


@pytest.mark.parametrize("shape", [(2, 2), (2, 3), (3, 3), (2, 6), (3, 4), (4, 4)])
def test_dp_equals_bruteforce_on_dyadic_grids(shape):
    rng = np.random.default_rng(hash(shape) % 2**32)
    for _ in range(60):
        mat = _dyadic_matrix(rng, *shape)
        assert arzela_variation(mat).value == arzela_variation_bruteforce(mat)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_dp_vs_bruteforce_continuous_values_within_rounding(m, n, seed):
    # with arbitrary float data a non-saturated chain can beat the saturated
    # optimum by a last-ulp rounding flip; the two routes still agree to a
    # few ulp of the value
    mat = np.random.default_rng(seed).standard_normal((m, n))
    dp = arzela_variation(mat).value
    bf = arzela_variation_bruteforce(mat)
    assert abs(dp - bf) <= 8 * np.finfo(np.float64).eps * max(1.0, abs(bf))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_pinned_and_free_agree_everywhere(m, n, seed):
    mat = np.random.default_rng(seed).standard_normal((m, n))
    assert arzela_variation(mat).value == arzela_variation(mat, pinned=True).value


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2**31 - 1))
def test_variation_is_a_seminorm_under_scaling(m, n, seed):
    mat = np.random.default_rng(seed).standard_normal((m, n)) / 8.0
    v1 = arzela_variation(mat).value
    v2 = arzela_variation(2.0 * mat).value
    assert v2 == pytest.approx(2.0 * v1, rel=1e-14)


def test_bruteforce_size_cap():
    with pytest.raises(SizeError):
        arzela_variation_bruteforce(np.zeros((5, 4)))


# ---------------------------------------------------------------------------
# result validation and trend


def test_variation_result_validates_path():
    with pytest.raises(ParameterError):
        VariationResult(value=1.0, argpath=((0, 0), (2, 0)))  # jump of 2 is not saturated
    with pytest.raises(ParameterError):
        VariationResult(value=1.0, argpath=((1, 1), (0, 1)))  # decreasing
    with pytest.raises(ParameterError):
        VariationResult(value=-1.0, argpath=((0, 0),))
    with pytest.raises(ParameterError):
        VariationResult(value=math.nan, argpath=((0, 0),))


def test_variation_rejects_bad_input():
    with pytest.raises(ParameterError):
        arzela_variation(np.zeros((0, 3)))
    with pytest.raises(ParameterError):
        arzela_variation(np.zeros(7))
    with pytest.raises(NumericError):
        arzela_variation(np.array([[0.0, np.inf], [0.0, 0.0]]))


def test_variation_trend_saturates_for_smooth_function():
    src = make_source("sinxy")
    # nested node sets (steps 1/8, 1/16, 1/32), so refinement cannot lose chains
    series = variation_trend(src, Box(1, 2, 1, 2), (9, 17, 33))
    vals = [v for _, v in series]
    assert vals[1] >= vals[0] - 1e-12 and vals[2] >= vals[1] - 1e-12
    assert vals[2] / vals[1] - 1.0 < 0.05  # refinement barely moves it


def test_variation_trend_diverges_for_staircase_construction():
    src = make_source("t-parabola-sine")
    series = variation_trend(src, src.domain, (16, 32, 64))
    vals = [v for _, v in series]
    assert vals[0] < vals[1] < vals[2]


def test_variation_trend_validates_levels():
    src = make_source("constant:1")
    with pytest.raises(ParameterError):
        variation_trend(src, Box(1, 2, 1, 2), (8, 8))
    with pytest.raises(ParameterError):
        variation_trend(src, Box(1, 2, 1, 2), (1, 4))
    with pytest.raises(ParameterError):
        variation_trend(src, Box(1, 2, 1, 2), ())
