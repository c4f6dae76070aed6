import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from warpbci.errors import DimensionMismatch
from warpbci.warp import (
    LocalDistance,
    Series,
    WarpVariant,
    dtw_distance,
    linear_interpolate,
    ltw_distance,
    validate_path,
    znormalize,
)

from oracles import enumerate_dtw_min, local_cost_matrix, ltw_oracle


def series(*vals):
    return Series(np.asarray(vals, dtype=float))


class TestZNormalize:
    def test_small_example(self):
        out = znormalize(series(1.0, 2.0, 3.0)).points[:, 0]
        expect = [-1.2247448713915890, 0.0, 1.2247448713915890]
        np.testing.assert_allclose(out, expect, atol=1e-12)
        assert abs(out.mean()) < 1e-12
        assert abs(out.std() - 1.0) < 1e-12

    def test_constant_maps_to_zero(self):
        out = znormalize(series(5.0, 5.0, 5.0)).points
        assert np.all(out == 0.0)

    def test_idempotent(self):
        s = series(0.3, -1.0, 2.0, 0.1)
        once = znormalize(s)
        twice = znormalize(once)
        np.testing.assert_allclose(once.points, twice.points, atol=1e-9)

    def test_per_dimension(self):
        pts = np.array([[1.0, 100.0], [2.0, 100.0], [3.0, 103.0]])
        out = znormalize(Series(pts)).points
        for d in range(2):
            assert abs(out[:, d].mean()) < 1e-12


class TestLinearInterpolate:
    def test_midpoint(self):
        out = linear_interpolate(series(0.0, 2.0), 3).points[:, 0]
        np.testing.assert_allclose(out, [0.0, 1.0, 2.0], atol=1e-12)

    def test_identity_at_same_length(self):
        s = series(0.7, -0.2, 5.0)
        out = linear_interpolate(s, 3)
        assert np.array_equal(out.points, s.points)

    def test_hand_derived_len5(self):
        out = linear_interpolate(series(0.0, 3.0, 0.0), 5).points[:, 0]
        np.testing.assert_allclose(out, [0.0, 1.5, 3.0, 1.5, 0.0], atol=1e-12)

    def test_endpoints_preserved(self):
        s = series(2.0, -1.0, 4.0, 0.0)
        out = linear_interpolate(s, 11).points[:, 0]
        assert out[0] == 2.0 and out[-1] == 0.0

    def test_single_frame_repeats(self):
        out = linear_interpolate(series(3.0), 4).points[:, 0]
        np.testing.assert_array_equal(out, [3.0] * 4)


class TestLtw:
    def test_identical_is_zero(self):
        s = series(0.0, 1.0, 0.5, 2.0)
        assert ltw_distance(s, s).distance == pytest.approx(0.0, abs=1e-12)

    def test_affine_invariance(self):
        a = series(0.0, 1.0, 0.5, 2.0)
        b = Series(3.0 * a.points + 7.0)
        assert ltw_distance(a, b).distance == pytest.approx(0.0, abs=1e-9)

    def test_matches_oracle(self):
        a = [0.0, 1.0, 0.0]
        b = [0.0, 0.5, 1.0, 0.5, 0.0]
        got = ltw_distance(series(*a), series(*b)).distance
        assert got == pytest.approx(ltw_oracle(a, b), abs=1e-9)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ltw_distance(Series(np.zeros((3, 2))), series(1.0, 2.0))

    def test_no_path(self):
        assert ltw_distance(series(1.0, 2.0), series(1.0, 2.0)).path is None


class TestDtw:
    def test_identical_zero_with_diagonal_path(self):
        s = series(0.2, 1.0, -0.4, 0.9)
        res = dtw_distance(s, s, WarpVariant.VANILLA_DTW)
        assert res.distance == pytest.approx(0.0, abs=1e-12)
        assert res.path == tuple((i, i) for i in range(4))

    def test_many_to_one_alignment(self):
        # the repeated middle frame absorbs the extra sample at zero cost
        a = series(1.0, 2.0, 3.0)
        b = series(1.0, 2.0, 2.0, 3.0)
        res = dtw_distance(
            a, b, WarpVariant.VANILLA_DTW,
            local=LocalDistance.SQUARED, normalize_inputs=False,
        )
        cost = local_cost_matrix([(1.0,), (2.0,), (3.0,)],
                                 [(1.0,), (2.0,), (2.0,), (3.0,)], "squared")
        assert enumerate_dtw_min(cost) == 0.0
        assert res.distance == pytest.approx(0.0, abs=1e-12)

    def test_vanilla_matches_enumerator(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n, m = rng.integers(1, 7, size=2)
            a = rng.normal(size=(n, 1))
            b = rng.normal(size=(m, 1))
            res = dtw_distance(Series(a), Series(b), WarpVariant.VANILLA_DTW,
                               normalize_inputs=False)
            cost = local_cost_matrix([tuple(f) for f in a], [tuple(f) for f in b])
            assert res.distance == pytest.approx(enumerate_dtw_min(cost), abs=1e-12)

    def test_vanilla_symmetry(self):
        rng = np.random.default_rng(3)
        a = Series(rng.normal(size=(6, 1)))
        b = Series(rng.normal(size=(9, 1)))
        d_ab = dtw_distance(a, b, WarpVariant.VANILLA_DTW).distance
        d_ba = dtw_distance(b, a, WarpVariant.VANILLA_DTW).distance
        assert d_ab == pytest.approx(d_ba, abs=1e-12)

    def test_normalized_divides_by_path_length(self):
        rng = np.random.default_rng(11)
        a = Series(rng.normal(size=(5, 1)))
        b = Series(rng.normal(size=(8, 1)))
        van = dtw_distance(a, b, WarpVariant.VANILLA_DTW)
        nor = dtw_distance(a, b, WarpVariant.NORMALIZED_DTW)
        assert nor.distance == pytest.approx(van.distance / len(van.path), abs=1e-12)
        assert nor.distance <= van.distance

    def test_timesync_matches_enumerator_when_rows_longer(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            m = int(rng.integers(1, 6))
            n = int(rng.integers(m, 7))
            a = rng.normal(size=(n, 1))
            b = rng.normal(size=(m, 1))
            res = dtw_distance(Series(a), Series(b), WarpVariant.TIMESYNC_DTW,
                               normalize_inputs=False)
            cost = local_cost_matrix([tuple(f) for f in a], [tuple(f) for f in b])
            expect = enumerate_dtw_min(cost, timesync=True)
            assert res.distance == pytest.approx(expect, abs=1e-12)
            assert not res.swapped

    def test_timesync_orients_longer_first(self):
        a = series(1.0, 5.0)
        b = series(1.0, 2.0, 5.0, 0.0)
        res = dtw_distance(a, b, WarpVariant.TIMESYNC_DTW, normalize_inputs=False)
        assert res.swapped
        assert res.cost_matrix_dims == (4, 2)
        assert math.isfinite(res.distance)
        assert validate_path(res.path, 4, 2, WarpVariant.TIMESYNC_DTW)

    def test_affine_invariance_all_variants(self):
        rng = np.random.default_rng(2)
        a = Series(rng.normal(size=(7, 1)))
        b = Series(rng.normal(size=(9, 1)))
        a2 = Series(2.5 * a.points + 3.0)
        b2 = Series(0.5 * b.points - 1.0)
        for variant in (WarpVariant.VANILLA_DTW, WarpVariant.NORMALIZED_DTW,
                        WarpVariant.TIMESYNC_DTW, WarpVariant.LTW):
            d1 = dtw_distance(a, b, variant).distance
            d2 = dtw_distance(a2, b2, variant).distance
            assert d1 == pytest.approx(d2, abs=1e-9)

    def test_multidim_frames(self):
        rng = np.random.default_rng(9)
        a = Series(rng.normal(size=(5, 4)))
        b = Series(rng.normal(size=(6, 4)))
        res = dtw_distance(a, b, WarpVariant.VANILLA_DTW, normalize_inputs=False)
        cost = local_cost_matrix([tuple(f) for f in a.points],
                                 [tuple(f) for f in b.points])
        assert res.distance == pytest.approx(enumerate_dtw_min(cost), abs=1e-12)

    def test_manhattan_local_distance(self):
        a = series(0.0, 2.0)
        b = series(1.0)
        res = dtw_distance(a, b, WarpVariant.VANILLA_DTW,
                           local=LocalDistance.MANHATTAN, normalize_inputs=False)
        assert res.distance == pytest.approx(2.0, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            dtw_distance(Series(np.zeros((3, 2))), series(1.0, 2.0))


class TestValidatePath:
    def test_diagonal_path(self):
        path = tuple((i, i) for i in range(4))
        assert validate_path(path, 4, 4)

    def test_short_boundary_rejected(self):
        # stops one row before the final cell
        path = ((0, 0), (1, 1), (1, 2))
        assert not validate_path(path, 3, 3)

    def test_backward_step_rejected(self):
        path = ((0, 0), (1, 1), (0, 1), (1, 2), (2, 2))
        assert not validate_path(path, 3, 3)

    def test_jump_rejected(self):
        path = ((0, 0), (2, 2))
        assert not validate_path(path, 3, 3)

    def test_horizontal_rejected_for_timesync(self):
        path = ((0, 0), (0, 1), (1, 2))
        assert validate_path(path, 2, 3)
        assert not validate_path(path, 2, 3, WarpVariant.TIMESYNC_DTW)

    def test_backtracked_paths_valid(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            n, m = rng.integers(1, 12, size=2)
            a = Series(rng.normal(size=(int(n), 1)))
            b = Series(rng.normal(size=(int(m), 1)))
            for variant in (WarpVariant.VANILLA_DTW, WarpVariant.NORMALIZED_DTW,
                            WarpVariant.TIMESYNC_DTW):
                res = dtw_distance(a, b, variant)
                rn, rm = res.cost_matrix_dims
                assert validate_path(res.path, rn, rm, variant)


@given(st.lists(st.floats(-100, 100), min_size=2, max_size=20))
@settings(max_examples=50, deadline=None)
def test_znormalize_idempotent_property(vals):
    s = Series(np.asarray(vals))
    once = znormalize(s)
    twice = znormalize(once)
    np.testing.assert_allclose(once.points, twice.points, atol=1e-9)


@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=7),
    st.lists(st.floats(-10, 10), min_size=1, max_size=7),
)
@settings(max_examples=40, deadline=None)
def test_vanilla_dtw_equals_enumeration_property(a_vals, b_vals):
    a = Series(np.asarray(a_vals))
    b = Series(np.asarray(b_vals))
    res = dtw_distance(a, b, WarpVariant.VANILLA_DTW, normalize_inputs=False)
    cost = local_cost_matrix([(v,) for v in a_vals], [(v,) for v in b_vals])
    assert res.distance == pytest.approx(enumerate_dtw_min(cost), abs=1e-12)
