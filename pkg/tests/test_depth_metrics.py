"""Tests for depth error metrics."""

import numpy as np
import pytest

from monocc.errors import EmptySupportError, InvalidArgumentError
from monocc.evaluation import compute_errors, depth_metrics
from monocc.maps import DepthMap


def _gt(seed=0, shape=(12, 16)) -> DepthMap:
    return DepthMap(np.random.default_rng(seed).uniform(2.0, 60.0, size=shape))


class TestComputeErrors:
    """Raw metric formulas."""

    def test_identical_depths(self):
        gt = np.array([1.0, 5.0, 20.0])
        abs_rel, sq_rel, rmse, rmse_log, a1, a2, a3 = compute_errors(gt, gt.copy())
        assert abs_rel == 0.0 and sq_rel == 0.0 and rmse == 0.0 and rmse_log == 0.0
        assert a1 == a2 == a3 == 1.0

    def test_hand_values(self):
        gt = np.array([2.0, 4.0])
        pred = np.array([3.0, 4.0])
        abs_rel, sq_rel, rmse, _, a1, a2, _ = compute_errors(gt, pred)
        assert abs_rel == pytest.approx(0.25)
        assert sq_rel == pytest.approx(0.25)
        assert rmse == pytest.approx(np.sqrt(0.5))
        assert a1 == pytest.approx(0.5)
        assert a2 == pytest.approx(1.0)


class TestDepthMetrics:
    """Masking, capping and median scaling."""

    def test_perfect_prediction(self):
        gt = _gt()
        report = depth_metrics(gt, gt, scaling="none")
        assert report.abs_rel == pytest.approx(0.0, abs=1e-12)
        assert report.rmse == pytest.approx(0.0, abs=1e-12)
        assert report.delta1 == 1.0
        assert report.pixels == gt.values.size

    def test_uniform_overestimate(self):
        gt = _gt(shape=(8, 8))
        gt = DepthMap(np.clip(gt.values, 2.0, 50.0))
        report = depth_metrics(gt.scaled(1.3), gt, scaling="none")
        assert report.abs_rel == pytest.approx(0.3)
        assert report.delta1 == 0.0
        assert report.delta2 == 1.0
        assert report.ratio == 1.0

    def test_median_scaling_removes_global_scale(self):
        gt = _gt(seed=3)
        report = depth_metrics(gt.scaled(0.5), gt, scaling="median")
        assert report.ratio == pytest.approx(2.0)
        assert report.abs_rel == pytest.approx(0.0, abs=1e-12)
        assert report.scaling == "median"

    def test_cap_excludes_far_ground_truth(self):
        values = np.full((2, 2), 10.0)
        values[0, 0] = 100.0
        gt = DepthMap(values)
        report = depth_metrics(gt, gt, cap=80.0, scaling="none")
        assert report.pixels == 3

    def test_predictions_are_clamped(self):
        gt = DepthMap(np.full((1, 2), 10.0))
        pred = DepthMap(np.array([[200.0, 10.0]]))
        report = depth_metrics(pred, gt, cap=80.0, scaling="none")
        assert report.abs_rel == pytest.approx((70.0 / 10.0) / 2)

    def test_invalid_pixels_are_skipped(self):
        gt_values = np.full((2, 2), 5.0)
        gt_values[1, 1] = np.nan
        pred_values = np.full((2, 2), 5.0)
        pred_values[0, 0] = np.nan
        report = depth_metrics(DepthMap(pred_values), DepthMap(gt_values), scaling="none")
        assert report.pixels == 2

    def test_empty_support(self):
        with pytest.raises(EmptySupportError):
            depth_metrics(DepthMap.invalid(3, 3), _gt(shape=(3, 3)))

    def test_bad_arguments(self):
        gt = _gt(shape=(3, 3))
        with pytest.raises(InvalidArgumentError):
            depth_metrics(gt, gt, scaling="mean")
        with pytest.raises(InvalidArgumentError):
            depth_metrics(_gt(shape=(2, 2)), gt)
