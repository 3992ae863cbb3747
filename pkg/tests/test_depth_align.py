"""Tests for inverse depth alignment."""

import numpy as np
import pytest

from monocc.config.run import AlignConfig
from monocc.depth import (
    AlignmentProblem,
    AlignmentTargets,
    ResidualField,
    alignment_objective,
    fit_residual,
    interpolation_matrix,
    refine_depth,
    residual_statistics,
)
from monocc.errors import InvalidArgumentError
from monocc.evaluation.depth_metrics import depth_metrics
from monocc.maps import DepthMap


def _plane(width=32, height=24, a=0.05, b=0.001, c=0.002) -> DepthMap:
    """Depth whose inverse is affine in (u, v), like any plane seen by a pinhole."""
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    return DepthMap(1.0 / (a + b * u + c * v))


class TestInterpolationMatrix:
    """Bilinear control weights."""

    def test_rows_sum_to_one(self):
        w = interpolation_matrix(37, 5)
        np.testing.assert_allclose(w.sum(axis=1), 1.0)

    def test_border_controls_sit_on_border_pixels(self):
        w = interpolation_matrix(9, 3)
        np.testing.assert_allclose(w[0], [1.0, 0.0, 0.0])
        np.testing.assert_allclose(w[4], [0.0, 1.0, 0.0])
        np.testing.assert_allclose(w[8], [0.0, 0.0, 1.0])
        np.testing.assert_allclose(w[2], [0.5, 0.5, 0.0])

    def test_single_control_rejected(self):
        with pytest.raises(InvalidArgumentError):
            interpolation_matrix(10, 1)


class TestResidualField:
    """Control grid storage and upsampling."""

    def test_constant_grid_upsamples_to_constant(self):
        field = ResidualField(np.full((3, 4), 0.25))
        np.testing.assert_allclose(field.evaluate(10, 13), 0.25)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidArgumentError):
            ResidualField(np.array([[0.0, np.nan], [0.0, 0.0]]))

    def test_save_load(self, tmp_path):
        field = ResidualField(np.arange(12, dtype=np.float64).reshape(3, 4) * 1e-3)
        sidecar = field.save(tmp_path / "camera_residual")
        assert sidecar.suffix == ".json"
        back = ResidualField.load(sidecar)
        np.testing.assert_array_equal(back.control, field.control)


class TestRefineDepth:
    """Applying a residual to pseudo depth."""

    def test_zero_residual_keeps_depth(self):
        pseudo = DepthMap(np.full((4, 5), 8.0))
        refined = refine_depth(pseudo, ResidualField.zeros(2, 2), 1e-6)
        np.testing.assert_allclose(refined.values, 8.0, rtol=1e-5)

    def test_exact_correction_of_scale(self):
        gt = DepthMap(np.full((4, 5), 10.0))
        residual = np.full((4, 5), 1.0 / 10.0 - 1.0 / 20.0)
        refined = refine_depth(gt.scaled(2.0), residual, 1e-12)
        np.testing.assert_allclose(refined.values, 10.0, rtol=1e-9)

    def test_invalid_pixels_stay_invalid(self):
        values = np.full((2, 2), 5.0)
        values[0, 1] = np.nan
        refined = refine_depth(DepthMap(values), ResidualField.zeros(2, 2), 1e-6)
        assert np.isnan(refined.values[0, 1])
        assert np.isfinite(refined.values[1, 1])

    def test_non_positive_denominator_is_invalid(self):
        pseudo = DepthMap(np.full((2, 2), 2.0))
        refined = refine_depth(pseudo, np.full((2, 2), -1.0), 1e-6)
        assert not refined.valid.any()

    def test_size_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            refine_depth(DepthMap(np.ones((2, 2))), np.zeros((3, 3)), 1e-6)


class TestAlignmentTargets:
    """Sparse target extraction."""

    def test_all_valid_pixels(self):
        values = np.full((3, 4), 7.0)
        values[1, 2] = np.nan
        targets = AlignmentTargets.from_depth_map(DepthMap(values))
        assert len(targets) == 11

    def test_fraction_needs_generator(self):
        with pytest.raises(InvalidArgumentError):
            AlignmentTargets.from_depth_map(DepthMap(np.ones((3, 3))), fraction=0.5)

    def test_fraction_subset(self):
        targets = AlignmentTargets.from_depth_map(
            DepthMap(np.ones((10, 10))), fraction=0.3, rng=np.random.default_rng(0)
        )
        assert len(targets) == 30

    def test_targets_outside_image(self):
        targets = AlignmentTargets(u=[40], v=[0], depth=[5.0])
        with pytest.raises(InvalidArgumentError):
            AlignmentProblem.build(DepthMap(np.ones((4, 4))), targets, (2, 2))

    def test_no_valid_targets(self):
        targets = AlignmentTargets(u=[0], v=[0], depth=[np.nan])
        with pytest.raises(InvalidArgumentError):
            AlignmentProblem.build(DepthMap(np.ones((4, 4))), targets, (2, 2))


class TestObjectiveGradient:
    """Analytic gradient against central differences."""

    def test_finite_differences(self):
        rng = np.random.default_rng(8)
        pseudo = DepthMap(rng.uniform(5.0, 15.0, size=(16, 20)))
        gt = DepthMap(rng.uniform(5.0, 15.0, size=(16, 20)))
        problem = AlignmentProblem.build(
            pseudo, AlignmentTargets.from_depth_map(gt), (3, 4), smoothness=0.5
        )
        grid = rng.uniform(-0.01, 0.01, size=(3, 4))
        _, grad = alignment_objective(grid, problem)
        h = 1e-7
        numeric = np.zeros_like(grid)
        for idx in np.ndindex(grid.shape):
            up = grid.copy()
            down = grid.copy()
            up[idx] += h
            down[idx] -= h
            numeric[idx] = (
                alignment_objective(up, problem)[0] - alignment_objective(down, problem)[0]
            ) / (2.0 * h)
        np.testing.assert_allclose(grad, numeric, rtol=1e-4, atol=1e-8)

    def test_infinite_when_denominator_collapses(self):
        pseudo = DepthMap(np.full((4, 4), 2.0))
        problem = AlignmentProblem.build(
            pseudo, AlignmentTargets.from_depth_map(pseudo), (2, 2)
        )
        loss, _ = alignment_objective(np.full((2, 2), -1.0), problem)
        assert loss == float("inf")


class TestFitResidual:
    """Recovering metric depth from scaled pseudo depth."""

    def test_scale_two_is_recovered(self):
        gt = DepthMap(np.full((24, 32), 10.0))
        pseudo = gt.scaled(2.0)
        result = fit_residual(pseudo, AlignmentTargets.from_depth_map(gt), (4, 6), 1e-6)
        refined = refine_depth(pseudo, result.field, 1e-6)
        metrics = depth_metrics(refined, gt, 80.0, "none")
        assert metrics.abs_rel < 1e-3
        assert result.history[0] > result.loss
        np.testing.assert_allclose(result.field.control, 0.05, atol=1e-4)

    def test_loss_never_increases(self):
        gt = _plane()
        result = fit_residual(gt.scaled(2.0), AlignmentTargets.from_depth_map(gt), (3, 4))
        history = np.array(result.history)
        assert np.all(np.diff(history) <= 0.0)

    def test_plane_error_shrinks(self):
        gt = _plane()
        pseudo = gt.scaled(2.0)
        result = fit_residual(pseudo, AlignmentTargets.from_depth_map(gt), (3, 4))
        before = depth_metrics(pseudo, gt, 80.0, "none").abs_rel
        after = depth_metrics(refine_depth(pseudo, result.field, 1e-6), gt, 80.0, "none").abs_rel
        assert before == pytest.approx(1.0)
        assert after < 0.5 * before

    def test_iteration_cap_is_respected(self):
        gt = _plane()
        config = AlignConfig(max_iterations=3)
        result = fit_residual(gt.scaled(2.0), AlignmentTargets.from_depth_map(gt), (3, 4), config=config)
        assert result.iterations <= 3


class TestResidualStatistics:
    """Depth vs inverse-depth residual distributions."""

    def test_scaled_pseudo_depth(self):
        gt = DepthMap(np.full((4, 4), 10.0))
        stats = residual_statistics(gt.scaled(2.0), gt)
        assert stats["depth"].mean == pytest.approx(-10.0)
        assert stats["inverse"].mean == pytest.approx(0.05)
        assert stats["inverse"].variance == pytest.approx(0.0, abs=1e-18)
        assert sum(stats["depth"].histogram) == 16

    def test_no_overlap(self):
        gt = DepthMap(np.full((2, 2), 1.0))
        with pytest.raises(InvalidArgumentError):
            residual_statistics(DepthMap.invalid(2, 2), gt)
