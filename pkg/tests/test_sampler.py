"""Tests for the semantic-guided non-overlapping patch sampler."""

import numpy as np
import pytest

from monocc.config.strategies import SamplingStrategyTable
from monocc.errors import DescriptorParseError, InvalidArgumentError
from monocc.geometry.camera import Pixel
from monocc.sampler import (
    InstanceMeta,
    PatchSet,
    anchor_domain,
    build_mixture,
    conditioned_accept,
    crucial_mask,
    gaussian_coverage,
    instance_from_dict,
    load_instances,
    pdf_eval,
    pdf_heatmap,
    sample_patches,
    sample_random_patches,
    sampler_efficiency,
    save_instances,
)

TABLE = SamplingStrategyTable()


def _random_layout(rng, width, height, count):
    categories = ["car", "pedestrian", "truck", "road", "building", "sky"]
    instances = []
    for _ in range(count):
        hh = rng.uniform(2.0, height / 4)
        hw = rng.uniform(2.0, width / 4)
        instances.append(
            InstanceMeta(
                category=str(rng.choice(categories)),
                center=Pixel(rng.uniform(0, width - 1), rng.uniform(0, height - 1)),
                half_extents=(hh, hw),
                area=float(rng.uniform(2.0, 4 * hh * hw)),
            )
        )
    return instances


class TestInstances:
    """Instance metadata parsing."""

    def test_missing_key_names_field(self):
        with pytest.raises(DescriptorParseError) as info:
            instance_from_dict({"category": "car", "center": [1, 2], "area": 5}, "instances[3]")
        assert info.value.field == "instances[3].half_extents"

    def test_bad_center(self):
        with pytest.raises(DescriptorParseError) as info:
            instance_from_dict({"category": "car", "center": [1], "half_extents": [1, 1], "area": 5})
        assert info.value.field.endswith(".center")

    def test_save_load(self, tmp_path, kitti_instances):
        path = save_instances(tmp_path / "inst.json", kitti_instances)
        back = load_instances(path)
        assert [i.to_dict() for i in back] == [i.to_dict() for i in kitti_instances]

    def test_bbox_mask(self):
        inst = InstanceMeta("car", Pixel(5.0, 3.0), (1.0, 2.0), 10.0)
        mask = inst.bbox_mask(10, 8)
        assert mask.sum() == 3 * 5
        assert mask[3, 5] and mask[2, 3] and not mask[3, 8]


class TestMixture:
    """Mixture composition and normalization."""

    def test_log_area_weights(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        assert [g.category for g in pdf.gaussians] == ["car", "pedestrian"]
        expected = np.log([2400.0, 500.0])
        np.testing.assert_allclose([g.weight for g in pdf.gaussians], expected / expected.sum())

    def test_covariance_from_half_extents(self, kitti_instances):
        car = build_mixture(kitti_instances, TABLE, 0.3, 640, 192).gaussians[0]
        np.testing.assert_allclose(car.covariance, np.diag([100.0, 400.0]))

    def test_background_region_and_support(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        background = pdf.uniform_regions[-1]
        assert background.category == "unlabeled"
        assert background.area == 640 * 192 - (2400 + 500 + 20000 + 30000)
        mask = crucial_mask(kitti_instances, TABLE, 640, 192)
        assert pdf.support_area == 640 * 192 - mask.sum()

    def test_weights_sum_to_one_on_random_layouts(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            instances = _random_layout(rng, 160, 96, int(rng.integers(1, 6)))
            pdf = build_mixture(instances, TABLE, float(rng.uniform()), 160, 96)
            probs = pdf.component_probabilities
            assert abs(probs.sum() - 1.0) < 1e-9
            if pdf.gaussians:
                assert abs(sum(g.weight for g in pdf.gaussians) - 1.0) < 1e-9

    def test_heatmap_integrates_to_one(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        total = pdf_heatmap(pdf).sum()
        assert 0.97 <= total <= 1.0 + 1e-6

    def test_no_gaussians_is_uniform(self):
        road = [InstanceMeta("road", Pixel(10.0, 10.0), (5.0, 5.0), 100.0)]
        pdf = build_mixture(road, TABLE, 0.2, 40, 20)
        assert pdf.effective_gamma == 1.0
        assert pdf_eval(pdf, Pixel(3.0, 4.0)) == pytest.approx(1.0 / 800.0)

    def test_outside_image_is_zero(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        assert pdf_eval(pdf, Pixel(-1.0, 10.0)) == 0.0
        assert pdf_eval(pdf, Pixel(10.0, 191.5)) == 0.0

    def test_gaussian_area_too_small(self):
        tiny = [InstanceMeta("car", Pixel(10.0, 10.0), (1.0, 1.0), 1.0)]
        with pytest.raises(InvalidArgumentError):
            build_mixture(tiny, TABLE, 0.3, 40, 20)

    def test_centre_outside_image(self):
        off = [InstanceMeta("car", Pixel(50.0, 10.0), (1.0, 1.0), 4.0)]
        with pytest.raises(InvalidArgumentError):
            build_mixture(off, TABLE, 0.3, 40, 20)

    def test_unknown_category(self):
        odd = [InstanceMeta("spaceship", Pixel(10.0, 10.0), (1.0, 1.0), 4.0)]
        with pytest.raises(InvalidArgumentError):
            build_mixture(odd, TABLE, 0.3, 40, 20)

    def test_gamma_out_of_range(self, kitti_instances):
        with pytest.raises(InvalidArgumentError):
            build_mixture(kitti_instances, TABLE, 1.5, 640, 192)


class TestGaussianCoverage:
    """Per-axis coverage of +/- b_k around the component means."""

    def test_two_sigma_rate(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        u, v, labels = pdf.draw(np.random.default_rng(11), 100_000)
        coverage = gaussian_coverage(pdf, u, v, labels)
        assert coverage["draws"] > 60_000
        assert abs(coverage["u"] - 0.9545) < 0.005
        assert abs(coverage["v"] - 0.9545) < 0.005

    def test_no_gaussian_draws(self):
        road = [InstanceMeta("road", Pixel(10.0, 10.0), (5.0, 5.0), 100.0)]
        pdf = build_mixture(road, TABLE, 0.2, 40, 20)
        u, v, labels = pdf.draw(np.random.default_rng(0), 100)
        assert np.all(labels == -1)
        assert gaussian_coverage(pdf, u, v, labels)["draws"] == 0


class TestConditionedAccept:
    """Non-overlap condition on squared anchor distance."""

    def test_empty_set_accepts(self):
        assert conditioned_accept([], Pixel(1.0, 1.0), 8)

    def test_boundary_is_accepted(self):
        assert conditioned_accept([Pixel(0.0, 0.0)], Pixel(8.0, 8.0), 8)

    def test_too_close_is_rejected(self):
        assert not conditioned_accept(np.array([[0.0, 0.0]]), Pixel(8.0, 7.9), 8)


class TestSamplePatches:
    """Guided sampling runs."""

    def test_anchor_domain(self):
        assert anchor_domain(640, 192, 8) == (4.0, 636.0, 4.0, 188.0)
        with pytest.raises(InvalidArgumentError):
            anchor_domain(6, 40, 8)

    def test_full_set_covers_n_l_squared(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        rng = np.random.default_rng(0)
        for _ in range(200):
            patches = sample_patches(pdf, 64, 8, rng)
            assert patches.complete
            assert patches.coverage_mask().sum() == 64 * 64

    def test_non_overlap_on_random_layouts(self):
        rng = np.random.default_rng(21)
        for _ in range(300):
            instances = _random_layout(rng, 160, 96, int(rng.integers(1, 5)))
            pdf = build_mixture(instances, TABLE, 0.3, 160, 96)
            patches = sample_patches(pdf, 16, 8, rng, max_attempts=2000)
            assert patches.min_pair_distance_sq() >= 2 * 8 * 8
            corners = patches.corners()
            assert np.all(corners >= 0)
            assert np.all(corners[:, 0] + 8 <= 160) and np.all(corners[:, 1] + 8 <= 96)
            assert patches.coverage_mask().sum() == patches.count * 64

    def test_budget_exhaustion_returns_partial_set(self):
        road = [InstanceMeta("road", Pixel(10.0, 10.0), (5.0, 5.0), 100.0)]
        pdf = build_mixture(road, TABLE, 0.3, 24, 24)
        patches = sample_patches(pdf, 64, 8, 0, max_attempts=500)
        assert not patches.complete
        assert 1 <= patches.count < 64
        assert patches.rejected_count == 500 - patches.count

    def test_seed_is_reproducible(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        a = sample_patches(pdf, 64, 8, 42)
        b = sample_patches(pdf, 64, 8, 42)
        np.testing.assert_array_equal(a.anchors, b.anchors)


class TestEfficiency:
    """N_v, N_vc and psi_v."""

    def test_hand_built_runs(self):
        mask = np.zeros((16, 16), dtype=bool)
        mask[:, :8] = True
        overlapping = PatchSet(np.array([[4.0, 4.0], [6.0, 4.0]]), 8, 16, 16, 2)
        disjoint = PatchSet(np.array([[4.0, 4.0], [12.0, 12.0]]), 8, 16, 16, 2)
        eff = sampler_efficiency([overlapping, disjoint], mask)
        assert eff.n_v == pytest.approx((80 + 128) / 2)
        assert eff.n_vc == pytest.approx((64 + 64) / 2)
        assert eff.psi_v == pytest.approx(100.0 * (64 / 80 + 64 / 128) / 2)

    def test_mask_size_mismatch(self):
        run = PatchSet(np.array([[4.0, 4.0]]), 8, 16, 16, 1)
        with pytest.raises(InvalidArgumentError):
            sampler_efficiency([run], np.zeros((8, 8), dtype=bool))

    def test_guided_beats_random(self, kitti_instances):
        pdf = build_mixture(kitti_instances, TABLE, 0.3, 640, 192)
        mask = crucial_mask(kitti_instances, TABLE, 640, 192)
        rng = np.random.default_rng(3)
        guided = [sample_patches(pdf, 64, 8, rng) for _ in range(300)]
        uniform = [sample_random_patches(640, 192, 64, 8, rng) for _ in range(300)]
        guided_eff = sampler_efficiency(guided, mask)
        uniform_eff = sampler_efficiency(uniform, mask)
        assert guided_eff.n_v == 4096.0
        assert 3800.0 <= uniform_eff.n_v <= 4050.0
        assert guided_eff.psi_v > uniform_eff.psi_v
