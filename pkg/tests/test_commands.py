"""End-to-end tests of the command implementations and the CLI."""

import json

import numpy as np
import pytest

import main
from monocc.commands import (
    cmd_align,
    cmd_bench_sampler,
    cmd_eval_depth,
    cmd_eval_occ,
    cmd_loss,
    cmd_render,
    cmd_sample,
    cmd_synth,
)
from monocc.config.run import RunConfig, get_run_config, update_run_config
from monocc.errors import InvalidArgumentError
from monocc.io import read_json, read_pfm, write_json
from monocc.io.bundle import open_bundle
from monocc.sampler import save_instances


def _config(seed: int = 0) -> RunConfig:
    return RunConfig.from_dict(
        {
            "seed": seed,
            "sampler": {"num_patches": 8, "runs": 50},
            "render": {"num_samples": 128, "far": 20.0},
            "eval": {"resolution": [16, 4, 32]},
        }
    )


@pytest.fixture
def bundle_dir(tmp_path, wall_descriptor_path):
    out = tmp_path / "fixture"
    cmd_synth(_config(), wall_descriptor_path, out)
    return out


def _files(root):
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestSynth:
    """Fixture bundles from scene descriptors."""

    def test_bundle_layout(self, bundle_dir):
        for name in (
            "scene.json",
            "poses.json",
            "synth.report.json",
            "images/camera.ppm",
            "images/next.ppm",
            "depth_gt/camera.pfm",
            "depth_pseudo/next.pfm",
            "instances/camera.json",
        ):
            assert (bundle_dir / name).is_file(), name
        bundle = open_bundle(bundle_dir)
        assert list(bundle.poses) == ["camera", "next"]

    def test_ground_truth_depth(self, bundle_dir):
        gt = read_pfm(bundle_dir / "depth_gt" / "camera.pfm")
        assert gt[23, 31] == pytest.approx(6.0)
        assert gt[0, 0] == pytest.approx(10.0)
        assert np.all(gt > 0)

    def test_scaled_pseudo_depth_is_exact(self, bundle_dir):
        gt = read_pfm(bundle_dir / "depth_gt" / "camera.pfm")
        pseudo = read_pfm(bundle_dir / "depth_pseudo" / "camera.pfm")
        np.testing.assert_array_equal(pseudo, 2.0 * gt)

    def test_derived_instances(self, bundle_dir):
        instances = open_bundle(bundle_dir).instances("camera")
        assert len(instances) == 1
        car = instances[0]
        assert car.category == "car"
        assert car.area == 280.0
        assert (car.center.u, car.center.v) == (31.5, 23.5)
        assert car.half_extents == (7.0, 10.0)

    def test_report(self, bundle_dir):
        report = read_json(bundle_dir / "synth.report.json")
        assert report["command"] == "synth"
        assert report["results"]["views"]["camera"]["hit_pixels"] == 64 * 48

    def test_explicit_instances_win(self, tmp_path, wall_descriptor):
        explicit = [{"category": "pedestrian", "center": [10, 10], "half_extents": [4, 2], "area": 30}]
        path = write_json(tmp_path / "scene.json", wall_descriptor(instances=explicit))
        cmd_synth(_config(), path, tmp_path / "b")
        bundle = open_bundle(tmp_path / "b")
        assert bundle.instances("camera")[0].category == "pedestrian"
        assert bundle.instances("next")[0].category == "car"

    def test_same_seed_same_bytes(self, tmp_path, wall_descriptor):
        path = write_json(tmp_path / "noisy.json", wall_descriptor(pseudo_depth={"kind": "noise", "sigma": 0.2}))
        cmd_synth(_config(seed=4), path, tmp_path / "a")
        cmd_synth(_config(seed=4), path, tmp_path / "b")
        cmd_synth(_config(seed=5), path, tmp_path / "c")
        assert _files(tmp_path / "a") == _files(tmp_path / "b")
        a = read_pfm(tmp_path / "a" / "depth_pseudo" / "camera.pfm")
        c = read_pfm(tmp_path / "c" / "depth_pseudo" / "camera.pfm")
        assert not np.array_equal(a, c)


class TestRender:
    """Rendering a bundle view."""

    def test_distance_matches_ground_truth(self, bundle_dir, tmp_path):
        report = cmd_render(_config(), bundle_dir, tmp_path / "out")
        results = report["results"]
        assert results["gt_pixels"] == 64 * 48
        assert results["within_segment"] >= 0.9
        assert (tmp_path / "out" / "render" / "camera_distance.pfm").is_file()
        assert (tmp_path / "out" / "render" / "camera_rgb.ppm").is_file()

    def test_unknown_view(self, bundle_dir, tmp_path):
        with pytest.raises(InvalidArgumentError):
            cmd_render(_config(), bundle_dir, tmp_path / "out", view="left")


class TestSample:
    """One patch set on a bundle view."""

    def test_patches_do_not_overlap(self, bundle_dir, tmp_path):
        report = cmd_sample(_config(), bundle_dir, tmp_path / "out")
        results = report["results"]
        assert results["patches"] == 8 and results["complete"]
        assert results["min_pair_distance_sq"] >= 128.0
        assert results["mixture"]["gaussians"][0]["category"] == "car"
        pdf = read_pfm(tmp_path / "out" / "sample" / "camera_pdf.pfm")
        assert pdf.shape == (48, 64)

    def test_seed_is_reproducible(self, bundle_dir, tmp_path):
        cmd_sample(_config(seed=2), bundle_dir, tmp_path / "a")
        cmd_sample(_config(seed=2), bundle_dir, tmp_path / "b")
        assert _files(tmp_path / "a") == _files(tmp_path / "b")


class TestAlign:
    """Inverse depth alignment of the scaled pseudo depth."""

    def test_refined_depth_is_better(self, bundle_dir, tmp_path):
        report = cmd_align(_config(), bundle_dir, tmp_path / "out")
        results = report["results"]
        assert results["before"]["abs_rel"] == pytest.approx(1.0)
        assert results["after"]["abs_rel"] < 0.5
        assert results["targets"] == 64 * 48
        assert (tmp_path / "out" / "align" / "camera_residual.json").is_file()
        assert (tmp_path / "out" / "align" / "camera_refined.pfm").is_file()


class TestLoss:
    """Training objective on the evaluation camera."""

    def test_report(self, bundle_dir, tmp_path):
        report = cmd_loss(_config(), bundle_dir, tmp_path / "out")
        results = report["results"]
        assert report["parameters"]["source"] == "next"
        assert results["patches"] == 8
        assert results["depth_pixels"] == 8 * 64
        assert results["temporal_pixels"] > 0
        assert results["temporal"] >= 0.0
        assert results["total"] == pytest.approx(results["temporal"] + results["depth"] + results["rgb"])

    def test_bad_depth_choice(self, bundle_dir, tmp_path):
        with pytest.raises(InvalidArgumentError):
            cmd_loss(_config(), bundle_dir, tmp_path / "out", depth="lidar")

    def test_refined_depth_lowers_depth_term(self, bundle_dir, tmp_path):
        out = tmp_path / "out"
        cmd_align(_config(), bundle_dir, out)
        pseudo = cmd_loss(_config(), bundle_dir, out, depth="pseudo")
        refined = cmd_loss(_config(), bundle_dir, out, depth="refined")
        assert refined["parameters"]["depth"] == "refined"
        assert refined["results"]["depth_pixels"] == pseudo["results"]["depth_pixels"]
        assert refined["results"]["depth"] < 0.5 * pseudo["results"]["depth"]

    def test_refined_depth_needs_align(self, bundle_dir, tmp_path):
        with pytest.raises(InvalidArgumentError):
            cmd_loss(_config(), bundle_dir, tmp_path / "out", depth="refined")

    def test_depth_file_overrides_choice(self, bundle_dir, tmp_path):
        gt = cmd_loss(_config(), bundle_dir, tmp_path / "a", depth="gt")
        from_file = cmd_loss(
            _config(),
            bundle_dir,
            tmp_path / "b",
            depth="pseudo",
            depth_file=bundle_dir / "depth_gt" / "camera.pfm",
        )
        assert from_file["results"]["depth"] == pytest.approx(gt["results"]["depth"])


class TestEvalOcc:
    """Occupancy evaluation of a bundle."""

    def test_field_and_band(self, bundle_dir, tmp_path):
        report = cmd_eval_occ(_config(), bundle_dir, tmp_path / "out")
        results = report["results"]
        assert results["gt_occupied"] > 0
        for name in ("field", "band"):
            scene = results[name]["scene"]
            assert 0.0 <= scene["o_acc"] <= 1.0
            assert scene["voxels"] == 16 * 4 * 32
            assert (tmp_path / "out" / "occupancy" / f"{name}.bits").is_file()
        objects = results["field"]["objects"]
        assert objects["o_acc"] == 1.0
        assert objects["o_rec"] == 1.0


class TestEvalDepth:
    """Depth metrics between PFM files."""

    def test_identical_maps(self, bundle_dir, tmp_path):
        gt = bundle_dir / "depth_gt" / "camera.pfm"
        report = cmd_eval_depth(_config(), gt, gt, tmp_path / "out")
        assert report["results"]["abs_rel"] == 0.0
        assert report["results"]["delta1"] == 1.0
        assert (tmp_path / "out" / "eval-depth.report.json").is_file()


class TestBenchSampler:
    """Guided vs uniform random sampling."""

    def test_instance_file(self, tmp_path, kitti_instances):
        path = save_instances(tmp_path / "inst.json", kitti_instances)
        config = RunConfig.from_dict({"sampler": {"runs": 50}})
        report = cmd_bench_sampler(config, tmp_path / "out", instances_file=path, width=640, height=192)
        results = report["results"]
        assert results["guided"]["n_v"] == 4096.0
        assert results["random"]["n_v"] < 4096.0
        assert results["improvement_percent"] > 0.0
        assert results["incomplete_runs"] == 0
        assert abs(results["coverage"]["u"] - 0.9545) < 0.005

    def test_needs_input(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            cmd_bench_sampler(RunConfig(), tmp_path / "out")


class TestCLI:
    """Argument parsing, exit codes and structured errors."""

    def test_synth_then_eval_depth(self, tmp_path, wall_descriptor_path):
        fixture = tmp_path / "fixture"
        assert main.main(["--quiet", "--out", str(fixture), "synth", str(wall_descriptor_path)]) == 0
        gt = str(fixture / "depth_gt" / "camera.pfm")
        assert main.main(["--quiet", "--out", str(tmp_path / "d"), "eval-depth", gt, gt]) == 0
        report = json.loads((tmp_path / "d" / "eval-depth.report.json").read_text(encoding="utf-8"))
        assert report["results"]["abs_rel"] == 0.0

    def test_descriptor_error_is_structured(self, tmp_path, wall_descriptor, capsys):
        bad = wall_descriptor(primitives=[{"shape": "sphere", "center": [0, 0, 5], "radius": 0}])
        path = write_json(tmp_path / "bad.json", bad)
        code = main.main(["--quiet", "--out", str(tmp_path / "o"), "synth", str(path)])
        assert code == 1
        error = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert error["error"] == "DescriptorParseError"
        assert error["field"] == "primitives[0]"

    def test_missing_file(self, tmp_path, capsys):
        code = main.main(["--quiet", "--out", str(tmp_path), "synth", str(tmp_path / "none.json")])
        assert code == 1
        assert json.loads(capsys.readouterr().out)["error"] == "FileNotFoundError"

    def test_config_error(self, tmp_path, capsys):
        config = write_json(tmp_path / "run.json", {"sampler": {"gamma": 2.0}})
        code = main.main(["--quiet", "--config", str(config), "eval-depth", "a.pfm", "b.pfm"])
        assert code == 1
        error = json.loads(capsys.readouterr().out)
        assert error["error"] == "ConfigError"
        assert error["field"] == "sampler.gamma"

    def test_seed_and_lang_overrides(self):
        args = main.parse_args(["--seed", "5", "--lang", "cn", "eval-depth", "a.pfm", "b.pfm"])
        config = main.load_config(args)
        assert config.seed == 5
        assert config.lang == "cn"

    def test_list_categories(self, capsys):
        assert main.main(["--list-categories"]) == 0
        assert "pedestrian" in capsys.readouterr().out

    def test_command_required(self):
        with pytest.raises(SystemExit):
            main.parse_args([])

    @staticmethod
    def _error(capsys) -> dict:
        return json.loads(capsys.readouterr().out.strip().splitlines()[-1])

    def test_field_file_with_bad_json(self, bundle_dir, tmp_path, capsys):
        path = tmp_path / "field.json"
        path.write_text("{not json", encoding="utf-8")
        code = main.main(["--quiet", "--out", str(tmp_path / "o"), "render", str(bundle_dir), "--field", str(path)])
        assert code == 1
        error = self._error(capsys)
        assert error["error"] == "DescriptorParseError"
        assert error["line"] == 1

    def test_field_file_with_bad_primitive(self, bundle_dir, tmp_path, capsys):
        path = write_json(tmp_path / "field.json", {"primitives": [{"kind": "sphere"}]})
        code = main.main(["--quiet", "--out", str(tmp_path / "o"), "render", str(bundle_dir), "--field", str(path)])
        assert code == 1
        error = self._error(capsys)
        assert error["error"] == "DescriptorParseError"
        assert error["field"] == "primitives[0].shape"

    def test_config_with_wrong_type(self, tmp_path, capsys):
        config = write_json(tmp_path / "run.json", {"seed": "x"})
        code = main.main(["--quiet", "--config", str(config), "eval-depth", "a.pfm", "b.pfm"])
        assert code == 1
        error = self._error(capsys)
        assert error["error"] == "ConfigError"
        assert error["field"] == "seed"

    def test_bad_sweep_spec(self, tmp_path, wall_descriptor, capsys):
        descriptor = write_json(
            tmp_path / "scene.json", wall_descriptor(sweeps=[{"kind": "lidar", "max_range": "far"}])
        )
        fixture = tmp_path / "fixture"
        assert main.main(["--quiet", "--out", str(fixture), "synth", str(descriptor)]) == 0
        code = main.main(["--quiet", "--out", str(tmp_path / "o"), "eval-occ", str(fixture)])
        assert code == 1
        error = self._error(capsys)
        assert error["error"] == "DescriptorParseError"
        assert error["field"] == "sweeps[0].max_range"

    def test_commands_run_under_the_global_config(self, tmp_path, bundle_dir):
        original = get_run_config()
        try:
            assert main.main(["--quiet", "--seed", "9", "--out", str(tmp_path / "r"), "render", str(bundle_dir)]) == 0
            assert get_run_config().seed == 9
            report = read_json(tmp_path / "r" / "render.report.json")
            assert report["parameters"]["seed"] == 9
        finally:
            update_run_config(original)
