"""Command implementations behind the monocc CLI.

Every ``cmd_*`` function takes the run configuration, its inputs and an
output directory, writes its artifacts there, and returns the report
``{"command", "parameters", "results"}`` that is also written as
``<out>/<command>.report.json``.
"""

import time
from pathlib import Path
from typing import Any

import numpy as np

from monocc.config.run import RunConfig, substream
from monocc.config.strategies import SamplingStrategyTable
from monocc.depth.align import (
    AlignmentTargets,
    fit_residual,
    refine_depth,
    residual_statistics,
)
from monocc.errors import EmptySupportError, InvalidArgumentError
from monocc.evaluation.carving import carve_ground_truth
from monocc.evaluation.depth_metrics import depth_metrics
from monocc.evaluation.occupancy import (
    depth_to_occupancy_band,
    occupancy_metrics,
    visibility_partition,
)
from monocc.evaluation.voxels import EvalCuboid, voxelize_prediction
from monocc.field.analytic import AnalyticField
from monocc.field_factory import load_field
from monocc.geometry.camera import ray_norms
from monocc.geometry.pose import relative_pose
from monocc.io.bundle import (
    SCENE_FILE,
    FixtureBundle,
    depth_gt_path,
    depth_pseudo_path,
    image_path,
    instances_path,
    open_bundle,
    write_poses,
)
from monocc.io.jsonio import write_json
from monocc.io.rasters import (
    read_depth,
    write_depth,
    write_patch_overlay,
    write_pfm,
    write_ppm,
)
from monocc.io.scene import CAMERA_VIEW, load_scene
from monocc.log import log
from monocc.losses.photometric import (
    LossReport,
    LossWeights,
    build_weight_mask,
    depth_reconstruction_loss,
    rgb_reconstruction_loss,
    temporal_alignment_loss,
    total_loss,
)
from monocc.losses.warp import warp_image
from monocc.maps import DepthMap
from monocc.render.quadrature import RaySampling, render_image, render_patch
from monocc.sampler.efficiency import crucial_mask, sampler_efficiency
from monocc.sampler.instances import load_instances, save_instances
from monocc.sampler.mixture import build_mixture, gaussian_coverage, pdf_heatmap
from monocc.sampler.patches import sample_patches, sample_random_patches
from monocc.synth import derive_instances, synthesize_view

COVERAGE_DRAWS = 100_000


def _finish(command: str, parameters: dict, results: dict, out: str | Path) -> dict[str, Any]:
    report = {"command": command, "parameters": parameters, "results": results}
    path = write_json(Path(out) / f"{command}.report.json", report)
    log("REPORT", str(path))
    return report


def _stratification_seed(config: RunConfig) -> int:
    return int(substream(config.seed, "stratification").integers(2**32))


def _scene_field(bundle: FixtureBundle, field_path: str | Path | None):
    return bundle.scene.field if field_path is None else load_field(field_path)


# Depth sources accepted by the loss command.
LOSS_DEPTHS = ("gt", "pseudo", "refined")


def _loss_depth(bundle: FixtureBundle, out: str | Path, depth: str, depth_file: str | Path | None):
    """Resolve the depth map used for warping and L_d, plus its report label."""
    if depth_file is not None:
        return read_depth(depth_file), str(depth_file)
    if depth not in LOSS_DEPTHS:
        raise InvalidArgumentError(f"depth must be one of {', '.join(LOSS_DEPTHS)}", depth=depth)
    if depth == "gt":
        return bundle.depth_gt(CAMERA_VIEW), depth
    if depth == "pseudo":
        return bundle.depth_pseudo(CAMERA_VIEW), depth
    refined = Path(out) / "align" / f"{CAMERA_VIEW}_refined.pfm"
    if not refined.is_file():
        raise InvalidArgumentError(
            "no refined depth; run align with the same --out first", path=str(refined)
        )
    return read_depth(refined), depth


def cmd_synth(config: RunConfig, descriptor: str | Path, out: str | Path) -> dict[str, Any]:
    """
    Synthesize a fixture bundle from a scene descriptor.

    Every view (the evaluation camera, then the auxiliary poses) gets an
    image, exact planar GT depth, pseudo depth and instance metadata.
    """
    scene = load_scene(descriptor)
    out = Path(out)
    K = scene.intrinsics
    rng = substream(config.seed, "pseudo_depth")
    views: dict[str, Any] = {}
    for name, pose in scene.views().items():
        view = synthesize_view(scene.field, K, pose)
        pseudo = scene.pseudo_depth.apply(view.depth, rng)
        if name == CAMERA_VIEW and scene.instances is not None:
            instances = list(scene.instances)
        else:
            instances = derive_instances(scene.field, view.index)
        write_ppm(image_path(out, name), view.image)
        write_depth(depth_gt_path(out, name), view.depth)
        write_depth(depth_pseudo_path(out, name), pseudo)
        save_instances(instances_path(out, name), instances)
        views[name] = {
            "hit_pixels": view.hit_pixels,
            "valid_depth_pixels": int(view.depth.valid.sum()),
            "instances": len(instances),
        }
        log("SYNTH", f"view '{name}': {view.hit_pixels} of {K.width * K.height} pixels hit")
    write_poses(out, K, scene.views())
    write_json(out / SCENE_FILE, scene.to_dict())
    return _finish(
        "synth",
        {
            "seed": config.seed,
            "descriptor": str(descriptor),
            "pseudo_depth": scene.pseudo_depth.to_dict(),
        },
        {"views": views, "width": K.width, "height": K.height},
        out,
    )


def cmd_render(
    config: RunConfig,
    bundle_dir: str | Path,
    out: str | Path,
    view: str = CAMERA_VIEW,
    field_path: str | Path | None = None,
) -> dict[str, Any]:
    """Volume-render one view and compare the distance map to exact GT."""
    bundle = open_bundle(bundle_dir)
    K = bundle.intrinsics
    field = _scene_field(bundle, field_path)
    sampling = RaySampling.from_config(config.render, _stratification_seed(config))
    rgb, distance = render_image(field, K, bundle.pose(view), sampling, config.render.workers)

    out = Path(out)
    norms = ray_norms(K)
    write_ppm(out / "render" / f"{view}_rgb.ppm", rgb)
    write_pfm(out / "render" / f"{view}_distance.pfm", distance)
    write_depth(out / "render" / f"{view}_depth.pfm", DepthMap.from_raw(distance / norms))

    gt = bundle.depth_gt(view)
    results: dict[str, Any] = {"segment": sampling.segment, "gt_pixels": int(gt.valid.sum())}
    if gt.valid.any():
        error = np.abs(distance - gt.values * norms)[gt.valid]
        results.update(
            distance_error_mean=float(error.mean()),
            distance_error_max=float(error.max()),
            within_segment=float(np.mean(error <= sampling.segment)),
        )
    return _finish(
        "render",
        {"seed": config.seed, "bundle": str(bundle_dir), "view": view, "render": config.to_dict()["render"]},
        results,
        out,
    )


def cmd_sample(
    config: RunConfig, bundle_dir: str | Path, out: str | Path, view: str = CAMERA_VIEW
) -> dict[str, Any]:
    """Draw one non-overlapping patch set and export the PDF and an overlay."""
    bundle = open_bundle(bundle_dir)
    K = bundle.intrinsics
    sc = config.sampler
    pdf = build_mixture(bundle.instances(view), SamplingStrategyTable(), sc.gamma, K.width, K.height)
    patches = sample_patches(
        pdf, sc.num_patches, sc.patch_size, substream(config.seed, "sampler"), sc.max_attempts
    )

    out = Path(out)
    write_pfm(out / "sample" / f"{view}_pdf.pfm", pdf_heatmap(pdf))
    write_patch_overlay(
        out / "sample" / f"{view}_patches.ppm", bundle.image(view), patches.corners(), sc.patch_size
    )
    write_json(out / "sample" / f"{view}_patches.json", patches.to_dict())
    return _finish(
        "sample",
        {"seed": config.seed, "bundle": str(bundle_dir), "view": view, "sampler": config.to_dict()["sampler"]},
        {
            "patches": patches.count,
            "complete": patches.complete,
            "rejected": patches.rejected_count,
            "min_pair_distance_sq": patches.min_pair_distance_sq(),
            "mixture": pdf.to_dict(),
        },
        out,
    )


def cmd_align(
    config: RunConfig, bundle_dir: str | Path, out: str | Path, view: str = CAMERA_VIEW
) -> dict[str, Any]:
    """Fit the inverse-depth residual to GT targets and refine the pseudo depth."""
    bundle = open_bundle(bundle_dir)
    ac = config.align
    pseudo = bundle.depth_pseudo(view)
    gt = bundle.depth_gt(view)
    targets = AlignmentTargets.from_depth_map(
        gt, ac.target_fraction, substream(config.seed, "targets")
    )
    fit = fit_residual(pseudo, targets, (ac.grid_height, ac.grid_width), ac.epsilon, ac)
    refined = refine_depth(pseudo, fit.field, ac.epsilon)

    out = Path(out)
    fit.field.save(out / "align" / f"{view}_residual")
    write_depth(out / "align" / f"{view}_refined.pfm", refined)
    ec = config.eval
    before = depth_metrics(pseudo, gt, ec.depth_cap, "none", ec.min_depth)
    after = depth_metrics(refined, gt, ec.depth_cap, "none", ec.min_depth)
    stats = residual_statistics(pseudo, gt)
    return _finish(
        "align",
        {"seed": config.seed, "bundle": str(bundle_dir), "view": view, "align": config.to_dict()["align"]},
        {
            "targets": len(targets),
            "fit": fit.to_dict(),
            "before": before.to_dict(),
            "after": after.to_dict(),
            "residuals": {k: s.to_dict() for k, s in stats.items()},
        },
        out,
    )


def cmd_loss(
    config: RunConfig,
    bundle_dir: str | Path,
    out: str | Path,
    source: str | None = None,
    depth: str = "gt",
    field_path: str | Path | None = None,
    depth_file: str | Path | None = None,
) -> dict[str, Any]:
    """
    Evaluate the training objective on the evaluation camera.

    The temporal term warps ``source`` (default: the first auxiliary view)
    into the camera view with the chosen depth; the reconstruction terms
    render the sampled patches of the density field.

    Args:
        depth: ``gt``, ``pseudo`` or ``refined``. ``refined`` reads
            ``<out>/align/camera_refined.pfm`` written by :func:`cmd_align`.
        depth_file: Explicit depth PFM; overrides ``depth``.
    """
    bundle = open_bundle(bundle_dir)
    K = bundle.intrinsics
    depth_map, depth = _loss_depth(bundle, out, depth, depth_file)
    target = bundle.image(CAMERA_VIEW)
    pose = bundle.poses[CAMERA_VIEW]
    weights = LossWeights.from_config(config.loss)

    if source is None:
        source = next((name for name in bundle.poses if name != CAMERA_VIEW), None)
    temporal, temporal_pixels = 0.0, 0
    if source is not None:
        T = relative_pose(pose, bundle.pose(source))
        warp = warp_image(bundle.image(source), depth_map, K, T)
        temporal, temporal_pixels = temporal_alignment_loss(
            target, warp, build_weight_mask(warp.validity)
        )

    sc = config.sampler
    pdf = build_mixture(
        bundle.instances(CAMERA_VIEW), SamplingStrategyTable(), sc.gamma, K.width, K.height
    )
    patches = sample_patches(
        pdf, sc.num_patches, sc.patch_size, substream(config.seed, "sampler"), sc.max_attempts
    )
    field = _scene_field(bundle, field_path)
    sampling = RaySampling.from_config(config.render, _stratification_seed(config))
    l = sc.patch_size
    image_patches, rendered_patches = [], []
    rendered_distance = np.full(K.shape, np.nan)
    for anchor, (c0, r0) in zip(patches.pixels(), patches.corners().tolist()):
        rgb, dist = render_patch(field, K, pose, anchor, l, sampling, config.render.workers)
        image_patches.append(target.values[r0 : r0 + l, c0 : c0 + l])
        rendered_patches.append(rgb)
        rendered_distance[r0 : r0 + l, c0 : c0 + l] = dist
    if not image_patches:
        raise EmptySupportError("no patch could be sampled")
    depth_loss, depth_pixels = depth_reconstruction_loss(rendered_distance, depth_map, K)
    rgb_loss = rgb_reconstruction_loss(np.stack(image_patches), np.stack(rendered_patches), weights)

    report = LossReport(
        temporal=temporal,
        depth=depth_loss,
        rgb=rgb_loss,
        total=total_loss(temporal, depth_loss, rgb_loss, weights),
        temporal_pixels=temporal_pixels,
        depth_pixels=depth_pixels,
        patches=patches.count,
    )
    return _finish(
        "loss",
        {
            "seed": config.seed,
            "bundle": str(bundle_dir),
            "source": source,
            "depth": depth,
            "loss": config.to_dict()["loss"],
            "render": config.to_dict()["render"],
            "sampler": config.to_dict()["sampler"],
        },
        {**report.to_dict(), "segment": sampling.segment},
        out,
    )


def _object_mask(field: AnalyticField, cuboid: EvalCuboid, bundle: FixtureBundle) -> np.ndarray:
    """Voxels whose centre lies inside a categorized primitive."""
    world = bundle.poses[CAMERA_VIEW].transform(cuboid.centers().reshape(-1, 3))
    mask = np.zeros(world.shape[0], dtype=bool)
    for prim in field.primitives:
        if prim.category is not None:
            mask |= prim.contains(world)
    return mask.reshape(cuboid.resolution)


def cmd_eval_occ(
    config: RunConfig,
    bundle_dir: str | Path,
    out: str | Path,
    field_path: str | Path | None = None,
) -> dict[str, Any]:
    """
    Score occupancy predictions against carved ground truth.

    Two predictions are scored: the thresholded density field and the
    depth-band baseline built from the pseudo depth.
    """
    bundle = open_bundle(bundle_dir)
    K = bundle.intrinsics
    ec = config.eval
    scene = bundle.scene
    camera_pose = bundle.poses[CAMERA_VIEW]
    cuboid = EvalCuboid.from_config(ec)

    gt = carve_ground_truth(scene.field, scene.build_sweeps(cuboid), cuboid, camera_pose)
    gt = visibility_partition(gt, K, bundle.depth_gt(CAMERA_VIEW))
    predictions = {
        "field": voxelize_prediction(_scene_field(bundle, field_path), cuboid, camera_pose, ec.tau),
        "band": depth_to_occupancy_band(bundle.depth_pseudo(CAMERA_VIEW), K, cuboid, ec.band),
    }

    out = Path(out)
    gt.save(out / "occupancy" / "gt")
    object_mask = _object_mask(scene.field, cuboid, bundle)
    results: dict[str, Any] = {"gt_occupied": gt.occupied_count}
    for name, pred in predictions.items():
        pred.save(out / "occupancy" / name)
        entry = {"scene": occupancy_metrics(pred, gt).to_dict()}
        if object_mask.any():
            entry["objects"] = occupancy_metrics(pred, gt, object_mask).to_dict()
        results[name] = entry
    return _finish(
        "eval-occ",
        {
            "seed": config.seed,
            "bundle": str(bundle_dir),
            "field": None if field_path is None else str(field_path),
            "eval": config.to_dict()["eval"],
        },
        results,
        out,
    )


def cmd_eval_depth(
    config: RunConfig, pred_path: str | Path, gt_path: str | Path, out: str | Path
) -> dict[str, Any]:
    """Standard monocular depth metrics between two depth PFMs."""
    ec = config.eval
    report = depth_metrics(
        read_depth(pred_path), read_depth(gt_path), ec.depth_cap, ec.scaling, ec.min_depth
    )
    return _finish(
        "eval-depth",
        {
            "pred": str(pred_path),
            "gt": str(gt_path),
            "cap": ec.depth_cap,
            "scaling": ec.scaling,
            "min_depth": ec.min_depth,
        },
        report.to_dict(),
        out,
    )


def cmd_bench_sampler(
    config: RunConfig,
    out: str | Path,
    bundle_dir: str | Path | None = None,
    instances_file: str | Path | None = None,
    width: int | None = None,
    height: int | None = None,
    view: str = CAMERA_VIEW,
) -> dict[str, Any]:
    """
    Compare the guided sampler with uniform random patches over many runs.

    Instances come from a bundle view or from an instance file plus an
    explicit image size.
    """
    if bundle_dir is not None:
        bundle = open_bundle(bundle_dir)
        instances = bundle.instances(view)
        width, height = bundle.intrinsics.width, bundle.intrinsics.height
    elif instances_file is not None and width and height:
        instances = load_instances(instances_file)
    else:
        raise InvalidArgumentError("need a bundle, or an instance file with width and height")

    sc = config.sampler
    table = SamplingStrategyTable()
    pdf = build_mixture(instances, table, sc.gamma, width, height)
    mask = crucial_mask(instances, table, width, height)

    started = time.perf_counter()
    rng = substream(config.seed, "sampler")
    guided = [
        sample_patches(pdf, sc.num_patches, sc.patch_size, rng, sc.max_attempts)
        for _ in range(sc.runs)
    ]
    log("BENCH", f"{sc.runs} guided runs in {time.perf_counter() - started:.3f}s")
    rng_random = substream(config.seed, "random_sampler")
    uniform = [
        sample_random_patches(width, height, sc.num_patches, sc.patch_size, rng_random)
        for _ in range(sc.runs)
    ]
    guided_eff = sampler_efficiency(guided, mask)
    uniform_eff = sampler_efficiency(uniform, mask)
    u, v, labels = pdf.draw(substream(config.seed, "coverage"), COVERAGE_DRAWS)

    return _finish(
        "bench-sampler",
        {
            "seed": config.seed,
            "bundle": None if bundle_dir is None else str(bundle_dir),
            "instances": None if instances_file is None else str(instances_file),
            "width": width,
            "height": height,
            "sampler": config.to_dict()["sampler"],
        },
        {
            "guided": guided_eff.to_dict(),
            "random": uniform_eff.to_dict(),
            "improvement_percent": 100.0 * (guided_eff.n_v / uniform_eff.n_v - 1.0),
            "incomplete_runs": sum(1 for run in guided if not run.complete),
            "coverage": gaussian_coverage(pdf, u, v, labels),
        },
        out,
    )


__all__ = [
    "cmd_synth",
    "cmd_render",
    "cmd_sample",
    "cmd_align",
    "cmd_loss",
    "cmd_eval_occ",
    "cmd_eval_depth",
    "cmd_bench_sampler",
]
