#!/usr/bin/env python3
"""
monocc CLI - desk-scale single-view occupancy experiments.

Usage:
    python main.py [GLOBAL OPTIONS] COMMAND [ARGS]

Every parameter lives in the --config JSON file (plus --seed); no
environment variables are read. Each command writes its artifacts and a
<command>.report.json into --out.
"""

import argparse
import dataclasses
import sys

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
from monocc.config import get_messages, get_run_config, list_categories, update_run_config
from monocc.config.run import RunConfig
from monocc.errors import MonoccError
from monocc.io.jsonio import dumps
from monocc.io.scene import CAMERA_VIEW
from monocc.log import is_verbose, set_verbose

COMMAND_KEYS = {
    "synth": "synth",
    "render": "render",
    "sample": "sample",
    "align": "align",
    "loss": "loss",
    "eval-occ": "eval_occ",
    "eval-depth": "eval_depth",
    "bench-sampler": "bench_sampler",
}


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="monocc - single-view occupancy rendering, sampling and evaluation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Build a fixture bundle from a scene descriptor
    python main.py --out fixture synth scenes/wall.json

    # Volume-render the evaluation camera of a bundle
    python main.py --config run.json --out runs/render render fixture

    # Draw one patch set and export the PDF heatmap and overlay
    python main.py --seed 7 --out runs/sample sample fixture

    # Fit the inverse-depth residual to the GT targets
    python main.py --out runs/align align fixture

    # Evaluate the training objective against the first auxiliary view
    python main.py --out runs/loss loss fixture --depth pseudo

    # Same, warping with the depth refined by align
    python main.py --out runs/align loss fixture --depth refined

    # Occupancy evaluation (density field and depth-band baseline)
    python main.py --out runs/occ eval-occ fixture

    # Depth metrics between two PFM files
    python main.py --out runs/depth eval-depth pred.pfm fixture/depth_gt/camera.pfm

    # Sampler efficiency on an instance file
    python main.py --out runs/bench bench-sampler --instances inst.json --width 640 --height 192

    # List the categories with a sampling strategy
    python main.py --list-categories
        """,
    )

    parser.add_argument("--config", type=str, help="Run configuration JSON file")
    parser.add_argument("--seed", type=int, help="Override the configuration seed")
    parser.add_argument("--out", type=str, default="out", help="Output directory")
    parser.add_argument("--quiet", "-q", action="store_true", help="Suppress console output")
    parser.add_argument(
        "--lang",
        type=str,
        choices=["cn", "en"],
        help="Language for console messages (cn or en)",
    )
    parser.add_argument(
        "--list-categories",
        action="store_true",
        help="List instance categories with a sampling strategy and exit",
    )

    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("synth", help="Synthesize a fixture bundle from a scene descriptor")
    p.add_argument("descriptor", help="Scene descriptor JSON")

    p = sub.add_parser("render", help="Volume-render one view of a bundle")
    p.add_argument("bundle", help="Fixture bundle directory")
    p.add_argument("--view", default=CAMERA_VIEW, help="View name")
    p.add_argument("--field", help="Density field file (defaults to the bundle scene)")

    p = sub.add_parser("sample", help="Sample one non-overlapping patch set")
    p.add_argument("bundle", help="Fixture bundle directory")
    p.add_argument("--view", default=CAMERA_VIEW, help="View name")

    p = sub.add_parser("align", help="Inverse depth alignment of the pseudo depth")
    p.add_argument("bundle", help="Fixture bundle directory")
    p.add_argument("--view", default=CAMERA_VIEW, help="View name")

    p = sub.add_parser("loss", help="Evaluate the training objective")
    p.add_argument("bundle", help="Fixture bundle directory")
    p.add_argument("--source", help="Neighbouring view for temporal alignment")
    p.add_argument(
        "--depth",
        choices=["gt", "pseudo", "refined"],
        default="gt",
        help="Depth used for warping and L_d (refined: output of align in --out)",
    )
    p.add_argument("--depth-file", help="Depth PFM used instead of --depth")
    p.add_argument("--field", help="Density field file (defaults to the bundle scene)")

    p = sub.add_parser("eval-occ", help="Occupancy evaluation against carved ground truth")
    p.add_argument("bundle", help="Fixture bundle directory")
    p.add_argument("--field", help="Density field file (defaults to the bundle scene)")

    p = sub.add_parser("eval-depth", help="Depth metrics between two PFM files")
    p.add_argument("pred", help="Predicted depth PFM")
    p.add_argument("gt", help="Ground-truth depth PFM")

    p = sub.add_parser("bench-sampler", help="Guided vs random sampler efficiency")
    p.add_argument("bundle", nargs="?", help="Fixture bundle directory")
    p.add_argument("--view", default=CAMERA_VIEW, help="View name")
    p.add_argument("--instances", help="Instance JSON file (instead of a bundle)")
    p.add_argument("--width", type=int, help="Image width for --instances")
    p.add_argument("--height", type=int, help="Image height for --instances")

    args = parser.parse_args(argv)
    if args.command is None and not args.list_categories:
        parser.error("a command is required")
    return args


def load_config(args: argparse.Namespace) -> RunConfig:
    """Build the run configuration from --config plus command line overrides."""
    config = RunConfig.from_json(args.config) if args.config else RunConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.lang is not None:
        overrides["lang"] = args.lang
    return dataclasses.replace(config, **overrides) if overrides else config


def run_command(args: argparse.Namespace) -> dict:
    """Dispatch a parsed command to its implementation under the global run configuration."""
    config = get_run_config()
    out = args.out
    if args.command == "synth":
        return cmd_synth(config, args.descriptor, out)
    if args.command == "render":
        return cmd_render(config, args.bundle, out, view=args.view, field_path=args.field)
    if args.command == "sample":
        return cmd_sample(config, args.bundle, out, view=args.view)
    if args.command == "align":
        return cmd_align(config, args.bundle, out, view=args.view)
    if args.command == "loss":
        return cmd_loss(
            config,
            args.bundle,
            out,
            source=args.source,
            depth=args.depth,
            field_path=args.field,
            depth_file=args.depth_file,
        )
    if args.command == "eval-occ":
        return cmd_eval_occ(config, args.bundle, out, field_path=args.field)
    if args.command == "eval-depth":
        return cmd_eval_depth(config, args.pred, args.gt, out)
    return cmd_bench_sampler(
        config,
        out,
        bundle_dir=args.bundle,
        instances_file=args.instances,
        width=args.width,
        height=args.height,
        view=args.view,
    )


def print_results(report: dict, msgs: dict, out: str) -> None:
    """Print the top-level results of a report."""
    print("-" * 50)
    print(f"{msgs['written']}: {out}/{report['command']}.report.json")
    print(f"{msgs['results']}:")
    for key, value in sorted(report["results"].items()):
        if isinstance(value, dict):
            print(f"  {key}:")
            for sub_key, sub_value in sorted(value.items()):
                if not isinstance(sub_value, (dict, list)):
                    print(f"    {sub_key}: {sub_value}")
        elif not isinstance(value, list):
            print(f"  {key}: {value}")
    print("=" * 50)


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    args = parse_args(argv)
    set_verbose(not args.quiet)

    if args.list_categories:
        print("Categories with a sampling strategy:")
        for category in sorted(list_categories()):
            print(f"  - {category}")
        return 0

    try:
        config = load_config(args)
        update_run_config(config)
        msgs = get_messages(config.lang)

        if is_verbose():
            print("=" * 50)
            print(f"monocc - {msgs[COMMAND_KEYS[args.command]]}")
            print("=" * 50)
            print(f"{msgs['command']}: {args.command}")
            print(f"{msgs['seed']}: {config.seed}")
            print(f"{msgs['output_dir']}: {args.out}")

        report = run_command(args)
        if is_verbose():
            print_results(report, msgs, args.out)
        return 0
    except MonoccError as e:
        if is_verbose():
            print(get_messages(args.lang or "en")["failed"], file=sys.stderr)
        print(dumps(e.to_dict()))
        return 1
    except OSError as e:
        print(dumps({"error": type(e).__name__, "message": str(e)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
