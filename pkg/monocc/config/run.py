"""Run configuration for monocc.

Every tunable of a desk-scale experiment lives in one ``RunConfig`` tree that
is loaded from JSON. There are no environment-variable overrides: a config
file plus a seed fully determine a run.
"""

import json
import math
import zlib
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from monocc.errors import ConfigError


@dataclass
class SamplerConfig:
    """Configuration for the patch samplers."""

    num_patches: int = 64  # Patches per iteration
    patch_size: int = 8  # Patch side length l (pixels)
    gamma: float = 0.3  # Background (uniform) sampling ratio
    max_attempts: int = 10_000  # Draw budget per run
    runs: int = 1000  # Iterations T for efficiency benchmarks

    def __post_init__(self):
        _require(self.num_patches >= 1, "sampler.num_patches", "must be >= 1")
        _require(self.patch_size >= 1, "sampler.patch_size", "must be >= 1")
        _require(0.0 <= self.gamma <= 1.0, "sampler.gamma", "must lie in [0, 1]")
        _require(self.max_attempts >= 1, "sampler.max_attempts", "must be >= 1")
        _require(self.runs >= 1, "sampler.runs", "must be >= 1")


@dataclass
class RenderConfig:
    """Configuration for volume rendering along rays."""

    num_samples: int = 64  # Samples per ray M
    near: float = 0.5  # Meters
    far: float = 80.0  # Meters, matches the evaluation depth cap
    mode: str = "uniform"  # 'uniform' or 'stratified'
    expected_depth: bool = False  # Divide rendered distance by the weight sum
    workers: int = 1  # Threads used to split ray batches

    def __post_init__(self):
        _require(self.num_samples >= 2, "render.num_samples", "must be >= 2")
        _require(0.0 <= self.near < self.far, "render.near", "need 0 <= near < far")
        _require(
            self.mode in ("uniform", "stratified"),
            "render.mode",
            "must be 'uniform' or 'stratified'",
        )
        _require(self.workers >= 1, "render.workers", "must be >= 1")


@dataclass
class LossConfig:
    """Weights of the training objective."""

    lambda1: float = 1.0  # Temporal alignment weight
    lambda2: float = 1.0  # Reconstruction consistency weight
    beta1: float = 0.85  # SSIM term weight
    beta2: float = 0.15  # L1 term weight

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "beta1", "beta2"):
            _require(getattr(self, name) >= 0.0, f"loss.{name}", "must be >= 0")


@dataclass
class AlignConfig:
    """Configuration for the inverse-depth residual fitter."""

    grid_height: int = 12  # Control grid rows
    grid_width: int = 40  # Control grid columns
    epsilon: float = 1e-6  # Denominator stabilizer (1/m)
    huber_delta: float = 1e-3  # Meters
    smoothness: float = 1e-2  # Weight of squared neighbour differences
    max_iterations: int = 500
    initial_step: float = 1.0
    backtrack: float = 0.5  # Step shrink factor on a rejected step
    armijo: float = 1e-4  # Sufficient-decrease constant
    tolerance: float = 1e-12  # Stop when the loss improves less than this
    target_fraction: float = 1.0  # Share of valid GT pixels used as targets

    def __post_init__(self):
        _require(self.grid_height >= 2, "align.grid_height", "must be >= 2")
        _require(self.grid_width >= 2, "align.grid_width", "must be >= 2")
        _require(self.epsilon > 0.0, "align.epsilon", "must be > 0")
        _require(self.huber_delta > 0.0, "align.huber_delta", "must be > 0")
        _require(self.smoothness >= 0.0, "align.smoothness", "must be >= 0")
        _require(self.max_iterations >= 1, "align.max_iterations", "must be >= 1")
        _require(0.0 < self.backtrack < 1.0, "align.backtrack", "must lie in (0, 1)")
        _require(
            0.0 < self.target_fraction <= 1.0,
            "align.target_fraction",
            "must lie in (0, 1]",
        )


@dataclass
class EvalConfig:
    """Configuration of the occupancy and depth evaluation protocol."""

    w_range: tuple[float, float] = (-4.0, 4.0)  # Meters, camera x
    h_range: tuple[float, float] = (-1.0, 0.0)  # Meters, camera y
    d_range: tuple[float, float] = (4.0, 20.0)  # Meters, camera z
    resolution: tuple[int, int, int] = (64, 16, 128)  # (nw, nh, nd)
    tau: float = 0.5
    depth_cap: float = 80.0
    min_depth: float = 1e-3
    band: float = 4.0  # Occupied band behind visible depth (meters)
    scaling: str = "median"  # 'none' or 'median'

    def __post_init__(self):
        self.w_range = tuple(self.w_range)
        self.h_range = tuple(self.h_range)
        self.d_range = tuple(self.d_range)
        self.resolution = tuple(int(n) for n in self.resolution)
        for name in ("w_range", "h_range", "d_range"):
            lo, hi = getattr(self, name)
            _require(lo < hi, f"eval.{name}", "must be an increasing pair")
        _require(
            len(self.resolution) == 3 and min(self.resolution) >= 2,
            "eval.resolution",
            "needs three entries >= 2",
        )
        _require(0.0 < self.tau < 1.0, "eval.tau", "must lie in (0, 1)")
        _require(self.depth_cap > 0.0, "eval.depth_cap", "must be > 0")
        _require(self.band > 0.0, "eval.band", "must be > 0")
        _require(
            self.scaling in ("none", "median"),
            "eval.scaling",
            "must be 'none' or 'median'",
        )


@dataclass
class RunConfig:
    """Master run configuration combining all settings."""

    seed: int = 0
    lang: str = "en"
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    align: AlignConfig = field(default_factory=AlignConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        _require(
            isinstance(self.seed, int) and not isinstance(self.seed, bool) and self.seed >= 0,
            "seed",
            "must be a non-negative integer",
        )
        _require(self.lang in ("cn", "en"), "lang", "must be 'cn' or 'en'")

    def to_dict(self) -> dict[str, Any]:
        """Return the configuration as plain JSON-ready data."""
        data = asdict(self)
        for key in ("w_range", "h_range", "d_range", "resolution"):
            data["eval"][key] = list(data["eval"][key])
        if math.isinf(self.eval.band):
            data["eval"]["band"] = "inf"
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        """
        Build a configuration from nested dicts.

        Args:
            data: Mapping with optional keys ``seed``, ``lang`` and one dict per
                section (``sampler``, ``render``, ``loss``, ``align``, ``eval``).

        Returns:
            The validated RunConfig.

        Raises:
            ConfigError: On unknown keys or invalid values.
        """
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object", field="")
        sections = {
            "sampler": SamplerConfig,
            "render": RenderConfig,
            "loss": LossConfig,
            "align": AlignConfig,
            "eval": EvalConfig,
        }
        kwargs: dict[str, Any] = {}
        for key, value in data.items():
            if key in ("seed", "lang"):
                kwargs[key] = value
            elif key in sections:
                kwargs[key] = _build_section(sections[key], key, value)
            else:
                raise ConfigError(f"unknown configuration key '{key}'", field=key)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path: str | Path) -> "RunConfig":
        """Load a configuration from a JSON file."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(
                f"invalid JSON in {path}: {e.msg}", field="", line=e.lineno
            ) from e
        return cls.from_dict(data)


def _build_section(section_cls, name: str, value: Any):
    if not isinstance(value, dict):
        raise ConfigError(f"section '{name}' must be an object", field=name)
    known = {f.name for f in fields(section_cls)}
    for key in value:
        if key not in known:
            raise ConfigError(
                f"unknown configuration key '{name}.{key}'", field=f"{name}.{key}"
            )
    data = dict(value)
    if data.get("band") == "inf":
        data["band"] = math.inf
    try:
        return section_cls(**data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e), field=name) from e


def _require(condition: bool, field_name: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{field_name} {message}", field=field_name)


def substream(seed: int, name: str) -> np.random.Generator:
    """
    Derive a named random stream from the run seed.

    Args:
        seed: Run seed.
        name: Stream name, e.g. ``"sampler"`` or ``"stratification"``.

    Returns:
        An independent, reproducible generator.
    """
    return np.random.default_rng(
        np.random.SeedSequence([int(seed), zlib.crc32(name.encode("utf-8"))])
    )


# Global run configuration instance
RUN_CONFIG = RunConfig()


def get_run_config() -> RunConfig:
    """
    Get the global run configuration.

    Returns:
        The global RunConfig instance.
    """
    return RUN_CONFIG


def update_run_config(config: RunConfig) -> None:
    """
    Replace the global run configuration.

    Args:
        config: New configuration.

    Example:
        >>> from monocc.config.run import RunConfig, SamplerConfig, update_run_config
        >>> update_run_config(RunConfig(sampler=SamplerConfig(gamma=0.5)))
    """
    global RUN_CONFIG
    RUN_CONFIG = config


__all__ = [
    "SamplerConfig",
    "RenderConfig",
    "LossConfig",
    "AlignConfig",
    "EvalConfig",
    "RunConfig",
    "RUN_CONFIG",
    "get_run_config",
    "update_run_config",
    "substream",
]
