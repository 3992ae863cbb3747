"""Configuration module for monocc."""

from monocc.config.i18n import get_messages
from monocc.config.run import (
    RUN_CONFIG,
    AlignConfig,
    EvalConfig,
    LossConfig,
    RenderConfig,
    RunConfig,
    SamplerConfig,
    get_run_config,
    substream,
    update_run_config,
)
from monocc.config.strategies import (
    CATEGORY_ALIASES,
    SAMPLING_STRATEGIES,
    UNLABELED,
    SamplingStrategy,
    SamplingStrategyTable,
    list_categories,
)

__all__ = [
    "RUN_CONFIG",
    "RunConfig",
    "SamplerConfig",
    "RenderConfig",
    "LossConfig",
    "AlignConfig",
    "EvalConfig",
    "get_run_config",
    "update_run_config",
    "substream",
    "SAMPLING_STRATEGIES",
    "CATEGORY_ALIASES",
    "UNLABELED",
    "SamplingStrategy",
    "SamplingStrategyTable",
    "list_categories",
    "get_messages",
]
