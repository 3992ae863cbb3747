"""Instance category to sampling strategy mapping.

Large-area categories are sampled uniformly; crucial instances get a
Gaussian component. Detector phrases that were merged into a canonical
category are listed as aliases.
"""

from dataclasses import dataclass, field
from enum import Enum

from monocc.errors import InvalidArgumentError


class SamplingStrategy(Enum):
    """How an instance contributes to the sampling mixture."""

    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


UNLABELED = "unlabeled"

SAMPLING_STRATEGIES: dict[str, SamplingStrategy] = {
    # Large areas
    "road": SamplingStrategy.UNIFORM,
    "building": SamplingStrategy.UNIFORM,
    "vegetation": SamplingStrategy.UNIFORM,
    "sky": SamplingStrategy.UNIFORM,
    # Crucial instances
    "car": SamplingStrategy.GAUSSIAN,
    "pedestrian": SamplingStrategy.GAUSSIAN,
    # Background
    UNLABELED: SamplingStrategy.UNIFORM,
}

CATEGORY_ALIASES: dict[str, str] = {
    "truck": "car",
    "bus": "car",
    "caravan": "car",
    "person": "pedestrian",
}


@dataclass(frozen=True)
class SamplingStrategyTable:
    """Lookup from instance category to sampling strategy."""

    strategies: dict[str, SamplingStrategy] = field(
        default_factory=lambda: dict(SAMPLING_STRATEGIES)
    )
    aliases: dict[str, str] = field(default_factory=lambda: dict(CATEGORY_ALIASES))

    def __post_init__(self):
        if UNLABELED not in self.strategies:
            self.strategies[UNLABELED] = SamplingStrategy.UNIFORM

    def canonical(self, category: str) -> str:
        """Resolve aliases and case to the canonical category name."""
        name = category.strip().lower()
        return self.aliases.get(name, name)

    def strategy_for(self, category: str) -> SamplingStrategy:
        """
        Get the sampling strategy of a category.

        Args:
            category: Category name or alias.

        Returns:
            The strategy.

        Raises:
            InvalidArgumentError: If the category is not covered by the table.
        """
        name = self.canonical(category)
        if name not in self.strategies:
            raise InvalidArgumentError(
                f"category '{category}' has no sampling strategy", category=category
            )
        return self.strategies[name]

    def is_gaussian(self, category: str) -> bool:
        return self.strategy_for(category) is SamplingStrategy.GAUSSIAN

    @classmethod
    def from_dict(cls, mapping: dict[str, str]) -> "SamplingStrategyTable":
        """Build a table from ``{category: 'gaussian' | 'uniform'}``."""
        try:
            strategies = {
                k.strip().lower(): SamplingStrategy(v) for k, v in mapping.items()
            }
        except ValueError as e:
            raise InvalidArgumentError(f"unknown sampling strategy: {e}") from e
        return cls(strategies=strategies)


def list_categories() -> list[str]:
    """
    Get the list of categories with a sampling strategy.

    Returns:
        Category names, aliases included.
    """
    return list(SAMPLING_STRATEGIES.keys()) + list(CATEGORY_ALIASES.keys())
