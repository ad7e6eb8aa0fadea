"""Configuration settings for exact computations and ergodic statistics."""

from dataclasses import dataclass, field
from typing import Tuple


@dataclass
class CircleMapConfig:
    """Tunables shared by the library modules and the CLI."""

    # Orbit arithmetic
    rational_budget_bits: int = 256  # denominator size before switching to float64

    # Exact correlation sums
    component_budget: int = 10**7
    correlation_depth: int = 6

    # Birkhoff / Monte Carlo battery
    birkhoff_length: int = 100_000
    monte_carlo_starts: int = 100
    max_frequency: int = 4
    checkpoint_base: int = 10
    verdict_threshold: float = 0.05

    # Certificates and constructions
    certificate_validation_arcs: int = 200
    max_offset_depth: int = 512
    leo_time_max_steps: int = 200

    # Sampler lap weights, drawn as integers in [low, high]
    sample_weight_range: Tuple[int, int] = field(default=(5, 12))

    seed: int = 0

    def __post_init__(self):
        low, high = self.sample_weight_range
        if not 0 < low <= high:
            raise ValueError(f"Invalid sample_weight_range: {self.sample_weight_range}")
        if self.verdict_threshold <= 0:
            raise ValueError("verdict_threshold must be positive")


# Default configuration instance
default_config = CircleMapConfig()
