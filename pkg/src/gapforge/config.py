"""Runtime limits and output configuration.

CLI precedence is flags > ``GAPFORGE_*`` environment variables > defaults.

Budget semantics: operations that materialize a whole window (``primes_up_to``,
``sieve_survivors``) require the window to fit in ``memory_budget`` bytes;
segmented scans only allocate one segment at a time and are instead capped at
``memory_budget * 8`` scanned integers (the bit-array reading of the budget).
"""

import os
from dataclasses import dataclass

DEFAULT_MEMORY_BUDGET = 1 << 30   # bytes
DEFAULT_SEGMENT_SIZE = 1 << 20    # odd numbers per sieve segment
DEFAULT_PERIOD_CAP = 250_000_000  # admits exact J(u) through u = 23

ENV_PREFIX = "GAPFORGE_"
_ENV_FIELDS = (
    ("memory_budget", "MEMORY_BUDGET"),
    ("segment_size", "SEGMENT_SIZE"),
    ("period_cap", "PERIOD_CAP"),
)


@dataclass(frozen=True)
class Config:
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    segment_size: int = DEFAULT_SEGMENT_SIZE
    period_cap: int = DEFAULT_PERIOD_CAP
    output_format: str = "table"  # table | json | csv

    def __post_init__(self):
        if self.segment_size < 1 << 16:
            raise ValueError("segment_size must be at least 2**16")
        if self.period_cap > self.memory_budget * 8:
            raise ValueError("period_cap must not exceed memory_budget * 8")
        if self.output_format not in ("table", "json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    @property
    def scan_limit(self) -> int:
        """Longest window (in integers) a segmented scan may cover."""
        return self.memory_budget * 8


DEFAULT = Config()


def from_env(**overrides) -> Config:
    """Build a Config from GAPFORGE_* variables, then apply overrides.

    Overrides that are None are ignored, so CLI code can pass flag values
    straight through.
    """
    values = {}
    for field, env in _ENV_FIELDS:
        raw = os.environ.get(ENV_PREFIX + env)
        if raw is not None:
            values[field] = int(raw)
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return Config(**values)
