"""Budgets and run configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict


@dataclass(frozen=True)
class Budgets:
    max_group_order: int = 4096
    # exhaustive associativity check up to this order, sampled above
    assoc_exhaustive: int = 256
    assoc_samples: int = 20000
    hom_search: int = 2_000_000
    max_subgroups: int = 20000
    homology_order: int = 200
    bar_homology_order: int = 24
    tuple_space: int = 5_000_000
    level_product: int = 200_000
    model_order: int = 1_000_000

    def __post_init__(self):
        for k, v in asdict(self).items():
            if v <= 0:
                raise ValueError(f"budget {k} must be positive")


DEFAULT_BUDGETS = Budgets()


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    threads: int = 1
    budgets: Budgets = DEFAULT_BUDGETS
    cache_dir: str | None = None
    output: str | None = None

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.command == "sample" and self.seed is None and not self.params.get("exhaustive"):
            raise ValueError("sampling requires an explicit seed")

    def to_dict(self):
        d = asdict(self)
        return d
