"""Simulated teacher for exact (LRC) and approximate (PAC-LRC) learning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    ConceptError,
    CounterExample,
    ExampleDistribution,
    HypothesisMatrix,
    check_row,
    difference_set,
    sample_index,
)


@dataclass(frozen=True)
class TeacherConfig:
    target: int
    p: ExampleDistribution
    mode: str = "exact"  # "exact" | "pac"
    epsilon: Optional[float] = None
    delta: Optional[float] = None

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "pac"):
            raise ConceptError(f"unknown teacher mode {self.mode!r}")
        if self.mode == "pac":
            for name in ("epsilon", "delta"):
                v = getattr(self, name)
                if v is None or not 0.0 < v < 1.0:
                    raise ConceptError(f"pac mode needs 0 < {name} < 1, got {v!r}")

    @classmethod
    def exact(cls, target: int, p: ExampleDistribution) -> "TeacherConfig":
        return cls(target, p)

    @classmethod
    def pac(cls, target: int, p: ExampleDistribution, epsilon: float, delta: float) -> "TeacherConfig":
        return cls(target, p, "pac", epsilon, delta)


@dataclass(frozen=True)
class TeacherResponse:
    counter: Optional[CounterExample] = None

    @property
    def accepted(self) -> bool:
        return self.counter is None


ACCEPTED = TeacherResponse()


def epsilon_bad(h: HypothesisMatrix, query: int, target: int, p: ExampleDistribution, epsilon: float) -> bool:
    """True iff the query disagrees with the target on P-mass at least ``epsilon``."""
    diff = difference_set(h, query, target)
    return bool(diff.size) and p.mass(diff) >= epsilon


def respond(h: HypothesisMatrix, query: int, cfg: TeacherConfig, rng: np.random.Generator) -> TeacherResponse:
    query = check_row(h, query)
    target = check_row(h, cfg.target)
    if query == target:
        return ACCEPTED
    diff = difference_set(h, query, target)
    weights = cfg.p.probs[diff]
    if cfg.mode == "pac" and weights.sum() < cfg.epsilon:
        return ACCEPTED
    # same inverse-CDF order as sample_column: ascending column index
    x = int(diff[sample_index(weights, rng)])
    return TeacherResponse(CounterExample(x, int(h.values[target, x])))
