"""Arbitrary learner under PAC-LRC: any consistent hypothesis, picked by a named strategy."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    ConceptError,
    ExampleDistribution,
    HypothesisMatrix,
    RoundLimitExceeded,
    RoundRecord,
    Transcript,
    disagreement_mass,
    eliminate,
)
from .instrumentation import WeightTracker, record_round
from .teacher import TeacherConfig, respond

STRATEGY_KINDS = ("first", "middle", "last", "random", "rank")


@dataclass(frozen=True)
class SelectionStrategy:
    kind: str
    rank: int = 0

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ConceptError(f"unknown selection strategy {self.kind!r}")
        if self.rank < 0:
            raise ConceptError("rank must be >= 0")

    @classmethod
    def parse(cls, text: str) -> "SelectionStrategy":
        """``first``, ``middle``, ``last``, ``random`` or ``rank:<k>``."""
        text = text.strip().lower()
        if text.startswith("rank"):
            _, _, k = text.partition(":")
            try:
                return cls("rank", int(k))
            except ValueError:
                raise ConceptError(f"bad rank strategy {text!r}") from None
        return cls(text)

    def __str__(self) -> str:
        return f"rank:{self.rank}" if self.kind == "rank" else self.kind


def select(s: np.ndarray, strategy: SelectionStrategy, rng: Optional[np.random.Generator] = None) -> int:
    s = np.asarray(s, dtype=np.intp)
    if s.size == 0:
        raise ValueError("cannot select from an empty consistent set")
    if strategy.kind == "first":
        return int(s[0])
    if strategy.kind == "middle":
        return int(s[s.size // 2])
    if strategy.kind == "last":
        return int(s[-1])
    if strategy.kind == "random":
        if rng is None:
            raise ValueError("random strategy needs an rng")
        return int(s[rng.integers(s.size)])
    return int(s[min(strategy.rank, s.size - 1)])


def run_arbitrary(
    h: HypothesisMatrix,
    p: ExampleDistribution,
    cfg: TeacherConfig,
    strategy: SelectionStrategy,
    rng: np.random.Generator,
    max_rounds: Optional[int] = None,
    tracker: Optional[WeightTracker] = None,
) -> Transcript:
    """Select, query, eliminate until accepted or no eps-bad hypothesis is consistent.

    When ``tracker`` is given, every counter-example round is recorded into it
    before elimination.
    """
    if cfg.mode != "pac":
        raise ConceptError("arbitrary learner runs in pac mode")
    if max_rounds is None:
        max_rounds = h.n
    # harness-side knowledge of the target; the learner never reads it
    bad = disagreement_mass(h, h.all_rows(), h.values[cfg.target], cfg.p) >= cfg.epsilon
    s = h.all_rows()
    tr = Transcript(target=cfg.target)
    while True:
        if len(tr.rounds) >= max_rounds:
            raise RoundLimitExceeded(f"arbitrary learner exceeded {max_rounds} rounds")
        if not bad[s].any():
            tr.output = select(s, strategy, rng)
            tr.end_reason = "no_bad_left"
            return tr
        hq = select(s, strategy, rng)
        resp = respond(h, hq, cfg, rng)
        if resp.accepted:
            tr.rounds.append(RoundRecord(hq, None, s.size, s.size))
            tr.output = hq
            tr.end_reason = "accepted"
            return tr
        if tracker is not None:
            record_round(tracker, h, p, hq, cfg.target)
        after = eliminate(s, h, resp.counter)
        tr.rounds.append(RoundRecord(hq, resp.counter, s.size, after.size))
        s = after
