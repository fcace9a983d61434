"""Majority learner: query the consistent row closest (in P-mass) to the column-wise majority."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    ExampleDistribution,
    HypothesisMatrix,
    RoundLimitExceeded,
    RoundRecord,
    Transcript,
    agreement_mass,
    eliminate,
)
from .teacher import TeacherConfig, respond

# above this many distinct values per column, fall back from one-hot counting
_DENSE_ALPHABET = 64
# scores are sums of P over columns; BLAS reduction order can move the last ulp
SCORE_TIE_TOL = 1e-12


@dataclass
class OpCounter:
    """Counts matrix cells touched; stands in for wall-clock in scaling checks."""

    cells: int = 0

    def add(self, k: int) -> None:
        self.cells += int(k)


def compute_majority(h: HypothesisMatrix, s, counter: Optional[OpCounter] = None) -> np.ndarray:
    """Most frequent value per column over rows ``s``; ties go to the smaller value."""
    s = np.asarray(s, dtype=np.intp)
    if s.size == 0:
        raise ValueError("majority of an empty consistent set")
    sub = h.values[s]
    top = int(sub.max())
    if top < _DENSE_ALPHABET:
        counts = np.empty((top + 1, h.m), dtype=np.int64)
        for v in range(top + 1):
            counts[v] = np.count_nonzero(sub == v, axis=0)
        if counter is not None:
            counter.add((top + 1) * sub.size)
        # argmax returns the first maximum, i.e. the smallest value
        return counts.argmax(axis=0).astype(h.values.dtype)
    maj = np.empty(h.m, dtype=h.values.dtype)
    for x in range(h.m):
        vals, cnt = np.unique(sub[:, x], return_counts=True)
        maj[x] = vals[cnt.argmax()]
    if counter is not None:
        counter.add(sub.size)
    return maj


def lexicographic_min(h: HypothesisMatrix, rows, counter: Optional[OpCounter] = None) -> int:
    """Row whose value sequence is lexicographically smallest (column 0 first)."""
    cand = np.asarray(rows, dtype=np.intp)
    for x in range(h.m):
        if cand.size == 1:
            break
        col = h.values[cand, x]
        if counter is not None:
            counter.add(cand.size)
        cand = cand[col == col.min()]
    return int(cand[0])


def best_majority_hypothesis(
    h: HypothesisMatrix, s, p: ExampleDistribution, counter: Optional[OpCounter] = None
) -> int:
    s = np.asarray(s, dtype=np.intp)
    if s.size == 1:
        return int(s[0])
    maj = compute_majority(h, s, counter)
    scores = agreement_mass(h, s, maj, p)
    if counter is not None:
        counter.add(s.size * h.m)
    tied = s[scores >= scores.max() - SCORE_TIE_TOL]
    return lexicographic_min(h, tied, counter)


def run_majority(
    h: HypothesisMatrix,
    p: ExampleDistribution,
    cfg: TeacherConfig,
    rng: np.random.Generator,
    max_rounds: Optional[int] = None,
) -> Transcript:
    if max_rounds is None:
        max_rounds = h.n
    s = h.all_rows()
    tr = Transcript(target=cfg.target)
    while True:
        if len(tr.rounds) >= max_rounds:
            raise RoundLimitExceeded(f"majority learner exceeded {max_rounds} rounds")
        q = best_majority_hypothesis(h, s, p)
        resp = respond(h, q, cfg, rng)
        if resp.accepted:
            tr.rounds.append(RoundRecord(q, None, s.size, s.size))
            tr.output = q
            tr.end_reason = "accepted"
            return tr
        after = eliminate(s, h, resp.counter)
        tr.rounds.append(RoundRecord(q, resp.counter, s.size, after.size))
        s = after
