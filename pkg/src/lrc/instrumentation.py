"""Analysis-side machinery: weight bookkeeping, exact oracles and bound calculators.

Everything here may look at the true target; none of it is used by the
learners to choose queries.  Enumeration oracles are capped at small sizes
and refuse larger inputs outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .core import (
    ConceptError,
    CounterExample,
    ExampleDistribution,
    HypothesisMatrix,
    TargetPrior,
    check_row,
    difference_set,
    eliminate,
)
from .majority import best_majority_hypothesis

ORACLE_MAX_ROWS = 20
ORACLE_MAX_COLS = 12


def _check_oracle_size(h: HypothesisMatrix) -> None:
    if h.n > ORACLE_MAX_ROWS or h.m > ORACLE_MAX_COLS:
        raise ConceptError(
            f"enumeration oracles are capped at {ORACLE_MAX_ROWS} rows x {ORACLE_MAX_COLS} columns, got {h.shape}"
        )


# -- weights ----------------------------------------------------------------


@dataclass
class ThresholdTable:
    theta_star: np.ndarray
    epsilon: float
    delta: float
    n: int

    @classmethod
    def build(cls, p: ExampleDistribution, n: int, epsilon: float, delta: float) -> "ThresholdTable":
        if not (0 < epsilon and 0 < delta < 1 and n >= 1):
            raise ConceptError("thresholds need n >= 1, epsilon > 0, 0 < delta < 1")
        theta = math.log(n / delta) * 2.0 * p.probs / epsilon
        return cls(theta, epsilon, delta, n)


@dataclass
class RoundWeights:
    """Per-round diagnostics recorded when the tracker knows its thresholds."""

    learner_weight: float  # W_i(h_i) at the start of the round
    light_gain: float  # weight added to columns light at the start of the round


@dataclass
class WeightTracker:
    """Cumulative conditional counter-example mass per column.

    Weights accumulate with Kahan compensation so the total stays within
    1e-12 of the round count over long runs.
    """

    m: int
    round: int = 0
    thresholds: Optional[ThresholdTable] = None
    last_increment: Optional[np.ndarray] = None
    log: list[RoundWeights] = field(default_factory=list)
    _w: np.ndarray = field(init=False, repr=False)
    _c: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._w = np.zeros(self.m)
        self._c = np.zeros(self.m)

    @property
    def weights(self) -> np.ndarray:
        return self._w - self._c

    def total(self) -> float:
        # one correctly rounded sum over both arrays
        return math.fsum(np.concatenate([self._w, -self._c]))

    def add(self, inc: np.ndarray) -> None:
        y = inc - self._c
        t = self._w + y
        self._c = (t - self._w) - y
        self._w = t
        self.last_increment = inc
        self.round += 1


def record_round(
    tracker: WeightTracker, h: HypothesisMatrix, p: ExampleDistribution, learner_h: int, target: int
) -> WeightTracker:
    """Add the learner's full conditional counter-example distribution to the weights."""
    if check_row(h, learner_h) == check_row(h, target):
        raise ConceptError("record_round needs a learner hypothesis different from the target")
    diff = difference_set(h, learner_h, target)
    inc = np.zeros(tracker.m)
    inc[diff] = p.probs[diff] / p.probs[diff].sum()
    # fold the rounding residue into the largest entry so the increment sums to 1
    j = diff[np.argmax(inc[diff])]
    inc[j] += 1.0 - math.fsum(inc[diff])
    if tracker.thresholds is not None:
        w = tracker.weights
        light = w <= tracker.thresholds.theta_star
        tracker.log.append(RoundWeights(float(w[diff].sum()), float(inc[light].sum())))
    tracker.add(inc)
    return tracker


def hypothesis_weight(tracker: WeightTracker, h: HypothesisMatrix, row: int, target: int) -> float:
    return float(tracker.weights[difference_set(h, row, target)].sum())


def light_heavy(tracker: WeightTracker, thresholds: ThresholdTable) -> tuple[np.ndarray, np.ndarray]:
    """Column indices (light, heavy); light means weight <= threshold."""
    light = tracker.weights <= thresholds.theta_star
    return np.flatnonzero(light), np.flatnonzero(~light)


def round_elimination_probability(
    h: HypothesisMatrix, p: ExampleDistribution, row: int, learner_h: int, target: int
) -> float:
    """Probability that ``row`` is eliminated by the counter-example to ``learner_h``."""
    d_learner = difference_set(h, learner_h, target)
    if d_learner.size == 0:
        return 0.0
    hit = h.values[row, d_learner] != h.values[target, d_learner]
    return float(p.probs[d_learner][hit].sum() / p.probs[d_learner].sum())


# -- per-round elimination oracles -------------------------------------------


def disagreement_fraction(h: HypothesisMatrix, s, row: int, x: int) -> float:
    """Fraction of rows in ``s`` whose value at column ``x`` differs from ``row``'s."""
    s = np.asarray(s, dtype=np.intp)
    return float(np.count_nonzero(h.values[s, x] != h.values[row, x]) / s.size)


def expected_elimination_fraction(
    h: HypothesisMatrix, s, p: ExampleDistribution, learner_h: int, target: int
) -> float:
    """Exact expected fraction of ``s`` removed when ``learner_h`` is queried against ``target``."""
    s = np.asarray(s, dtype=np.intp)
    diff = difference_set(h, learner_h, target)
    if diff.size == 0:
        raise ConceptError("learner hypothesis equals the target")
    cond = p.probs[diff] / p.probs[diff].sum()
    v = np.count_nonzero(h.values[np.ix_(s, diff)] != h.values[target, diff], axis=0) / s.size
    return float(cond @ v)


def expected_elimination_fraction_exact(h: HypothesisMatrix, s, p_weights: Sequence, learner_h: int, target: int) -> Fraction:
    """Rational-arithmetic twin of :func:`expected_elimination_fraction`.

    ``p_weights`` are non-negative integers or Fractions proportional to P.
    """
    s = [int(j) for j in s]
    vals = h.values
    diff = [x for x in range(h.m) if vals[learner_h, x] != vals[target, x]]
    if not diff:
        raise ConceptError("learner hypothesis equals the target")
    z = sum(Fraction(p_weights[x]) for x in diff)
    total = Fraction(0)
    for x in diff:
        gone = sum(1 for j in s if vals[j, x] != vals[target, x])
        total += Fraction(p_weights[x]) / z * Fraction(gone, len(s))
    return total


def elimination_matrix(h: HypothesisMatrix, s, p: ExampleDistribution) -> np.ndarray:
    """E[j, k] = expected eliminated fraction for learner s[j] and target s[k].

    The diagonal is set to 1: querying the target ends learning.
    """
    s = np.asarray(s, dtype=np.intp)
    _check_oracle_size(h)
    k = s.size
    out = np.ones((k, k))
    for a in range(k):
        for b in range(k):
            if a != b:
                out[a, b] = expected_elimination_fraction(h, s, p, int(s[a]), int(s[b]))
    return out


def randomized_round_elimination(h: HypothesisMatrix, s, p: ExampleDistribution, q: Sequence[float]) -> float:
    """sum_j sum_k q_j q_k E(h_j, h_k) with ``q`` aligned to ``s``."""
    q = np.asarray(q, dtype=np.float64)
    return float(q @ elimination_matrix(h, s, p) @ q)


# -- posterior oracle ----------------------------------------------------------


def bayes_oracle(
    h: HypothesisMatrix,
    p: ExampleDistribution,
    q: TargetPrior,
    pairs: Sequence[tuple[int, CounterExample]],
) -> dict[int, float]:
    """Posterior over the target computed directly from the whole transcript.

    The learner's own selection probabilities do not depend on the target and
    cancel, so only counter-example likelihoods and the prior enter.
    """
    _check_oracle_size(h)
    vals = h.values
    like = np.array(q.probs, dtype=np.float64)
    for j in range(h.n):
        if like[j] == 0:
            continue
        for query, cx in pairs:
            if vals[j, cx.column] != cx.target_value:
                like[j] = 0.0
                break
            # consistent j disagrees with the query at cx.column, so its D is non-empty
            d = vals[j] != vals[query]
            like[j] *= p.probs[cx.column] / p.probs[d].sum()
    z = like.sum()
    if not z > 0:
        raise ConceptError("transcript has zero likelihood under every hypothesis")
    consistent = np.arange(h.n)
    for _, cx in pairs:
        consistent = eliminate(consistent, h, cx)
    return {int(j): float(like[j] / z) for j in consistent}


# -- exact expected learning time ----------------------------------------------


def majority_expected_rounds(h: HypothesisMatrix, p: ExampleDistribution, target: int) -> float:
    """Exact expected counter-example count of the majority learner for one target.

    Recurses over every reachable consistent set, weighting each branch by the
    teacher's conditional counter-example probability.
    """
    _check_oracle_size(h)
    target = check_row(h, target)
    vals = h.values

    @lru_cache(maxsize=None)
    def t(rows: tuple[int, ...]) -> float:
        s = np.array(rows, dtype=np.intp)
        qh = best_majority_hypothesis(h, s, p)
        if qh == target:
            return 0.0
        diff = difference_set(h, qh, target)
        cond = p.probs[diff] / p.probs[diff].sum()
        acc = 0.0
        for x, w in zip(diff, cond):
            nxt = s[vals[s, x] == vals[target, x]]
            acc += w * t(tuple(int(j) for j in nxt))
        return 1.0 + acc

    return t(tuple(range(h.n)))


# -- bounds ----------------------------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    h_size: int
    epsilon: Optional[float]
    delta: Optional[float]
    majority: float  # log_{4/3}|H|
    majority_log2: float  # base-2 curve used for plotting against simulations
    randomized: float  # log2 |H|
    majority_hp: Optional[float] = None  # log_{4/3}(|H|/delta)
    arbitrary: Optional[float] = None  # (4 log2(|H|/delta) + 2)/eps + 1
    arbitrary_ln: Optional[float] = None  # same with natural log
    pac: Optional[float] = None  # (1/eps) log2(|H|/delta)
    theta: Optional[float] = None  # ln(|H|/delta), the weight cut-off

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def log43(x: float) -> float:
    return math.log(x) / math.log(4.0 / 3.0)


def bounds(h_size: int, epsilon: Optional[float] = None, delta: Optional[float] = None) -> Bounds:
    if h_size < 1:
        raise ConceptError("|H| must be >= 1")
    if delta is not None and not 0 < delta < 1:
        raise ConceptError("delta must lie in (0, 1)")
    if epsilon is not None and not 0 < epsilon < 1:
        raise ConceptError("epsilon must lie in (0, 1)")
    extra: dict = {}
    if delta is not None:
        extra["majority_hp"] = log43(h_size / delta)
        extra["theta"] = math.log(h_size / delta)
        if epsilon is not None:
            lg = math.log2(h_size / delta)
            extra["arbitrary"] = (4 * lg + 2) / epsilon + 1
            extra["arbitrary_ln"] = (4 * math.log(h_size / delta) + 2) / epsilon + 1
            extra["pac"] = lg / epsilon
    return Bounds(
        h_size=h_size,
        epsilon=epsilon,
        delta=delta,
        majority=log43(h_size),
        majority_log2=math.log2(h_size),
        randomized=math.log2(h_size),
        **extra,
    )
