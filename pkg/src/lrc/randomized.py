"""Randomized learner: sample each query from the posterior over the target."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    CounterExample,
    ExampleDistribution,
    HypothesisMatrix,
    RoundLimitExceeded,
    RoundRecord,
    TargetPrior,
    Transcript,
    disagreement_mass,
    eliminate,
    sample_index,
)
from .teacher import TeacherConfig, respond

log = logging.getLogger(__name__)

DRIFT_WARN = 1e-6


class PosteriorError(RuntimeError):
    pass


@dataclass
class Posterior:
    """Probabilities aligned with ``support`` (ascending row indices)."""

    support: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_prior(cls, q: TargetPrior) -> "Posterior":
        return cls(np.arange(len(q), dtype=np.intp), q.probs.copy())

    def as_dict(self) -> dict[int, float]:
        return {int(j): float(w) for j, w in zip(self.support, self.probs)}

    def dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[self.support] = self.probs
        return out

    def prob(self, j: int) -> float:
        k = np.searchsorted(self.support, j)
        if k < self.support.size and self.support[k] == j:
            return float(self.probs[k])
        return 0.0


@dataclass(frozen=True)
class TranscriptPair:
    hypothesis: int
    counter: CounterExample


def posterior_update(
    h: HypothesisMatrix,
    p: ExampleDistribution,
    prior: Posterior,
    pair: TranscriptPair,
    survivors: np.ndarray,
) -> Posterior:
    """One step of the recursion q_j <- q_j * P[x | h_j != h_i], renormalized over survivors."""
    total = prior.probs.sum()
    if abs(total - 1.0) > DRIFT_WARN:
        log.warning("posterior mass drifted to %r before renormalization", total)
    survivors = np.asarray(survivors, dtype=np.intp)
    if survivors.size == 0:
        raise PosteriorError("no surviving hypotheses")
    q = prior.probs[np.searchsorted(prior.support, survivors)]
    x = pair.counter.column
    d_mass = disagreement_mass(h, survivors, h.values[pair.hypothesis], p)
    # every survivor agrees with h*(x) != h_i(x), so x lies in D(h_i, h_j) and d_mass > 0
    w = q * (p.probs[x] / d_mass)
    z = w.sum()
    if not z > 0:
        raise PosteriorError("all surviving hypotheses have zero posterior weight")
    return Posterior(survivors, w / z)


def sample_query(post: Posterior, rng: np.random.Generator) -> int:
    live = post.probs > 0
    return int(post.support[live][sample_index(post.probs[live], rng)])


def draw_target(q: TargetPrior, rng: np.random.Generator) -> int:
    return int(sample_index(q.probs, rng))


def run_randomized(
    h: HypothesisMatrix,
    p: ExampleDistribution,
    q: TargetPrior,
    rng: np.random.Generator,
    max_rounds: Optional[int] = None,
    target: Optional[int] = None,
    record_posteriors: bool = False,
) -> Transcript:
    """Run the randomized learner; ``target`` is drawn from ``q`` when not given."""
    if len(q) != h.n:
        raise ValueError(f"prior has {len(q)} entries for {h.n} hypotheses")
    if target is None:
        target = draw_target(q, rng)
    if max_rounds is None:
        max_rounds = h.n
    cfg = TeacherConfig.exact(target, p)
    post = Posterior.from_prior(q)
    s = post.support
    tr = Transcript(target=target)
    history = [post] if record_posteriors else None
    while True:
        if len(tr.rounds) >= max_rounds:
            raise RoundLimitExceeded(f"randomized learner exceeded {max_rounds} rounds")
        hq = sample_query(post, rng)
        resp = respond(h, hq, cfg, rng)
        if resp.accepted:
            tr.rounds.append(RoundRecord(hq, None, s.size, s.size))
            tr.output = hq
            tr.end_reason = "accepted"
            break
        after = eliminate(s, h, resp.counter)
        tr.rounds.append(RoundRecord(hq, resp.counter, s.size, after.size))
        post = posterior_update(h, p, post, TranscriptPair(hq, resp.counter), after)
        s = after
        if history is not None:
            history.append(post)
    tr.posteriors = history
    return tr
