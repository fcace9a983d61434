"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in the pytest terminal summary.  Run directly with
``python tests/test_acceptance.py`` to see only these checks.
"""

import math
import time
from math import comb

import numpy as np
import pytest

from lrc.arbitrary import SelectionStrategy, run_arbitrary
from lrc.core import ExampleDistribution, TargetPrior, difference_set, make_rng
from lrc.datagen import ClusterConfig, generate_clustered, generate_random, generate_tight_bound
from lrc.harness import ExperimentConfig, rows_csv, run_experiment, sweep_figure1, trials_csv, FIG1_COLUMNS
from lrc.instrumentation import (
    ThresholdTable,
    WeightTracker,
    bayes_oracle,
    bounds,
    elimination_matrix,
    expected_elimination_fraction,
    expected_elimination_fraction_exact,
    hypothesis_weight,
    light_heavy,
    randomized_round_elimination,
    record_round,
    round_elimination_probability,
)
from lrc.majority import OpCounter, best_majority_hypothesis, run_majority
from lrc.randomized import run_randomized
from lrc.teacher import TeacherConfig

from conftest import random_instance

RESULTS: list[str] = []


def report(num: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def sem(x):
    x = np.asarray(x, dtype=np.float64)
    return x.std(ddof=1) / math.sqrt(x.size)


@pytest.fixture(scope="module")
def big_clustered():
    return generate_clustered(ClusterConfig(5000, 10_000, 100, 20, 2, seed=0)).matrix


def test_01_tightness_value():
    start = time.perf_counter()
    worst, found = 0.0, True
    for n in range(2, 6):
        t = generate_tight_bound(n)
        m = 2 * n + 1
        p = ExampleDistribution.uniform(m)
        found &= best_majority_hypothesis(t.matrix, t.matrix.all_rows(), p) == t.h_hat
        want = 0.25 + 1 / (2 * comb(2 * n, n))
        got = expected_elimination_fraction(t.matrix, t.matrix.all_rows(), p, t.h_hat, t.h_star)
        exact = expected_elimination_fraction_exact(t.matrix, range(t.matrix.n), [1] * m, t.h_hat, t.h_star)
        worst = max(worst, abs(got - want), abs(float(exact) - want))
    elapsed = time.perf_counter() - start
    report(1, "tightness value 1/4 + 1/(2|H|)", found and worst <= 1e-12 and elapsed < 1,
           f"max err {worst:.1e}, {elapsed:.2f}s")


def test_02_posterior_matches_bayes():
    start = time.perf_counter()
    worst, checked = 0.0, 0
    for case in range(1000):
        h, p = random_instance(case, max_rows=16, max_cols=8)
        q = TargetPrior(np.random.default_rng(case).dirichlet(np.ones(h.n)))
        tr = run_randomized(h, p, q, make_rng(case), record_posteriors=True)
        pairs = tr.pairs()
        for i, post in enumerate(tr.posteriors):
            want = bayes_oracle(h, p, q, pairs[:i])
            got = post.as_dict()
            if sorted(got) != sorted(want):
                worst = math.inf
                continue
            worst = max(worst, max(abs(got[j] - want[j]) for j in want))
            checked += 1
    elapsed = time.perf_counter() - start
    report(2, "posterior recursion equals Bayes oracle", worst <= 1e-10 and elapsed < 10,
           f"{checked} posteriors, max diff {worst:.1e}, {elapsed:.1f}s")


def test_03_randomized_half_elimination():
    start = time.perf_counter()
    low, pair_low = math.inf, math.inf
    for case in range(200):
        h, p = random_instance(10_000 + case, max_rows=10, max_cols=8)
        s = h.all_rows()
        low = min(low, randomized_round_elimination(h, s, p, np.full(h.n, 1 / h.n)))
        e = elimination_matrix(h, s, p)
        pair_low = min(pair_low, float((e + e.T)[np.triu_indices(h.n, 1)].min()))
    elapsed = time.perf_counter() - start
    ok = low >= 0.5 - 1e-12 and pair_low >= 1 - 1e-12 and elapsed < 10
    report(3, "randomized round removes >= 1/2 in expectation", ok,
           f"min {low:.4f}, min pair sum {pair_low:.4f}, {elapsed:.1f}s")


def _majority_counts(n, trials):
    h = generate_random(n, 32, 2, seed=n)
    p = ExampleDistribution.uniform(32)
    out = []
    for t in range(trials):
        rng = make_rng(t)
        target = int(rng.integers(n))
        out.append(run_majority(h, p, TeacherConfig.exact(target, p), rng).counter_examples)
    return np.array(out)


@pytest.fixture(scope="module")
def majority_counts():
    return {n: _majority_counts(n, 500) for n in (64, 256)}


def test_04_majority_expected_bound(majority_counts):
    parts, ok = [], True
    for n, c in majority_counts.items():
        upper = c.mean() + 3 * sem(c)
        ok &= upper <= bounds(n).majority
        parts.append(f"|H|={n}: {c.mean():.2f}+3se={upper:.2f} <= {bounds(n).majority:.2f}")
    report(4, "majority mean rounds within log_{4/3}|H|", ok, "; ".join(parts))


def test_05_majority_high_probability(majority_counts):
    parts, ok, delta = [], True, 0.1
    for n, c in majority_counts.items():
        limit = bounds(n, delta=delta).majority_hp
        frac = float(np.mean(c > limit))
        slack = delta + 3 * math.sqrt(delta * (1 - delta) / c.size)
        ok &= frac <= slack
        parts.append(f"|H|={n}: {frac:.3f} over {limit:.1f}")
    report(5, "majority rarely exceeds log_{4/3}(|H|/delta)", ok, "; ".join(parts))


def test_06_randomized_expected_bound():
    parts, ok = [], True
    for n in (64, 256):
        h = generate_random(n, 32, 2, seed=n)
        p = ExampleDistribution.uniform(32)
        q = TargetPrior.uniform(n)
        c = np.array([run_randomized(h, p, q, make_rng(t)).counter_examples for t in range(500)])
        upper = c.mean() + 3 * sem(c)
        ok &= upper <= math.log2(n)
        parts.append(f"|H|={n}: {c.mean():.2f}+3se={upper:.2f} <= {math.log2(n):.0f}")
    report(6, "randomized mean rounds within log2|H|", ok, "; ".join(parts))


def test_07_arbitrary_pac_bound():
    start = time.perf_counter()
    h = generate_clustered(ClusterConfig(500, 1000, 10, 20, 2, seed=7)).matrix
    p = ExampleDistribution.uniform(h.m)
    eps = delta = 0.1
    limit = bounds(h.n, eps, delta).arbitrary
    over, runs, worst_err = 0, 0, 0.0
    for kind in ("first", "middle", "last"):
        strategy = SelectionStrategy(kind)
        for t in range(100):
            rng = make_rng(t)
            target = int(rng.integers(h.n))
            tr = run_arbitrary(h, p, TeacherConfig.pac(target, p, eps, delta), strategy, rng)
            over += tr.counter_examples > limit
            runs += 1
            worst_err = max(worst_err, p.mass(difference_set(h, tr.output, target)))
    elapsed = time.perf_counter() - start
    frac = over / runs
    ok = frac <= delta + 3 * math.sqrt(delta * (1 - delta) / runs) and worst_err < eps and elapsed < 300
    report(7, "arbitrary learner within PAC-LRC bound", ok,
           f"{runs} runs, {frac:.3f} over {limit:.0f}, max error mass {worst_err:.3f}, {elapsed:.1f}s")


def test_08_weight_bookkeeping():
    h, p = random_instance(42, max_rows=16, max_cols=8)
    rng = np.random.default_rng(0)
    tracker = WeightTracker(h.m)
    drift = 0.0
    for k in range(1, 10_001):
        record_round(tracker, h, p, int(rng.integers(1, h.n)), 0)
        drift = max(drift, abs(tracker.total() - k))

    weight_err, reverted = 0.0, False
    for seed in range(50):
        h, p = random_instance(seed, max_rows=20, max_cols=10)
        rng = make_rng(seed)
        target = int(rng.integers(h.n))
        th = ThresholdTable.build(p, h.n, 0.05, 0.1)
        learners = []
        tr = WeightTracker(h.m, thresholds=th)
        heavy: set = set()
        # replay a run, tracking after each round
        run = run_arbitrary(h, p, TeacherConfig.pac(target, p, 0.05, 0.1), SelectionStrategy("random"), rng)
        for r in run.rounds:
            if r.counter is None:
                continue
            record_round(tr, h, p, r.query, target)
            learners.append(r.query)
            now = set(light_heavy(tr, th)[1].tolist())
            reverted |= not heavy <= now
            heavy = now
        for row in range(h.n):
            e = math.fsum(round_elimination_probability(h, p, row, lh, target) for lh in learners)
            weight_err = max(weight_err, abs(hypothesis_weight(tr, h, row, target) - e))
    ok = drift <= 1e-12 and weight_err <= 1e-12 and not reverted
    report(8, "weight bookkeeping", ok, f"total drift {drift:.1e}, W vs sum E {weight_err:.1e}, reverted={reverted}")


def test_09_figure1_majority(big_clustered):
    start = time.perf_counter()
    cfg = ExperimentConfig(algorithm="majority", trials=10, seed=0)
    res = run_experiment(cfg, big_clustered, ExampleDistribution.uniform(big_clustered.m))
    elapsed = time.perf_counter() - start
    ok = res.mean <= 15 and res.mean < bounds(big_clustered.n).majority and elapsed < 600
    report(9, "clustered |H|=10000 majority mean rounds", ok,
           f"mean {res.mean:.2f} <= 15, log_(4/3) bound {bounds(big_clustered.n).majority:.1f}, {elapsed:.1f}s")


def test_10_figure2_shape(big_clustered):
    start = time.perf_counter()
    p = ExampleDistribution.uniform(big_clustered.m)
    grid = (0.01, 0.05, 0.1, 0.3, 0.6)
    means, sems, under = [], [], True
    for eps in grid:
        cfg = ExperimentConfig(algorithm="arbitrary", epsilon=eps, delta=0.1, strategy="first,middle,last", trials=10)
        res = run_experiment(cfg, big_clustered, p)
        means.append(res.mean)
        sems.append(sem(res.counts()))
        under &= res.mean <= bounds(big_clustered.n, eps, 0.1).pac
    inversions = [i for i in range(len(grid) - 1) if means[i + 1] > means[i]]
    soft = len(inversions) <= 1 and all(means[i + 1] - means[i] <= max(sems[i], sems[i + 1]) for i in inversions)
    elapsed = time.perf_counter() - start
    report(10, "arbitrary rounds fall with epsilon and stay under the PAC bound", soft and under and elapsed < 600,
           "means " + ", ".join(f"{m:.1f}" for m in means) + f", {elapsed:.1f}s")


def test_11_round_cost_linear():
    m, counts = 64, []
    for n in (1000, 2000):
        h = generate_random(n, m, 2, seed=n)
        c = OpCounter()
        best_majority_hypothesis(h, h.all_rows(), ExampleDistribution.uniform(m), c)
        counts.append(c.cells)
    ratio = counts[1] / counts[0]
    report(11, "majority round cost linear in |H|", 1.8 <= ratio <= 2.2, f"ratio {ratio:.3f}")


def test_12_determinism():
    cfg = ExperimentConfig(algorithm="arbitrary", dataset="clustered", rows=200, columns=60, clusters=5,
                           strategy="random,middle", trials=5, seed=9)
    a, b = trials_csv(run_experiment(cfg)), trials_csv(run_experiment(cfg))
    sweep = ExperimentConfig(columns=16, trials=3, hsizes="16,32", algorithms="majority,randomized,arbitrary")
    c, d = (rows_csv(FIG1_COLUMNS, sweep_figure1(sweep)) for _ in range(2))
    report(12, "identical config and seed give byte-identical CSV", a == b and c == d, f"{len(a)} + {len(c)} bytes")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
