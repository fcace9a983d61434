"""Experiment orchestration: configs, seeded trial batches, sweeps and CSV/JSON output."""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .arbitrary import SelectionStrategy, run_arbitrary
from .core import (
    ConceptError,
    ExampleDistribution,
    HypothesisMatrix,
    PathLike,
    TargetPrior,
    Transcript,
    difference_set,
    format_real,
    make_rng,
    read_distribution,
    read_matrix,
)
from .datagen import ClusterConfig, generate_clustered, generate_identity, generate_random, generate_tight_bound
from .instrumentation import bounds
from .majority import run_majority
from .randomized import run_randomized
from .teacher import TeacherConfig

log = logging.getLogger(__name__)

ALGORITHMS = ("majority", "randomized", "arbitrary")
DATASETS = ("random", "clustered", "identity", "tight", "file")


class ConfigError(ValueError):
    pass


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


@dataclass
class ExperimentConfig:
    algorithm: str = "majority"
    dataset: str = "random"
    rows: int = 64
    columns: int = 32
    clusters: int = 10
    max_flips: int = 20
    alphabet: int = 2
    dataset_seed: int = 0
    tight_n: int = 2
    dataset_path: str = ""
    p: str = "uniform"
    q: str = "uniform"
    epsilon: float = 0.1
    delta: float = 0.1
    strategy: str = "first"
    trials: int = 10
    seed: int = 0
    workers: int = 1
    out: str = ""
    # sweep-only
    hsizes: str = ""
    epsilons: str = ""
    algorithms: str = "majority,arbitrary"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.dataset not in DATASETS:
            raise ConfigError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        if self.dataset == "file" and not self.dataset_path:
            raise ConfigError("dataset = file needs dataset_path")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.algorithm == "arbitrary":
            if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
                raise ConfigError("arbitrary needs 0 < epsilon < 1 and 0 < delta < 1")
            try:
                self.strategies()
            except ConceptError as exc:
                raise ConfigError(str(exc)) from None
        for a in _split(self.algorithms):
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r} in algorithms")

    def strategies(self) -> list[SelectionStrategy]:
        return [SelectionStrategy.parse(s) for s in _split(self.strategy)]

    def hsize_grid(self) -> list[int]:
        try:
            return [int(x) for x in _split(self.hsizes)]
        except ValueError:
            raise ConfigError(f"bad hsizes {self.hsizes!r}") from None

    def epsilon_grid(self) -> list[float]:
        try:
            return [float(x) for x in _split(self.epsilons)]
        except ValueError:
            raise ConfigError(f"bad epsilons {self.epsilons!r}") from None

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        kinds = {f.name: f.type for f in dataclasses.fields(cls)}
        kw = {}
        for key, value in raw.items():
            if key not in kinds:
                raise ConfigError(f"unknown config key {key!r}")
            kind = kinds[key]
            try:
                if kind == "int":
                    kw[key] = int(value)
                elif kind == "float":
                    kw[key] = float(value)
                else:
                    kw[key] = str(value).strip().strip('"')
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {value!r} as {kind}") from None
        return cls(**kw)


def load_config(path: PathLike, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Read a flat ``key = value`` file (an optional ``[experiment]`` header is allowed)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # type: ignore[assignment]
    if not text.lstrip().startswith("["):
        text = "[experiment]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    raw: dict = {}
    for section in parser.sections():
        raw.update(parser[section])
    raw.update(overrides or {})
    return ExperimentConfig.from_mapping(raw)


# -- inputs ------------------------------------------------------------------------


def build_dataset(cfg: ExperimentConfig) -> HypothesisMatrix:
    if cfg.dataset == "random":
        return generate_random(cfg.rows, cfg.columns, cfg.alphabet, cfg.dataset_seed)
    if cfg.dataset == "clustered":
        cc = ClusterConfig(
            num_columns=cfg.columns,
            num_hypotheses=cfg.rows,
            num_clusters=min(cfg.clusters, cfg.rows),
            max_flips=min(cfg.max_flips, cfg.columns),
            alphabet=cfg.alphabet,
            seed=cfg.dataset_seed,
        )
        return generate_clustered(cc).matrix
    if cfg.dataset == "identity":
        return generate_identity(cfg.rows)
    if cfg.dataset == "tight":
        return generate_tight_bound(cfg.tight_n).matrix
    return read_matrix(cfg.dataset_path)


def build_p(cfg: ExperimentConfig, h: HypothesisMatrix) -> ExampleDistribution:
    if cfg.p == "uniform":
        return ExampleDistribution.uniform(h.m)
    probs = read_distribution(cfg.p)
    if probs.size != h.m:
        raise ConfigError(f"P has {probs.size} entries for {h.m} columns")
    return ExampleDistribution(probs)


def build_q(cfg: ExperimentConfig, h: HypothesisMatrix) -> TargetPrior:
    if cfg.q == "uniform":
        return TargetPrior.uniform(h.n)
    probs = read_distribution(cfg.q)
    if probs.size != h.n:
        raise ConfigError(f"Q has {probs.size} entries for {h.n} rows")
    return TargetPrior(probs)


# -- runs ----------------------------------------------------------------------------

TRIAL_COLUMNS = ("trial", "seed", "strategy", "target", "counter_examples", "output", "error_mass", "end_reason")


@dataclass(frozen=True)
class TrialRow:
    trial: int
    seed: int
    strategy: str
    target: int
    counter_examples: int
    output: int
    error_mass: float
    end_reason: str

    def cells(self) -> list[str]:
        return [
            str(self.trial),
            str(self.seed),
            self.strategy,
            str(self.target),
            str(self.counter_examples),
            str(self.output),
            format_real(self.error_mass),
            self.end_reason,
        ]


@dataclass
class RunResult:
    config: ExperimentConfig
    h_size: int
    trials: list[TrialRow]
    bounds: dict
    wall_time: float = 0.0
    summary: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.summary:
            self.summary = summarize([t.counter_examples for t in self.trials])

    @property
    def mean(self) -> float:
        return self.summary["mean"]

    @property
    def std(self) -> float:
        return self.summary["std"]

    def counts(self) -> np.ndarray:
        return np.array([t.counter_examples for t in self.trials], dtype=np.float64)

    def to_json(self) -> str:
        doc = {
            "config": self.config.as_dict(),
            "h_size": self.h_size,
            "target_draw": "prior" if self.config.algorithm == "randomized" else "uniform",
            "summary": self.summary,
            "bounds": self.bounds,
            "wall_time": self.wall_time,
            "trials": [dict(zip(TRIAL_COLUMNS, (getattr(t, c) for c in TRIAL_COLUMNS))) for t in self.trials],
        }
        return json.dumps(doc, indent=2)


def summarize(values: Sequence[float]) -> dict:
    """Mean, sample standard deviation (0 for a single value) and max."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("nothing to summarize")
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return {"trials": int(arr.size), "mean": float(arr.mean()), "std": std, "max": float(arr.max())}


def _run_trial(
    cfg: ExperimentConfig,
    h: HypothesisMatrix,
    p: ExampleDistribution,
    q: Optional[TargetPrior],
    t: int,
    strategy: Optional[SelectionStrategy],
) -> TrialRow:
    seed = cfg.seed + t
    rng = make_rng(seed)
    if cfg.algorithm == "randomized":
        tr: Transcript = run_randomized(h, p, q, rng)
    else:
        target = int(rng.integers(h.n))
        if cfg.algorithm == "majority":
            tr = run_majority(h, p, TeacherConfig.exact(target, p), rng)
        else:
            teacher = TeacherConfig.pac(target, p, cfg.epsilon, cfg.delta)
            tr = run_arbitrary(h, p, teacher, strategy, rng)
    err = p.mass(difference_set(h, tr.output, tr.target))
    return TrialRow(t, seed, str(strategy) if strategy else "", tr.target, tr.counter_examples, tr.output, err, tr.end_reason)


def run_experiment(
    cfg: ExperimentConfig,
    h: Optional[HypothesisMatrix] = None,
    p: Optional[ExampleDistribution] = None,
    q: Optional[TargetPrior] = None,
) -> RunResult:
    """Run ``cfg.trials`` seeded trials (per strategy, for the arbitrary learner).

    Trial ``t`` uses seed ``cfg.seed + t``; rows come back sorted by trial index
    whatever the worker count.
    """
    start = time.perf_counter()
    if h is None:
        h = build_dataset(cfg)
    if p is None:
        p = build_p(cfg, h)
    elif len(p) != h.m:
        raise ConfigError(f"P has {len(p)} entries for {h.m} columns")
    if cfg.algorithm == "randomized" and q is None:
        q = build_q(cfg, h)
    strategies = cfg.strategies() if cfg.algorithm == "arbitrary" else [None]
    jobs = [(i * cfg.trials + j, s) for i, s in enumerate(strategies) for j in range(cfg.trials)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(lambda job: _run_trial(cfg, h, p, q, *job), jobs))
    else:
        rows = [_run_trial(cfg, h, p, q, *job) for job in jobs]
    rows.sort(key=lambda r: r.trial)
    b = bounds(h.n, cfg.epsilon if cfg.algorithm == "arbitrary" else None, cfg.delta)
    return RunResult(cfg, h.n, rows, b.as_dict(), wall_time=time.perf_counter() - start)


def trials_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRIAL_COLUMNS)
    for row in result.trials:
        w.writerow(row.cells())
    return buf.getvalue()


def rows_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_real(r[c]) if isinstance(r[c], float) else str(r[c]) for c in columns])
    return buf.getvalue()


# -- sweeps --------------------------------------------------------------------------

FIG1_COLUMNS = (
    "algorithm",
    "h_size",
    "trials",
    "mean_rounds",
    "std",
    "bound_majority",
    "bound_majority_log2",
    "bound_arbitrary",
)
FIG2_COLUMNS = ("h_size", "epsilon", "delta", "trials", "mean_rounds_arbitrary", "std", "pac_bound", "arbitrary_bound")


def sweep_figure1(cfg: ExperimentConfig, hsizes: Optional[Sequence[int]] = None) -> list[dict]:
    """Mean counter-examples per (algorithm, |H|) against the theoretical curves.

    One dataset is generated per |H| and shared by every algorithm.
    """
    grid = list(hsizes) if hsizes is not None else cfg.hsize_grid()
    if not grid:
        raise ConfigError("figure-1 sweep needs a non-empty |H| grid")
    algos = _split(cfg.algorithms)
    if not algos:
        raise ConfigError("figure-1 sweep needs at least one algorithm")
    out = []
    for n in grid:
        base = cfg.replace(rows=n)
        h = build_dataset(base)
        p = build_p(base, h)
        b = bounds(h.n, cfg.epsilon, cfg.delta)
        for algo in algos:
            res = run_experiment(base.replace(algorithm=algo), h, p)
            out.append(
                {
                    "algorithm": algo,
                    "h_size": h.n,
                    "trials": len(res.trials),
                    "mean_rounds": res.mean,
                    "std": res.std,
                    "bound_majority": b.majority,
                    "bound_majority_log2": b.majority_log2,
                    "bound_arbitrary": b.arbitrary,
                }
            )
    out.sort(key=lambda r: (algos.index(r["algorithm"]), r["h_size"]))
    return out


def sweep_figure2(cfg: ExperimentConfig, epsilons: Optional[Sequence[float]] = None, hsizes: Optional[Sequence[int]] = None) -> list[dict]:
    """Arbitrary-learner rounds per (|H|, eps) next to the non-interactive PAC sample bound."""
    eps_grid = list(epsilons) if epsilons is not None else cfg.epsilon_grid()
    grid = list(hsizes) if hsizes is not None else (cfg.hsize_grid() or [cfg.rows])
    if not eps_grid:
        raise ConfigError("figure-2 sweep needs a non-empty epsilon grid")
    for e in eps_grid:
        if not 0 < e < 1:
            raise ConfigError(f"epsilon {e} outside (0, 1)")
    out = []
    for n in grid:
        base = cfg.replace(rows=n, algorithm="arbitrary")
        h = build_dataset(base)
        p = build_p(base, h)
        for e in eps_grid:
            res = run_experiment(base.replace(epsilon=e), h, p)
            b = bounds(h.n, e, cfg.delta)
            out.append(
                {
                    "h_size": h.n,
                    "epsilon": float(e),
                    "delta": float(cfg.delta),
                    "trials": len(res.trials),
                    "mean_rounds_arbitrary": res.mean,
                    "std": res.std,
                    "pac_bound": b.pac,
                    "arbitrary_bound": b.arbitrary,
                }
            )
    return out


def write_text(path: Optional[PathLike], text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        print(text, end="")
