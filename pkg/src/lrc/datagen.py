"""Instance generators: clustered "users x movies" data, the tight-bound construction,
identity matrices and uniform random classes.  All outputs validate."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Optional

import numpy as np

from .core import ConceptError, HypothesisMatrix, PathLike, make_rng, validate, write_matrix

log = logging.getLogger(__name__)

_MAX_REPAIR_PASSES = 1000


@dataclass(frozen=True)
class ClusterConfig:
    num_columns: int = 5000
    num_hypotheses: int = 10000
    num_clusters: int = 100
    max_flips: int = 20
    alphabet: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_columns < 1 or self.num_hypotheses < 1 or self.num_clusters < 1:
            raise ConceptError("cluster config sizes must be >= 1")
        if self.num_clusters > self.num_hypotheses:
            raise ConceptError("more clusters than hypotheses")
        if not 1 <= self.max_flips <= self.num_columns:
            raise ConceptError("max_flips must lie in [1, num_columns]")
        if self.alphabet < 2:
            raise ConceptError("alphabet needs at least two values")


@dataclass
class ClusteredInstance:
    matrix: HypothesisMatrix
    cluster: np.ndarray  # cluster id per row
    config: ClusterConfig
    repairs: int = 0


def _duplicate_groups(grid: np.ndarray) -> list[int]:
    """Indices (rows of ``grid``) that repeat an earlier row."""
    seen: set[bytes] = set()
    dups = []
    for i in range(grid.shape[0]):
        key = grid[i].tobytes()
        if key in seen:
            dups.append(i)
        else:
            seen.add(key)
    return dups


def generate_clustered(cfg: ClusterConfig) -> ClusteredInstance:
    """Representatives are uniform random rows; the first ``num_clusters`` rows are
    the representatives themselves, and row ``i`` belongs to cluster ``i % num_clusters``.
    Every other row copies its representative with 1..max_flips columns changed.
    """
    rng = make_rng(cfg.seed)
    n, m, k, a = cfg.num_hypotheses, cfg.num_columns, cfg.num_clusters, cfg.alphabet
    dtype = np.uint8 if a <= 256 else np.uint32
    reps = rng.integers(0, a, size=(k, m), dtype=np.int64).astype(dtype)
    cluster = np.arange(n) % k
    offsets = np.zeros((n, m), dtype=dtype)

    def flip_row(i: int) -> None:
        offsets[i] = 0
        f = int(rng.integers(1, cfg.max_flips + 1))
        cols = rng.choice(m, size=f, replace=False)
        offsets[i, cols] = rng.integers(1, a, size=f)

    for i in range(k, n):
        flip_row(i)

    def assemble() -> np.ndarray:
        vals = reps[cluster].astype(np.int64) + offsets
        return (vals % a).astype(dtype)

    values = assemble()
    repairs = 0
    for _ in range(_MAX_REPAIR_PASSES):
        dup_rows = _duplicate_groups(values)
        if dup_rows:
            for i in dup_rows:
                if i < k:
                    reps[i] = rng.integers(0, a, size=m)
                else:
                    flip_row(i)
            repairs += len(dup_rows)
            values = assemble()
            continue
        dup_cols = _duplicate_groups(np.ascontiguousarray(values.T))
        if dup_cols:
            for c in dup_cols:
                reps[:, c] = rng.integers(0, a, size=k)
            repairs += len(dup_cols)
            values = assemble()
            continue
        break
    else:
        raise ConceptError("could not produce distinct rows and columns for this cluster config")
    if repairs:
        log.info("clustered generator repaired %d duplicate rows/columns", repairs)
    h = HypothesisMatrix(values)
    assert validate(h) is None
    return ClusteredInstance(h, cluster, cfg, repairs)


@dataclass(frozen=True)
class TightBoundInstance:
    matrix: HypothesisMatrix
    h_hat: int  # the modified row, expected best majority hypothesis
    h_star: int  # differs from h_hat in the first and last columns


def generate_tight_bound(n: int) -> TightBoundInstance:
    """All C(2n, n) balanced rows over 2n columns plus a zero last column, with the
    row 0^n 1^n altered to 0^(n+1) 1^(n-1) 1 so every row still has n ones."""
    if not 2 <= n <= 7:
        raise ConceptError("tight-bound construction supports 2 <= n <= 7")
    width = 2 * n + 1
    rows = []
    for ones in combinations(range(2 * n), n):
        r = [0] * width
        for c in ones:
            r[c] = 1
        rows.append(r)
    special = [0] * n + [1] * n + [0]
    r_idx = rows.index(special)
    # 1-based "column n+1" is 0-based column n; the last column is 2n
    rows[r_idx][n] = 0
    rows[r_idx][2 * n] = 1
    h_hat = rows[r_idx]
    star = list(h_hat)
    star[0] = 1
    star[2 * n] = 0
    s_idx = rows.index(star)
    h = HypothesisMatrix(np.array(rows, dtype=np.uint8))
    assert h.n == comb(2 * n, n) and validate(h) is None
    return TightBoundInstance(h, r_idx, s_idx)


def generate_identity(n: int) -> HypothesisMatrix:
    if n < 2:
        raise ConceptError("identity instance needs n >= 2")
    return HypothesisMatrix(np.eye(n, dtype=np.uint8))


def generate_random(n_rows: int, n_cols: int, alphabet: int = 2, seed: int = 0) -> HypothesisMatrix:
    """Uniform random class; duplicate rows and columns are redrawn."""
    if n_rows < 1 or n_cols < 1 or alphabet < 2:
        raise ConceptError("need n_rows, n_cols >= 1 and alphabet >= 2")
    if n_cols * np.log(alphabet) < np.log(n_rows) - 1e-12 or n_rows * np.log(alphabet) < np.log(n_cols) - 1e-12:
        raise ConceptError(f"cannot fit {n_rows} distinct rows and {n_cols} distinct columns over alphabet {alphabet}")
    rng = make_rng(seed)
    dtype = np.uint8 if alphabet <= 256 else np.uint32
    vals = rng.integers(0, alphabet, size=(n_rows, n_cols)).astype(dtype)
    for _ in range(_MAX_REPAIR_PASSES * 10):
        dup = _duplicate_groups(vals)
        if dup:
            vals[dup] = rng.integers(0, alphabet, size=(len(dup), n_cols))
            continue
        dup = _duplicate_groups(np.ascontiguousarray(vals.T))
        if dup:
            vals[:, dup] = rng.integers(0, alphabet, size=(n_rows, len(dup)))
            continue
        break
    else:
        raise ConceptError("random generator failed to find distinct rows and columns")
    h = HypothesisMatrix(vals)
    assert validate(h) is None
    return h


def write_dataset(path: PathLike, h: HypothesisMatrix, meta: Optional[dict] = None) -> Path:
    """Write the CSV grid and a ``.meta`` sidecar of ``key = value`` lines."""
    path = Path(path)
    write_matrix(path, h)
    info = {"rows": h.n, "columns": h.m}
    info.update(meta or {})
    side = path.with_suffix(path.suffix + ".meta")
    side.write_text("".join(f"{k} = {json.dumps(v)}\n" for k, v in info.items()))
    return side


def clustered_meta(inst: ClusteredInstance) -> dict:
    meta = {"generator": "clustered", **asdict(inst.config), "repairs": inst.repairs}
    meta["cluster"] = inst.cluster.tolist()
    return meta
