"""Concept class, example distribution, target prior and the elimination primitive.

Rows of a :class:`HypothesisMatrix` are hypotheses, columns are examples.
Consistent sets are plain ascending ``numpy`` index arrays so the matrix
itself is never mutated and can be shared across trials.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

MAX_VALUE = 2**32 - 1
INPUT_SUM_TOL = 1e-9
INTERNAL_SUM_TOL = 1e-12

# rows per block when reducing |S| x m boolean masks against P
_CHUNK_ROWS = 2048


class ConceptError(ValueError):
    """Raised for malformed concept classes, distributions or indices."""


def _storage_dtype(max_value: int) -> np.dtype:
    for dt in (np.uint8, np.uint16, np.uint32):
        if max_value <= np.iinfo(dt).max:
            return np.dtype(dt)
    raise ConceptError(f"value {max_value} exceeds {MAX_VALUE}")


@dataclass(frozen=True)
class Violation:
    kind: str  # "duplicate_rows" | "duplicate_columns" | "negative_value" | "shape"
    indices: tuple
    message: str

    def __str__(self) -> str:
        return self.message


class HypothesisMatrix:
    """Immutable n x m grid of non-negative integers.

    Values are stored with the narrowest unsigned dtype able to hold the
    maximum entry (at most 32 bits).  Construction does not check for
    duplicate rows/columns; call :func:`validate` or :meth:`checked`.
    """

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        arr = np.asarray(values)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ConceptError(f"expected a non-empty 2-D grid, got shape {arr.shape}")
        if arr.dtype.kind not in "iub":
            raise ConceptError(f"values must be integers, got dtype {arr.dtype}")
        if arr.dtype.kind == "i" and arr.size and arr.min() < 0:
            raise ConceptError("values must be non-negative")
        top = int(arr.max()) if arr.size else 0
        arr = np.ascontiguousarray(arr, dtype=_storage_dtype(top))
        arr.setflags(write=False)
        self.values = arr

    @classmethod
    def checked(cls, values) -> "HypothesisMatrix":
        h = cls(values)
        v = validate(h)
        if v is not None:
            raise ConceptError(str(v))
        return h

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def row(self, i: int) -> np.ndarray:
        return self.values[check_row(self, i)]

    def all_rows(self) -> np.ndarray:
        return np.arange(self.n, dtype=np.intp)

    def __repr__(self) -> str:
        return f"HypothesisMatrix(n={self.n}, m={self.m}, dtype={self.values.dtype})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HypothesisMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.values, other.values))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class ExampleDistribution:
    """Strictly positive distribution over the columns."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ConceptError("example distribution is empty")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ConceptError("every column needs strictly positive probability")
        if abs(arr.sum() - 1.0) > INPUT_SUM_TOL:
            raise ConceptError(f"example distribution sums to {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @classmethod
    def uniform(cls, m: int) -> "ExampleDistribution":
        return cls(np.full(m, 1.0 / m))

    def __len__(self) -> int:
        return self.probs.shape[0]

    def mass(self, columns) -> float:
        return float(self.probs[np.asarray(columns, dtype=np.intp)].sum())


@dataclass(frozen=True)
class TargetPrior:
    """Distribution over rows used to draw the target (zero entries allowed)."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ConceptError("target prior is empty")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ConceptError("target prior entries must be finite and >= 0")
        if not np.any(arr > 0):
            raise ConceptError("target prior needs at least one positive entry")
        if abs(arr.sum() - 1.0) > INPUT_SUM_TOL:
            raise ConceptError(f"target prior sums to {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @classmethod
    def uniform(cls, n: int) -> "TargetPrior":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class CounterExample:
    column: int
    target_value: int


@dataclass(frozen=True)
class RoundRecord:
    """One query/response exchange."""

    query: int
    counter: Optional[CounterExample]
    size_before: int
    size_after: int

    @property
    def eliminated(self) -> int:
        return self.size_before - self.size_after


@dataclass
class Transcript:
    target: int
    rounds: list[RoundRecord] = field(default_factory=list)
    output: Optional[int] = None
    end_reason: str = ""
    # randomized runs only, when asked for: posterior before each query
    posteriors: Optional[list] = None

    @property
    def counter_examples(self) -> int:
        return sum(1 for r in self.rounds if r.counter is not None)

    def pairs(self) -> list[tuple[int, CounterExample]]:
        return [(r.query, r.counter) for r in self.rounds if r.counter is not None]


class RoundLimitExceeded(RuntimeError):
    pass


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic PCG64 stream for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def check_row(h: HypothesisMatrix, i) -> int:
    i = int(i)
    if not 0 <= i < h.n:
        raise IndexError(f"row {i} out of range for {h.n} hypotheses")
    return i


def _first_duplicate(grid: np.ndarray) -> Optional[tuple[int, int]]:
    seen: dict[bytes, int] = {}
    for i in range(grid.shape[0]):
        key = grid[i].tobytes()
        j = seen.setdefault(key, i)
        if j != i:
            return j, i
    return None


def validate(h: Union[HypothesisMatrix, np.ndarray]) -> Optional[Violation]:
    """Return the first violation found, or ``None`` if ``h`` is a valid concept class."""
    grid = h.values if isinstance(h, HypothesisMatrix) else np.asarray(h)
    if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
        return Violation("shape", tuple(grid.shape), f"grid shape {grid.shape} is not n x m with n, m >= 1")
    if grid.dtype.kind == "i" and grid.min() < 0:
        r, c = np.argwhere(grid < 0)[0]
        return Violation("negative_value", (int(r), int(c)), f"negative value at row {r}, column {c}")
    rows = np.ascontiguousarray(grid)
    dup = _first_duplicate(rows)
    if dup is not None:
        return Violation("duplicate_rows", dup, f"rows {dup[0]},{dup[1]} duplicated")
    dup = _first_duplicate(np.ascontiguousarray(grid.T))
    if dup is not None:
        return Violation("duplicate_columns", dup, f"columns {dup[0]},{dup[1]} duplicated")
    return None


def difference_set(h: HypothesisMatrix, h1: int, h2: int) -> np.ndarray:
    """Ascending column indices where rows ``h1`` and ``h2`` differ."""
    a, b = h.row(h1), h.row(h2)
    return np.flatnonzero(a != b)


def conditional_distribution(p: ExampleDistribution, diff) -> dict[int, float]:
    diff = np.asarray(diff, dtype=np.intp)
    if diff.size == 0:
        raise ConceptError("cannot condition on an empty difference set")
    w = p.probs[diff]
    w = w / w.sum()
    return {int(x): float(q) for x, q in zip(diff, w)}


def eliminate(s: np.ndarray, h: HypothesisMatrix, cx: CounterExample) -> np.ndarray:
    """Rows of ``s`` that agree with the revealed target value."""
    if not 0 <= cx.column < h.m:
        raise IndexError(f"column {cx.column} out of range for {h.m} examples")
    s = np.asarray(s, dtype=np.intp)
    return s[h.values[s, cx.column] == cx.target_value]


def sample_index(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw over positions of ``weights`` (need not be normalized)."""
    cdf = np.cumsum(weights)
    u = rng.random() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    # u < cdf[-1] always, but guard against trailing zero weights
    return min(k, len(cdf) - 1)


def sample_column(dist: dict[int, float], rng: np.random.Generator) -> int:
    if not dist:
        raise ConceptError("cannot sample from an empty distribution")
    cols = sorted(dist)
    w = np.fromiter((dist[c] for c in cols), dtype=np.float64, count=len(cols))
    if abs(w.sum() - 1.0) > INPUT_SUM_TOL:
        raise ConceptError(f"distribution sums to {w.sum()!r}, not 1")
    return cols[sample_index(w, rng)]


def _row_blocks(rows: np.ndarray) -> Iterator[np.ndarray]:
    for start in range(0, rows.shape[0], _CHUNK_ROWS):
        yield rows[start : start + _CHUNK_ROWS]


def disagreement_mass(h: HypothesisMatrix, rows, reference: np.ndarray, p: ExampleDistribution) -> np.ndarray:
    """P-mass of columns where each row in ``rows`` differs from ``reference``."""
    rows = np.asarray(rows, dtype=np.intp)
    out = np.empty(rows.shape[0], dtype=np.float64)
    pos = 0
    for block in _row_blocks(rows):
        mask = h.values[block] != reference
        out[pos : pos + block.shape[0]] = mask @ p.probs
        pos += block.shape[0]
    return out


def agreement_mass(h: HypothesisMatrix, rows, reference: np.ndarray, p: ExampleDistribution) -> np.ndarray:
    """P-mass of columns where each row in ``rows`` equals ``reference``."""
    rows = np.asarray(rows, dtype=np.intp)
    out = np.empty(rows.shape[0], dtype=np.float64)
    pos = 0
    for block in _row_blocks(rows):
        mask = h.values[block] == reference
        out[pos : pos + block.shape[0]] = mask @ p.probs
        pos += block.shape[0]
    return out


# -- plain-text I/O ---------------------------------------------------------


def write_matrix(path: PathLike, h: HypothesisMatrix) -> None:
    np.savetxt(path, h.values, fmt="%d", delimiter=",")


def read_matrix(path: PathLike) -> HypothesisMatrix:
    grid = np.loadtxt(path, dtype=np.int64, delimiter=",", ndmin=2)
    if grid.size and grid.max() > MAX_VALUE:
        raise ConceptError(f"{path}: values above {MAX_VALUE}")
    return HypothesisMatrix.checked(grid)


def format_real(x: float) -> str:
    """Shortest round-trip decimal for a float."""
    return repr(float(x))


def write_distribution(path: PathLike, probs: Iterable[float]) -> None:
    Path(path).write_text(",".join(format_real(x) for x in probs) + "\n")


def read_distribution(path: PathLike) -> np.ndarray:
    text = Path(path).read_text().strip()
    if not text:
        raise ConceptError(f"{path}: empty distribution file")
    parts: Sequence[str] = [t for t in text.replace("\n", ",").split(",") if t.strip()]
    try:
        return np.array([float(t) for t in parts], dtype=np.float64)
    except ValueError as exc:
        raise ConceptError(f"{path}: {exc}") from None
