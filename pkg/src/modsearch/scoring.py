"""Pairwise score models, score-table precomputation and the cumulative
L1 distance index.

A score model maps (text symbol, pattern position) to an integer. Every
model except ``TABLE`` yields non-negative scores; the aggregate over an
alignment is always the plain sum.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .core import (
    INT63_LIMIT,
    Alphabet,
    CapacityError,
    CharacterClass,
    EmptyClass,
    InputFormatError,
    Pattern,
    PatternPosition,
)

# Ball scans wider than this fall back to nearest-neighbour search.
MAX_BALL_SCAN = 129


class ModelKind(enum.Enum):
    EXACT = "exact"
    TRUNCATED_L1 = "trunc-l1"
    BOUNDED_L1 = "bounded-l1"
    TABLE = "table"


class VerdictMode(enum.Enum):
    EQUALS_M = "equals_m"
    AT_MOST_B = "at_most_b"


@dataclass(frozen=True)
class ScoreModel:
    kind: ModelKind
    tau: Optional[int] = None
    b: Optional[int] = None
    table: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.b is not None and self.b < 0:
            raise ValueError("b must be non-negative")
        if self.verdict_mode is VerdictMode.AT_MOST_B and self.b is None:
            raise ValueError(f"model {self.kind.value} needs a threshold b")

    @classmethod
    def exact(cls) -> "ScoreModel":
        return cls(ModelKind.EXACT)

    @classmethod
    def truncated_l1(cls, tau: Optional[int], b: int) -> "ScoreModel":
        return cls(ModelKind.TRUNCATED_L1, tau=tau, b=b)

    @classmethod
    def bounded_l1(cls, tau: Optional[int], b: int) -> "ScoreModel":
        return cls(ModelKind.BOUNDED_L1, tau=tau, b=b)

    @classmethod
    def from_table(cls, table: Mapping[tuple[int, int], int], b: int) -> "ScoreModel":
        return cls(ModelKind.TABLE, b=b, table=dict(table))

    @property
    def verdict_mode(self) -> VerdictMode:
        if self.kind is ModelKind.EXACT:
            return VerdictMode.EQUALS_M
        return VerdictMode.AT_MOST_B

    @property
    def uses_tau(self) -> bool:
        return self.kind in (ModelKind.TRUNCATED_L1, ModelKind.BOUNDED_L1)

    def prepare(self, pattern: Pattern) -> Pattern:
        """Resolve bounds against this model and check they are complete."""
        resolved = pattern.with_default_bound(self.tau)
        if self.uses_tau and self.tau is None and not pattern.all_bounded:
            raise ValueError(
                f"model {self.kind.value} needs tau unless every pattern position "
                "carries a private bound"
            )
        return resolved

    def verdict(self, score: int, m: int) -> bool:
        if self.verdict_mode is VerdictMode.EQUALS_M:
            return score == m
        return score <= self.b

    def score(self, c: int, pattern: Pattern, i: int) -> int:
        """Local score of text symbol ``c`` against 0-based position ``i``.

        ``pattern`` must already be resolved with :meth:`prepare`.
        """
        pos = pattern.positions[i]
        if self.kind is ModelKind.EXACT:
            return psi_exact(c, pos)
        if self.kind is ModelKind.TABLE:
            return psi_table(c, pattern.omega_of[i], self)
        tau = pattern.effective_bound(i)
        if self.kind is ModelKind.TRUNCATED_L1:
            return psi_truncated(c, pos, tau)
        return psi_bounded(c, pos, tau, self.b)


def psi_exact(c: int, pos: PatternPosition) -> int:
    return 1 if c in pos.cls else 0


def _resolve(pos: PatternPosition, tau: Optional[int]) -> int:
    t = pos.local_bound if pos.local_bound is not None else tau
    if t is None or t < 0:
        raise ValueError("no non-negative bound for this position")
    return t


def ball_distance(c: int, cls: CharacterClass, tau: int) -> Optional[int]:
    """Nearest member within the closed tau-ball around ``c``, else None.

    Probes ``c``, ``c-1``, ``c+1``, ``c-2``, ... so at most 2*tau+1 lookups.
    """
    if c in cls:
        return 0
    for d in range(1, tau + 1):
        if (c - d >= 0 and c - d in cls) or c + d in cls:
            return d
    return None


def psi_truncated(c: int, pos: PatternPosition, tau: Optional[int], method: str = "nearest") -> int:
    t = _resolve(pos, tau)
    if method == "ball":
        d = ball_distance(c, pos.cls, t)
        return t if d is None else d
    return min(pos.cls.nearest_distance(c), t)


def psi_bounded(
    c: int, pos: PatternPosition, tau: Optional[int], b: int, method: str = "nearest"
) -> int:
    """Nearest-member distance, or ``b + 1`` when it exceeds the bound."""
    t = _resolve(pos, tau)
    if method == "ball":
        d = ball_distance(c, pos.cls, t)
    else:
        d = pos.cls.nearest_distance(c)
        if d > t:
            d = None
    return b + 1 if d is None else d


def psi_table(c: int, omega_index: int, model: ScoreModel) -> int:
    return model.table.get((c, omega_index), 0)


@dataclass(frozen=True)
class ScoreTable:
    scores: np.ndarray  # shape (|sigma|, |omega|), int64

    @property
    def sigma_dim(self) -> int:
        return self.scores.shape[0]

    @property
    def omega_dim(self) -> int:
        return self.scores.shape[1]

    @property
    def max_abs(self) -> int:
        return int(np.abs(self.scores).max()) if self.scores.size else 0

    def __getitem__(self, key):
        return self.scores[key]


def _omega_score(model: ScoreModel, c: int, cls: CharacterClass, bound: Optional[int], s: int) -> int:
    kind = model.kind
    if kind is ModelKind.EXACT:
        return 1 if c in cls else 0
    if kind is ModelKind.TABLE:
        return model.table.get((c, s), 0)
    method = "ball" if 2 * bound + 1 <= MAX_BALL_SCAN else "nearest"
    pos = PatternPosition(cls, bound)
    if kind is ModelKind.TRUNCATED_L1:
        return psi_truncated(c, pos, bound, method)
    return psi_bounded(c, pos, bound, model.b, method)


def build_score_table(model: ScoreModel, alphabet: Alphabet, pattern: Pattern) -> ScoreTable:
    """Materialize the local score of every (symbol, omega symbol) pair.

    ``pattern`` must be resolved with ``model.prepare``. Rows follow alphabet
    rank, columns follow omega order.
    """
    scores = [
        [_omega_score(model, c, cls, bound, s) for s, (cls, bound) in enumerate(pattern.omega)]
        for c in alphabet.symbols
    ]
    top = max((abs(x) for row in scores for x in row), default=0)
    if top > INT63_LIMIT or pattern.m * top > INT63_LIMIT:
        raise CapacityError(f"score magnitude {top} exceeds the 63-bit budget for m={pattern.m}")
    arr = np.array(scores, dtype=np.int64).reshape(len(alphabet), len(pattern.omega))
    return ScoreTable(arr)


def parse_assignment_table(source: Union[str, Path, Iterable[str]]) -> dict[tuple[int, int], int]:
    """Read ``char,class_index,score`` records.

    ``source`` is a path or an iterable of lines. Lines starting with ``#``
    and blank lines are skipped. Duplicate keys are rejected.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(source)
    table: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise InputFormatError(f"expected char,class_index,score, got {raw!r}", lineno)
        try:
            c, k, score = (int(p) for p in parts)
        except ValueError:
            raise InputFormatError(f"non-integer field in {raw!r}", lineno) from None
        if c < 0 or k < 0:
            raise InputFormatError("char and class index must be non-negative", lineno)
        if (c, k) in table:
            raise InputFormatError(f"duplicate entry for ({c}, {k})", lineno)
        table[(c, k)] = score
    return table


@dataclass(frozen=True)
class ClassDistanceIndex:
    """Sorted distinct values with frequency suffix/prefix sums.

    For 0-based ranks: ``suffix_counts[j] = f[j] + ... + f[r-1]`` and
    ``suffix_sums[j] = sum_{i > j} (values[i] - values[j]) * f[i]``; the
    prefix arrays mirror them for the values below.
    """

    values: tuple[int, ...]
    freqs: tuple[int, ...]
    suffix_counts: tuple[int, ...]
    suffix_sums: tuple[int, ...]
    prefix_counts: tuple[int, ...]
    prefix_sums: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.suffix_counts[0]


def build_class_distance_index(values: Iterable[int]) -> ClassDistanceIndex:
    counts = Counter(int(v) for v in values)
    if not counts:
        raise EmptyClass("cannot index an empty multiset")
    ls = sorted(counts)
    fs = [counts[v] for v in ls]
    r = len(ls)

    F = [0] * r
    S = [0] * r
    F[r - 1] = fs[r - 1]
    for j in range(r - 1, 0, -1):
        F[j - 1] = F[j] + fs[j - 1]
        S[j - 1] = S[j] + (ls[j] - ls[j - 1]) * F[j]

    G = [0] * r
    R = [0] * r
    G[0] = fs[0]
    for j in range(1, r):
        G[j] = G[j - 1] + fs[j]
        R[j] = R[j - 1] + (ls[j] - ls[j - 1]) * G[j - 1]

    return ClassDistanceIndex(tuple(ls), tuple(fs), tuple(F), tuple(S), tuple(G), tuple(R))


def cumulative_distance(idx: ClassDistanceIndex, value: int) -> int:
    """Sum of ``|value - v| * f`` over the indexed multiset, in O(log r)."""
    j = bisect_right(idx.values, value)  # first rank strictly above value
    total = 0
    if j < len(idx.values):
        total += idx.suffix_sums[j] + (idx.values[j] - value) * idx.suffix_counts[j]
    if j > 0:
        i = j - 1
        total += idx.prefix_sums[i] + (value - idx.values[i]) * idx.prefix_counts[i]
    return total
