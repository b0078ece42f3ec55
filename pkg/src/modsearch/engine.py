"""Karatsuba convolution with vector coefficients and a score table at the
leaves.

The recursion is evaluated breadth-first over numpy arrays. At depth ``h``
the operand of length ``k`` has become ``3**h`` sub-polynomials of length
``k / 2**h``; child ``3n`` holds the high halves, ``3n+1`` the low halves and
``3n+2`` their sum. All text segments are expanded together as one batch
against a single expansion of the pattern.
"""

from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    Alphabet,
    CapacityError,
    MatchReport,
    NotPowerOfTwo,
    Pattern,
    Text,
    build_alphabet,
)
from .scoring import ScoreModel, ScoreTable, build_score_table

CAPACITY_LIMIT = 2**62
DEFAULT_LEAF_SIZE = 4
# Upper bound on int64 elements held by one expanded batch.
BATCH_ELEMENTS = 1 << 22


class Side(enum.Enum):
    TEXT = "text"
    PATTERN = "pattern"


@dataclass(frozen=True)
class VectorPolynomial:
    coeffs: np.ndarray  # shape (length, dim)
    side: Side

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("coefficients must be a (length, dim) array")
        object.__setattr__(self, "coeffs", arr)

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]


@dataclass
class EngineStats:
    leaf_products: int = 0
    vector_additions: int = 0
    scalar_additions: int = 0
    segments: int = 0

    def merge(self, other: "EngineStats") -> "EngineStats":
        self.leaf_products += other.leaf_products
        self.vector_additions += other.vector_additions
        self.scalar_additions += other.scalar_additions
        self.segments += other.segments
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def is_power_of_two(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


def next_power_of_two(k: int) -> int:
    return 1 << max(0, (k - 1).bit_length())


def leaf_product(u: Sequence[int], w: Sequence[int], t: ScoreTable) -> int:
    """Bilinear image of a text-side and a pattern-side vector under ``t``."""
    scores = t.scores
    if len(u) != scores.shape[0] or len(w) != scores.shape[1]:
        raise ValueError("vector dimensions do not match the score table")
    w_nz = [(s, int(ws)) for s, ws in enumerate(w) if ws]
    total = 0
    for r, ur in enumerate(u):
        if not ur:
            continue
        row = scores[r]
        total += int(ur) * sum(ws * int(row[s]) for s, ws in w_nz)
    if abs(total) > 2**63 - 1:
        raise CapacityError("leaf product exceeds 63 bits")
    return total


def pad_to_power_of_two(p: VectorPolynomial) -> VectorPolynomial:
    if len(p) < 1:
        raise ValueError("polynomial must have at least one coefficient")
    k = next_power_of_two(len(p))
    if k == len(p):
        return p
    pad = np.zeros((k - len(p), p.dim), dtype=np.int64)
    return VectorPolynomial(np.vstack([p.coeffs, pad]), p.side)


def _expand(x: np.ndarray) -> np.ndarray:
    """One Phase-1 level: (..., N, L, d) -> (..., 3N, L/2, d)."""
    half = x.shape[-2] // 2
    low = x[..., :half, :]
    high = x[..., half:, :]
    children = np.stack([high, low, low + high], axis=-3)
    shape = x.shape[:-3] + (3 * x.shape[-3], half, x.shape[-1])
    return children.reshape(shape)


def _combine(t: np.ndarray, half: int) -> tuple[np.ndarray, int]:
    """One Phase-3 level: children products (B, 3N, 2h-1) -> (B, N, 4h-1).

    Returns the parent products and the number of integer additions and
    subtractions performed per parent node.
    """
    B, n3, width = t.shape
    t = t.reshape(B, n3 // 3, 3, width)
    t1, t2, t3 = t[:, :, 0, :], t[:, :, 1, :], t[:, :, 2, :]
    mid = t3 - t1 - t2
    out = np.zeros((B, n3 // 3, 4 * half - 1), dtype=np.int64)
    out[..., : 2 * half - 1] = t2
    out[..., 2 * half :] = t1
    # mid spans [half, 3*half-2]; only position 2*half-1 lands on an empty slot
    out[..., half : 2 * half - 1] += mid[..., : half - 1]
    out[..., 2 * half - 1] = mid[..., half - 1]
    out[..., 2 * half : 3 * half - 1] += mid[..., half:]
    ops = 2 * width + 2 * (half - 1)
    return out, ops


def _leaves(u: np.ndarray, proj: np.ndarray) -> tuple[np.ndarray, int]:
    """Schoolbook products at the leaves.

    ``u`` is (B, N, c, |sigma|); ``proj`` is (N, c, |sigma|), the pattern
    leaves already pushed through the score table. Returns (B, N, 2c-1) and
    the additions per leaf node spent on the anti-diagonal sums.
    """
    c = u.shape[-2]
    if c == 1:
        return np.einsum("bnr,nr->bn", u[:, :, 0, :], proj[:, 0, :])[..., None], 0
    cross = np.einsum("bnir,njr->bnij", u, proj)
    out = np.zeros(u.shape[:2] + (2 * c - 1,), dtype=np.int64)
    for i in range(c):
        out[..., i : i + c] += cross[..., i, :]
    return out, c * c - (2 * c - 1)


class _PatternExpansion:
    """Phase-1 expansion of the pattern operand, computed once and shared."""

    def __init__(self, w: np.ndarray, scores: np.ndarray, leaf_size: int):
        k = w.shape[0]
        self.k = k
        self.depth = 0
        self.vector_additions = 0
        x = w[None, :, :]
        length = k
        while length > leaf_size:
            self.vector_additions += x.shape[0] * (length // 2)
            x = _expand(x)
            length //= 2
            self.depth += 1
        self.leaf_len = length
        self.nodes = x.shape[0]
        # proj[n, i, r] = sum_s x[n, i, s] * scores[r, s]
        self.proj = x @ scores.T


def _kam_batch(u: np.ndarray, pat: _PatternExpansion) -> tuple[np.ndarray, EngineStats]:
    """Multiply each text polynomial in ``u`` (B, k, |sigma|) by the pattern."""
    stats = EngineStats()
    B = u.shape[0]
    x = u[:, None, :, :]
    length = pat.k
    for _ in range(pat.depth):
        stats.vector_additions += B * x.shape[1] * (length // 2)
        x = _expand(x)
        length //= 2
    out, leaf_adds = _leaves(x, pat.proj)
    c = pat.leaf_len
    stats.leaf_products += B * pat.nodes * c * c
    stats.scalar_additions += B * pat.nodes * leaf_adds
    half = c
    while out.shape[1] > 1:
        nodes_after = out.shape[1] // 3
        out, ops = _combine(out, half)
        stats.scalar_additions += B * nodes_after * ops
        half *= 2
    return out[:, 0, :], stats


def _check_capacity(norm_a: int, norm_b: int, t: ScoreTable) -> None:
    if norm_a * norm_b * t.max_abs >= CAPACITY_LIMIT:
        raise CapacityError(
            f"operand norms {norm_a} x {norm_b} with max score {t.max_abs} "
            "exceed the 63-bit accumulator budget"
        )


def kam_multiply(
    a: VectorPolynomial,
    b: VectorPolynomial,
    t: ScoreTable,
    stats: Optional[EngineStats] = None,
    leaf_size: int = 1,
) -> np.ndarray:
    """Product of a text-side and a pattern-side polynomial, mapped to integers.

    Coefficient ``d`` of the result is the sum of ``leaf_product(a[i], b[j])``
    over ``i + j == d``. Both operands must have the same power-of-two
    length; recursion stops at ``leaf_size`` coefficients.
    """
    k = len(a)
    if len(b) != k:
        raise ValueError("operands must have equal length")
    if not is_power_of_two(k):
        raise NotPowerOfTwo(f"length {k} is not a power of two")
    if not is_power_of_two(leaf_size):
        raise NotPowerOfTwo(f"leaf size {leaf_size} is not a power of two")
    if a.dim != t.sigma_dim or b.dim != t.omega_dim:
        raise ValueError("vector dimensions do not match the score table")
    _check_capacity(int(np.abs(a.coeffs).sum()), int(np.abs(b.coeffs).sum()), t)
    pat = _PatternExpansion(b.coeffs, t.scores, leaf_size)
    out, run = _kam_batch(a.coeffs[None, :, :], pat)
    run.vector_additions += pat.vector_additions
    run.segments = 1
    if stats is not None:
        stats.merge(run)
    return out[0]


def overlap_add(products: np.ndarray, m: int, order: Optional[Iterable[int]] = None) -> np.ndarray:
    """Place segment product ``i`` at offset ``i*m`` and sum the overlaps."""
    q, width = products.shape
    full = np.zeros(q * m + width, dtype=np.int64)
    for i in range(q) if order is None else order:
        full[i * m : i * m + width] += products[i]
    return full


def convolve_scores(
    text: Text,
    pattern: Pattern,
    t: ScoreTable,
    stats: Optional[EngineStats] = None,
    *,
    alphabet: Optional[Alphabet] = None,
    leaf_size: int = DEFAULT_LEAF_SIZE,
    threads: int = 1,
) -> np.ndarray:
    """Score of every alignment, ``v[j]`` for 0-based starts ``0..n-m``.

    The text is cut into ``ceil(n/m)`` segments of length ``m``; each is
    multiplied against the reversed pattern and the products are summed at
    their place values. ``t`` must be built over ``alphabet`` (by default
    the union of text and class symbols).
    """
    n, m = text.n, pattern.m
    if m > n:
        return np.zeros(0, dtype=np.int64)
    if alphabet is None:
        alphabet = build_alphabet(text.chars, pattern.positions)
    if t.sigma_dim != len(alphabet) or t.omega_dim != len(pattern.omega):
        raise ValueError("score table does not match alphabet and pattern")
    if not is_power_of_two(leaf_size):
        raise NotPowerOfTwo(f"leaf size {leaf_size} is not a power of two")
    _check_capacity(m, m, t)

    sigma = len(alphabet)
    k = next_power_of_two(m)
    q = -(-n // m)

    # Text ranks chunked to (q, k); rank ``sigma`` marks a zero vector.
    chunks = np.full((q, k), sigma, dtype=np.int64)
    ranks = np.full(q * m, sigma, dtype=np.int64)
    ranks[:n] = alphabet.ranks(text.chars)
    chunks[:, :m] = ranks.reshape(q, m)

    w = np.zeros((k, len(pattern.omega)), dtype=np.int64)
    w[np.arange(m), np.asarray(pattern.omega_of[::-1])] = 1
    pat = _PatternExpansion(w, t.scores, leaf_size)
    onehot = np.eye(sigma + 1, sigma, dtype=np.int64)

    per_segment = pat.nodes * pat.leaf_len * max(sigma, 1) * 4
    batch = max(1, BATCH_ELEMENTS // per_segment)
    starts = list(range(0, q, batch))

    def run(start: int) -> tuple[np.ndarray, EngineStats]:
        u = onehot[chunks[start : start + batch]]
        return _kam_batch(u, pat)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]

    products = np.concatenate([r[0] for r in results])[:, : 2 * m - 1]
    if stats is not None:
        for _, s in results:
            stats.merge(s)
        stats.vector_additions += pat.vector_additions
        stats.segments += q

    full = overlap_add(products, m)
    return full[m - 1 : n].copy()


def search(
    text: Text,
    pattern: Pattern,
    model: ScoreModel,
    *,
    all_scores: bool = False,
    engine: str = "kam",
    stats: Optional[EngineStats] = None,
    leaf_size: int = DEFAULT_LEAF_SIZE,
    threads: int = 1,
) -> list[MatchReport]:
    """Find the alignments where ``pattern`` fits ``text`` under ``model``.

    Returns verdict-true reports only, or every alignment when
    ``all_scores`` is set. ``engine="naive"`` runs the direct oracle.
    """
    if engine == "naive":
        from .oracle import naive_search

        _, reports = naive_search(text, pattern, model)
    elif engine == "kam":
        scores = score_alignments(
            text, pattern, model, stats=stats, leaf_size=leaf_size, threads=threads
        )
        reports = [
            MatchReport(j + 1, v, model.verdict(v, pattern.m))
            for j, v in enumerate(scores.tolist())
        ]
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if all_scores:
        return reports
    return [r for r in reports if r.verdict]


def score_alignments(
    text: Text,
    pattern: Pattern,
    model: ScoreModel,
    *,
    stats: Optional[EngineStats] = None,
    leaf_size: int = DEFAULT_LEAF_SIZE,
    threads: int = 1,
) -> np.ndarray:
    """Resolve bounds, build the alphabet and score table, then convolve."""
    pattern = model.prepare(pattern)
    if pattern.m > text.n:
        return np.zeros(0, dtype=np.int64)
    alphabet = build_alphabet(text.chars, pattern.positions)
    table = build_score_table(model, alphabet, pattern)
    return convolve_scores(
        text, pattern, table, stats, alphabet=alphabet, leaf_size=leaf_size, threads=threads
    )
