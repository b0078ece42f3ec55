"""Brute-force baselines used as ground truth.

Nothing here touches numpy kernels or the precomputed score table on the
search path: scores come straight from :meth:`ScoreModel.score`.
"""

from __future__ import annotations

from .core import MatchReport, Pattern, Text
from .engine import VectorPolynomial, leaf_product
from .scoring import ScoreModel, ScoreTable


def naive_search(text: Text, pattern: Pattern, model: ScoreModel) -> tuple[list[int], list[MatchReport]]:
    """Align the pattern at every start and sum the local scores directly.

    Returns the score list ``v`` (0-based starts) and a report for every
    alignment, verdict included.
    """
    pattern = model.prepare(pattern)
    n, m = text.n, pattern.m
    if m > n:
        return [], []
    chars = text.chars
    score = model.score
    v = []
    for j in range(n - m + 1):
        v.append(sum(score(chars[j + i], pattern, i) for i in range(m)))
    reports = [MatchReport(j + 1, s, model.verdict(s, m)) for j, s in enumerate(v)]
    return v, reports


def schoolbook_multiply(a: VectorPolynomial, b: VectorPolynomial, t: ScoreTable) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a.coeffs):
        if not u.any():
            continue
        for j, w in enumerate(b.coeffs):
            out[i + j] += leaf_product(u, w, t)
    return out
