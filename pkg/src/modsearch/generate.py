"""Seeded random instances for verification, benchmarks and file generation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .core import CharacterClass, Pattern, PatternPosition, Text
from .scoring import ModelKind, ScoreModel

VERIFY_PATTERN_LENGTHS = (1, 2, 3, 4, 7, 8, 16, 33, 64)
VERIFY_MAX_N = 512
VERIFY_MAX_SIGMA = 16
VERIFY_MAX_CLASS = 5
VERIFY_MAX_TAU = 4
VERIFY_MAX_B = 32
TABLE_SCORE_RANGE = (-8, 8)


@dataclass(frozen=True)
class Instance:
    text: Text
    pattern: Pattern
    model: ScoreModel
    seed: Optional[int] = None


def random_text(rng: random.Random, n: int, sigma: int) -> Text:
    return Text(tuple(rng.randrange(sigma) for _ in range(n)))


def random_pattern(
    rng: random.Random,
    m: int,
    sigma: int,
    max_class: int,
    bound_prob: float = 0.0,
    max_bound: int = VERIFY_MAX_TAU,
) -> Pattern:
    positions = []
    for _ in range(m):
        size = rng.randint(1, min(max_class, sigma))
        members = rng.sample(range(sigma), size)
        bound = rng.randint(0, max_bound) if rng.random() < bound_prob else None
        positions.append(PatternPosition(CharacterClass(tuple(members)), bound))
    return Pattern(tuple(positions))


def random_table(rng: random.Random, sigma: int, classes: int, density: float = 0.6) -> dict:
    lo, hi = TABLE_SCORE_RANGE
    return {
        (c, k): rng.randint(lo, hi)
        for c in range(sigma)
        for k in range(classes)
        if rng.random() < density
    }


def random_instance(seed: int, kind: ModelKind) -> Instance:
    """An instance within the verification envelope, fully determined by ``seed``."""
    rng = random.Random(seed)
    m = rng.choice(VERIFY_PATTERN_LENGTHS)
    n = rng.randint(max(0, m - 2), VERIFY_MAX_N)
    sigma = rng.randint(1, VERIFY_MAX_SIGMA)
    bound_prob = rng.choice((0.0, 0.3, 1.0)) if kind is not ModelKind.EXACT else 0.0
    pattern = random_pattern(rng, m, sigma, VERIFY_MAX_CLASS, bound_prob)
    text = random_text(rng, n, sigma)
    b = rng.randint(0, VERIFY_MAX_B)
    tau = rng.randint(0, VERIFY_MAX_TAU)
    if kind is ModelKind.EXACT:
        model = ScoreModel.exact()
    elif kind is ModelKind.TRUNCATED_L1:
        model = ScoreModel.truncated_l1(tau, b)
    elif kind is ModelKind.BOUNDED_L1:
        model = ScoreModel.bounded_l1(tau, b)
    else:
        classes = len(pattern.with_default_bound(None).omega)
        model = ScoreModel.from_table(random_table(rng, sigma, classes), b)
    return Instance(text, pattern, model, seed)
