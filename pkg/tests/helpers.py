"""Independent reference routines shared by the tests."""

import random

import numpy as np

from modsearch import Alphabet, ScoreTable, Side, VectorPolynomial


def counted_karatsuba(f, g):
    """Textbook recursive Karatsuba on integer lists; returns (product, additions).

    Additions count the Phase-3 work only: the two subtractions forming the
    middle term and the additions where shifted terms overlap.
    """
    k = len(f)
    if k == 1:
        return [f[0] * g[0]], 0
    h = k // 2
    b, a = f[:h], f[h:]
    d, c = g[:h], g[h:]
    t1, n1 = counted_karatsuba(a, c)
    t2, n2 = counted_karatsuba(b, d)
    t3, n3 = counted_karatsuba([x + y for x, y in zip(a, b)], [x + y for x, y in zip(c, d)])
    adds = n1 + n2 + n3
    mid = []
    for x, y, z in zip(t3, t1, t2):
        mid.append(x - y - z)
        adds += 2
    out = [None] * (2 * k - 1)
    for i, x in enumerate(t2):
        out[i] = x
    for i, x in enumerate(t1):
        out[2 * h + i] = x
    for i, x in enumerate(mid):
        j = h + i
        if out[j] is None:
            out[j] = x
        else:
            out[j] += x
            adds += 1
    return [0 if x is None else x for x in out], adds


def random_table(rng, sigma, omega, lo=-5, hi=5):
    return ScoreTable(np.array([[rng.randint(lo, hi) for _ in range(omega)] for _ in range(sigma)], dtype=np.int64))


def random_text_poly(rng, k, sigma, zero_prob=0.2):
    coeffs = np.zeros((k, sigma), dtype=np.int64)
    for i in range(k):
        if rng.random() >= zero_prob:
            coeffs[i, rng.randrange(sigma)] = 1
    return VectorPolynomial(coeffs, Side.TEXT)


def random_pattern_poly(rng, k, omega, zero_prob=0.2):
    coeffs = np.zeros((k, omega), dtype=np.int64)
    for i in range(k):
        if rng.random() >= zero_prob:
            coeffs[i, rng.randrange(omega)] = 1
    return VectorPolynomial(coeffs, Side.PATTERN)


def random_dense_poly(rng, k, dim, side, lo=-3, hi=3):
    return VectorPolynomial(
        np.array([[rng.randint(lo, hi) for _ in range(dim)] for _ in range(k)], dtype=np.int64), side
    )
