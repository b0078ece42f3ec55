import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import (
    counted_karatsuba,
    random_dense_poly,
    random_pattern_poly,
    random_table,
    random_text_poly,
)
from modsearch import (
    CapacityError,
    EngineStats,
    NotPowerOfTwo,
    Pattern,
    ScoreModel,
    ScoreTable,
    Side,
    Text,
    VectorPolynomial,
    build_alphabet,
    build_score_table,
    convolve_scores,
    kam_multiply,
    leaf_product,
    naive_search,
    pad_to_power_of_two,
    schoolbook_multiply,
    score_alignments,
    search,
)
from modsearch.engine import overlap_add

T3 = ScoreTable(np.array([[1, 2], [3, 4], [5, -6]], dtype=np.int64))


def test_leaf_product_unit_vectors_select_entry():
    for r in range(3):
        for s in range(2):
            u = [int(i == r) for i in range(3)]
            w = [int(i == s) for i in range(2)]
            assert leaf_product(u, w, T3) == T3.scores[r, s]


def test_leaf_product_bilinear_and_zero():
    assert leaf_product([1, 1, 0], [1, 0], T3) == 1 + 3
    assert leaf_product([0, 0, 0], [1, 1], T3) == 0


def test_leaf_product_dimension_check():
    with pytest.raises(ValueError):
        leaf_product([1, 0], [1, 0], T3)


vec3 = st.lists(st.integers(-20, 20), min_size=3, max_size=3)
vec2 = st.lists(st.integers(-20, 20), min_size=2, max_size=2)


@given(vec3, vec3, vec2, vec2)
def test_leaf_product_additive(u, u2, w, w2):
    uu = [a + b for a, b in zip(u, u2)]
    ww = [a + b for a, b in zip(w, w2)]
    assert leaf_product(uu, w, T3) == leaf_product(u, w, T3) + leaf_product(u2, w, T3)
    assert leaf_product(u, ww, T3) == leaf_product(u, w, T3) + leaf_product(u, w2, T3)


def test_kam_base_case():
    a = VectorPolynomial([[0, 1, 0]], Side.TEXT)
    b = VectorPolynomial([[0, 1]], Side.PATTERN)
    stats = EngineStats()
    out = kam_multiply(a, b, T3, stats)
    assert out.tolist() == [4]
    assert stats.leaf_products == 1


@pytest.mark.parametrize("k", [1, 2, 4, 8, 16])
@pytest.mark.parametrize("leaf_size", [1, 2, 4])
def test_kam_matches_schoolbook(k, leaf_size):
    rng = random.Random(k * 31 + leaf_size)
    for _ in range(20):
        sigma, omega = rng.randint(1, 6), rng.randint(1, 5)
        t = random_table(rng, sigma, omega)
        a = random_text_poly(rng, k, sigma)
        b = random_pattern_poly(rng, k, omega)
        assert kam_multiply(a, b, t, leaf_size=leaf_size).tolist() == schoolbook_multiply(a, b, t)


def test_kam_matches_schoolbook_dense_integer_vectors():
    rng = random.Random(3)
    for k in (2, 4, 8):
        t = random_table(rng, 4, 3)
        a = random_dense_poly(rng, k, 4, Side.TEXT)
        b = random_dense_poly(rng, k, 3, Side.PATTERN)
        assert kam_multiply(a, b, t).tolist() == schoolbook_multiply(a, b, t)


def test_kam_leaf_count_k8():
    rng = random.Random(8)
    stats = EngineStats()
    t = random_table(rng, 3, 2)
    kam_multiply(random_text_poly(rng, 8, 3), random_pattern_poly(rng, 8, 2), t, stats)
    assert stats.leaf_products == 27


@pytest.mark.parametrize("k", [1, 2, 4, 8, 16, 32, 64])
def test_kam_operation_counts(k):
    rng = random.Random(k)
    stats = EngineStats()
    t = random_table(rng, 2, 2)
    kam_multiply(random_text_poly(rng, k, 2), random_pattern_poly(rng, k, 2), t, stats)
    h = k.bit_length() - 1
    assert stats.leaf_products == 3**h
    _, adds = counted_karatsuba([1] * k, [1] * k)
    assert stats.scalar_additions == adds
    assert stats.scalar_additions <= 6 * 3**h - 8 * k + 2
    # two operands, each split at every internal node
    assert stats.vector_additions == 2 * (3**h - k)


def test_counted_karatsuba_is_a_real_product():
    rng = random.Random(0)
    for k in (1, 2, 4, 8, 16):
        f = [rng.randint(-9, 9) for _ in range(k)]
        g = [rng.randint(-9, 9) for _ in range(k)]
        prod, _ = counted_karatsuba(f, g)
        assert prod == np.convolve(f, g).tolist()


def test_kam_rejects_bad_lengths():
    t = random_table(random.Random(0), 2, 2)
    a3 = random_text_poly(random.Random(1), 3, 2)
    b3 = random_pattern_poly(random.Random(1), 3, 2)
    with pytest.raises(NotPowerOfTwo):
        kam_multiply(a3, b3, t)
    a4 = random_text_poly(random.Random(1), 4, 2)
    with pytest.raises(ValueError):
        kam_multiply(a4, b3, t)


def test_kam_capacity_rejection():
    t = ScoreTable(np.array([[2**60]], dtype=np.int64))
    a = VectorPolynomial([[1], [1]], Side.TEXT)
    b = VectorPolynomial([[1], [1]], Side.PATTERN)
    with pytest.raises(CapacityError):
        kam_multiply(a, b, t)


@pytest.mark.parametrize("length, expected", [(5, 8), (8, 8), (1, 1), (3, 4)])
def test_pad_to_power_of_two(length, expected):
    p = VectorPolynomial(np.ones((length, 2), dtype=np.int64), Side.TEXT)
    padded = pad_to_power_of_two(p)
    assert len(padded) == expected
    assert (padded.coeffs[length:] == 0).all()
    assert (padded.coeffs[:length] == 1).all()


def test_padding_does_not_change_products():
    rng = random.Random(11)
    t = random_table(rng, 3, 3)
    for m in (3, 5, 6, 7):
        a = random_text_poly(rng, m, 3, zero_prob=0)
        b = random_pattern_poly(rng, m, 3, zero_prob=0)
        ref = schoolbook_multiply(a, b, t)
        for k in (8, 16):
            pa = VectorPolynomial(np.vstack([a.coeffs, np.zeros((k - m, 3), np.int64)]), Side.TEXT)
            pb = VectorPolynomial(np.vstack([b.coeffs, np.zeros((k - m, 3), np.int64)]), Side.PATTERN)
            out = kam_multiply(pa, pb, t).tolist()
            assert out[: 2 * m - 1] == ref
            assert not any(out[2 * m - 1 :])


def exact_instance():
    return Text((0, 2, 1, 2)), Pattern.from_raw([[0, 1], [2]])


def test_convolve_example():
    text, pattern = exact_instance()
    a = build_alphabet(text.chars, pattern.positions)
    t = build_score_table(ScoreModel.exact(), a, pattern)
    assert convolve_scores(text, pattern, t, alphabet=a).tolist() == [2, 0, 2]


def test_convolve_single_window():
    text = Text((3, 1, 4, 1, 5))
    pattern = Pattern.from_raw([[3], [1, 2], [4], [0], [5, 1]])
    scores = score_alignments(text, pattern, ScoreModel.exact())
    assert scores.tolist() == [4]


def test_pattern_longer_than_text():
    pattern = Pattern.from_raw([[1], [2], [3]])
    assert score_alignments(Text((1, 2)), pattern, ScoreModel.exact()).tolist() == []
    assert search(Text(()), pattern, ScoreModel.exact()) == []


def test_search_exact_positions():
    text, pattern = exact_instance()
    reports = search(text, pattern, ScoreModel.exact())
    assert [(r.position, r.score) for r in reports] == [(1, 2), (3, 2)]
    everything = search(text, pattern, ScoreModel.exact(), all_scores=True)
    assert [r.verdict for r in everything] == [True, False, True]


def test_search_bounded_violation_everywhere():
    # every window meets a 9 that is 9 away from the nearest member of {0}
    text = Text((0, 9, 0, 9, 0, 9, 0))
    pattern = Pattern.from_raw([[0], [0]])
    model = ScoreModel.bounded_l1(tau=2, b=1000)
    assert search(text, pattern, model) == []
    v, _ = naive_search(text, pattern, model)
    assert all(s >= model.b + 1 for s in v)


def test_search_truncated_generous_threshold():
    rng = random.Random(4)
    text = Text(tuple(rng.randrange(20) for _ in range(60)))
    pattern = Pattern.from_raw([rng.sample(range(20), 2) for _ in range(7)])
    tau = 3
    model = ScoreModel.truncated_l1(tau, b=7 * tau)
    assert len(search(text, pattern, model)) == 60 - 7 + 1


def test_search_naive_engine_agrees():
    text, pattern = exact_instance()
    kam = search(text, pattern, ScoreModel.exact(), all_scores=True)
    naive = search(text, pattern, ScoreModel.exact(), all_scores=True, engine="naive")
    assert kam == naive
    with pytest.raises(ValueError):
        search(text, pattern, ScoreModel.exact(), engine="fft")


@st.composite
def instances(draw):
    sigma = draw(st.integers(1, 8))
    m = draw(st.integers(1, 12))
    n = draw(st.integers(m, 60))
    text = Text(tuple(draw(st.lists(st.integers(0, sigma - 1), min_size=n, max_size=n))))
    items = draw(
        st.lists(
            st.tuples(
                st.lists(st.integers(0, sigma - 1), min_size=1, max_size=3),
                st.one_of(st.none(), st.integers(0, 3)),
            ),
            min_size=m,
            max_size=m,
        )
    )
    kind = draw(st.sampled_from(["exact", "trunc", "bounded", "table"]))
    b = draw(st.integers(0, 20))
    tau = draw(st.integers(0, 4))
    if kind == "exact":
        model = ScoreModel.exact()
    elif kind == "trunc":
        model = ScoreModel.truncated_l1(tau, b)
    elif kind == "bounded":
        model = ScoreModel.bounded_l1(tau, b)
    else:
        keys = draw(st.dictionaries(st.tuples(st.integers(0, sigma - 1), st.integers(0, m - 1)), st.integers(-6, 6)))
        model = ScoreModel.from_table(keys, b)
    return text, Pattern.from_raw(items), model


@settings(max_examples=150, deadline=None)
@given(instances(), st.sampled_from([1, 2, 4, 8]))
def test_convolve_equals_naive(instance, leaf_size):
    text, pattern, model = instance
    expected, reports = naive_search(text, pattern, model)
    assert score_alignments(text, pattern, model, leaf_size=leaf_size).tolist() == expected
    assert search(text, pattern, model, all_scores=True, leaf_size=leaf_size) == reports


def test_segment_order_does_not_matter():
    rng = random.Random(9)
    products = np.array([[rng.randint(-50, 50) for _ in range(9)] for _ in range(12)], dtype=np.int64)
    ref = overlap_add(products, 5)
    for _ in range(5):
        order = list(range(12))
        rng.shuffle(order)
        assert overlap_add(products, 5, order).tolist() == ref.tolist()


def test_threads_do_not_change_scores(monkeypatch):
    import modsearch.engine as engine

    monkeypatch.setattr(engine, "BATCH_ELEMENTS", 256)
    rng = random.Random(12)
    text = Text(tuple(rng.randrange(6) for _ in range(3000)))
    pattern = Pattern.from_raw([rng.sample(range(6), 2) for _ in range(13)])
    s1, s4 = EngineStats(), EngineStats()
    one = score_alignments(text, pattern, ScoreModel.exact(), stats=s1, threads=1)
    four = score_alignments(text, pattern, ScoreModel.exact(), stats=s4, threads=4)
    assert one.tolist() == four.tolist()
    assert s1 == s4


def test_convolve_capacity_rejection():
    text = Text((0, 0, 0))
    pattern = Pattern.from_raw([[0], [0]])
    model = ScoreModel.from_table({(0, 0): 2**60}, b=0)
    with pytest.raises(CapacityError):
        score_alignments(text, pattern, model)


def test_stats_segments_and_json():
    import json

    text = Text(tuple(range(10)) * 3)
    pattern = Pattern.from_raw([[1], [2], [3], [4]])
    stats = EngineStats()
    score_alignments(text, pattern, ScoreModel.exact(), stats=stats, leaf_size=1)
    assert stats.segments == 8  # ceil(30 / 4)
    assert stats.leaf_products == 8 * 9
    doc = json.loads(stats.to_json())
    assert set(doc) == {"leaf_products", "vector_additions", "scalar_additions", "segments"}
