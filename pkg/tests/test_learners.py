from __future__ import annotations

import numpy as np
import pytest

from cilkit.errors import (
    ConfigurationError,
    DegenerateInputError,
    ShapeError,
    SingularityError,
)
from cilkit.learners import (
    ClassStats,
    LdaState,
    fixed_prototype_classify,
    lda_finalize,
    lda_observe,
    lda_observe_many,
    lda_predict,
    lda_predict_batch,
    ncm_observe,
    ncm_predict,
    ncm_predict_batch,
    observe_many,
)
from cilkit.rng import normals


def batch_lda_oracle(X, y, alpha):
    """Independent batch fit: center within classes, pool, shrink, invert."""
    ids = sorted(set(int(c) for c in y))
    n, dim = X.shape
    k = len(ids)
    means = np.stack([X[y == c].mean(axis=0) for c in ids])
    scatter = np.zeros((dim, dim))
    for i, c in enumerate(ids):
        d = X[y == c] - means[i]
        scatter += d.T @ d
    sigma = scatter / (n - k)
    shrunk = (1 - alpha) * sigma + alpha * (np.trace(sigma) / dim) * np.eye(dim)
    weights = np.linalg.inv(shrunk) @ means.T
    counts = np.array([(y == c).sum() for c in ids], dtype=float)
    biases = -0.5 * np.einsum("lk,lk->k", means.T, weights) + np.log(counts / n)
    return ids, weights.T, biases


def test_ncm_mean_of_two():
    s = ClassStats(2)
    ncm_observe(s, (0, [1.0, 0.0]))
    ncm_observe(s, (0, [0.0, 1.0]))
    assert np.allclose(s.mean(0), [0.5, 0.5])


def test_ncm_single_sample_mean():
    s = ClassStats(2)
    ncm_observe(s, (1, [3.0, 4.0]))
    assert np.array_equal(s.mean(1), [3.0, 4.0])


def test_ncm_gaussian_mean_shrinks():
    x = normals(21, 2000).reshape(1000, 2)
    s = ClassStats(2)
    observe_many(s, np.zeros(1000, dtype=int), x)
    direct = x.mean(axis=0)
    assert np.array_equal(s.mean(0), s.sums[0] / 1000)
    assert np.allclose(s.mean(0), direct, atol=1e-12)
    assert np.abs(s.mean(0)).max() < 0.1


def test_ncm_predict_cosine_and_tie_break():
    s = ClassStats(2)
    ncm_observe(s, (0, [1.0, 0.0]))
    ncm_observe(s, (1, [0.0, 1.0]))
    cls, scores = ncm_predict(s, [0.9, 0.1])
    assert cls == 0
    assert scores[0] == pytest.approx(0.9 / np.hypot(0.9, 0.1), abs=1e-12)
    cls, scores = ncm_predict(s, [1.0, 1.0])
    assert scores[0] == scores[1]
    assert cls == 0  # tie to the smaller id


def test_ncm_scale_invariance():
    s = ClassStats(2)
    ncm_observe(s, (0, [1.0, 0.0]))
    ncm_observe(s, (1, [0.0, 1.0]))
    base_cls, base_scores = ncm_predict(s, [0.9, 0.1])
    cls4, scores4 = ncm_predict(s, [4.0 * 0.9, 4.0 * 0.1])
    assert cls4 == base_cls
    # power-of-two scaling is exact in IEEE arithmetic
    assert scores4 == base_scores
    cls5, scores5 = ncm_predict(s, [5.0 * 0.9, 5.0 * 0.1])
    assert cls5 == base_cls
    for c in scores5:
        assert scores5[c] == pytest.approx(base_scores[c], rel=1e-14)


def test_ncm_degenerate_inputs():
    s = ClassStats(2)
    ncm_observe(s, (0, [1.0, 0.0]))
    with pytest.raises(DegenerateInputError):
        ncm_predict(s, [0.0, 0.0])
    ncm_observe(s, (1, [0.0, 0.0]))  # zero prototype
    with pytest.raises(DegenerateInputError):
        ncm_predict(s, [1.0, 0.0])
    with pytest.raises(DegenerateInputError):
        ncm_predict(ClassStats(2), [1.0, 0.0])
    with pytest.raises(ShapeError):
        ncm_observe(s, (0, [1.0, 0.0, 3.0]))


def test_batch_predict_matches_one_by_one():
    x = normals(31, 400).reshape(100, 4)
    y = np.arange(100) % 5
    s = ClassStats(4)
    observe_many(s, y, x)
    queries = normals(32, 80).reshape(20, 4)
    batch = ncm_predict_batch(s, queries)
    single = [ncm_predict(s, q)[0] for q in queries]
    assert batch.tolist() == single


def test_order_invariance_of_stats():
    x = normals(41, 300).reshape(100, 3)
    y = np.arange(100) % 4
    a = ClassStats(3)
    observe_many(a, y, x)
    b = ClassStats(3)
    perm = np.argsort(normals(42, 100))
    for i in perm:
        ncm_observe(b, (int(y[i]), x[i]))
    for c in a.classes():
        assert np.allclose(a.mean(c), b.mean(c), rtol=1e-9)


def test_fixed_prototypes_match_ncm():
    x = normals(51, 200).reshape(50, 4)
    y = np.arange(50) % 3
    s = ClassStats(4)
    observe_many(s, y, x)
    protos = {c: s.mean(c) for c in s.classes()}
    for q in normals(52, 40).reshape(10, 4):
        assert fixed_prototype_classify(protos, q) == ncm_predict(s, q)[0]


def test_fixed_prototypes_edge_cases():
    assert fixed_prototype_classify({3: np.array([1.0, 0.0])}, [0.2, 0.9]) == 3
    protos = {0: np.array([1.0, 0.0]), 1: np.array([0.0, 1.0])}
    assert fixed_prototype_classify(protos, [0.0, 1.0]) == 1
    with pytest.raises(DegenerateInputError):
        fixed_prototype_classify({0: np.zeros(2)}, [1.0, 0.0])
    with pytest.raises(DegenerateInputError):
        fixed_prototype_classify({}, [1.0])


def test_lda_second_moment_small_cases():
    s = LdaState(2)
    lda_observe(s, (0, [1.0, 0.0]))
    lda_observe(s, (1, [0.0, 1.0]))
    assert np.array_equal(s.second_moment, np.eye(2))
    s2 = LdaState(2)
    lda_observe(s2, (0, [2.0, 0.0]))
    assert np.array_equal(s2.second_moment, [[4.0, 0.0], [0.0, 0.0]])


def test_lda_second_moment_matches_batch():
    x = normals(61, 200 * 3).reshape(200, 3)
    y = np.arange(200) % 4
    s = LdaState(3)
    for xi, yi in zip(x, y):
        lda_observe(s, (int(yi), xi))
    direct = x.T @ x
    assert np.allclose(s.second_moment, direct, rtol=1e-10)
    s2 = LdaState(3)
    lda_observe_many(s2, y, x)
    assert np.allclose(s2.second_moment, direct, rtol=1e-12)


def test_lda_symmetric_two_class_boundary():
    # identity within-class covariance, means at +/- [1, 0], equal counts:
    # the discriminant boundary is x1 = 0
    rng_x = normals(71, 2 * 500 * 2).reshape(1000, 2)
    y = np.repeat([0, 1], 500)
    x = rng_x.copy()
    x[:500, 0] += 1.0
    x[500:, 0] -= 1.0
    s = LdaState(2)
    lda_observe_many(s, y, x)
    head = lda_finalize(s, alpha=0.0)
    assert lda_predict(head, [2.0, 0.0]) == 0
    assert lda_predict(head, [-2.0, 0.0]) == 1
    # near the boundary the score gap is tiny relative to the weights
    w_gap = head.weights[0] - head.weights[1]
    assert abs(w_gap[1]) < 0.2 * abs(w_gap[0])


def test_lda_tie_breaks_to_smaller_id():
    s = LdaState(2)
    # two classes, exactly mirrored data: scores at x1=0 tie by symmetry
    pts = np.array([[1.0, 1.0], [1.0, -1.0], [2.0, 0.5], [2.0, -0.5]])
    lda_observe_many(s, np.zeros(4, dtype=int), pts)
    lda_observe_many(s, np.ones(4, dtype=int), -pts)
    head = lda_finalize(s, alpha=0.1)
    scores = head.weights @ np.array([0.0, 7.0]) + head.biases
    assert scores[0] == scores[1]
    assert lda_predict(head, [0.0, 7.0]) == 0


def test_lda_matches_batch_oracle():
    dim, k, n = 4, 3, 60
    x = normals(81, n * dim).reshape(n, dim)
    y = np.arange(n) % k
    x += y[:, None] * 0.5  # separate the classes a little
    s = LdaState(dim)
    lda_observe_many(s, y, x)
    for alpha in (0.0, 0.1, 0.5):
        head = lda_finalize(s, alpha=alpha)
        ids, w, b = batch_lda_oracle(x, y, alpha)
        assert head.class_ids == ids
        assert np.allclose(head.weights, w, rtol=1e-8)
        assert np.allclose(head.biases, b, rtol=1e-8)
        mine = lda_predict_batch(head, x)
        oracle_scores = x @ w.T + b
        assert np.array_equal(mine, np.array(ids)[np.argmax(oracle_scores, axis=1)])


def test_lda_full_shrinkage_is_scaled_identity():
    x = normals(91, 50 * 3).reshape(50, 3)
    y = np.arange(50) % 2
    s = LdaState(3)
    lda_observe_many(s, y, x)
    head = lda_finalize(s, alpha=1.0)
    ids, means = s.stats.mean_matrix()
    sigma_w = (s.second_moment - sum(
        s.stats.counts[c] * np.outer(s.stats.mean(c), s.stats.mean(c)) for c in ids
    )) / (s.total - len(ids))
    scale = np.trace(sigma_w) / 3
    assert np.allclose(head.weights, means / scale, rtol=1e-10)


def test_lda_requires_more_samples_than_classes():
    s = LdaState(2)
    lda_observe(s, (0, [1.0, 0.0]))
    lda_observe(s, (1, [0.0, 1.0]))
    with pytest.raises(ConfigurationError):
        lda_finalize(s, alpha=0.5)


def test_lda_singular_at_zero_shrinkage():
    s = LdaState(3)
    # all within-class variation lies in one coordinate: rank-deficient pool
    lda_observe_many(
        s,
        [0, 0, 1, 1],
        np.array([[1, 0, 0], [2, 0, 0], [0, 1, 0], [0, 2, 0]], dtype=float),
    )
    with pytest.raises(SingularityError) as exc:
        lda_finalize(s, alpha=0.0)
    assert "shrinkage" in str(exc.value)
    lda_finalize(s, alpha=0.1)  # shrinkage repairs it


def test_lda_alpha_range():
    s = LdaState(2)
    lda_observe_many(s, [0, 0, 1], np.eye(3, 2) + 1.0)
    with pytest.raises(ConfigurationError):
        lda_finalize(s, alpha=1.5)


def test_forgetting_free_property():
    x = normals(101, 300 * 4).reshape(300, 4)
    y = np.arange(300) % 6
    x += y[:, None] * 0.3
    whole = LdaState(4)
    lda_observe_many(whole, y, x)
    tasks = LdaState(4)
    for t in range(3):  # classes 2t, 2t+1 arrive in task t
        mask = (y // 2) == t
        lda_observe_many(tasks, y[mask], x[mask])
    h1 = lda_finalize(whole, alpha=0.1)
    h2 = lda_finalize(tasks, alpha=0.1)
    assert h1.class_ids == h2.class_ids
    assert np.allclose(h1.weights, h2.weights, rtol=1e-9)
    assert np.allclose(h1.biases, h2.biases, rtol=1e-9)
    assert np.array_equal(lda_predict_batch(h1, x), lda_predict_batch(h2, x))
