"""Streaming class-prototype learners.

All learners here keep only per-class sufficient statistics, so feeding
T tasks one at a time and feeding the concatenated data once produce the
same state up to floating rounding.  Nothing retains raw samples.

Scoring conventions shared by every cosine-based classifier:
score_y = (h . c_y) / (|h| * |c_y|), ties to the smallest class id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateInputError,
    NumericError,
    ShapeError,
    SingularityError,
)


@dataclass
class ClassStats:
    """Per-class counts and feature sums; means are derived on demand."""

    dim: int
    counts: dict[int, int] = field(default_factory=dict)
    sums: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def classes(self) -> list[int]:
        return sorted(self.counts)

    def mean(self, class_id: int) -> np.ndarray:
        return self.sums[class_id] / self.counts[class_id]

    def mean_matrix(self) -> tuple[list[int], np.ndarray]:
        """Sorted class ids and the (K, L) matrix of their means."""
        ids = self.classes()
        if not ids:
            return ids, np.empty((0, self.dim))
        return ids, np.stack([self.mean(c) for c in ids])


def _check_vector(dim: int, vector: np.ndarray) -> np.ndarray:
    x = np.asarray(vector, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != dim:
        raise ShapeError(f"expected a vector of length {dim}, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise DegenerateInputError("non-finite feature value")
    return x


def ncm_observe(state: ClassStats, sample) -> ClassStats:
    """Fold one (class_id, vector) sample into the running class stats."""
    class_id, vector = sample
    x = _check_vector(state.dim, vector)
    cid = int(class_id)
    if cid in state.counts:
        state.counts[cid] += 1
        state.sums[cid] += x
    else:
        state.counts[cid] = 1
        state.sums[cid] = x.copy()
    return state


def observe_many(state: ClassStats, labels, features) -> ClassStats:
    """Vectorized fold of a labeled batch; order-independent result."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[1] != state.dim or X.shape[0] != y.shape[0]:
        raise ShapeError("batch shape does not match state dimension")
    if not np.isfinite(X).all():
        raise DegenerateInputError("non-finite feature value")
    for cid in np.unique(y):
        rows = X[y == cid]
        c = int(cid)
        if c in state.counts:
            state.counts[c] += rows.shape[0]
            state.sums[c] += rows.sum(axis=0)
        else:
            state.counts[c] = rows.shape[0]
            state.sums[c] = rows.sum(axis=0)
    return state


def _cosine_scores(prototypes: np.ndarray, feature: np.ndarray) -> np.ndarray:
    fn = np.linalg.norm(feature)
    if fn == 0.0:
        raise DegenerateInputError("zero-norm feature")
    pn = np.linalg.norm(prototypes, axis=1)
    if np.any(pn == 0.0):
        raise DegenerateInputError("zero-norm prototype")
    return (prototypes @ feature) / (fn * pn)


def ncm_predict(state: ClassStats, feature) -> tuple[int, dict[int, float]]:
    """Cosine argmax against class means; smallest id wins ties."""
    ids, means = state.mean_matrix()
    if not ids:
        raise DegenerateInputError("no classes observed")
    x = _check_vector(state.dim, feature)
    scores = _cosine_scores(means, x)
    best = int(np.argmax(scores))  # first occurrence = smallest id
    return ids[best], {c: float(s) for c, s in zip(ids, scores)}


def ncm_predict_batch(state: ClassStats, features) -> np.ndarray:
    """Row-wise ncm_predict over an (N, L) batch; returns class ids."""
    ids, means = state.mean_matrix()
    if not ids:
        raise DegenerateInputError("no classes observed")
    X = np.asarray(features, dtype=np.float64)
    fn = np.linalg.norm(X, axis=1)
    if np.any(fn == 0.0):
        raise DegenerateInputError("zero-norm feature")
    pn = np.linalg.norm(means, axis=1)
    if np.any(pn == 0.0):
        raise DegenerateInputError("zero-norm prototype")
    scores = (X @ means.T) / np.outer(fn, pn)
    return np.asarray(ids, dtype=np.int64)[np.argmax(scores, axis=1)]


def fixed_prototype_classify(prototypes: dict[int, np.ndarray], feature) -> int:
    """Cosine argmax against externally supplied prototypes.

    Identical scoring rule to ncm_predict; prototypes typically come from
    a text encoder or another model rather than observed data.
    """
    if not prototypes:
        raise DegenerateInputError("no prototypes supplied")
    ids = sorted(prototypes)
    P = np.stack([np.asarray(prototypes[c], dtype=np.float64) for c in ids])
    x = np.asarray(feature, dtype=np.float64)
    if x.shape != (P.shape[1],):
        raise ShapeError("feature length does not match prototypes")
    scores = _cosine_scores(P, x)
    return ids[int(np.argmax(scores))]


@dataclass
class LdaState:
    """Class stats plus the global second moment S = sum_i x_i x_i^T."""

    dim: int
    stats: ClassStats = None
    second_moment: np.ndarray = None

    def __post_init__(self):
        if self.stats is None:
            self.stats = ClassStats(self.dim)
        if self.second_moment is None:
            self.second_moment = np.zeros((self.dim, self.dim))

    @property
    def total(self) -> int:
        return self.stats.total


def lda_observe(state: LdaState, sample) -> LdaState:
    class_id, vector = sample
    x = _check_vector(state.dim, vector)
    ncm_observe(state.stats, (class_id, x))
    state.second_moment += np.outer(x, x)
    return state


def lda_observe_many(state: LdaState, labels, features) -> LdaState:
    X = np.asarray(features, dtype=np.float64)
    observe_many(state.stats, labels, X)
    state.second_moment += X.T @ X
    return state


@dataclass
class LdaHead:
    """Finalized linear discriminant: scores are x . w_y + b_y."""

    class_ids: list[int]
    weights: np.ndarray  # (K, L)
    biases: np.ndarray  # (K,)
    alpha: float


def lda_finalize(state: LdaState, alpha: float = 0.1) -> LdaHead:
    """Close the stream into a linear head.

    Within-class covariance comes from the accumulated second moment:
    Sigma_w = (S - sum_y pi_y c_y c_y^T) / (N - K), then linear shrinkage
    toward the scaled identity, Sigma_s = (1-a) Sigma_w + a (tr/L) I.
    Weights solve Sigma_s w_y = c_y; biases fold in the log prior.

    Requires N > K: the pooled estimator is undefined otherwise, with or
    without shrinkage (shrinkage rescales a zero matrix to zero).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError("shrinkage must lie in [0, 1]")
    ids, means = state.stats.mean_matrix()
    k, n = len(ids), state.total
    if n <= k:
        raise ConfigurationError(
            f"need more samples than classes to pool covariance (N={n}, K={k})"
        )
    counts = np.array([state.stats.counts[c] for c in ids], dtype=np.float64)
    between = (means * counts[:, None]).T @ means
    sigma_w = (state.second_moment - between) / (n - k)
    sigma_w = (sigma_w + sigma_w.T) / 2.0
    dim = state.dim
    sigma_s = (1.0 - alpha) * sigma_w + alpha * (np.trace(sigma_w) / dim) * np.eye(dim)
    try:
        weights = np.linalg.solve(sigma_s, means.T).T
    except np.linalg.LinAlgError as exc:
        hint = "increase shrinkage above 0" if alpha == 0.0 else "within-class scatter is zero"
        raise SingularityError(f"shrunk covariance is singular; {hint}") from exc
    if not np.isfinite(weights).all():
        raise NumericError("non-finite discriminant weights")
    priors = np.log(counts / n)
    biases = -0.5 * np.einsum("kl,kl->k", means, weights) + priors
    return LdaHead(class_ids=ids, weights=weights, biases=biases, alpha=alpha)


def lda_predict(head: LdaHead, feature) -> int:
    x = np.asarray(feature, dtype=np.float64)
    if x.shape != (head.weights.shape[1],):
        raise ShapeError("feature length does not match head")
    scores = head.weights @ x + head.biases
    return head.class_ids[int(np.argmax(scores))]


def lda_predict_batch(head: LdaHead, features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != head.weights.shape[1]:
        raise ShapeError("batch shape does not match head")
    scores = X @ head.weights.T + head.biases
    ids = np.asarray(head.class_ids, dtype=np.int64)
    return ids[np.argmax(scores, axis=1)]


def lda_scores(head: LdaHead, features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    return X @ head.weights.T + head.biases


__all__ = [
    "ClassStats",
    "LdaHead",
    "LdaState",
    "fixed_prototype_classify",
    "lda_finalize",
    "lda_observe",
    "lda_observe_many",
    "lda_predict",
    "lda_predict_batch",
    "lda_scores",
    "ncm_observe",
    "ncm_predict",
    "ncm_predict_batch",
    "observe_many",
]
