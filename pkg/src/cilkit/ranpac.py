"""Random-projection classifier with a regularized closed-form head.

Features pass through a frozen random projection and a ReLU into an
M-dimensional hidden space.  Training accumulates a weighted Gram matrix
G_w and per-class hidden prototypes; the head solves (G_w + lam*I) W_o = C
once, after any number of tasks.

Weighting: with ``balanced=True`` (default) each sample contributes its
outer product scaled by the reciprocal of its class's final count, and
prototype columns are per-class means.  Class counts are only final once
a task ends (classes never span tasks), so hidden vectors are buffered
for the current task only and folded into G_w at end_task.  No past-task
data is ever retained.  With ``balanced=False`` the fold is the plain sum
of outer products and prototypes are class sums, reproducing the
uncorrected variant for comparison runs.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ConfigurationError,
    DegenerateInputError,
    NumericError,
    ProtocolError,
    ShapeError,
)
from .rng import normals

DEFAULT_WIDTH = 10000
_FOLD_CHUNK_ROWS = 1024


@dataclass
class Projection:
    """Frozen L-to-M random map; a pure function of (dim, width, seed)."""

    dim: int
    width: int
    seed: int
    weight: np.ndarray = None  # (L, M)

    def __post_init__(self):
        if self.weight is None:
            self.weight = (
                normals(self.seed, self.dim * self.width)
                .reshape(self.dim, self.width)
            )


def init_projection(dim: int, width: int = DEFAULT_WIDTH, seed: int = 0) -> Projection:
    if dim < 1 or width < 1:
        raise ConfigurationError("projection dimensions must be positive")
    return Projection(dim=dim, width=width, seed=seed)


def project(projection: Projection, feature) -> np.ndarray:
    """hidden = max(0, W^T feature)."""
    x = np.asarray(feature, dtype=np.float64)
    if x.shape != (projection.dim,):
        raise ShapeError(
            f"expected feature of length {projection.dim}, got shape {x.shape}"
        )
    return np.maximum(projection.weight.T @ x, 0.0)


def project_batch(projection: Projection, features) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != projection.dim:
        raise ShapeError("batch shape does not match projection")
    return np.maximum(X @ projection.weight, 0.0)


class _TaskBuffer:
    """Current-task hidden vectors; spills to a temp file past a byte cap."""

    def __init__(self, width: int, spill_bytes: int):
        self.width = width
        self.spill_bytes = spill_bytes
        self.labels: list[int] = []
        self._rows: list[np.ndarray] = []
        self._mem_bytes = 0
        self._spill_path = None
        self._spilled_rows = 0

    def __len__(self) -> int:
        return len(self.labels)

    def append(self, label: int, hidden: np.ndarray) -> None:
        self.labels.append(label)
        self._rows.append(hidden)
        self._mem_bytes += hidden.nbytes
        if self._mem_bytes > self.spill_bytes:
            self._spill()

    def _spill(self) -> None:
        if self._spill_path is None:
            fd, self._spill_path = tempfile.mkstemp(suffix=".hidbuf")
            os.close(fd)
        with open(self._spill_path, "ab") as fh:
            for row in self._rows:
                fh.write(row.astype(np.float64, copy=False).tobytes())
        self._spilled_rows += len(self._rows)
        self._rows = []
        self._mem_bytes = 0

    def iter_chunks(self, rows_per_chunk: int = _FOLD_CHUNK_ROWS):
        """Yield (labels, hidden matrix) chunks in append order."""
        labels = np.asarray(self.labels, dtype=np.int64)
        pos = 0
        if self._spill_path is not None:
            row_bytes = self.width * 8
            with open(self._spill_path, "rb") as fh:
                while pos < self._spilled_rows:
                    n = min(rows_per_chunk, self._spilled_rows - pos)
                    block = np.frombuffer(
                        fh.read(n * row_bytes), dtype=np.float64
                    ).reshape(n, self.width)
                    yield labels[pos:pos + n], block
                    pos += n
        while pos < len(labels):
            n = min(rows_per_chunk, len(labels) - pos)
            block = np.stack(self._rows[pos - self._spilled_rows:
                                        pos - self._spilled_rows + n])
            yield labels[pos:pos + n], block
            pos += n

    def peek(self, index: int) -> np.ndarray:
        """Row by position, for inspection in tests."""
        if index < self._spilled_rows:
            row_bytes = self.width * 8
            with open(self._spill_path, "rb") as fh:
                fh.seek(index * row_bytes)
                return np.frombuffer(fh.read(row_bytes), dtype=np.float64)
        return self._rows[index - self._spilled_rows]

    def clear(self) -> None:
        self.labels = []
        self._rows = []
        self._mem_bytes = 0
        if self._spill_path is not None:
            try:
                os.unlink(self._spill_path)
            except OSError:
                pass
            self._spill_path = None
        self._spilled_rows = 0


@dataclass
class RanPacState:
    """Streaming accumulator for the projected-feature head."""

    projection: Projection
    balanced: bool = True
    spill_bytes: int = 1 << 30
    gram: np.ndarray = None  # (M, M), weighted when balanced
    hidden_sums: dict[int, np.ndarray] = field(default_factory=dict)
    counts: dict[int, int] = field(default_factory=dict)
    folded_tasks: int = 0
    selected_lambda: float = None

    def __post_init__(self):
        m = self.projection.width
        if self.gram is None:
            self.gram = np.zeros((m, m))
        self._buffer = _TaskBuffer(m, self.spill_bytes)
        self._task_open = False
        self._buffer_folded = False
        self._closed_classes: set[int] = set()

    @property
    def task_open(self) -> bool:
        return self._task_open

    def classes(self) -> list[int]:
        return sorted(self.counts)

    def prototype_matrix(self) -> tuple[list[int], np.ndarray]:
        """Sorted class ids and the (M, K) prototype matrix.

        Columns are per-class hidden means when balanced, sums otherwise.
        """
        ids = self.classes()
        m = self.projection.width
        if not ids:
            return ids, np.empty((m, 0))
        cols = []
        for c in ids:
            col = self.hidden_sums[c]
            cols.append(col / self.counts[c] if self.balanced else col)
        return ids, np.stack(cols, axis=1)


def begin_task(state: RanPacState) -> RanPacState:
    if state._task_open:
        raise ProtocolError("previous task is still open; call end_task first")
    state._buffer.clear()
    state._task_open = True
    state._buffer_folded = False
    return state


def ranpac_observe(state: RanPacState, sample) -> RanPacState:
    """Project one labeled feature and buffer it for the open task."""
    if not state._task_open:
        raise ProtocolError("no open task; call begin_task before observing")
    if state._buffer_folded:
        raise ProtocolError("task already folded; open a new task to observe")
    class_id, feature = sample
    cid = int(class_id)
    if cid in state._closed_classes:
        raise ProtocolError(
            f"class {cid} already closed in an earlier task; classes must not recur"
        )
    hidden = project(state.projection, feature)
    state._buffer.append(cid, hidden)
    if cid in state.counts:
        state.counts[cid] += 1
        state.hidden_sums[cid] += hidden
    else:
        state.counts[cid] = 1
        state.hidden_sums[cid] = hidden.copy()
    return state


def ranpac_observe_many(state: RanPacState, labels, features) -> RanPacState:
    if not state._task_open:
        raise ProtocolError("no open task; call begin_task before observing")
    if state._buffer_folded:
        raise ProtocolError("task already folded; open a new task to observe")
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError("batch shape mismatch")
    recur = state._closed_classes.intersection(int(c) for c in np.unique(y))
    if recur:
        raise ProtocolError(
            f"class {min(recur)} already closed in an earlier task;"
            " classes must not recur"
        )
    hidden = project_batch(state.projection, X)
    for i in range(hidden.shape[0]):
        cid = int(y[i])
        state._buffer.append(cid, hidden[i])
        if cid in state.counts:
            state.counts[cid] += 1
            state.hidden_sums[cid] += hidden[i]
        else:
            state.counts[cid] = 1
            state.hidden_sums[cid] = hidden[i].copy()
    return state


def _fold_buffer(state: RanPacState) -> None:
    """Add the buffered task to the Gram; idempotent within a task."""
    if state._buffer_folded:
        return
    if len(state._buffer) == 0:
        raise ProtocolError("cannot fold an empty task buffer")
    for labels, block in state._buffer.iter_chunks():
        if state.balanced:
            # per-sample weight 1/pi_y with the class's final count
            w = np.array([state.counts[int(c)] for c in labels], dtype=np.float64)
            scaled = block / np.sqrt(w)[:, None]
        else:
            scaled = block
        state.gram += scaled.T @ scaled
    state.gram = (state.gram + state.gram.T) / 2.0
    state._buffer_folded = True


def end_task(state: RanPacState, lambda_candidates=None) -> RanPacState:
    """Fold the open task into G, optionally pick lambda, drop the buffer.

    lambda_candidates may be a callable (e.g. default_lambda_grid); it is
    evaluated after the fold so a trace-scaled grid sees the full Gram.
    """
    if not state._task_open:
        raise ProtocolError("no open task to end")
    if len(state._buffer) == 0:
        raise ProtocolError("cannot end a task with an empty buffer")
    _fold_buffer(state)
    if lambda_candidates is not None:
        if callable(lambda_candidates):
            lambda_candidates = lambda_candidates(state)
        state.selected_lambda = select_lambda(state, lambda_candidates)
    state._closed_classes.update(state._buffer.labels)
    state._buffer.clear()
    state._task_open = False
    state.folded_tasks += 1
    return state


def default_lambda_grid(state: RanPacState) -> list[float]:
    """Log grid 1e-8..1e2 scaled by tr(G)/M."""
    scale = float(np.trace(state.gram)) / state.projection.width
    if scale <= 0.0:
        scale = 1.0
    return [scale * 10.0**e for e in range(-8, 3)]


def select_lambda(state: RanPacState, candidates) -> float:
    """Pick the candidate whose head best reconstructs one-hot targets.

    Scores every candidate by mean squared error between W_o^T h and the
    one-hot class indicator over the still-retained current-task buffer;
    the first minimum wins.  Must run before the buffer is cleared.
    """
    candidates = list(candidates)
    if not candidates:
        raise ConfigurationError("lambda candidate list is empty")
    if any(c <= 0.0 for c in candidates):
        raise ConfigurationError("lambda candidates must be positive")
    if len(state._buffer) == 0:
        raise ProtocolError("no retained task buffer to score lambda against")
    _fold_buffer(state)
    ids, protos = state.prototype_matrix()
    col_of = {c: j for j, c in enumerate(ids)}
    best_lam, best_mse = None, None
    for lam in candidates:
        head = _solve(state.gram, protos, float(lam), ids)
        sq_sum = 0.0
        count = 0
        for labels, block in state._buffer.iter_chunks():
            scores = block @ head.output_weights
            scores[np.arange(len(labels)), [col_of[int(c)] for c in labels]] -= 1.0
            sq_sum += float(np.sum(scores * scores))
            count += scores.size
        mse = sq_sum / count
        if best_mse is None or mse < best_mse:
            best_lam, best_mse = float(lam), mse
    return best_lam


@dataclass
class RanPacHead:
    """Solved linear head over the hidden space."""

    class_ids: list[int]
    output_weights: np.ndarray  # (M, K)
    lam: float
    residual: float


def _solve(gram, protos, lam, ids) -> RanPacHead:
    m = gram.shape[0]
    a = gram + lam * np.eye(m)
    try:
        factor = scipy.linalg.cho_factor(a, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError):
        # rounding can nudge an SPD matrix indefinite; one jitter retry
        jitter = 1e-10 * max(float(np.trace(gram)) / m, 1.0)
        a = a + jitter * np.eye(m)
        try:
            factor = scipy.linalg.cho_factor(a, check_finite=False)
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericError(f"head solve failed at lambda={lam}") from exc
    w = scipy.linalg.cho_solve(factor, protos, check_finite=False)
    proto_norm = float(np.linalg.norm(protos))
    residual = 0.0
    if proto_norm > 0.0:
        # iterative refinement pulls the residual down when G is badly
        # conditioned at small lambda
        for _ in range(3):
            gap = protos - a @ w
            residual = float(np.linalg.norm(gap)) / proto_norm
            if residual <= 1e-8:
                break
            w = w + scipy.linalg.cho_solve(factor, gap, check_finite=False)
            residual = float(np.linalg.norm(protos - a @ w)) / proto_norm
    if not np.isfinite(w).all():
        raise NumericError("non-finite head weights")
    if residual > 1e-6:
        raise NumericError(
            f"solve residual {residual:.3e} exceeds 1e-6 at lambda={lam}"
        )
    return RanPacHead(class_ids=list(ids), output_weights=w, lam=lam,
                      residual=residual)


def ranpac_solve(state: RanPacState, lam: float) -> RanPacHead:
    """Solve (G + lam*I) W_o = C with an SPD factorization."""
    if lam <= 0.0:
        raise ConfigurationError("lambda must be positive")
    if state.folded_tasks < 1:
        raise ProtocolError("no folded task; end_task must run before solving")
    ids, protos = state.prototype_matrix()
    return _solve(state.gram, protos, float(lam), ids)


def ranpac_predict(head: RanPacHead, projection: Projection, feature):
    """Scores are W_o^T project(feature); smallest-id tie-break."""
    hidden = project(projection, feature)
    scores = head.output_weights.T @ hidden
    best = int(np.argmax(scores)) if scores.size else None
    if best is None:
        raise DegenerateInputError("head has no classes")
    return head.class_ids[best], {
        c: float(s) for c, s in zip(head.class_ids, scores)
    }


def ranpac_predict_batch(
    head: RanPacHead, projection: Projection, features
) -> np.ndarray:
    hidden = project_batch(projection, features)
    scores = hidden @ head.output_weights
    ids = np.asarray(head.class_ids, dtype=np.int64)
    return ids[np.argmax(scores, axis=1)]
