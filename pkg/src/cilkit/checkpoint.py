"""Versioned binary checkpoints for learner states and solved heads.

Same conventions as the feature file format: fixed magic, little-endian
fixed-width fields, float payloads as raw little-endian IEEE.  Class
records are written in sorted class-id order so a save/load/save cycle
is byte-identical.  Raw sample buffers are never serialized; a state
with an open task refuses to save.
"""

from __future__ import annotations

import io
import struct

import numpy as np

from .errors import CorruptionError, DataError, FormatError, ProtocolError
from .learners import ClassStats, LdaHead
from .ranpac import Projection, RanPacHead, RanPacState

MAGIC = b"CKV1"
FORMAT_VERSION = 1

_KIND_CLASS_STATS = 1
_KIND_LDA_HEAD = 2
_KIND_RANPAC_STATE = 3
_KIND_RANPAC_HEAD = 4

_PREAMBLE = struct.Struct("<4sII")  # magic, version, kind


def _check_class_id(cid: int) -> int:
    if not 0 <= cid < 2**32:
        raise DataError(f"class id {cid} does not fit the container field")
    return cid


def _f64_bytes(arr) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


class _Reader:
    """Tracks the byte offset so truncation errors can name it."""

    def __init__(self, raw: bytes):
        self.raw = raw
        self.pos = 0

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.raw):
            raise CorruptionError(
                f"payload ends at byte {len(self.raw)}, expected at least "
                f"{end}; corruption at byte offset {len(self.raw)}"
            )
        out = self.raw[self.pos:end]
        self.pos = end
        return out

    def unpack(self, pattern: str):
        s = struct.Struct("<" + pattern)
        return s.unpack(self.take(s.size))

    def f64(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(count * 8), dtype="<f8").copy()

    def done(self) -> None:
        if self.pos != len(self.raw):
            raise FormatError(
                f"{len(self.raw) - self.pos} trailing bytes after payload"
            )


def _write_class_stats(buf, stats: ClassStats) -> None:
    buf.write(struct.pack("<II", stats.dim, len(stats.counts)))
    for cid in stats.classes():
        buf.write(struct.pack("<IQ", _check_class_id(cid), stats.counts[cid]))
        buf.write(_f64_bytes(stats.sums[cid]))


def _read_class_stats(r: _Reader) -> ClassStats:
    dim, k = r.unpack("II")
    stats = ClassStats(dim=dim)
    for _ in range(k):
        cid, count = r.unpack("IQ")
        stats.counts[cid] = count
        stats.sums[cid] = r.f64(dim)
    return stats


def _write_lda_head(buf, head: LdaHead) -> None:
    k, dim = head.weights.shape
    buf.write(struct.pack("<IId", dim, k, head.alpha))
    for cid in head.class_ids:
        buf.write(struct.pack("<I", _check_class_id(cid)))
    buf.write(_f64_bytes(head.weights))
    buf.write(_f64_bytes(head.biases))


def _read_lda_head(r: _Reader) -> LdaHead:
    dim, k, alpha = r.unpack("IId")
    ids = [r.unpack("I")[0] for _ in range(k)]
    weights = r.f64(k * dim).reshape(k, dim)
    biases = r.f64(k)
    return LdaHead(class_ids=ids, weights=weights, biases=biases, alpha=alpha)


def _write_ranpac_state(buf, state: RanPacState) -> None:
    if state.task_open:
        raise ProtocolError(
            "open task buffers are never serialized; end the task first"
        )
    proj = state.projection
    lam = state.selected_lambda
    buf.write(
        struct.pack(
            "<IIQBIBd",
            proj.dim,
            proj.width,
            proj.seed & (2**64 - 1),
            1 if state.balanced else 0,
            state.folded_tasks,
            0 if lam is None else 1,
            0.0 if lam is None else lam,
        )
    )
    buf.write(struct.pack("<I", len(state.counts)))
    for cid in state.classes():
        buf.write(struct.pack("<IQ", _check_class_id(cid), state.counts[cid]))
        buf.write(_f64_bytes(state.hidden_sums[cid]))
    buf.write(_f64_bytes(state.gram))


def _read_ranpac_state(r: _Reader) -> RanPacState:
    dim, width, seed, balanced, folded, has_lam, lam = r.unpack("IIQBIBd")
    (k,) = r.unpack("I")
    counts, sums = {}, {}
    for _ in range(k):
        cid, count = r.unpack("IQ")
        counts[cid] = count
        sums[cid] = r.f64(width)
    gram = r.f64(width * width).reshape(width, width)
    state = RanPacState(
        projection=Projection(dim=dim, width=width, seed=seed),
        balanced=bool(balanced),
        gram=gram,
        hidden_sums=sums,
        counts=counts,
        folded_tasks=folded,
        selected_lambda=lam if has_lam else None,
    )
    # every serialized class came from a folded task, so none may recur
    state._closed_classes = set(counts)
    return state


def _write_ranpac_head(buf, head: RanPacHead) -> None:
    width, k = head.output_weights.shape
    buf.write(struct.pack("<IIdd", width, k, head.lam, head.residual))
    for cid in head.class_ids:
        buf.write(struct.pack("<I", _check_class_id(cid)))
    buf.write(_f64_bytes(head.output_weights))


def _read_ranpac_head(r: _Reader) -> RanPacHead:
    width, k, lam, residual = r.unpack("IIdd")
    ids = [r.unpack("I")[0] for _ in range(k)]
    weights = r.f64(width * k).reshape(width, k)
    return RanPacHead(
        class_ids=ids, output_weights=weights, lam=lam, residual=residual
    )


_WRITERS = [
    (ClassStats, _KIND_CLASS_STATS, _write_class_stats),
    (LdaHead, _KIND_LDA_HEAD, _write_lda_head),
    (RanPacState, _KIND_RANPAC_STATE, _write_ranpac_state),
    (RanPacHead, _KIND_RANPAC_HEAD, _write_ranpac_head),
]

_READERS = {
    _KIND_CLASS_STATS: _read_class_stats,
    _KIND_LDA_HEAD: _read_lda_head,
    _KIND_RANPAC_STATE: _read_ranpac_state,
    _KIND_RANPAC_HEAD: _read_ranpac_head,
}


def save_checkpoint(obj, path: str) -> None:
    """Write one learner state or head to a self-describing binary file."""
    for klass, kind, writer in _WRITERS:
        if isinstance(obj, klass):
            buf = io.BytesIO()
            buf.write(_PREAMBLE.pack(MAGIC, FORMAT_VERSION, kind))
            writer(buf, obj)
            with open(path, "wb") as fh:
                fh.write(buf.getvalue())
            return
    raise DataError(f"cannot checkpoint object of type {type(obj).__name__}")


def load_checkpoint(path: str):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _PREAMBLE.size:
        raise CorruptionError(
            f"truncated header: file ends at byte {len(raw)}, "
            f"need {_PREAMBLE.size}"
        )
    magic, version, kind = _PREAMBLE.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic bytes {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    reader = _READERS.get(kind)
    if reader is None:
        raise FormatError(f"unknown checkpoint kind {kind}")
    r = _Reader(raw)
    r.pos = _PREAMBLE.size
    obj = reader(r)
    r.done()
    return obj
