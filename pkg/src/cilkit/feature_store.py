"""Labeled feature datasets: file format, validation, and task partitioning.

The on-disk format is a flat little-endian binary ("PFV1"): magic bytes
``PFV1``, u32 version (currently 1), u32 feature length L, u64 record
count N, then N records of u32 class_id followed by L float32 values.
A JSON sidecar at ``<path>.json`` carries class names, the split tag,
and free-form provenance; the binary file is the source of truth for
the numbers.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigurationError,
    ConsistencyError,
    CorruptionError,
    DataError,
    FormatError,
    ShapeError,
)
from .rng import SplitMix64

MAGIC = b"PFV1"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


@dataclass
class FeatureDataset:
    """Immutable-by-convention container of labeled feature vectors.

    Sample order is meaningful and preserved through file round-trips.
    """

    features: np.ndarray  # (N, L) float32
    labels: np.ndarray  # (N,) int64 class ids
    class_registry: dict[int, str]
    split_tag: str = "train"
    provenance: str = ""

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float32)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        self.validate()

    def validate(self) -> None:
        if self.features.ndim != 2:
            raise ShapeError("features must be a 2-d array")
        if self.features.shape[1] < 1:
            raise ShapeError("feature length must be positive")
        if self.labels.shape != (self.features.shape[0],):
            raise ShapeError("labels must align with features")
        if self.labels.size and self.labels.min() < 0:
            raise DataError("class ids must be non-negative")
        bad = np.flatnonzero(~np.isfinite(self.features).all(axis=1))
        if bad.size:
            raise DataError(f"non-finite feature value at sample {int(bad[0])}")
        missing = set(np.unique(self.labels).tolist()) - set(self.class_registry)
        if missing:
            raise ConsistencyError(
                f"class id {min(missing)} missing from class registry"
            )

    @property
    def num_samples(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    def class_ids(self) -> list[int]:
        """Class ids present in the samples, ascending."""
        return [int(c) for c in np.unique(self.labels)]


def _sidecar_path(path: str) -> str:
    return f"{path}.json"


def load_feature_file(path: str) -> FeatureDataset:
    """Decode a PFV1 file and its optional JSON sidecar.

    A missing sidecar is tolerated: names default to ``class_<id>`` and
    the split tag to ``train``.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise CorruptionError(
            f"truncated header: file ends at byte {len(raw)}, "
            f"need {_HEADER.size}"
        )
    magic, version, dim, count = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic bytes {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    if dim < 1:
        raise FormatError("header declares zero feature length")

    record = np.dtype([("cls", "<u4"), ("vec", "<f4", (dim,))])
    expected = _HEADER.size + count * record.itemsize
    if len(raw) != expected:
        offset = min(len(raw), expected)
        raise CorruptionError(
            f"payload ends at byte {len(raw)}, expected {expected}; "
            f"corruption at byte offset {offset}"
        )
    if count:
        records = np.frombuffer(raw, dtype=record, count=count, offset=_HEADER.size)
        labels = records["cls"].astype(np.int64)
        features = records["vec"].astype(np.float32)
    else:
        labels = np.empty(0, dtype=np.int64)
        features = np.empty((0, dim), dtype=np.float32)

    names: dict[int, str] = {}
    split_tag = "train"
    provenance = ""
    try:
        with open(_sidecar_path(path), "r", encoding="utf-8") as fh:
            side = json.load(fh)
        names = {int(k): str(v) for k, v in side.get("class_names", {}).items()}
        split_tag = side.get("split_tag", split_tag)
        provenance = side.get("provenance", provenance)
    except FileNotFoundError:
        pass
    except (json.JSONDecodeError, ValueError) as exc:
        raise FormatError(f"unreadable sidecar for {path}: {exc}") from exc
    for cid in np.unique(labels).tolist():
        names.setdefault(int(cid), f"class_{int(cid)}")

    return FeatureDataset(
        features=features,
        labels=labels,
        class_registry=names,
        split_tag=split_tag,
        provenance=provenance,
    )


def write_feature_file(dataset: FeatureDataset, path: str) -> None:
    """Encode a dataset as PFV1 plus its JSON sidecar.

    Loading the written file reproduces the dataset bit-exactly.
    """
    dataset.validate()
    n, dim = dataset.features.shape
    if dataset.labels.size and dataset.labels.max() > 0xFFFFFFFF:
        raise DataError("class id exceeds u32 range")
    record = np.dtype([("cls", "<u4"), ("vec", "<f4", (dim,))])
    records = np.empty(n, dtype=record)
    records["cls"] = dataset.labels
    records["vec"] = dataset.features
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dim, n))
        fh.write(records.tobytes())
    side = {
        "format": MAGIC.decode("ascii"),
        "version": FORMAT_VERSION,
        "class_names": {str(k): v for k, v in sorted(dataset.class_registry.items())},
        "split_tag": dataset.split_tag,
        "provenance": dataset.provenance,
    }
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class TaskPartition:
    """Disjoint assignment of every class to one of T tasks."""

    T: int
    assignment: dict[int, int]
    seed: int

    def __post_init__(self):
        if self.T < 1:
            raise ConfigurationError("task count must be positive")
        bad = [c for c, t in self.assignment.items() if not 0 <= t < self.T]
        if bad:
            raise ConsistencyError(f"class {bad[0]} assigned outside [0, T)")

    def classes_for_task(self, task: int) -> list[int]:
        return sorted(c for c, t in self.assignment.items() if t == task)

    def task_of(self, class_id: int) -> int:
        if class_id not in self.assignment:
            raise ConsistencyError(f"class id {class_id} not in partition")
        return self.assignment[class_id]

    @property
    def num_classes(self) -> int:
        return len(self.assignment)


def split_classes_into_tasks(class_ids, T: int, seed: int) -> TaskPartition:
    """Randomly deal classes into T tasks, leftovers all in task 0.

    The sorted id list is shuffled with a seeded splitmix64 Fisher-Yates
    pass, each task is dealt ``K // T`` ids in order, and the ``K % T``
    undealt ids are prepended to task 0.  Deterministic in (ids, T, seed).
    """
    ids = sorted(set(int(c) for c in class_ids))
    k = len(ids)
    if T < 1:
        raise ConfigurationError("task count must be positive")
    if k < T:
        raise ConfigurationError(f"cannot split {k} classes into {T} tasks")
    SplitMix64(seed).shuffle(ids)
    per = k // T
    assignment: dict[int, int] = {}
    for t in range(T):
        for c in ids[t * per:(t + 1) * per]:
            assignment[c] = t
    for c in ids[T * per:]:
        assignment[c] = 0
    return TaskPartition(T=T, assignment=assignment, seed=seed)


@dataclass
class TaskStream:
    """Per-task sample index lists over a fixed train/test dataset pair."""

    partition: TaskPartition
    train_indices: list = field(default_factory=list)  # per task, int64 arrays
    test_indices: list = field(default_factory=list)

    @property
    def num_tasks(self) -> int:
        return self.partition.T

    def task_train_indices(self, task: int) -> np.ndarray:
        return self.train_indices[task]

    def task_test_indices(self, task: int) -> np.ndarray:
        return self.test_indices[task]


def _index_by_task(dataset: FeatureDataset, partition: TaskPartition, role: str):
    present = set(dataset.class_ids())
    unknown = present - set(partition.assignment)
    if unknown:
        raise ConsistencyError(
            f"{role} class id {min(unknown)} absent from partition"
        )
    task_of = np.full(max(present, default=0) + 1, -1, dtype=np.int64)
    for c in present:
        task_of[c] = partition.assignment[c]
    sample_tasks = task_of[dataset.labels] if dataset.num_samples else np.empty(0, np.int64)
    return [
        np.flatnonzero(sample_tasks == t).astype(np.int64)
        for t in range(partition.T)
    ]


def build_task_stream(
    train: FeatureDataset, test: FeatureDataset, partition: TaskPartition
) -> TaskStream:
    """Group both splits into per-task index lists under one partition."""
    if train.dim != test.dim:
        raise ShapeError(
            f"train feature length {train.dim} != test feature length {test.dim}"
        )
    return TaskStream(
        partition=partition,
        train_indices=_index_by_task(train, partition, "train"),
        test_indices=_index_by_task(test, partition, "test"),
    )
