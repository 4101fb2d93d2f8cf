"""End-to-end experiment runs: feature files in, report tables out.

The run loop enforces the streaming contract structurally: each task's
training slice is materialized once, handed to the learner, and never
referenced again.  Evaluation after task t covers the test splits of
tasks 1..t, so the accuracy matrix fills one lower-triangular row per
task.

Report files come in two shapes.  The JSON report round-trips the whole
result (config echo, matrix, averages, timings, version tag).  The CSV
is the deterministic table: identical config and seed produce a
byte-identical file, so timings stay out of it and every float is
printed with 17 significant digits.  CSV columns:

    method, dataset, tasks, seed, kind, after_task, eval_task, value

with one ``accuracy`` row per matrix cell (1-based task indices), one
``avg_accuracy`` row per task, and a single ``final_avg_accuracy`` row.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import (
    ConfigurationError,
    ConsistencyError,
    FormatError,
    ProtocolError,
)
from .feature_store import (
    FeatureDataset,
    build_task_stream,
    load_feature_file,
    split_classes_into_tasks,
)
from .learners import (
    ClassStats,
    LdaState,
    lda_finalize,
    lda_observe_many,
    lda_predict_batch,
    ncm_predict_batch,
    observe_many,
)
from .metrics import AccuracyMatrix, average_accuracy, evaluate_task
from .ranpac import (
    RanPacState,
    begin_task,
    default_lambda_grid,
    end_task,
    init_projection,
    ranpac_observe_many,
    ranpac_predict_batch,
    ranpac_solve,
)

LEARNERS = ("ncm", "lda", "ranpac")


@dataclass
class ExperimentConfig:
    train_path: str
    test_path: str
    tasks: int = 1
    seed: int = 0
    learner: str = "ncm"
    alpha: float = 0.1  # lda shrinkage
    width: int = 10000  # ranpac projection width M
    lam: float = None  # ranpac ridge; None selects from the default grid
    balanced: bool = True  # ranpac per-class weighting
    output_dir: str = "."
    prototype_path: str = None  # fixed prototypes instead of learned means
    dataset_tag: str = ""

    def __post_init__(self):
        if not self.dataset_tag and self.train_path:
            base = os.path.basename(self.train_path)
            self.dataset_tag = base.rsplit(".", 1)[0]

    def validate(self, check_files: bool = True) -> None:
        if self.tasks < 1:
            raise ConfigurationError("task count must be at least 1")
        if self.learner not in LEARNERS:
            raise ConfigurationError(
                f"unknown learner {self.learner!r}; choose from {LEARNERS}"
            )
        if self.learner == "lda" and not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("alpha must lie in [0, 1]")
        if self.learner == "ranpac":
            if self.width < 1:
                raise ConfigurationError("projection width must be positive")
            if self.lam is not None and self.lam <= 0.0:
                raise ConfigurationError("lambda must be positive")
        if check_files:
            for label, path in (
                ("train", self.train_path),
                ("test", self.test_path),
                ("prototype", self.prototype_path),
            ):
                if path is None and label == "prototype":
                    continue
                if not path or not os.path.exists(path):
                    raise ConfigurationError(
                        f"{label} feature file not found: {path!r}"
                    )


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def load_experiment_config(path: str = None, overrides: dict = None) -> ExperimentConfig:
    """JSON config file plus overrides; override values win."""
    values = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"unreadable config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise FormatError(f"config {path} must hold a JSON object")
        unknown = set(doc) - _CONFIG_FIELDS
        if unknown:
            raise ConfigurationError(
                f"unknown config keys: {', '.join(sorted(unknown))}"
            )
        values.update(doc)
    for key, val in (overrides or {}).items():
        if key not in _CONFIG_FIELDS:
            raise ConfigurationError(f"unknown config key {key!r}")
        if val is not None:
            values[key] = val
    if "train_path" not in values or "test_path" not in values:
        raise ConfigurationError("train_path and test_path are required")
    return ExperimentConfig(**values)


class _NcmAdapter:
    def __init__(self, dim):
        self.stats = ClassStats(dim=dim)

    def observe_task(self, labels, features):
        observe_many(self.stats, labels, features)

    def finish_task(self):
        pass

    def predict(self, features):
        return ncm_predict_batch(self.stats, features)


class _FixedPrototypeAdapter:
    """Zero-shot mode: cosine scoring against externally supplied means,
    restricted to the classes revealed so far."""

    def __init__(self, prototypes: FeatureDataset):
        stats = ClassStats(dim=prototypes.dim)
        observe_many(stats, prototypes.labels, prototypes.features)
        self._means = {c: stats.mean(c) for c in stats.classes()}
        self._dim = prototypes.dim
        self._seen = set()

    def observe_task(self, labels, features):
        for cid in np.unique(np.asarray(labels)):
            cid = int(cid)
            if cid not in self._means:
                raise ConsistencyError(
                    f"class {cid} has no prototype in the prototype file"
                )
            self._seen.add(cid)

    def finish_task(self):
        pass

    def predict(self, features):
        snapshot = ClassStats(dim=self._dim)
        for cid in sorted(self._seen):
            snapshot.counts[cid] = 1
            snapshot.sums[cid] = self._means[cid]
        return ncm_predict_batch(snapshot, features)


class _LdaAdapter:
    def __init__(self, dim, alpha):
        self.state = LdaState(dim=dim)
        self.alpha = alpha
        self.head = None

    def observe_task(self, labels, features):
        lda_observe_many(self.state, labels, features)

    def finish_task(self):
        self.head = lda_finalize(self.state, alpha=self.alpha)

    def predict(self, features):
        return lda_predict_batch(self.head, features)


class _RanpacAdapter:
    def __init__(self, dim, width, seed, lam, balanced):
        self.state = RanPacState(
            projection=init_projection(dim, width, seed), balanced=balanced
        )
        self.lam = lam
        self.head = None

    def observe_task(self, labels, features):
        if not self.state.task_open:
            begin_task(self.state)
        ranpac_observe_many(self.state, labels, features)

    def finish_task(self):
        end_task(
            self.state,
            lambda_candidates=None if self.lam is not None else default_lambda_grid,
        )
        lam = self.lam if self.lam is not None else self.state.selected_lambda
        self.head = ranpac_solve(self.state, lam)

    def predict(self, features):
        return ranpac_predict_batch(self.head, self.state.projection, features)


def _make_adapter(config: ExperimentConfig, dim: int):
    if config.prototype_path is not None:
        return _FixedPrototypeAdapter(load_feature_file(config.prototype_path))
    if config.learner == "ncm":
        return _NcmAdapter(dim)
    if config.learner == "lda":
        return _LdaAdapter(dim, config.alpha)
    return _RanpacAdapter(
        dim, config.width, config.seed, config.lam, config.balanced
    )


@dataclass
class ExperimentReport:
    config: dict
    matrix: AccuracyMatrix
    avg_accuracies: list  # A_t for t = 1..T
    final_avg_accuracy: float
    task_seconds: list
    version: str = __version__

    def check(self) -> None:
        """Stored summary must agree with a recompute from the matrix."""
        last = self.matrix.T - 1
        if average_accuracy(self.matrix, last) != self.final_avg_accuracy:
            raise ConsistencyError(
                "final average accuracy disagrees with the matrix row"
            )


def run_experiment(config: ExperimentConfig, datasets=None) -> ExperimentReport:
    """Train task-by-task, evaluate after every task, report the matrix.

    datasets, when given, is a pre-loaded (train, test) pair; file paths
    in the config are then ignored for loading (tests use this to wrap
    the arrays with access trackers).
    """
    config.validate(check_files=datasets is None)
    if datasets is None:
        train = load_feature_file(config.train_path)
        test = load_feature_file(config.test_path)
    else:
        train, test = datasets
    class_ids = [int(c) for c in np.unique(train.labels)]
    partition = split_classes_into_tasks(class_ids, config.tasks, config.seed)
    stream = build_task_stream(train, test, partition)
    adapter = _make_adapter(config, train.dim)

    matrix = AccuracyMatrix(T=config.tasks)
    averages, seconds = [], []
    for t in range(config.tasks):
        started = time.perf_counter()
        idx = stream.task_train_indices(t)
        try:
            adapter.observe_task(train.labels[idx], train.features[idx])
            adapter.finish_task()
        except ProtocolError as exc:
            raise ProtocolError(f"task {t + 1}: {exc}") from exc
        for i in range(t + 1):
            test_idx = stream.task_test_indices(i)
            acc = evaluate_task(
                adapter.predict, test.features[test_idx], test.labels[test_idx]
            )
            matrix.record(t, i, acc)
        averages.append(average_accuracy(matrix, t))
        seconds.append(time.perf_counter() - started)

    report = ExperimentReport(
        config=dataclasses.asdict(config),
        matrix=matrix,
        avg_accuracies=averages,
        final_avg_accuracy=averages[-1],
        task_seconds=seconds,
    )
    report.check()
    return report


def _fmt(value: float) -> str:
    return "%.17g" % value


def report_csv_text(report: ExperimentReport) -> str:
    cfg = report.config
    prefix = f"{cfg['learner']},{cfg['dataset_tag']},{cfg['tasks']},{cfg['seed']}"
    lines = ["method,dataset,tasks,seed,kind,after_task,eval_task,value"]
    for t in range(report.matrix.T):
        for i in range(t + 1):
            value = report.matrix.get(t, i)
            lines.append(f"{prefix},accuracy,{t + 1},{i + 1},{_fmt(value)}")
    for t, value in enumerate(report.avg_accuracies):
        lines.append(f"{prefix},avg_accuracy,{t + 1},,{_fmt(value)}")
    lines.append(
        f"{prefix},final_avg_accuracy,,,{_fmt(report.final_avg_accuracy)}"
    )
    return "\n".join(lines) + "\n"


def emit_report(
    report: ExperimentReport,
    output_dir: str,
    formats=("csv", "json"),
    basename: str = "report",
) -> dict:
    """Write the report files and return {format: path}."""
    unknown = set(formats) - {"csv", "json"}
    if unknown:
        raise ConfigurationError(f"unknown report formats: {sorted(unknown)}")
    os.makedirs(output_dir, exist_ok=True)
    paths = {}
    if "csv" in formats:
        path = os.path.join(output_dir, f"{basename}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(report_csv_text(report))
        paths["csv"] = path
    if "json" in formats:
        path = os.path.join(output_dir, f"{basename}.json")
        doc = {
            "config": report.config,
            "version": report.version,
            "tasks": report.matrix.T,
            "matrix": [
                [t + 1, i + 1, report.matrix.get(t, i)]
                for t in range(report.matrix.T)
                for i in range(t + 1)
            ],
            "avg_accuracies": list(report.avg_accuracies),
            "final_avg_accuracy": report.final_avg_accuracy,
            "task_seconds": list(report.task_seconds),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths["json"] = path
    return paths


def load_report(path: str) -> ExperimentReport:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"unreadable report {path}: {exc}") from exc
    try:
        matrix = AccuracyMatrix(T=doc["tasks"])
        for t, i, value in doc["matrix"]:
            matrix.record(t - 1, i - 1, value)
        report = ExperimentReport(
            config=doc["config"],
            matrix=matrix,
            avg_accuracies=doc["avg_accuracies"],
            final_avg_accuracy=doc["final_avg_accuracy"],
            task_seconds=doc["task_seconds"],
            version=doc["version"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"report {path} missing fields: {exc}") from exc
    return report
