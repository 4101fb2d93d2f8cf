"""Streaming class-incremental learning toolkit.

Learners accumulate per-class sufficient statistics, so feeding tasks
one at a time or all at once produces the same head; nothing retains
past-task samples.  Feature vectors travel in a small binary file
format, experiments run through the harness or the ``cilkit`` CLI, and
the ``pipeline`` subpackage builds synthetic-image datasets from
recorded chat transcripts and an image-generation client.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .checkpoint import load_checkpoint, save_checkpoint
from .errors import (
    CilkitError,
    ConfigurationError,
    ConsistencyError,
    CorruptionError,
    DataError,
    DegenerateInputError,
    EvaluationError,
    FormatError,
    NumericError,
    ParseError,
    PipelineError,
    ProtocolError,
    ShapeError,
    SingularityError,
)
from .feature_store import (
    FeatureDataset,
    TaskPartition,
    TaskStream,
    build_task_stream,
    load_feature_file,
    split_classes_into_tasks,
    write_feature_file,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    emit_report,
    load_experiment_config,
    load_report,
    run_experiment,
)
from .learners import (
    ClassStats,
    LdaHead,
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
from .metrics import (
    AccuracyMatrix,
    average_accuracy,
    balanced_accuracy,
    evaluate_task,
    final_average_accuracy,
)
from .ranpac import (
    Projection,
    RanPacHead,
    RanPacState,
    begin_task,
    default_lambda_grid,
    end_task,
    init_projection,
    project,
    project_batch,
    ranpac_observe,
    ranpac_observe_many,
    ranpac_predict,
    ranpac_predict_batch,
    ranpac_solve,
    select_lambda,
)
from .rng import SplitMix64, derive_seed, normals, uniforms

__all__ = [
    "__version__",
    # errors
    "CilkitError", "ConfigurationError", "ConsistencyError",
    "CorruptionError", "DataError", "DegenerateInputError",
    "EvaluationError", "FormatError", "NumericError", "ParseError",
    "PipelineError", "ProtocolError", "ShapeError", "SingularityError",
    # feature files and task streams
    "FeatureDataset", "TaskPartition", "TaskStream", "build_task_stream",
    "load_feature_file", "split_classes_into_tasks", "write_feature_file",
    # learners
    "ClassStats", "LdaHead", "LdaState", "fixed_prototype_classify",
    "lda_finalize", "lda_observe", "lda_observe_many", "lda_predict",
    "lda_predict_batch", "ncm_observe", "ncm_predict", "ncm_predict_batch",
    "observe_many",
    # projected-feature learner
    "Projection", "RanPacHead", "RanPacState", "begin_task",
    "default_lambda_grid", "end_task", "init_projection", "project",
    "project_batch", "ranpac_observe", "ranpac_observe_many",
    "ranpac_predict", "ranpac_predict_batch", "ranpac_solve",
    "select_lambda",
    # metrics
    "AccuracyMatrix", "average_accuracy", "balanced_accuracy",
    "evaluate_task", "final_average_accuracy",
    # checkpoints
    "load_checkpoint", "save_checkpoint",
    # harness
    "ExperimentConfig", "ExperimentReport", "emit_report",
    "load_experiment_config", "load_report", "run_experiment",
    # seeded generation
    "SplitMix64", "derive_seed", "normals", "uniforms",
]
