"""Feature files and task streams.

Builds a small labeled Gaussian dataset, writes it in the binary
feature format, reads it back bit-for-bit, and deals its classes into
tasks the way the experiment harness does.

Run from the repository root:

    PYTHONPATH=src python3 demos/01_feature_files.py
"""

import os
import tempfile

import numpy as np

from cilkit import (
    FeatureDataset,
    build_task_stream,
    load_feature_file,
    split_classes_into_tasks,
    write_feature_file,
)
from cilkit.rng import normals

K, DIM, PER_CLASS = 8, 12, 25

# a mean per class, then per-class clouds around it
means = normals(7, K * DIM).reshape(K, DIM) * 2.5
noise = normals(8, K * PER_CLASS * DIM).reshape(K * PER_CLASS, DIM)
labels = np.repeat(np.arange(K), PER_CLASS)
features = means[labels] + noise

dataset = FeatureDataset(
    features=features,
    labels=labels,
    class_registry={c: f"cluster_{c}" for c in range(K)},
    split_tag="train",
)

workdir = tempfile.mkdtemp(prefix="demo_features_")
path = os.path.join(workdir, "toy.pfv")
write_feature_file(dataset, path)
print(f"wrote {dataset.num_samples} x {dataset.dim} features to {path}")
print(f"file size: {os.path.getsize(path)} bytes "
      f"(20-byte header + N * (4 + 4L))")

back = load_feature_file(path)
assert np.array_equal(back.features, dataset.features)
assert np.array_equal(back.labels, dataset.labels)
print("round trip is bit-exact; sidecar carries the class names:")
print(f"  {back.class_registry}")

# the same seed always deals classes to tasks the same way
partition = split_classes_into_tasks(back.class_ids(), T=4, seed=11)
for t in range(partition.T):
    print(f"task {t + 1}: classes {partition.classes_for_task(t)}")

stream = build_task_stream(back, back, partition)
sizes = [len(stream.task_train_indices(t)) for t in range(4)]
print(f"per-task sample counts: {sizes} (disjoint, cover everything)")
