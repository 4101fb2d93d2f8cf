"""Streaming learners never forget.

Feeds five disjoint-class tasks to the mean-based and discriminant
learners, evaluates task-agnostically after each task, and then shows
the punchline: the final heads are the same as if all data had arrived
at once, because everything reduces to per-class sufficient statistics.

Run from the repository root:

    PYTHONPATH=src python3 demos/02_streaming_learners.py
"""

import numpy as np

from cilkit import (
    AccuracyMatrix,
    ClassStats,
    LdaState,
    average_accuracy,
    evaluate_task,
    lda_finalize,
    lda_observe_many,
    lda_predict_batch,
    ncm_predict_batch,
    observe_many,
)
from cilkit.rng import normals

K, DIM, TRAIN_PER, TEST_PER, T = 20, 32, 15, 5, 5

means = normals(100, K * DIM).reshape(K, DIM) * 1.1
def draw(per_class, seed):
    labels = np.repeat(np.arange(K), per_class)
    noise = normals(seed, K * per_class * DIM).reshape(-1, DIM)
    return means[labels] + noise, labels

Xtr, ytr = draw(TRAIN_PER, 101)
Xte, yte = draw(TEST_PER, 102)
task_of = {c: c % T for c in range(K)}  # 4 classes per task

ncm = ClassStats(dim=DIM)
lda = LdaState(dim=DIM)
matrix = AccuracyMatrix(T=T)

for t in range(T):
    train_mask = np.array([task_of[int(c)] == t for c in ytr])
    observe_many(ncm, ytr[train_mask], Xtr[train_mask])
    lda_observe_many(lda, ytr[train_mask], Xtr[train_mask])
    for i in range(t + 1):
        test_mask = np.array([task_of[int(c)] == i for c in yte])
        acc = evaluate_task(
            lambda X: ncm_predict_batch(ncm, X), Xte[test_mask], yte[test_mask]
        )
        matrix.record(t, i, acc)
    row = ", ".join(f"{v:.3f}" for v in matrix.row(t))
    print(f"after task {t + 1}: R[{t + 1}][1..{t + 1}] = [{row}]  "
          f"A_{t + 1} = {average_accuracy(matrix, t):.3f}")

# the forgetting-free property, stated as arithmetic
joint = ClassStats(dim=DIM)
observe_many(joint, ytr, Xtr)
_, streamed_means = ncm.mean_matrix()
_, joint_means = joint.mean_matrix()
drift = np.linalg.norm(streamed_means - joint_means) / np.linalg.norm(joint_means)
print(f"\nstreamed vs joint class means: relative difference {drift:.2e}")

head = lda_finalize(lda, alpha=0.1)
joint_lda = LdaState(dim=DIM)
lda_observe_many(joint_lda, ytr, Xtr)
joint_head = lda_finalize(joint_lda, alpha=0.1)
agree = np.mean(lda_predict_batch(head, Xte) == lda_predict_batch(joint_head, Xte))
print(f"lda streamed vs joint: predictions agree on {agree:.1%} of the test set")
