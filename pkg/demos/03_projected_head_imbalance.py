"""Class imbalance and the weighted Gram correction.

Trains the random-projection ridge head twice on the same 50:1
imbalanced stream: once with plain Gram accumulation, once weighting
every sample by the inverse of its class count.  On a balanced test set
the weighted head recovers the rare classes noticeably better.

Run from the repository root:

    PYTHONPATH=src python3 demos/03_projected_head_imbalance.py
"""

import numpy as np

from cilkit import (
    RanPacState,
    balanced_accuracy,
    begin_task,
    end_task,
    init_projection,
    ranpac_observe_many,
    ranpac_predict_batch,
    ranpac_solve,
)
from cilkit.rng import normals

K, DIM, WIDTH = 10, 16, 256
COUNTS = [500, 324, 210, 136, 88, 57, 37, 24, 15, 10]  # geometric 50:1 ramp

means = normals(2024, K * DIM).reshape(K, DIM)
scales = np.linspace(0.5, 2.0, DIM)  # shared anisotropic covariance

def draw(counts, seed):
    labels = np.concatenate([np.full(n, c) for c, n in enumerate(counts)])
    noise = normals(seed, labels.size * DIM).reshape(-1, DIM) * scales
    return means[labels] + noise, labels

Xtr, ytr = draw(COUNTS, 2025)
Xte, yte = draw([100] * K, 2026)
print(f"train counts: {COUNTS} (ratio {COUNTS[0] // COUNTS[-1]}:1), "
      f"test balanced at 100/class")

projection = init_projection(DIM, WIDTH, seed=77)
for balanced in (False, True):
    state = RanPacState(projection=projection, balanced=balanced)
    begin_task(state)
    ranpac_observe_many(state, ytr, Xtr)
    end_task(state)
    lam = 1e-2 * float(np.trace(state.gram)) / WIDTH
    head = ranpac_solve(state, lam)
    pred = ranpac_predict_batch(head, projection, Xte)
    overall = float(np.mean(pred == yte))
    per_class = [float(np.mean(pred[yte == c] == c)) for c in range(K)]
    mode = "weighted" if balanced else "plain   "
    print(f"\n{mode} gram: balanced accuracy "
          f"{balanced_accuracy(pred, yte):.3f} (plain accuracy {overall:.3f})")
    print("  per-class recall, frequent to rare:")
    print("  " + " ".join(f"{r:.2f}" for r in per_class))
