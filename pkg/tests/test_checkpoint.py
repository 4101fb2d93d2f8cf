from __future__ import annotations

import numpy as np
import pytest

from cilkit.checkpoint import load_checkpoint, save_checkpoint
from cilkit.errors import CorruptionError, DataError, FormatError, ProtocolError
from cilkit.learners import (
    ClassStats,
    lda_finalize,
    lda_observe,
    ncm_observe,
    ncm_predict,
)
from cilkit.ranpac import (
    RanPacState,
    begin_task,
    end_task,
    init_projection,
    ranpac_observe_many,
    ranpac_predict,
    ranpac_solve,
)
from cilkit.rng import SplitMix64, normals


def make_class_stats(n=40, dim=5, seed=3):
    stats = ClassStats(dim=dim)
    vecs = normals(seed, n * dim).reshape(n, dim)
    rng = SplitMix64(seed + 1)
    for i in range(n):
        ncm_observe(stats, (rng.next_below(4), vecs[i]))
    return stats


def trained_ranpac(seed=9, dim=6, width=24):
    state = RanPacState(projection=init_projection(dim, width, seed))
    rng = SplitMix64(seed)
    for task, classes in enumerate([(0, 1), (2, 3)]):
        begin_task(state)
        feats = normals(seed + task + 1, 30 * dim).reshape(30, dim)
        labels = [classes[rng.next_below(2)] for _ in range(30)]
        for c in classes:  # make sure both appear
            labels[c % 30] = c
        ranpac_observe_many(state, labels, feats)
        end_task(state)
    return state


def test_class_stats_round_trip(tmp_path):
    stats = make_class_stats()
    path = str(tmp_path / "stats.ck")
    save_checkpoint(stats, path)
    back = load_checkpoint(path)
    assert isinstance(back, ClassStats)
    assert back.dim == stats.dim
    assert back.counts == stats.counts
    for cid in stats.classes():
        assert np.array_equal(back.sums[cid], stats.sums[cid])
    probe = normals(77, stats.dim)
    assert ncm_predict(back, probe) == ncm_predict(stats, probe)


def test_save_is_deterministic(tmp_path):
    stats = make_class_stats()
    a, b = str(tmp_path / "a.ck"), str(tmp_path / "b.ck")
    save_checkpoint(stats, a)
    save_checkpoint(load_checkpoint(a), b)
    assert open(a, "rb").read() == open(b, "rb").read()


def test_lda_head_round_trip(tmp_path):
    from cilkit.learners import LdaState

    lstate = LdaState(dim=4)
    vecs = normals(11, 60 * 4).reshape(60, 4)
    rng = SplitMix64(12)
    for i in range(60):
        lda_observe(lstate, (rng.next_below(3), vecs[i]))
    head = lda_finalize(lstate, alpha=0.2)
    path = str(tmp_path / "head.ck")
    save_checkpoint(head, path)
    back = load_checkpoint(path)
    assert back.class_ids == head.class_ids
    assert back.alpha == head.alpha
    assert np.array_equal(back.weights, head.weights)
    assert np.array_equal(back.biases, head.biases)


def test_ranpac_state_round_trip(tmp_path):
    state = trained_ranpac()
    path = str(tmp_path / "state.ck")
    save_checkpoint(state, path)
    back = load_checkpoint(path)
    assert np.array_equal(back.gram, state.gram)
    assert back.counts == state.counts
    assert back.folded_tasks == 2
    assert back.balanced == state.balanced
    assert np.array_equal(back.projection.weight, state.projection.weight)

    # the restored state keeps learning and solves to the same head
    feats = normals(55, 20 * 6).reshape(20, 6)
    for st in (state, back):
        begin_task(st)
        ranpac_observe_many(st, [4] * 10 + [5] * 10, feats)
        end_task(st)
    ha = ranpac_solve(state, 0.5)
    hb = ranpac_solve(back, 0.5)
    assert np.allclose(ha.output_weights, hb.output_weights, rtol=0, atol=0)


def test_ranpac_state_closed_classes_survive(tmp_path):
    state = trained_ranpac()
    path = str(tmp_path / "state.ck")
    save_checkpoint(state, path)
    back = load_checkpoint(path)
    begin_task(back)
    with pytest.raises(ProtocolError):
        ranpac_observe_many(back, [0, 4], normals(1, 12).reshape(2, 6))


def test_open_task_refuses_to_save(tmp_path):
    state = trained_ranpac()
    begin_task(state)
    ranpac_observe_many(state, [7], normals(2, 6).reshape(1, 6))
    with pytest.raises(ProtocolError):
        save_checkpoint(state, str(tmp_path / "x.ck"))


def test_ranpac_head_round_trip(tmp_path):
    state = trained_ranpac()
    head = ranpac_solve(state, 0.25)
    path = str(tmp_path / "head.ck")
    save_checkpoint(head, path)
    back = load_checkpoint(path)
    assert back.class_ids == head.class_ids
    assert back.lam == head.lam
    assert back.residual == head.residual
    assert np.array_equal(back.output_weights, head.output_weights)
    # stored arrays are bit-equal; score sums may differ in the last ulp
    # because the reloaded array's memory layout changes the matmul order
    probe = normals(8, 6)
    cls_a, scores_a = ranpac_predict(back, state.projection, probe)
    cls_b, scores_b = ranpac_predict(head, state.projection, probe)
    assert cls_a == cls_b
    for cid in scores_a:
        assert scores_a[cid] == pytest.approx(scores_b[cid], rel=1e-12)


def test_format_errors(tmp_path):
    path = tmp_path / "x.ck"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(FormatError):
        load_checkpoint(str(path))
    path.write_bytes(b"CKV1" + (2).to_bytes(4, "little") + (1).to_bytes(4, "little"))
    with pytest.raises(FormatError):
        load_checkpoint(str(path))
    path.write_bytes(b"CKV1" + (1).to_bytes(4, "little") + (99).to_bytes(4, "little"))
    with pytest.raises(FormatError):
        load_checkpoint(str(path))


def test_truncation_names_offset(tmp_path):
    stats = make_class_stats()
    path = tmp_path / "stats.ck"
    save_checkpoint(stats, str(path))
    raw = path.read_bytes()
    path.write_bytes(raw[:-9])
    with pytest.raises(CorruptionError, match=f"byte offset {len(raw) - 9}"):
        load_checkpoint(str(path))
    path.write_bytes(b"CK")
    with pytest.raises(CorruptionError, match="truncated header"):
        load_checkpoint(str(path))


def test_trailing_bytes_rejected(tmp_path):
    stats = make_class_stats()
    path = tmp_path / "stats.ck"
    save_checkpoint(stats, str(path))
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(FormatError, match="trailing"):
        load_checkpoint(str(path))


def test_unsupported_object(tmp_path):
    with pytest.raises(DataError):
        save_checkpoint({"not": "a state"}, str(tmp_path / "x.ck"))


def test_huge_class_id_rejected(tmp_path):
    stats = ClassStats(dim=2)
    ncm_observe(stats, (2**32, np.ones(2)))
    with pytest.raises(DataError):
        save_checkpoint(stats, str(tmp_path / "x.ck"))
