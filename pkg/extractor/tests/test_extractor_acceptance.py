"""Acceptance check for the extractor: PFV1 interchange on a 10-image set.

The fixture directory mixes sizes, color modes, and file formats.  The
exported file must load through the feature-file toolkit with N=10 and
the default backbone's embedding width, and re-extraction must agree to
1e-5 relative.
"""

from __future__ import annotations

import numpy as np

from cilkit import load_feature_file
from pfv_extractor import ExtractionJob, extract_features

from fixture_images import write_image


def announce(capsys, line: str) -> None:
    with capsys.disabled():
        print(line)


def test_acceptance_extractor_roundtrip(tmp_path, capsys):
    specs = [
        ("00.png", 320, 240, "RGB", "wren"),
        ("01.png", 240, 320, "RGB", "wren"),
        ("02.jpg", 256, 256, "RGB", "wren"),
        ("03.png", 100, 80, "RGB", "owl"),
        ("04.png", 64, 200, "L", "owl"),
        ("05.png", 300, 300, "RGBA", "owl"),
        ("06.jpg", 224, 224, "RGB", "finch"),
        ("07.png", 130, 260, "RGB", "finch"),
        ("08.png", 256, 128, "L", "finch"),
        ("09.png", 500, 375, "RGB", "finch"),
    ]
    rows = [
        (write_image(tmp_path / name, w, h, seed=100 + i, mode=mode), cls)
        for i, (name, w, h, mode, cls) in enumerate(specs)
    ]

    def run(tag: str) -> str:
        job = ExtractionJob(
            image_paths=[p for p, _ in rows],
            class_names=[n for _, n in rows],
            output_path=str(tmp_path / f"{tag}.pfv"),
            batch_size=4,
        )
        return extract_features(job).output_path

    first = load_feature_file(run("first"))
    assert first.num_samples == 10
    assert first.dim == 2048
    assert first.labels.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2, 2]
    assert first.class_registry == {0: "wren", 1: "owl", 2: "finch"}
    assert np.isfinite(first.features).all()

    second = load_feature_file(run("second"))
    diff = np.linalg.norm(second.features - first.features)
    rel = diff / np.linalg.norm(first.features)
    assert rel <= 1e-5

    announce(
        capsys,
        "ACCEPTANCE 9 PASS: extractor N=10 L=2048 loads via "
        f"load_feature_file; re-extraction rel diff {rel:.3e} <= 1e-5",
    )
