from __future__ import annotations

import hashlib
import os

import pytest

from cilkit.errors import ConfigurationError, FormatError
from cilkit.pipeline import (
    DEFAULT_GUIDANCE,
    DEFAULT_SIZE,
    DEFAULT_STEPS,
    ClassSpec,
    RealmSpec,
    build_generation_manifest,
    load_manifest,
    render_image_prompt,
    save_manifest,
)
from cilkit.rng import derive_seed

from test_parsing import BIRDS, load_fixture_specs

PARROT = ClassSpec(
    1,
    "Pionus menstruus",
    "Blue-headed Parrot",
    "Medium-sized parrot with blue head, green body, and red undertail coverts.",
    "Psittaciformes",
)


def test_description_prompt_text():
    assert render_image_prompt(PARROT, "description", BIRDS) == (
        "A photograph of a Pionus menstruus (Blue-headed Parrot): "
        "Medium-sized parrot with blue head, green body, and red "
        "undertail coverts."
    )


def test_class_only_prompt_text():
    assert render_image_prompt(PARROT, "class_only", BIRDS) == (
        "A photograph of a type of Birds: Pionus menstruus (Blue-headed Parrot)"
    )


def test_latin_only_prompt_text():
    eagle = ClassSpec(2, "Aquila chrysaetos", None, "Large dark eagle.", "x")
    assert render_image_prompt(eagle, "description", BIRDS) == (
        "A photograph of a Aquila chrysaetos: Large dark eagle."
    )


def test_unknown_style_rejected():
    with pytest.raises(ConfigurationError):
        render_image_prompt(PARROT, "watercolour", BIRDS)


def test_manifest_job_count_and_defaults():
    specs, _ = load_fixture_specs()
    manifest = build_generation_manifest(BIRDS, specs, n_per_class=200, seed=7)
    assert manifest.num_classes == 60
    assert len(manifest.jobs) == 60 * 200
    for job in manifest.jobs:
        assert job.inference_steps == DEFAULT_STEPS == 40
        assert job.guidance_scale == DEFAULT_GUIDANCE == 2.0
        assert job.image_size == DEFAULT_SIZE == 256
    assert len({j.job_key for j in manifest.jobs}) == len(manifest.jobs)


def test_job_key_is_prompt_hash():
    manifest = build_generation_manifest(BIRDS, [PARROT], n_per_class=2, seed=7)
    job = manifest.jobs[1]
    payload = f"{job.prompt}\x1f{job.class_index}\x1f{job.replica_index}"
    assert job.job_key == hashlib.sha256(payload.encode("utf-8")).hexdigest()
    assert job.output_path == f"0000/{job.job_key}.png"


def test_job_seeds_derive_from_manifest_seed():
    specs, _ = load_fixture_specs()
    manifest = build_generation_manifest(BIRDS, specs[:3], n_per_class=4, seed=99)
    for job in manifest.jobs:
        assert job.seed == derive_seed(99, job.class_index, job.replica_index)


def test_manifest_determinism():
    specs, _ = load_fixture_specs()
    a = build_generation_manifest(BIRDS, specs, n_per_class=5, seed=3)
    b = build_generation_manifest(BIRDS, specs, n_per_class=5, seed=3)
    assert a.jobs == b.jobs
    c = build_generation_manifest(BIRDS, specs, n_per_class=5, seed=4)
    assert [j.seed for j in c.jobs] != [j.seed for j in a.jobs]
    assert [j.job_key for j in c.jobs] == [j.job_key for j in a.jobs]


def test_invalid_parameters():
    with pytest.raises(ConfigurationError):
        build_generation_manifest(BIRDS, [PARROT], n_per_class=0, seed=1)
    with pytest.raises(ConfigurationError):
        build_generation_manifest(BIRDS, [], n_per_class=5, seed=1)
    with pytest.raises(ConfigurationError):
        build_generation_manifest(BIRDS, [PARROT], n_per_class=1, seed=1,
                                  image_size=0)


def test_manifest_round_trip(tmp_path):
    specs, _ = load_fixture_specs()
    manifest = build_generation_manifest(BIRDS, specs[:5], n_per_class=3, seed=11)
    path = str(tmp_path / "manifest.json")
    save_manifest(manifest, path)
    back = load_manifest(path)
    assert back.realm == manifest.realm
    assert back.seed == manifest.seed
    assert back.style == manifest.style
    assert back.jobs == manifest.jobs


def test_load_manifest_rejects_garbage(tmp_path):
    path = str(tmp_path / "bad.json")
    with open(path, "w") as fh:
        fh.write("{not json")
    with pytest.raises(FormatError):
        load_manifest(path)
    with open(path, "w") as fh:
        fh.write('{"realm": "Birds"}')
    with pytest.raises(FormatError):
        load_manifest(path)


def test_larger_catalogue_count():
    base, _ = load_fixture_specs()
    specs = []
    idx = 0
    while len(specs) < 620:
        src = base[idx % len(base)]
        specs.append(
            ClassSpec(
                item_id=idx + 1,
                latin_name=f"{src.latin_name} v{idx}",
                common_name=src.common_name,
                description=src.description,
                source_subtype=src.source_subtype,
            )
        )
        idx += 1
    manifest = build_generation_manifest(BIRDS, specs, n_per_class=200, seed=1)
    assert len(manifest.jobs) == 124_000
