"""Image-generation manifests: one deterministic job per class replica.

A manifest freezes everything the generator needs: prompt text (NFC
normalized so job keys are stable across platforms), per-job seeds
derived from the manifest seed, and the sampler parameters.  Rebuilding
from the same inputs reproduces every job key and seed bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import asdict, dataclass, field

from ..errors import ConfigurationError, FormatError
from ..rng import derive_seed
from .realms import ClassSpec, RealmSpec

DEFAULT_STEPS = 40
DEFAULT_GUIDANCE = 2.0
DEFAULT_SIZE = 256

STYLE_DESCRIPTION = "description"
STYLE_CLASS_ONLY = "class_only"


def render_image_prompt(spec: ClassSpec, style: str, realm: RealmSpec) -> str:
    """Text-to-image prompt for one class.

    description style:  "A photograph of a {name}: {description}"
    class_only style:   "A photograph of a type of {realm name}: {name}"
    where {name} prefers "latin (common)" when both names exist.
    """
    name = spec.display_name()
    if style == STYLE_DESCRIPTION:
        return f"A photograph of a {name}: {spec.description}"
    if style == STYLE_CLASS_ONLY:
        if not realm.name:
            raise ConfigurationError("class_only style needs a realm name")
        return f"A photograph of a type of {realm.name}: {name}"
    raise ConfigurationError(f"unknown prompt style {style!r}")


@dataclass(frozen=True)
class GenerationJob:
    job_key: str
    class_index: int
    replica_index: int
    prompt: str
    seed: int
    image_size: int
    inference_steps: int
    guidance_scale: float
    output_path: str


@dataclass
class GenerationManifest:
    realm: RealmSpec
    n_per_class: int
    seed: int
    style: str
    jobs: list[GenerationJob] = field(default_factory=list)

    @property
    def num_classes(self) -> int:
        return len({j.class_index for j in self.jobs})


def _job_key(prompt: str, class_index: int, replica_index: int) -> str:
    payload = f"{prompt}\x1f{class_index}\x1f{replica_index}".encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def build_generation_manifest(
    realm: RealmSpec,
    specs: list[ClassSpec],
    n_per_class: int,
    seed: int = 0,
    style: str = STYLE_DESCRIPTION,
    image_size: int = DEFAULT_SIZE,
    inference_steps: int = DEFAULT_STEPS,
    guidance_scale: float = DEFAULT_GUIDANCE,
) -> GenerationManifest:
    """n_per_class jobs per spec, with stable keys and derived seeds."""
    if n_per_class < 1:
        raise ConfigurationError("replica count must be positive")
    if not specs:
        raise ConfigurationError("no class specs to generate from")
    if image_size < 1 or inference_steps < 1 or guidance_scale <= 0:
        raise ConfigurationError("sampler parameters must be positive")
    manifest = GenerationManifest(
        realm=realm, n_per_class=n_per_class, seed=seed, style=style
    )
    for class_index, spec in enumerate(specs):
        prompt = unicodedata.normalize(
            "NFC", render_image_prompt(spec, style, realm)
        )
        for replica in range(n_per_class):
            key = _job_key(prompt, class_index, replica)
            manifest.jobs.append(
                GenerationJob(
                    job_key=key,
                    class_index=class_index,
                    replica_index=replica,
                    prompt=prompt,
                    seed=derive_seed(seed, class_index, replica),
                    image_size=image_size,
                    inference_steps=inference_steps,
                    guidance_scale=guidance_scale,
                    output_path=f"{class_index:04d}/{key}.png",
                )
            )
    keys = {j.job_key for j in manifest.jobs}
    if len(keys) != len(manifest.jobs):
        raise ConfigurationError("job keys collide; duplicate class specs?")
    return manifest


def save_manifest(manifest: GenerationManifest, path: str) -> None:
    doc = {
        "realm": asdict(manifest.realm),
        "n_per_class": manifest.n_per_class,
        "seed": manifest.seed,
        "style": manifest.style,
        "jobs": [asdict(j) for j in manifest.jobs],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path: str) -> GenerationManifest:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"unreadable manifest {path}: {exc}") from exc
    try:
        manifest = GenerationManifest(
            realm=RealmSpec(**doc["realm"]),
            n_per_class=doc["n_per_class"],
            seed=doc["seed"],
            style=doc["style"],
            jobs=[GenerationJob(**j) for j in doc["jobs"]],
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"manifest {path} missing fields: {exc}") from exc
    return manifest
