"""Image-manifest feature extraction into PFV1 files.

An :class:`ExtractionJob` names images with their class names, a
backbone tag, and an output path.  :func:`extract_features` pushes the
decoded images through the frozen backbone in manifest order and writes
one pooled feature vector per readable image.  Class ids are assigned
densely, in order of each class name's first exported record.
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import torch
from PIL import Image
from torchvision import transforms

from .backbones import backbone_width, build_backbone
from .errors import ConfigurationError, JobError, ManifestError
from .pfv import write_pfv1

log = logging.getLogger("pfv_extractor")

RESIZE = 256
CROP = 224
CHANNEL_MEAN = (0.485, 0.456, 0.406)
CHANNEL_STD = (0.229, 0.224, 0.225)

_PREPROCESS = transforms.Compose(
    [
        transforms.Resize(RESIZE),
        transforms.CenterCrop(CROP),
        transforms.ToTensor(),
        transforms.Normalize(CHANNEL_MEAN, CHANNEL_STD),
    ]
)


@dataclass
class ExtractionJob:
    """One manifest-to-feature-file export."""

    image_paths: list
    class_names: list
    output_path: str
    backbone_tag: str = "resnet50"
    batch_size: int = 8
    weights_path: str | None = None
    split_tag: str = "train"

    def __post_init__(self):
        if len(self.image_paths) != len(self.class_names):
            raise ManifestError("each image path needs exactly one class name")
        if not self.image_paths:
            raise ManifestError("job lists no images")
        if self.batch_size < 1:
            raise ConfigurationError("batch size must be positive")
        backbone_width(self.backbone_tag)
        for path in self.image_paths:
            if not os.path.isfile(path):
                raise ManifestError(f"image path does not exist: {path}")


@dataclass
class ExtractionResult:
    output_path: str
    num_exported: int
    embedding_width: int
    class_names: dict[int, str]
    warnings: list = field(default_factory=list)


def read_image_manifest(path: str) -> list:
    """Parse a ``path,class_name`` CSV into (path, class_name) pairs.

    Relative image paths resolve against the manifest's directory.
    """
    base = os.path.dirname(os.path.abspath(path))
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header[:2]] != ["path", "class_name"]:
            raise ManifestError("manifest must start with a path,class_name header")
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) < 2 or not row[0].strip() or not row[1].strip():
                raise ManifestError(f"manifest line {lineno}: need path and class_name")
            image = row[0].strip()
            if not os.path.isabs(image):
                image = os.path.join(base, image)
            rows.append((image, row[1].strip()))
    if not rows:
        raise ManifestError("manifest lists no images")
    return rows


def _load_tensor(path: str) -> torch.Tensor:
    with Image.open(path) as img:
        rgb = img.convert("RGB")
    return _PREPROCESS(rgb)


def extract_features(job: ExtractionJob) -> ExtractionResult:
    """Export one pooled feature vector per readable image in the job.

    Unreadable images are skipped with a logged warning and listed in
    the sidecar; a job where nothing decodes raises JobError.
    """
    model, width = build_backbone(job.backbone_tag, job.weights_path)
    name_to_id: dict[str, int] = {}
    ids: list = []
    chunks: list = []
    warnings: list = []
    batch: list = []

    def flush():
        if not batch:
            return
        with torch.no_grad():
            out = model(torch.stack(batch))
        chunks.append(out.numpy().astype(np.float32, copy=False))
        batch.clear()

    for path, name in zip(job.image_paths, job.class_names):
        try:
            tensor = _load_tensor(path)
        except Exception as exc:  # any decode failure counts as unreadable
            message = f"skipped unreadable image {path}: {exc}"
            log.warning(message)
            warnings.append(message)
            continue
        if name not in name_to_id:
            name_to_id[name] = len(name_to_id)
        ids.append(name_to_id[name])
        batch.append(tensor)
        if len(batch) == job.batch_size:
            flush()
    flush()

    if not ids:
        raise JobError("no image in the manifest could be decoded")
    features = np.concatenate(chunks, axis=0)
    class_names = {i: n for n, i in name_to_id.items()}
    write_pfv1(
        job.output_path,
        features,
        ids,
        class_names,
        split_tag=job.split_tag,
        provenance=f"pfv-extractor backbone={job.backbone_tag}",
        warnings=warnings,
    )
    return ExtractionResult(
        output_path=job.output_path,
        num_exported=len(ids),
        embedding_width=width,
        class_names=class_names,
        warnings=warnings,
    )
