"""Feature extraction from image folders into PFV1 feature files.

Reads an image manifest (CSV of path and class name), pushes each image
through a frozen convolutional backbone on the CPU, and writes the
pooled penultimate activations as a PFV1 file plus JSON sidecar that
the feature-file toolkit loads directly.
"""

from .backbones import (
    DEFAULT_INIT_SEED,
    backbone_width,
    build_backbone,
    known_backbones,
)
from .errors import ConfigurationError, ExtractorError, JobError, ManifestError
from .extract import (
    CHANNEL_MEAN,
    CHANNEL_STD,
    CROP,
    RESIZE,
    ExtractionJob,
    ExtractionResult,
    extract_features,
    read_image_manifest,
)
from .pfv import FORMAT_VERSION, MAGIC, write_pfv1

__version__ = "0.1.0"

__all__ = [
    "CHANNEL_MEAN",
    "CHANNEL_STD",
    "CROP",
    "DEFAULT_INIT_SEED",
    "FORMAT_VERSION",
    "MAGIC",
    "RESIZE",
    "ConfigurationError",
    "ExtractionJob",
    "ExtractionResult",
    "ExtractorError",
    "JobError",
    "ManifestError",
    "backbone_width",
    "build_backbone",
    "extract_features",
    "known_backbones",
    "read_image_manifest",
    "write_pfv1",
    "__version__",
]
