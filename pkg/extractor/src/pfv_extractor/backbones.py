"""Frozen torchvision backbones keyed by short tags.

Each tag pins an architecture and the width of its global-average-pooled
penultimate representation, which is what the extractor exports.  Weights
come from an explicit state-dict path when one is given; otherwise the
network is initialized from a fixed seed, so repeated runs in the same
environment share one frozen network even where pretrained checkpoints
cannot be downloaded.
"""

from __future__ import annotations

import torch
from torchvision import models

from .errors import ConfigurationError

DEFAULT_INIT_SEED = 0x5EED

_REGISTRY = {
    "resnet50": (models.resnet50, 2048),
    "resnet18": (models.resnet18, 512),
}


def known_backbones() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def backbone_width(tag: str) -> int:
    """Embedding width L for a registered tag."""
    if tag not in _REGISTRY:
        raise ConfigurationError(f"unknown backbone tag {tag!r}")
    return _REGISTRY[tag][1]


def build_backbone(
    tag: str,
    weights_path: str | None = None,
    init_seed: int = DEFAULT_INIT_SEED,
):
    """Construct the tagged network as a frozen feature extractor.

    The classification layer is replaced with identity, so a forward
    pass returns the pooled penultimate activations of shape (B, L).
    ``weights_path`` must hold a full state dict for the architecture.
    """
    if tag not in _REGISTRY:
        raise ConfigurationError(f"unknown backbone tag {tag!r}")
    ctor, width = _REGISTRY[tag]
    torch.manual_seed(init_seed)
    model = ctor(weights=None)
    if weights_path is not None:
        state = torch.load(weights_path, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
    model.fc = torch.nn.Identity()
    model.eval()
    for param in model.parameters():
        param.requires_grad_(False)
    return model, width
